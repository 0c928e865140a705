import sys

from metricops.cli import main

sys.exit(main())
