"""Pure-Python eigen kernels, used when the compiled extension is unavailable.

Both kernels mirror ``_kernels.pyx`` line for line; the Python versions
vectorise the row/column updates with numpy slices instead of C loops.
Neither raises: convergence is reported through the returned flag so that
the caller decides which exception to surface.
"""

import numpy as np

_EPS = np.finfo(float).eps


def _off_norm(a):
    mask = ~np.eye(a.shape[0], dtype=bool)
    return np.sqrt(np.sum(np.abs(a[mask]) ** 2))


def jacobi_hermitian(a, tol=1e-14, max_sweeps=100):
    """Cyclic complex Jacobi eigensolver for a Hermitian matrix.

    Returns ``(w, v, sweeps, converged)`` with ``w`` ascending and the
    columns of ``v`` the matching orthonormal eigenvectors.
    """
    a = np.array(a, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = np.sqrt(np.sum(np.abs(a) ** 2))
    if scale == 0.0:
        return np.zeros(n), v, 0, True

    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        off = _off_norm(a)
        if off <= tol * scale:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= _EPS * _EPS * scale:
                    continue
                e = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                sign = 1.0 if tau >= 0.0 else -1.0
                t = sign / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                se = s * e
                sec = s * np.conj(e)

                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - sec * colq
                a[:, q] = se * colp + c * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - se * rowq
                a[q, :] = sec * rowp + c * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * mag
                a[q, q] = aqq + t * mag

                colp = v[:, p].copy()
                colq = v[:, q].copy()
                v[:, p] = c * colp - sec * colq
                v[:, q] = se * colp + c * colq
    else:
        off = _off_norm(a)
        converged = off <= tol * scale

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order], sweeps, converged


def _hessenberg(h):
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1 :, k].copy()
        alpha = np.sqrt(np.sum(np.abs(x) ** 2))
        if alpha == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0
        x[0] += phase * alpha
        x /= np.sqrt(np.sum(np.abs(x) ** 2))
        h[k + 1 :, :] -= 2.0 * np.outer(x, x.conj() @ h[k + 1 :, :])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ x, x.conj())
        h[k + 2 :, k] = 0.0
    return h


def _eig2(a, b, c, d):
    half_tr = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c + 0j)
    return half_tr + disc, half_tr - disc


def hessenberg_qr_eigvals(a, max_iter=60):
    """Eigenvalues of a general complex matrix by Hessenberg reduction and
    single-shift QR with Wilkinson shifts.

    Returns ``(eigenvalues, iterations, converged)``; eigenvalues come out
    in deflation order, unsorted.
    """
    h = _hessenberg(np.array(a, dtype=np.complex128))
    n = h.shape[0]
    eigs = np.zeros(n, dtype=np.complex128)
    hnorm = np.sqrt(np.sum(np.abs(h) ** 2))
    hi = n - 1
    its = 0
    total = 0
    while hi >= 0:
        if hi == 0:
            eigs[0] = h[0, 0]
            break
        l = hi
        while l > 0:
            tst = abs(h[l, l]) + abs(h[l - 1, l - 1])
            if tst == 0.0:
                tst = hnorm
            if abs(h[l, l - 1]) <= _EPS * tst:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            eigs[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        if l == hi - 1:
            eigs[hi - 1], eigs[hi] = _eig2(h[l, l], h[l, hi], h[hi, l], h[hi, hi])
            hi -= 2
            its = 0
            continue

        its += 1
        total += 1
        if its > max_iter:
            return eigs, total, False
        if its % 10 == 0:
            mu = h[hi, hi] + abs(h[hi, hi - 1])
        else:
            m1, m2 = _eig2(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
            mu = m1 if abs(m1 - h[hi, hi]) <= abs(m2 - h[hi, hi]) else m2

        idx = np.arange(l, hi + 1)
        h[idx, idx] -= mu
        rots = []
        for k in range(l, hi):
            x = h[k, k]
            y = h[k + 1, k]
            r = np.hypot(abs(x), abs(y))
            if r == 0.0:
                c, s = 1.0, 0.0
            elif x == 0:
                c, s = 0.0, np.conj(y) / abs(y)
            else:
                c = abs(x) / r
                s = (x / abs(x)) * np.conj(y) / r
            rowk = h[k, k : hi + 1].copy()
            rowk1 = h[k + 1, k : hi + 1].copy()
            h[k, k : hi + 1] = c * rowk + s * rowk1
            h[k + 1, k : hi + 1] = -np.conj(s) * rowk + c * rowk1
            rots.append((c, s))
        for k, (c, s) in zip(range(l, hi), rots):
            top = min(k + 2, hi) + 1
            colk = h[l:top, k].copy()
            colk1 = h[l:top, k + 1].copy()
            h[l:top, k] = c * colk + np.conj(s) * colk1
            h[l:top, k + 1] = -s * colk + c * colk1
        h[idx, idx] += mu
    return eigs, total, True
