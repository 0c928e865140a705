# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled eigen kernels. Same algorithms and return conventions as
``_kernels_py``; see that module for the reference formulation."""

import numpy as np

from libc.math cimport sqrt, hypot

ctypedef double complex cplx

cdef double _EPS = np.finfo(float).eps


cdef inline double cabs_(cplx z) noexcept nogil:
    return hypot(z.real, z.imag)


cdef inline cplx conj_(cplx z) noexcept nogil:
    return z.conjugate()


cdef double off_norm(cplx[:, ::1] a) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], i, j
    cdef double acc = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
    return sqrt(acc)


def jacobi_hermitian(a_in, double tol=1e-14, int max_sweeps=100):
    arr = np.array(a_in, dtype=np.complex128, order="C")
    cdef cplx[:, ::1] a = arr
    cdef Py_ssize_t n = a.shape[0]
    v_arr = np.eye(n, dtype=np.complex128)
    cdef cplx[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, k
    cdef int sweeps = 0
    cdef bint converged = False
    cdef double scale = 0.0, off, mag, app, aqq, tau, t, c, s
    cdef cplx apq, e, se, sec, xp, xq

    for p in range(n):
        for q in range(n):
            scale += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
    scale = sqrt(scale)
    if scale == 0.0:
        return np.zeros(n), v_arr, 0, True

    with nogil:
        for sweeps in range(1, max_sweeps + 1):
            off = off_norm(a)
            if off <= tol * scale:
                converged = True
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    mag = cabs_(apq)
                    if mag <= _EPS * _EPS * scale:
                        continue
                    e = apq / mag
                    app = a[p, p].real
                    aqq = a[q, q].real
                    tau = (aqq - app) / (2.0 * mag)
                    if tau >= 0.0:
                        t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    se = s * e
                    sec = s * conj_(e)
                    for k in range(n):
                        xp = a[k, p]
                        xq = a[k, q]
                        a[k, p] = c * xp - sec * xq
                        a[k, q] = se * xp + c * xq
                    for k in range(n):
                        xp = a[p, k]
                        xq = a[q, k]
                        a[p, k] = c * xp - se * xq
                        a[q, k] = sec * xp + c * xq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    a[p, p] = app - t * mag
                    a[q, q] = aqq + t * mag
                    for k in range(n):
                        xp = v[k, p]
                        xq = v[k, q]
                        v[k, p] = c * xp - sec * xq
                        v[k, q] = se * xp + c * xq
        else:
            converged = off_norm(a) <= tol * scale

    w = np.diag(arr).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v_arr[:, order], sweeps, bool(converged)


cdef void hessenberg_inplace(cplx[:, ::1] h, cplx[::1] x) noexcept nogil:
    cdef Py_ssize_t n = h.shape[0], k, i, j
    cdef double alpha, nrm
    cdef cplx phase, acc
    for k in range(n - 2):
        alpha = 0.0
        for i in range(k + 1, n):
            x[i] = h[i, k]
            alpha += x[i].real * x[i].real + x[i].imag * x[i].imag
        alpha = sqrt(alpha)
        if alpha == 0.0:
            continue
        if cabs_(x[k + 1]) != 0.0:
            phase = x[k + 1] / cabs_(x[k + 1])
        else:
            phase = 1.0
        x[k + 1] = x[k + 1] + phase * alpha
        nrm = 0.0
        for i in range(k + 1, n):
            nrm += x[i].real * x[i].real + x[i].imag * x[i].imag
        nrm = sqrt(nrm)
        for i in range(k + 1, n):
            x[i] = x[i] / nrm
        # h[k+1:, :] -= 2 x (x^* h[k+1:, :])
        for j in range(n):
            acc = 0.0
            for i in range(k + 1, n):
                acc = acc + conj_(x[i]) * h[i, j]
            for i in range(k + 1, n):
                h[i, j] = h[i, j] - 2.0 * x[i] * acc
        # h[:, k+1:] -= 2 (h[:, k+1:] x) x^*
        for i in range(n):
            acc = 0.0
            for j in range(k + 1, n):
                acc = acc + h[i, j] * x[j]
            for j in range(k + 1, n):
                h[i, j] = h[i, j] - 2.0 * acc * conj_(x[j])
        for i in range(k + 2, n):
            h[i, k] = 0.0


cdef inline void eig2(cplx a, cplx b, cplx c, cplx d, cplx* e1, cplx* e2) noexcept nogil:
    cdef cplx half_tr = 0.5 * (a + d)
    cdef cplx disc = csqrt_(0.25 * (a - d) * (a - d) + b * c)
    e1[0] = half_tr + disc
    e2[0] = half_tr - disc


cdef inline cplx csqrt_(cplx z) noexcept nogil:
    # principal square root, matching numpy.sqrt on complex input
    cdef double r = cabs_(z)
    cdef double re, im
    cdef cplx out
    if r == 0.0:
        return 0.0
    re = sqrt(0.5 * (r + z.real))
    im = sqrt(0.5 * (r - z.real))
    if z.imag < 0.0:
        im = -im
    out = re + 1j * im
    return out


def hessenberg_qr_eigvals(a_in, int max_iter=60):
    arr = np.array(a_in, dtype=np.complex128, order="C")
    cdef cplx[:, ::1] h = arr
    cdef Py_ssize_t n = h.shape[0]
    work = np.zeros(n, dtype=np.complex128)
    cdef cplx[::1] x = work
    eig_arr = np.zeros(n, dtype=np.complex128)
    cdef cplx[::1] eigs = eig_arr
    cs_arr = np.zeros(n, dtype=np.float64)
    sn_arr = np.zeros(n, dtype=np.complex128)
    cdef double[::1] cs = cs_arr
    cdef cplx[::1] sn = sn_arr
    cdef Py_ssize_t hi, l, k, i, top
    cdef int its = 0, total = 0
    cdef bint converged = True
    cdef double hnorm = 0.0, tst, r, c
    cdef cplx mu, m1, m2, xv, yv, s, u, w

    with nogil:
        hessenberg_inplace(h, x)
        for i in range(n):
            for k in range(n):
                hnorm += h[i, k].real * h[i, k].real + h[i, k].imag * h[i, k].imag
        hnorm = sqrt(hnorm)
        hi = n - 1
        while hi >= 0:
            if hi == 0:
                eigs[0] = h[0, 0]
                break
            l = hi
            while l > 0:
                tst = cabs_(h[l, l]) + cabs_(h[l - 1, l - 1])
                if tst == 0.0:
                    tst = hnorm
                if cabs_(h[l, l - 1]) <= _EPS * tst:
                    h[l, l - 1] = 0.0
                    break
                l -= 1
            if l == hi:
                eigs[hi] = h[hi, hi]
                hi -= 1
                its = 0
                continue
            if l == hi - 1:
                eig2(h[l, l], h[l, hi], h[hi, l], h[hi, hi], &eigs[hi - 1], &eigs[hi])
                hi -= 2
                its = 0
                continue

            its += 1
            total += 1
            if its > max_iter:
                converged = False
                break
            if its % 10 == 0:
                mu = h[hi, hi] + cabs_(h[hi, hi - 1])
            else:
                eig2(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi], &m1, &m2)
                if cabs_(m1 - h[hi, hi]) <= cabs_(m2 - h[hi, hi]):
                    mu = m1
                else:
                    mu = m2

            for i in range(l, hi + 1):
                h[i, i] = h[i, i] - mu
            for k in range(l, hi):
                xv = h[k, k]
                yv = h[k + 1, k]
                r = hypot(cabs_(xv), cabs_(yv))
                if r == 0.0:
                    c = 1.0
                    s = 0.0
                elif cabs_(xv) == 0.0:
                    c = 0.0
                    s = conj_(yv) / cabs_(yv)
                else:
                    c = cabs_(xv) / r
                    s = (xv / cabs_(xv)) * conj_(yv) / r
                cs[k] = c
                sn[k] = s
                for i in range(k, hi + 1):
                    u = h[k, i]
                    w = h[k + 1, i]
                    h[k, i] = c * u + s * w
                    h[k + 1, i] = -conj_(s) * u + c * w
            for k in range(l, hi):
                c = cs[k]
                s = sn[k]
                top = k + 2 if k + 2 < hi else hi
                for i in range(l, top + 1):
                    u = h[i, k]
                    w = h[i, k + 1]
                    h[i, k] = c * u + conj_(s) * w
                    h[i, k + 1] = -s * u + c * w
            for i in range(l, hi + 1):
                h[i, i] = h[i, i] + mu
    return eig_arr, total, bool(converged)
