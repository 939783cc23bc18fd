# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled dense kernels; same algorithms and API as ``_pykernels``."""

from libc.math cimport fabs, sqrt, copysign
from libc.stdlib cimport malloc, free

import numpy as np

from .errors import NonConvergence, SingularSystem

NAME = "cython"

cdef double PIVOT_TOL = 1e-13
cdef int MAX_QR_ITERATIONS = 30


cdef int _lu_solve(double* m, double* rhs, Py_ssize_t n, Py_ssize_t nrhs,
                   Py_ssize_t* bad_col) noexcept nogil:
    """Partial-pivot elimination; m is n*n row-major, rhs n*nrhs. 0 on success."""
    cdef Py_ssize_t col, r, c, k, piv
    cdef double scale = 0.0, best, f, inv, s, tmp
    for r in range(n * n):
        if fabs(m[r]) > scale:
            scale = fabs(m[r])
    if scale == 0.0:
        bad_col[0] = 0
        return 1
    for col in range(n):
        piv = col
        best = fabs(m[col * n + col])
        for r in range(col + 1, n):
            if fabs(m[r * n + col]) > best:
                best = fabs(m[r * n + col])
                piv = r
        if best <= PIVOT_TOL * scale:
            bad_col[0] = col
            return 1
        if piv != col:
            for c in range(n):
                tmp = m[col * n + c]
                m[col * n + c] = m[piv * n + c]
                m[piv * n + c] = tmp
            for c in range(nrhs):
                tmp = rhs[col * nrhs + c]
                rhs[col * nrhs + c] = rhs[piv * nrhs + c]
                rhs[piv * nrhs + c] = tmp
        inv = 1.0 / m[col * n + col]
        for r in range(col + 1, n):
            f = m[r * n + col] * inv
            if f != 0.0:
                for c in range(col + 1, n):
                    m[r * n + c] -= f * m[col * n + c]
                m[r * n + col] = 0.0
                for c in range(nrhs):
                    rhs[r * nrhs + c] -= f * rhs[col * nrhs + c]
    for col in range(n - 1, -1, -1):
        for c in range(nrhs):
            s = rhs[col * nrhs + c]
            for k in range(col + 1, n):
                s -= m[col * n + k] * rhs[k * nrhs + c]
            rhs[col * nrhs + c] = s / m[col * n + col]
    return 0


def solve(a, b):
    cdef double[:, ::1] am = np.array(a, dtype=np.float64, order="C", copy=True)
    b = np.asarray(b, dtype=np.float64)
    cdef bint vector = b.ndim == 1
    cdef Py_ssize_t n = am.shape[0]
    cdef double[:, ::1] bm = np.array(b.reshape(n, -1), dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t bad = 0
    cdef int status
    with nogil:
        status = _lu_solve(&am[0, 0], &bm[0, 0], n, bm.shape[1], &bad)
    if status:
        raise SingularSystem(f"pivot below tolerance at column {bad}")
    out = np.asarray(bm)
    return out.ravel() if vector else out


def det(a):
    cdef double[:, ::1] m = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = m.shape[0], col, r, c, piv
    cdef double sign = 1.0, best, f, tmp, d
    with nogil:
        for col in range(n):
            piv = col
            best = fabs(m[col, col])
            for r in range(col + 1, n):
                if fabs(m[r, col]) > best:
                    best = fabs(m[r, col])
                    piv = r
            if best == 0.0:
                sign = 0.0
                break
            if piv != col:
                for c in range(n):
                    tmp = m[col, c]
                    m[col, c] = m[piv, c]
                    m[piv, c] = tmp
                sign = -sign
            for r in range(col + 1, n):
                f = m[r, col] / m[col, col]
                for c in range(col + 1, n):
                    m[r, c] -= f * m[col, c]
        d = sign
        if sign != 0.0:
            for col in range(n):
                d *= m[col, col]
    return d


def lyapunov(a, q):
    """Solve ``a x + x a^T + q = 0`` through the Kronecker-sum system."""
    cdef const double[:, ::1] am = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] qm = np.ascontiguousarray(q, dtype=np.float64)
    cdef Py_ssize_t n = am.shape[0], nn = n * n, i, j, p, r
    cdef double* k = <double*> malloc(nn * nn * sizeof(double))
    out = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] x = out
    cdef Py_ssize_t bad = 0
    cdef int status
    if k == NULL:
        raise MemoryError()
    with nogil:
        for i in range(nn * nn):
            k[i] = 0.0
        # row-major vec: vec(a x) = (a (x) I) vec x, vec(x a^T) = (I (x) a) vec x
        for i in range(n):
            for j in range(n):
                r = i * n + j
                for p in range(n):
                    k[r * nn + p * n + j] += am[i, p]
                    k[r * nn + i * n + p] += am[j, p]
                x[i, j] = -qm[i, j]
        status = _lu_solve(k, &x[0, 0], nn, 1, &bad)
    free(k)
    if status:
        raise SingularSystem(f"pivot below tolerance at column {bad}")
    return out


cdef void _hessenberg(double* a, Py_ssize_t n) noexcept nogil:
    # 1-based access through A(i, j) = a[(i - 1) * n + (j - 1)]
    cdef Py_ssize_t mm, i, j
    cdef double x, y, tmp
    for mm in range(2, n):
        x = 0.0
        i = mm
        for j in range(mm, n + 1):
            if fabs(a[(j - 1) * n + mm - 2]) > fabs(x):
                x = a[(j - 1) * n + mm - 2]
                i = j
        if i != mm:
            for j in range(mm - 1, n + 1):
                tmp = a[(i - 1) * n + j - 1]
                a[(i - 1) * n + j - 1] = a[(mm - 1) * n + j - 1]
                a[(mm - 1) * n + j - 1] = tmp
            for j in range(1, n + 1):
                tmp = a[(j - 1) * n + i - 1]
                a[(j - 1) * n + i - 1] = a[(j - 1) * n + mm - 1]
                a[(j - 1) * n + mm - 1] = tmp
        if x != 0.0:
            for i in range(mm + 1, n + 1):
                y = a[(i - 1) * n + mm - 2]
                if y != 0.0:
                    y /= x
                    a[(i - 1) * n + mm - 2] = y
                    for j in range(mm, n + 1):
                        a[(i - 1) * n + j - 1] -= y * a[(mm - 1) * n + j - 1]
                    for j in range(1, n + 1):
                        a[(j - 1) * n + mm - 1] += y * a[(j - 1) * n + i - 1]
    for i in range(3, n + 1):
        for j in range(1, i - 1):
            a[(i - 1) * n + j - 1] = 0.0


cdef int _hqr(double* a, Py_ssize_t n, double* wr, double* wi) noexcept nogil:
    """Francis double-shift QR on an upper Hessenberg matrix. 0 on success."""
    cdef Py_ssize_t nn, m, l, ll, k, j, i, mmin, its
    cdef double z = 0.0, y = 0.0, x = 0.0, w = 0.0, v, u, t, s, r = 0.0, q = 0.0, p = 0.0, anorm
    anorm = 0.0
    for i in range(1, n + 1):
        for j in range(i - 1 if i > 1 else 1, n + 1):
            anorm += fabs(a[(i - 1) * n + j - 1])
    nn = n
    t = 0.0
    while nn >= 1:
        its = 0
        while True:
            l = 1
            ll = nn
            while ll >= 2:
                s = fabs(a[(ll - 2) * n + ll - 2]) + fabs(a[(ll - 1) * n + ll - 1])
                if s == 0.0:
                    s = anorm
                if fabs(a[(ll - 1) * n + ll - 2]) + s == s:
                    a[(ll - 1) * n + ll - 2] = 0.0
                    l = ll
                    break
                ll -= 1
            x = a[(nn - 1) * n + nn - 1]
            if l == nn:
                wr[nn - 1] = x + t
                wi[nn - 1] = 0.0
                nn -= 1
            else:
                y = a[(nn - 2) * n + nn - 2]
                w = a[(nn - 1) * n + nn - 2] * a[(nn - 2) * n + nn - 1]
                if l == nn - 1:
                    p = 0.5 * (y - x)
                    q = p * p + w
                    z = sqrt(fabs(q))
                    x += t
                    if q >= 0.0:
                        z = p + copysign(z, p)
                        wr[nn - 2] = x + z
                        wr[nn - 1] = x + z
                        if z != 0.0:
                            wr[nn - 1] = x - w / z
                        wi[nn - 2] = 0.0
                        wi[nn - 1] = 0.0
                    else:
                        wr[nn - 2] = x + p
                        wr[nn - 1] = x + p
                        wi[nn - 1] = z
                        wi[nn - 2] = -z
                    nn -= 2
                else:
                    if its == MAX_QR_ITERATIONS:
                        return 1
                    if its == 10 or its == 20:
                        t += x
                        for i in range(1, nn + 1):
                            a[(i - 1) * n + i - 1] -= x
                        s = fabs(a[(nn - 1) * n + nn - 2]) + fabs(a[(nn - 2) * n + nn - 3])
                        x = 0.75 * s
                        y = x
                        w = -0.4375 * s * s
                    its += 1
                    m = nn - 2
                    while m >= l:
                        z = a[(m - 1) * n + m - 1]
                        r = x - z
                        s = y - z
                        p = (r * s - w) / a[m * n + m - 1] + a[(m - 1) * n + m]
                        q = a[m * n + m] - z - r - s
                        r = a[(m + 1) * n + m]
                        s = fabs(p) + fabs(q) + fabs(r)
                        p /= s
                        q /= s
                        r /= s
                        if m == l:
                            break
                        u = fabs(a[(m - 1) * n + m - 2]) * (fabs(q) + fabs(r))
                        v = fabs(p) * (fabs(a[(m - 2) * n + m - 2]) + fabs(z) + fabs(a[m * n + m]))
                        if u + v == v:
                            break
                        m -= 1
                    for i in range(m + 2, nn + 1):
                        a[(i - 1) * n + i - 3] = 0.0
                        if i != m + 2:
                            a[(i - 1) * n + i - 4] = 0.0
                    for k in range(m, nn):
                        if k != m:
                            p = a[(k - 1) * n + k - 2]
                            q = a[k * n + k - 2]
                            r = 0.0
                            if k != nn - 1:
                                r = a[(k + 1) * n + k - 2]
                            x = fabs(p) + fabs(q) + fabs(r)
                            if x != 0.0:
                                p /= x
                                q /= x
                                r /= x
                        s = copysign(sqrt(p * p + q * q + r * r), p)
                        if s != 0.0:
                            if k == m:
                                if l != m:
                                    a[(k - 1) * n + k - 2] = -a[(k - 1) * n + k - 2]
                            else:
                                a[(k - 1) * n + k - 2] = -s * x
                            p += s
                            x = p / s
                            y = q / s
                            z = r / s
                            q /= p
                            r /= p
                            for j in range(k, nn + 1):
                                p = a[(k - 1) * n + j - 1] + q * a[k * n + j - 1]
                                if k != nn - 1:
                                    p += r * a[(k + 1) * n + j - 1]
                                    a[(k + 1) * n + j - 1] -= p * z
                                a[k * n + j - 1] -= p * y
                                a[(k - 1) * n + j - 1] -= p * x
                            mmin = nn if nn < k + 3 else k + 3
                            for i in range(l, mmin + 1):
                                p = x * a[(i - 1) * n + k - 1] + y * a[(i - 1) * n + k]
                                if k != nn - 1:
                                    p += z * a[(i - 1) * n + k + 1]
                                    a[(i - 1) * n + k + 1] -= p * r
                                a[(i - 1) * n + k] -= p * q
                                a[(i - 1) * n + k - 1] -= p
            if not l < nn - 1:
                break
    return 0


def eigvals(a):
    """Real and imaginary parts of all eigenvalues of a real square matrix."""
    cdef double[:, ::1] m = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = m.shape[0]
    wr_arr = np.zeros(n)
    wi_arr = np.zeros(n)
    cdef double[::1] wr = wr_arr
    cdef double[::1] wi = wi_arr
    cdef int status = 0
    if n == 0:
        return wr_arr, wi_arr
    with nogil:
        _hessenberg(&m[0, 0], n)
        status = _hqr(&m[0, 0], n, &wr[0], &wi[0])
    if status:
        raise NonConvergence("QR iteration limit reached")
    return wr_arr, wi_arr


def cholesky_ok(a):
    cdef const double[:, ::1] m = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t n = m.shape[0], i, j, k
    low_arr = np.zeros((n, n))
    cdef double[:, ::1] low = low_arr
    cdef double s, d
    cdef bint ok = True
    with nogil:
        for j in range(n):
            s = m[j, j]
            for k in range(j):
                s -= low[j, k] * low[j, k]
            if not s > 0.0:
                ok = False
                break
            d = sqrt(s)
            low[j, j] = d
            for i in range(j + 1, n):
                s = m[i, j]
                for k in range(j):
                    s -= low[i, k] * low[j, k]
                low[i, j] = s / d
    return ok
