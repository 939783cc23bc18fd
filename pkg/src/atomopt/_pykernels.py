"""Pure-Python implementation of the dense kernels.

Mirrors ``_ckernels.pyx`` line for line so both backends produce the same
floating-point sequence up to compiler contraction. Inputs are float64
numpy arrays; the work happens on nested lists.
"""

import math

import numpy as np

from .errors import NonConvergence, SingularSystem

NAME = "python"

# relative pivot threshold for partial-pivot elimination
PIVOT_TOL = 1e-13
MAX_QR_ITERATIONS = 30


def _lu_solve_inplace(m, rhs, n, nrhs):
    """Gaussian elimination with partial pivoting on list-of-lists ``m``.

    ``rhs`` is overwritten with the solution. Raises SingularSystem.
    """
    scale = 0.0
    for row in m:
        for v in row:
            if abs(v) > scale:
                scale = abs(v)
    if scale == 0.0:
        raise SingularSystem("zero matrix")
    for col in range(n):
        piv = col
        best = abs(m[col][col])
        for r in range(col + 1, n):
            if abs(m[r][col]) > best:
                best = abs(m[r][col])
                piv = r
        if best <= PIVOT_TOL * scale:
            raise SingularSystem(f"pivot {best:.3e} below tolerance at column {col}")
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
        prow = m[col]
        pr = rhs[col]
        inv = 1.0 / prow[col]
        for r in range(col + 1, n):
            row = m[r]
            f = row[col] * inv
            if f != 0.0:
                for c in range(col + 1, n):
                    row[c] -= f * prow[c]
                row[col] = 0.0
                rr = rhs[r]
                for c in range(nrhs):
                    rr[c] -= f * pr[c]
    for col in range(n - 1, -1, -1):
        row = m[col]
        rr = rhs[col]
        for c in range(nrhs):
            s = rr[c]
            for k in range(col + 1, n):
                s -= row[k] * rhs[k][c]
            rr[c] = s / row[col]


def solve(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.shape[0]
    vector = b.ndim == 1
    rhs = b.reshape(n, -1).tolist()
    _lu_solve_inplace(a.tolist(), rhs, n, len(rhs[0]))
    out = np.array(rhs)
    return out.ravel() if vector else out


def det(a):
    m = np.asarray(a, dtype=float).tolist()
    n = len(m)
    sign = 1.0
    for col in range(n):
        piv = col
        best = abs(m[col][col])
        for r in range(col + 1, n):
            if abs(m[r][col]) > best:
                best = abs(m[r][col])
                piv = r
        if best == 0.0:
            return 0.0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        prow = m[col]
        for r in range(col + 1, n):
            row = m[r]
            f = row[col] / prow[col]
            for c in range(col + 1, n):
                row[c] -= f * prow[c]
    d = sign
    for i in range(n):
        d *= m[i][i]
    return d


def lyapunov(a, q):
    """Solve ``a x + x a^T + q = 0`` through the Kronecker-sum system."""
    a = np.asarray(a, dtype=float).tolist()
    q = np.asarray(q, dtype=float).tolist()
    n = len(a)
    nn = n * n
    k = [[0.0] * nn for _ in range(nn)]
    # row-major vec: vec(a x) = (a (x) I) vec x, vec(x a^T) = (I (x) a) vec x
    for i in range(n):
        for j in range(n):
            r = i * n + j
            row = k[r]
            for p in range(n):
                row[p * n + j] += a[i][p]
                row[i * n + p] += a[j][p]
    rhs = [[-q[i][j]] for i in range(n) for j in range(n)]
    _lu_solve_inplace(k, rhs, nn, 1)
    x = np.array([v[0] for v in rhs]).reshape(n, n)
    return x


def _hessenberg(m, n):
    # elimination with pivoting, 1-based indices into padded lists
    for mm in range(2, n):
        x = 0.0
        i = mm
        for j in range(mm, n + 1):
            if abs(m[j][mm - 1]) > abs(x):
                x = m[j][mm - 1]
                i = j
        if i != mm:
            for j in range(mm - 1, n + 1):
                m[i][j], m[mm][j] = m[mm][j], m[i][j]
            for j in range(1, n + 1):
                m[j][i], m[j][mm] = m[j][mm], m[j][i]
        if x != 0.0:
            for i in range(mm + 1, n + 1):
                y = m[i][mm - 1]
                if y != 0.0:
                    y /= x
                    m[i][mm - 1] = y
                    for j in range(mm, n + 1):
                        m[i][j] -= y * m[mm][j]
                    for j in range(1, n + 1):
                        m[j][mm] += y * m[j][i]
    for i in range(3, n + 1):
        for j in range(1, i - 1):
            m[i][j] = 0.0


def _hqr(a, n, wr, wi):
    anorm = 0.0
    for i in range(1, n + 1):
        for j in range(max(i - 1, 1), n + 1):
            anorm += abs(a[i][j])
    nn = n
    t = 0.0
    x = y = z = w = p = q = r = 0.0
    while nn >= 1:
        its = 0
        while True:
            l = 1
            for ll in range(nn, 1, -1):
                s = abs(a[ll - 1][ll - 1]) + abs(a[ll][ll])
                if s == 0.0:
                    s = anorm
                if abs(a[ll][ll - 1]) + s == s:
                    a[ll][ll - 1] = 0.0
                    l = ll
                    break
            x = a[nn][nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
            else:
                y = a[nn - 1][nn - 1]
                w = a[nn][nn - 1] * a[nn - 1][nn]
                if l == nn - 1:
                    p = 0.5 * (y - x)
                    q = p * p + w
                    z = math.sqrt(abs(q))
                    x += t
                    if q >= 0.0:
                        z = p + math.copysign(z, p)
                        wr[nn - 1] = wr[nn] = x + z
                        if z != 0.0:
                            wr[nn] = x - w / z
                        wi[nn - 1] = wi[nn] = 0.0
                    else:
                        wr[nn - 1] = wr[nn] = x + p
                        wi[nn] = z
                        wi[nn - 1] = -z
                    nn -= 2
                else:
                    if its == MAX_QR_ITERATIONS:
                        raise NonConvergence("QR iteration limit reached")
                    if its == 10 or its == 20:
                        # exceptional shift
                        t += x
                        for i in range(1, nn + 1):
                            a[i][i] -= x
                        s = abs(a[nn][nn - 1]) + abs(a[nn - 1][nn - 2])
                        y = x = 0.75 * s
                        w = -0.4375 * s * s
                    its += 1
                    m = nn - 2
                    while m >= l:
                        z = a[m][m]
                        r = x - z
                        s = y - z
                        p = (r * s - w) / a[m + 1][m] + a[m][m + 1]
                        q = a[m + 1][m + 1] - z - r - s
                        r = a[m + 2][m + 1]
                        s = abs(p) + abs(q) + abs(r)
                        p /= s
                        q /= s
                        r /= s
                        if m == l:
                            break
                        u = abs(a[m][m - 1]) * (abs(q) + abs(r))
                        v = abs(p) * (abs(a[m - 1][m - 1]) + abs(z) + abs(a[m + 1][m + 1]))
                        if u + v == v:
                            break
                        m -= 1
                    for i in range(m + 2, nn + 1):
                        a[i][i - 2] = 0.0
                        if i != m + 2:
                            a[i][i - 3] = 0.0
                    for k in range(m, nn):
                        if k != m:
                            p = a[k][k - 1]
                            q = a[k + 1][k - 1]
                            r = 0.0
                            if k != nn - 1:
                                r = a[k + 2][k - 1]
                            x = abs(p) + abs(q) + abs(r)
                            if x != 0.0:
                                p /= x
                                q /= x
                                r /= x
                        s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                        if s != 0.0:
                            if k == m:
                                if l != m:
                                    a[k][k - 1] = -a[k][k - 1]
                            else:
                                a[k][k - 1] = -s * x
                            p += s
                            x = p / s
                            y = q / s
                            z = r / s
                            q /= p
                            r /= p
                            for j in range(k, nn + 1):
                                p = a[k][j] + q * a[k + 1][j]
                                if k != nn - 1:
                                    p += r * a[k + 2][j]
                                    a[k + 2][j] -= p * z
                                a[k + 1][j] -= p * y
                                a[k][j] -= p * x
                            mmin = nn if nn < k + 3 else k + 3
                            for i in range(l, mmin + 1):
                                p = x * a[i][k] + y * a[i][k + 1]
                                if k != nn - 1:
                                    p += z * a[i][k + 2]
                                    a[i][k + 2] -= p * r
                                a[i][k + 1] -= p * q
                                a[i][k] -= p
            if not l < nn - 1:
                break


def eigvals(a):
    """Real and imaginary parts of all eigenvalues of a real square matrix."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    m = [[0.0] * (n + 1)] + [[0.0] + row for row in a.tolist()]
    wr = [0.0] * (n + 1)
    wi = [0.0] * (n + 1)
    _hessenberg(m, n)
    _hqr(m, n, wr, wi)
    return np.array(wr[1:]), np.array(wi[1:])


def cholesky_ok(a):
    m = np.asarray(a, dtype=float).tolist()
    n = len(m)
    low = [[0.0] * n for _ in range(n)]
    for j in range(n):
        s = m[j][j]
        for k in range(j):
            s -= low[j][k] * low[j][k]
        if not s > 0.0:
            return False
        d = math.sqrt(s)
        low[j][j] = d
        for i in range(j + 1, n):
            s = m[i][j]
            for k in range(j):
                s -= low[i][k] * low[j][k]
            low[i][j] = s / d
    return True
