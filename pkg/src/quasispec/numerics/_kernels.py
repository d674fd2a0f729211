"""Compiled eigenvalue kernels.

All kernels operate on plain numpy arrays and release the GIL so that
independent solves can run on a thread pool.
"""

import numpy as np
from numba import njit

QL_TOL = 1e-14
QL_MAX_SWEEPS = 50


@njit(cache=True, nogil=True)
def householder_tridiagonal(a):
    """Reduce a dense Hermitian matrix (overwritten) to Hermitian tridiagonal form.

    Returns the real diagonal and the complex subdiagonal.
    """
    n = a.shape[0]
    d = np.empty(n)
    e = np.zeros(max(n - 1, 0), dtype=np.complex128)
    v = np.empty(n, dtype=np.complex128)
    w = np.empty(n, dtype=np.complex128)
    for k in range(n - 2):
        m = n - k - 1
        norm2 = 0.0
        for i in range(m):
            z = a[k + 1 + i, k]
            norm2 += z.real * z.real + z.imag * z.imag
        if norm2 == 0.0:
            e[k] = 0.0
            continue
        xnorm = np.sqrt(norm2)
        x0 = a[k + 1, k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        alpha = -phase * xnorm
        for i in range(m):
            v[i] = a[k + 1 + i, k]
        v[0] -= alpha
        vnorm2 = 0.0
        for i in range(m):
            vnorm2 += v[i].real * v[i].real + v[i].imag * v[i].imag
        vnorm = np.sqrt(vnorm2)
        for i in range(m):
            v[i] /= vnorm
        # w = A22 v, gamma = v* w (real for Hermitian A22)
        gamma = 0.0
        for i in range(m):
            acc = 0.0 + 0.0j
            for j in range(m):
                acc += a[k + 1 + i, k + 1 + j] * v[j]
            w[i] = acc
        for i in range(m):
            gamma += (np.conj(v[i]) * w[i]).real
        for i in range(m):
            w[i] -= gamma * v[i]
        for i in range(m):
            vi = v[i]
            wi = w[i]
            for j in range(m):
                a[k + 1 + i, k + 1 + j] -= 2.0 * (vi * np.conj(w[j]) + wi * np.conj(v[j]))
        e[k] = alpha
    for i in range(n):
        d[i] = a[i, i].real
    if n >= 2:
        e[n - 2] = a[n - 1, n - 2]
    return d, e


@njit(cache=True, nogil=True)
def _rotate(a, r, s, col, lo, hi):
    """Unitary similarity on rows/cols (r, s) that zeroes a[s, col]."""
    x = a[r, col]
    y = a[s, col]
    rho = np.sqrt(abs(x) ** 2 + abs(y) ** 2)
    if rho == 0.0:
        return
    cx = np.conj(x) / rho
    cy = np.conj(y) / rho
    mx = x / rho
    my = y / rho
    for k in range(lo, hi):
        ar = a[r, k]
        as_ = a[s, k]
        a[r, k] = cx * ar + cy * as_
        a[s, k] = -my * ar + mx * as_
    for k in range(lo, hi):
        ar = a[k, r]
        as_ = a[k, s]
        a[k, r] = mx * ar + my * as_
        a[k, s] = -np.conj(my) * ar + np.conj(mx) * as_
    a[s, col] = 0.0
    a[col, s] = 0.0


@njit(cache=True, nogil=True)
def band_tridiagonal(a, b):
    """Givens band reduction of a Hermitian matrix of half-bandwidth b (overwritten).

    Cost is O(n^2 b), against O(n^3) for the dense Householder route.
    """
    n = a.shape[0]
    for j in range(n - 2):
        top = min(b, n - 1 - j)
        for dd in range(top, 1, -1):
            s = j + dd
            r = s - 1
            col = j
            while True:
                if a[s, col] != 0.0:
                    _rotate(a, r, s, col, col, min(n, s + b + 2))
                nr = s + b
                if nr >= n:
                    break
                if a[nr, r] == 0.0:
                    break
                col = r
                s = nr
                r = nr - 1
    d = np.empty(n)
    e = np.zeros(max(n - 1, 0), dtype=np.complex128)
    for i in range(n):
        d[i] = a[i, i].real
    for i in range(n - 1):
        e[i] = a[i + 1, i]
    return d, e


@njit(cache=True, nogil=True)
def _rotate_packed(ab, r, s, col):
    """Packed-storage twin of `_rotate`: ab[k, j] holds a[j + k, j] of a
    Hermitian matrix, and only the lower triangle is touched."""
    n = ab.shape[1]
    w = ab.shape[0]
    x = ab[r - col, col]
    y = ab[s - col, col]
    rho = np.sqrt(abs(x) ** 2 + abs(y) ** 2)
    if rho == 0.0:
        return
    mx = x / rho
    my = y / rho
    cx = np.conj(mx)
    cy = np.conj(my)
    # rows r, s left of the 2 x 2 block
    for k in range(max(0, s - w + 1), r):
        ar = ab[r - k, k]
        as_ = ab[s - k, k]
        ab[r - k, k] = cx * ar + cy * as_
        ab[s - k, k] = -my * ar + mx * as_
    # the block itself: B' = U B U^H with U = [[cx, cy], [-my, mx]]
    arr = ab[0, r]
    asr = ab[1, r]
    ass = ab[0, s]
    t00 = cx * arr + cy * asr
    t01 = cx * np.conj(asr) + cy * ass
    t10 = -my * arr + mx * asr
    t11 = -my * np.conj(asr) + mx * ass
    ab[0, r] = (t00 * mx + t01 * my).real
    ab[1, r] = t10 * mx + t11 * my
    ab[0, s] = (-t10 * np.conj(my) + t11 * np.conj(mx)).real
    # columns r, s below the block
    for i in range(s + 1, min(n, r + w)):
        ar = ab[i - r, r]
        as_ = ab[i - s, s]
        ab[i - r, r] = mx * ar + my * as_
        ab[i - s, s] = -np.conj(my) * ar + np.conj(mx) * as_
    ab[s - col, col] = 0.0


@njit(cache=True, nogil=True)
def band_tridiagonal_packed(ab, b):
    """Givens band reduction in packed lower storage (overwritten).

    `ab` has b + 3 rows: the band, the bulge created by each rotation and
    one guard row. Memory is O(n b) instead of O(n^2).
    """
    n = ab.shape[1]
    for j in range(n - 2):
        top = min(b, n - 1 - j)
        for dd in range(top, 1, -1):
            s = j + dd
            r = s - 1
            col = j
            while True:
                if ab[s - col, col] != 0.0:
                    _rotate_packed(ab, r, s, col)
                nr = s + b
                if nr >= n:
                    break
                if ab[nr - r, r] == 0.0:
                    break
                col = r
                s = nr
                r = nr - 1
    d = np.empty(n)
    e = np.zeros(max(n - 1, 0), dtype=np.complex128)
    for i in range(n):
        d[i] = ab[0, i].real
    for i in range(n - 1):
        e[i] = ab[1, i]
    return d, e


@njit(cache=True, nogil=True)
def tql_eigenvalues(d, e):
    """Implicit-shift QL on a real symmetric tridiagonal matrix.

    `d` (length n) and `e` (length n, e[i] couples i and i+1, e[n-1] unused)
    are overwritten; returns the number of the first eigenvalue that failed to
    converge, or -1 on success.
    """
    n = d.shape[0]
    if n == 0:
        return -1
    e[n - 1] = 0.0
    anorm = 0.0
    for i in range(n):
        anorm = max(anorm, abs(d[i]) + abs(e[i]))
    floor = 1e-18 * anorm
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= QL_TOL * dd or abs(e[m]) <= floor:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > QL_MAX_SWEEPS:
                return l
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                bb = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * bb
                p = s * r
                d[i + 1] = g + p
                g = c * r - bb
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


@njit(cache=True, nogil=True)
def sturm_count(d, e2, sigma, pivmin):
    """Number of eigenvalues strictly below sigma (e2 holds squared off-diagonals)."""
    n = d.shape[0]
    count = 0
    q = d[0] - sigma
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, n):
        q = d[i] - sigma - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def bisect_window(d, e2, lo, hi, pivmin, abstol):
    """All eigenvalues in [lo, hi) of a symmetric tridiagonal matrix, by bisection."""
    c_lo = sturm_count(d, e2, lo, pivmin)
    c_hi = sturm_count(d, e2, hi, pivmin)
    k = c_hi - c_lo
    out = np.empty(k)
    left = np.full(k, lo)
    right = np.full(k, hi)
    for idx in range(k):
        target = c_lo + idx
        a = left[idx]
        b = right[idx]
        while b - a > abstol + 4e-16 * max(abs(a), abs(b)):
            mid = 0.5 * (a + b)
            c = sturm_count(d, e2, mid, pivmin)
            # every count tightens the brackets of the remaining eigenvalues
            for j in range(idx, k):
                if c > c_lo + j:
                    if mid < right[j]:
                        right[j] = mid
                elif mid > left[j]:
                    left[j] = mid
            if c > target:
                b = mid
            else:
                a = mid
        out[idx] = 0.5 * (a + b)
    return out
