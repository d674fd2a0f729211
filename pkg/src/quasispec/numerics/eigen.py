"""Hermitian eigensolvers built on the compiled kernels.

Dense matrices go through Householder tridiagonalisation; matrices that are
banded after a reverse Cuthill-McKee reordering (Bloch supercells, lifted
finite-difference operators) go through Givens band reduction. Either way the
tridiagonal stage is a phase gauge to real symmetric form followed by
implicit-shift QL, or Sturm bisection when only a window is wanted.
"""

import numpy as np
from scipy.linalg import solve_banded
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import reverse_cuthill_mckee

from ..errors import DimensionZero, IterationLimit, NonHermitianInput, NonPositiveWeight
from . import _kernels

HERMITIAN_TOL = 1e-12


def check_hermitian(m, tol=HERMITIAN_TOL):
    """Return `m` as a complex square array, or raise if it is not Hermitian."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonHermitianInput(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] == 0:
        raise DimensionZero("matrix has dimension 0")
    m = m.astype(np.complex128, copy=False)
    asym = np.max(np.abs(m - m.conj().T))
    if asym > tol:
        raise NonHermitianInput(f"max |m - m^H| = {asym:.3e} exceeds {tol:.0e}")
    return m


def bandwidth(m):
    rows, cols = np.nonzero(m)
    if rows.size == 0:
        return 0
    return int(np.max(np.abs(rows - cols)))


def _band_ordering(m):
    pattern = csr_matrix((np.abs(m) > 0).astype(np.int8))
    perm = reverse_cuthill_mckee(pattern, symmetric_mode=True)
    return np.asarray(perm)


def _gauge_real(d, e):
    """Real symmetric tridiagonal with the same spectrum as (d, complex e)."""
    n = d.shape[0]
    off = np.zeros(n)
    off[: n - 1] = np.abs(e)
    return np.array(d, dtype=float), off


def tridiagonal_form(m):
    """Unitarily reduce a Hermitian matrix to real symmetric tridiagonal (d, e).

    `e` has length n - 1.
    """
    m = check_hermitian(m)
    n = m.shape[0]
    if n <= 2:
        d, e = _kernels.householder_tridiagonal(m.copy())
    else:
        b = bandwidth(m)
        if b > 1 and 8 * b >= n and n >= 64:
            perm = _band_ordering(m)
            mp = m[np.ix_(perm, perm)]
            bp = bandwidth(mp)
            if 8 * bp < n:
                m, b = mp, bp
        if b <= 1:
            d = m.diagonal().real.copy()
            e = np.diagonal(m, -1).copy()
        elif 8 * b < n:
            d, e = _kernels.band_tridiagonal(np.ascontiguousarray(m).copy(), b)
        else:
            d, e = _kernels.householder_tridiagonal(np.ascontiguousarray(m).copy())
    dd, ee = _gauge_real(d, e)
    return dd, ee[: n - 1]


def tridiagonal_eigenvalues(d, e, window=None, abstol=0.0):
    """Eigenvalues of the real symmetric tridiagonal matrix with diagonal `d`
    and off-diagonal `e` (length n - 1), sorted ascending.

    With `window=(lo, hi)` only the eigenvalues in [lo, hi) are computed, by
    Sturm bisection.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = d.shape[0]
    if n == 0:
        raise DimensionZero("matrix has dimension 0")
    if window is not None:
        lo, hi = window
        e2 = e * e
        scale = max(np.max(np.abs(d)), np.max(np.abs(e)) if e.size else 0.0, 1e-300)
        pivmin = max(np.max(e2) if e2.size else 0.0, 1.0) * 1e-300
        tol = abstol if abstol > 0 else 2e-16 * scale
        return _kernels.bisect_window(d, e2, float(lo), float(hi), pivmin, tol)
    dd = d.copy()
    ee = np.zeros(n)
    ee[: n - 1] = e
    failed = _kernels.tql_eigenvalues(dd, ee)
    if failed >= 0:
        raise IterationLimit(f"QL did not converge for eigenvalue {failed} within "
                             f"{_kernels.QL_MAX_SWEEPS} sweeps")
    return np.sort(dd)


def hermitian_eigenvalues(m, window=None):
    """All eigenvalues of a Hermitian matrix, real and ascending.

    >>> hermitian_eigenvalues([[0, 1], [1, 0]])
    array([-1.,  1.])
    """
    d, e = tridiagonal_form(m)
    return tridiagonal_eigenvalues(d, e, window=window)


def banded_hermitian_eigenvalues(ab, window=None):
    """Eigenvalues of a Hermitian band matrix given in lower storage,
    ab[k, j] = a[j + k, j] for k = 0..b."""
    ab = np.asarray(ab)
    if ab.ndim != 2 or ab.shape[1] == 0:
        raise DimensionZero("band storage must be a nonempty (b + 1, n) array")
    if np.any(np.abs(ab[0].imag) > HERMITIAN_TOL * max(1.0, np.abs(ab[0]).max())):
        raise NonHermitianInput("diagonal of a Hermitian matrix must be real")
    b = ab.shape[0] - 1
    n = ab.shape[1]
    if b <= 1:
        d = ab[0].real.astype(float)
        e = ab[1, : n - 1].copy() if b == 1 else np.zeros(n - 1, dtype=complex)
    else:
        work = np.zeros((b + 3, n), dtype=np.complex128)
        work[: b + 1] = ab
        d, e = _kernels.band_tridiagonal_packed(work, b)
    dd, ee = _gauge_real(d, e)
    return tridiagonal_eigenvalues(dd, ee[: n - 1], window=window)


def cyclic_order(n):
    """Position of each index in the interleaved order 0, n-1, 1, n-2, ...,
    under which a cyclic tridiagonal matrix has half-bandwidth 2."""
    i = np.arange(n)
    return np.where(i < (n + 1) // 2, 2 * i, 2 * (n - 1 - i) + 1)


def cyclic_tridiagonal_eigenvalues(d, off, corner, weight=None, window=None):
    """Eigenvalues of the Hermitian matrix with diagonal `d`, a[i+1, i] = off[i]
    and a[n-1, 0] = corner (plus the conjugates), optionally as the pencil
    with diag(weight). Bloch supercells have exactly this shape.
    """
    d = np.asarray(d, dtype=float)
    off = np.asarray(off, dtype=np.complex128)
    n = d.size
    if n < 3:
        raise DimensionZero("cyclic tridiagonal matrices need n >= 3")
    if off.shape != (n - 1,):
        raise NonHermitianInput(f"off-diagonal must have length {n - 1}")
    r = np.ones(n) if weight is None else 1.0 / np.sqrt(_check_weights(weight, n))
    pos = cyclic_order(n)
    ab = np.zeros((3, n), dtype=np.complex128)
    ab[0, pos] = d * r * r
    rows = np.append(np.arange(1, n), n - 1)
    cols = np.append(np.arange(n - 1), 0)
    vals = np.append(off, corner) * r[rows] * r[cols]
    pr, pc = pos[rows], pos[cols]
    # store every entry below the diagonal of the permuted matrix
    swap = pr < pc
    lo_r = np.where(swap, pc, pr)
    lo_c = np.where(swap, pr, pc)
    vals = np.where(swap, np.conj(vals), vals)
    np.add.at(ab, (lo_r - lo_c, lo_c), vals)
    return banded_hermitian_eigenvalues(ab, window=window)


def _check_weights(b_diag, n):
    b = np.asarray(b_diag, dtype=float)
    if b.shape != (n,):
        raise NonPositiveWeight(f"weight vector must have length {n}, got {b.shape}")
    if np.any(b <= 0) or not np.all(np.isfinite(b)):
        raise NonPositiveWeight("weights must be strictly positive")
    return b


def symmetric_reduction(a, b_diag):
    """diag(b)^{-1/2} a diag(b)^{-1/2}; same spectrum as the pencil (a, diag(b))."""
    a = check_hermitian(a)
    b = _check_weights(b_diag, a.shape[0])
    r = 1.0 / np.sqrt(b)
    return a * r[:, None] * r[None, :]


def generalized_hermitian_eigenvalues(a, b_diag, window=None):
    """Eigenvalues of a v = lambda diag(b) v, sorted ascending."""
    return hermitian_eigenvalues(symmetric_reduction(a, b_diag), window=window)


def tridiagonal_eigenvectors(d, e, eigenvalues, iterations=3):
    """Unit eigenvectors of a real symmetric tridiagonal matrix by inverse iteration.

    Returns an array of shape (n, len(eigenvalues)).
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = d.shape[0]
    scale = max(np.max(np.abs(d)), 1.0)
    ab = np.zeros((3, n))
    ab[0, 1:] = e
    ab[2, :-1] = e
    rng = np.random.default_rng(12345)
    start = rng.uniform(0.5, 1.5, n)
    out = np.empty((n, len(eigenvalues)))
    for k, lam in enumerate(eigenvalues):
        shift = lam + 1e-13 * scale
        ab[1] = d - shift
        x = start.copy()
        for _ in range(iterations):
            x = solve_banded((1, 1), ab, x, check_finite=False)
            x /= np.linalg.norm(x)
        i = np.argmax(np.abs(x))
        out[:, k] = x * np.sign(x[i])
    return out


def inverse_iteration(m, shift, iterations=3, seed=0):
    """Eigenvector of a dense Hermitian matrix for the eigenvalue nearest `shift`."""
    m = check_hermitian(m)
    n = m.shape[0]
    scale = max(np.max(np.abs(m.diagonal())), 1.0)
    shifted = m - (shift + 1e-12 * scale) * np.eye(n)
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    for _ in range(iterations):
        x = np.linalg.solve(shifted, x)
        x /= np.linalg.norm(x)
    i = np.argmax(np.abs(x))
    return x * (np.abs(x[i]) / x[i])


def block_tridiagonal_inertia(diag_blocks, coupling, sigma):
    """Number of eigenvalues below `sigma` of a block-tridiagonal Hermitian matrix.

    `diag_blocks[j]` is the j-th diagonal block and `coupling[j]` the block
    below it (rows of block j+1, columns of block j). Sylvester's law applied
    to the block LDL^H factorisation gives the count as the sum of negative
    eigenvalues of the successive Schur complements.
    """
    neg = 0
    prev_inv = None
    for j, block in enumerate(diag_blocks):
        s = block - sigma * np.eye(block.shape[0])
        if prev_inv is not None:
            c = coupling[j - 1]
            s = s - c @ prev_inv @ c.conj().T
        w, v = np.linalg.eigh(s)
        neg += int(np.count_nonzero(w < 0))
        tiny = 1e-300
        w = np.where(np.abs(w) < tiny, tiny, w)
        prev_inv = (v / w) @ v.conj().T
    return neg
