"""The lifted operator on the 2-torus, -(d/dx + theta d/dy)^2 + F(x, y).

Two discretisations are provided. The finite-difference one uses an N x M
rectangular mesh whose diagonal hop (1/N, 1/M) follows the direction
(1, theta_mesh) with theta_mesh = N / M. The plane-wave one uses the basis
exp(i((2 pi m + alpha) x + (2 pi n + beta) y)), |m|, |n| <= N_pw; its matrix
is block tridiagonal in m for fields with first-order x harmonics, so
eigenvalue counts come from block Sturm sequences without a full solve.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    IndefiniteWeight,
    MeshTooCoarse,
    NonHermitianInput,
    TruncationTooSmall,
)
from .numerics import (
    block_tridiagonal_inertia,
    generalized_hermitian_eigenvalues,
    hermitian_eigenvalues,
    inverse_iteration,
    symmetric_reduction,
)

MIN_MESH = 8
DEFAULT_H = 0.02
DEFAULT_N_PW = 50
DENSE_PW_LIMIT = 1200
BISECT_TOL = 1e-9


@dataclass(frozen=True)
class LiftedProblem:
    field: object
    alpha: float = 0.0
    beta: float = 0.0
    h: float = DEFAULT_H
    generalized: bool = False
    theta: float = None

    @property
    def theta_target(self):
        return self.field.theta_value if self.theta is None else float(self.theta)

    @property
    def n(self):
        return int(round(1.0 / self.h))

    @property
    def m(self):
        return int(round(1.0 / (self.theta_target * self.h)))

    @property
    def theta_mesh(self):
        """Slope actually followed by the diagonal stencil after snapping."""
        return self.n / self.m

    @property
    def step(self):
        """Length of the x-component of one diagonal hop."""
        return 1.0 / self.n


def mesh(p):
    n, m = p.n, p.m
    if n < MIN_MESH or m < MIN_MESH:
        raise MeshTooCoarse(f"mesh {n} x {m} is below {MIN_MESH} points per direction")
    return np.arange(n) / n, np.arange(m) / m


def assemble_lifted_fd(p):
    """(N M) x (N M) Hermitian matrix of the diagonal-stencil lifted operator.

    Node (i, j) has index i M + j. The hop (i, j) -> (i + 1, j + 1) picks up
    exp(i alpha) when it wraps in x and exp(i beta) when it wraps in y.
    For the generalized problem only the stiffness part is returned; the
    weight is `lifted_weight(p)`.
    """
    x, y = mesh(p)
    n, m = p.n, p.m
    c = 1.0 / p.step**2
    size = n * m
    mat = np.zeros((size, size), dtype=np.complex128)
    ii, jj = np.meshgrid(np.arange(n), np.arange(m), indexing="ij")
    k = (ii * m + jj).ravel()
    diag = np.full(size, 2 * c)
    if not p.generalized:
        diag = diag + p.field(x[ii], y[jj]).ravel()
    mat[k, k] = diag
    i2, j2 = (ii + 1) % n, (jj + 1) % m
    k2 = (i2 * m + j2).ravel()
    phase = np.ones((n, m), dtype=np.complex128)
    phase[ii + 1 == n] *= np.exp(1j * p.alpha)
    phase[jj + 1 == m] *= np.exp(1j * p.beta)
    phase = phase.ravel()
    # row k sees u(k2) = phase * u(periodic image)
    np.add.at(mat, (k, k2), -c * phase)
    np.add.at(mat, (k2, k), -c * np.conj(phase))
    if np.max(np.abs(mat - mat.conj().T)) > 0:
        raise NonHermitianInput("lifted FD assembly lost Hermitian symmetry")
    return mat


def lifted_weight(p):
    x, y = mesh(p)
    w = p.field(x[:, None], y[None, :]).ravel()
    return w


def superspace_spectrum_fd(p, n_eigs=None):
    """Lowest `n_eigs` eigenvalues of the lifted FD operator (all when None)."""
    mat = assemble_lifted_fd(p)
    if p.generalized:
        ev = generalized_hermitian_eigenvalues(mat, lifted_weight(p))
    else:
        ev = hermitian_eigenvalues(mat)
    return ev if n_eigs is None else ev[:n_eigs]


def fd_alpha_sweep(field_, alphas, beta=0.0, h=DEFAULT_H, generalized=False, n_eigs=None,
                   threads=1):
    """Lifted FD spectra for each alpha; array of shape (len(alphas), n_eigs)."""
    problems = [LiftedProblem(field_, a, beta, h, generalized) for a in alphas]

    def solve(p):
        return superspace_spectrum_fd(p, n_eigs)

    if threads <= 1:
        rows = [solve(p) for p in problems]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(solve, problems))
    return np.array(rows)


def default_alphas(count=24):
    """Uniform samples of [0, 2 pi), endpoint excluded since it repeats 0."""
    return np.linspace(0.0, 2 * np.pi, count, endpoint=False)


@dataclass
class LiftedMode:
    eigenvalue: float
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray

    def slice_trace(self, theta, count=None):
        """Values along the line (s, theta s) of the mesh nodes visited by the
        diagonal hops from the origin, as (s, u)."""
        n, m = self.u.shape
        count = np.lcm(n, m) if count is None else count
        steps = np.arange(count)
        s = steps / n
        return s, self.u[steps % n, steps % m]


def fd_mode(p, eigenvalue):
    """Eigenvector of the lifted FD operator nearest `eigenvalue`, on the mesh."""
    mat = assemble_lifted_fd(p)
    if p.generalized:
        w = lifted_weight(p)
        v = inverse_iteration(symmetric_reduction(mat, w), eigenvalue)
        v = v / np.sqrt(w)
    else:
        v = inverse_iteration(mat, eigenvalue)
    v = v / np.linalg.norm(v)
    x, y = mesh(p)
    return LiftedMode(float(eigenvalue), x, y, v.reshape(p.n, p.m))


@dataclass(frozen=True)
class PlaneWaveProblem:
    field: object
    alpha: float = 0.0
    beta: float = 0.0
    n_pw: int = DEFAULT_N_PW
    generalized: bool = False
    theta: float = None

    def __post_init__(self):
        if self.n_pw < 2:
            raise TruncationTooSmall(f"N_pw must be >= 2, got {self.n_pw}")

    @property
    def theta_value(self):
        return self.field.theta_value if self.theta is None else float(self.theta)

    @property
    def modes_per_axis(self):
        return 2 * self.n_pw + 1

    @property
    def dimension(self):
        return self.modes_per_axis**2


def kinetic_diagonal(p, m):
    """((2 pi m + alpha) + theta (2 pi n + beta))^2 for all n at fixed m."""
    r = np.arange(-p.n_pw, p.n_pw + 1)
    k = (2 * np.pi * m + p.alpha) + p.theta_value * (2 * np.pi * r + p.beta)
    return k * k


def _x_reach(modes):
    return max((abs(m) for m, _ in modes), default=0)


def _convolution_block(modes, dm, size, n_pw):
    """Block of the convolution matrix between x-harmonics m and m - dm:
    entry (n, n') = F_hat(dm, n - n')."""
    out = np.zeros((size, size), dtype=np.complex128)
    for (mm, nn), c in modes.items():
        if mm != dm or abs(nn) >= size:
            continue
        out += c * np.eye(size, k=-nn)
    return out


def plane_wave_blocks(p, sigma=0.0):
    """Block-tridiagonal form of K - sigma W in the m-major basis.

    K is the Schrodinger matrix (kinetic + convolution with F) or, for the
    generalized problem, the kinetic part alone with W the convolution with
    F; otherwise W = I. Fields with x-harmonics up to r are grouped into
    super-blocks of r consecutive m values so the coupling stays adjacent.
    """
    modes = p.field.modes
    size = p.modes_per_axis
    r = max(_x_reach(modes), 1)
    ms = np.arange(-p.n_pw, p.n_pw + 1)
    groups = [ms[i:i + r] for i in range(0, len(ms), r)]

    def block(m_row, m_col):
        dm = m_row - m_col
        conv = _convolution_block(modes, dm, size, p.n_pw)
        if p.generalized:
            out = -sigma * conv
            if dm == 0:
                out = out + np.diag(kinetic_diagonal(p, m_row))
        else:
            out = conv.copy()
            if dm == 0:
                out = out + np.diag(kinetic_diagonal(p, m_row) - sigma)
        return out

    def super_block(rows, cols):
        return np.block([[block(a, b) for b in cols] for a in rows])

    diag = [super_block(g, g) for g in groups]
    coup = [super_block(g1, g0) for g0, g1 in zip(groups, groups[1:])]
    return diag, coup


def assemble_plane_wave(p):
    """Dense plane-wave matrix (Schrodinger) or stiffness matrix (generalized)."""
    diag, coup = plane_wave_blocks(p, 0.0)
    return _dense_from_blocks(diag, coup)


def plane_wave_weight(p):
    """Dense convolution matrix of the weight (identity for Schrodinger)."""
    if not p.generalized:
        return np.eye(p.dimension, dtype=np.complex128)
    dk, ck = plane_wave_blocks(p, 0.0)
    d1, c1 = plane_wave_blocks(p, 1.0)
    return _dense_from_blocks([a - b for a, b in zip(dk, d1)],
                              [a - b for a, b in zip(ck, c1)])


def _dense_from_blocks(diag, coup):
    sizes = [b.shape[0] for b in diag]
    offs = np.concatenate([[0], np.cumsum(sizes)])
    out = np.zeros((offs[-1], offs[-1]), dtype=np.complex128)
    for j, b in enumerate(diag):
        out[offs[j]:offs[j + 1], offs[j]:offs[j + 1]] = b
    for j, c in enumerate(coup):
        out[offs[j + 1]:offs[j + 2], offs[j]:offs[j + 1]] = c
        out[offs[j]:offs[j + 1], offs[j + 1]:offs[j + 2]] = c.conj().T
    return out


def check_weight(p):
    """Raise IndefiniteWeight if the truncated weight matrix is not positive definite."""
    if not p.generalized:
        return
    d1, c1 = plane_wave_blocks(p, 1.0)
    d0, c0 = plane_wave_blocks(p, 0.0)
    # W = (K - 0 W) - (K - 1 W)
    diag = [a - b for a, b in zip(d0, d1)]
    coup = [a - b for a, b in zip(c0, c1)]
    neg = block_tridiagonal_inertia([-b for b in diag], [-c for c in coup], 0.0)
    if neg < p.dimension:
        raise IndefiniteWeight("truncated weight convolution matrix is not positive definite")


def pwe_count(p, sigma):
    """Number of plane-wave eigenvalues below `sigma` (Sylvester inertia)."""
    diag, coup = plane_wave_blocks(p, sigma)
    return block_tridiagonal_inertia(diag, coup, 0.0)


def _bisect_by_counts(count, lo, hi, tol=BISECT_TOL):
    """All eigenvalues in [lo, hi) given a counting function, by interval splitting."""
    out = []
    stack = [(lo, hi, count(lo), count(hi))]
    while stack:
        a, b, ca, cb = stack.pop()
        k = cb - ca
        if k == 0:
            continue
        if b - a <= tol * max(1.0, abs(a), abs(b)):
            out.extend([0.5 * (a + b)] * k)
            continue
        mid = 0.5 * (a + b)
        cm = count(mid)
        stack.append((mid, b, cm, cb))
        stack.append((a, mid, ca, cm))
    return np.sort(np.array(out))


def pwe_spectrum(p, window):
    """Plane-wave eigenvalues inside `window`.

    Small truncations are solved densely; larger ones by bisection on block
    Sturm counts, which only pays for the eigenvalues inside the window.
    """
    lo, hi = window
    if not lo < hi:
        raise ConfigError(f"window must satisfy lo < hi, got {window}")
    check_weight(p)
    if p.dimension <= DENSE_PW_LIMIT:
        k = assemble_plane_wave(p)
        if p.generalized:
            w = plane_wave_weight(p)
            l_inv = np.linalg.inv(np.linalg.cholesky(w))
            mat = l_inv @ k @ l_inv.conj().T
            mat = 0.5 * (mat + mat.conj().T)
        else:
            mat = k
        return hermitian_eigenvalues(mat, window=(lo, hi))
    return _bisect_by_counts(lambda s: pwe_count(p, s), lo, hi)


def pollution_counts_pwe(p, gaps, margin):
    """Number of plane-wave eigenvalues deeper than `margin` inside each gap,
    from two Sturm counts per gap."""
    out = []
    for lo, hi in gaps:
        a, b = lo + margin, hi - margin
        out.append(0 if a >= b else pwe_count(p, b) - pwe_count(p, a))
    return out


@dataclass
class PollutionEntry:
    lo: float
    hi: float
    fd_count: int
    pwe_count: int


def pollution_report(fd_spectrum, pwe_spectrum, gaps, margin=1e-3):
    """Per gap, how many eigenvalues of each discretisation lie deeper than
    `margin` inside it."""
    fd = np.asarray(fd_spectrum, dtype=float).ravel()
    pw = np.asarray(pwe_spectrum, dtype=float).ravel()
    out = []
    for lo, hi in gaps:
        a, b = lo + margin, hi - margin
        out.append(PollutionEntry(float(lo), float(hi),
                                  int(np.count_nonzero((fd > a) & (fd < b))),
                                  int(np.count_nonzero((pw > a) & (pw < b)))))
    return out
