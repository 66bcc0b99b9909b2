"""Dense complex linear algebra and reproducible randomness.

Everything downstream (basis construction, game evaluation, see-saw,
moment-matrix sampling) goes through this module for eigendecompositions
and random draws, so determinism is enforced here once:

* randomness is Philox (counter-based, 64-bit keys); parallel callers get
  independent substreams with :func:`derive_seed`,
* the hermitian eigensolver is a cyclic Jacobi sweep with a fixed rotation
  order, so degenerate eigenvectors are bitwise reproducible.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .exceptions import DimensionMismatchError, NonHermitianError, ValidationError

log = logging.getLogger(__name__)

HERMITICITY_TOL = 1e-12
SPAN_TOL_DEFAULT = 1e-7

_MASK64 = (1 << 64) - 1

# substream tag reserved for SVD-failure resampling in random_basis
_RETRY_STREAM = 0x5EED0F


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, *path: int) -> int:
    """Derive a child seed from ``seed`` and a path of integer tags.

    Splitting is splitmix64-based: distinct paths give statistically
    independent Philox keys, and the map is pure, so any tree of parallel
    workers can rebuild its own stream from (root seed, path).
    """
    s = seed & _MASK64
    for tag in path:
        s = _splitmix64(s ^ _splitmix64(tag & _MASK64))
    return s


def generator(seed: int, *path: int) -> np.random.Generator:
    """Philox generator for the substream identified by (seed, *path)."""
    return np.random.Generator(np.random.Philox(key=derive_seed(seed, *path)))


def ginibre_uniform(d: int, seed: int) -> np.ndarray:
    """d x d complex matrix, each entry x+iy with x, y ~ U[0, 1] i.i.d.

    This is the sampler used for every random basis in the package (the
    Monte Carlo convention); it is uniform-entry, not Gaussian.
    """
    if d < 1:
        raise ValidationError(f"dimension must be >= 1, got {d}")
    g = generator(seed)
    re = g.random((d, d))
    im = g.random((d, d))
    return re + 1j * im


def random_unit_vector(d: int, seed: int) -> np.ndarray:
    """Random pure-state vector: a normalized column of uniform entries."""
    if d < 1:
        raise ValidationError(f"dimension must be >= 1, got {d}")
    g = generator(seed)
    v = g.random(d) + 1j * g.random(d)
    n = np.linalg.norm(v)
    if n == 0.0:  # pragma: no cover - probability zero
        v = np.ones(d, dtype=complex)
        n = math.sqrt(d)
    return v / n


def random_basis(d: int, seed: int) -> np.ndarray:
    """Random orthonormal basis: U factor of the SVD of a Ginibre draw.

    Returns a d x d unitary whose columns are the basis vectors. On the
    (practically unreachable) SVD failure the draw is resampled from the
    next substream and the event is logged.
    """
    attempt = 0
    s = seed
    while True:
        a = ginibre_uniform(d, s)
        try:
            u, _, _ = np.linalg.svd(a)
            return u
        except np.linalg.LinAlgError:  # pragma: no cover - degenerate draw
            attempt += 1
            if attempt > 8:
                raise
            log.warning("SVD failed for seed %d, resampling (attempt %d)", s, attempt)
            s = derive_seed(seed, _RETRY_STREAM, attempt)


def _check_hermitian(h: np.ndarray) -> np.ndarray:
    a = np.asarray(h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonHermitianError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    dev = float(np.max(np.abs(a - a.conj().T)))
    if dev > HERMITICITY_TOL * scale:
        raise NonHermitianError(f"matrix is not hermitian: max|H - H^dag| = {dev:.3e}")
    return 0.5 * (a + a.conj().T)


def hermitian_eig(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a hermitian matrix by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, eigenvector columns). The sweep order
    is fixed (row cyclic), so output is deterministic including in
    degenerate subspaces. Residual ||H V - V diag|| is at machine level,
    far inside the 1e-9 * max(1, ||H||) contract.
    """
    a = _check_hermitian(h)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    if n == 1:
        return np.array([a[0, 0].real]), v

    scale = max(1.0, float(np.max(np.abs(a))))
    off_tol = 1e-14 * scale
    for _sweep in range(40):
        off = np.abs(a.copy())
        np.fill_diagonal(off, 0.0)
        if float(off.max()) <= off_tol:
            break
        skip = 1e-2 * off_tol
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                m = abs(apq)
                if m <= skip:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (app - aqq) / (2.0 * m)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ph = apq / m
                sph = s * ph
                sphc = s * ph.conjugate()
                # A <- J^dag A J with the rotation on the (p, q) plane
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p + sphc * col_q
                a[:, q] = -sph * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p + sph * row_q
                a[q, :] = -sphc * row_p + c * row_q
                a[p, p] = app + t * m
                a[q, q] = aqq - t * m
                a[p, q] = 0.0
                a[q, p] = 0.0
                col_p = v[:, p].copy()
                col_q = v[:, q].copy()
                v[:, p] = c * col_p + sphc * col_q
                v[:, q] = -sph * col_p + c * col_q
    else:  # pragma: no cover - quadratic convergence makes this unreachable
        raise NonHermitianError("Jacobi sweeps did not converge")

    evals = np.diagonal(a).real.copy()
    order = np.argsort(evals, kind="stable")
    return evals[order], v[:, order]


def max_eig(h: np.ndarray) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and a unit top eigenvector.

    Ties resolve to the lowest-index eigenvector column of the ascending
    decomposition, so e.g. the identity always yields column 0.
    """
    evals, vecs = hermitian_eig(h)
    lam = evals[-1]
    idx = int(np.argmax(evals == lam))
    return float(lam), vecs[:, idx].copy()


def cubic_real_roots(a2: float, a1: float, a0: float) -> np.ndarray:
    """All three real roots of -x^3 + a2 x^2 + a1 x + a0, descending.

    The polynomial must have three real roots (it arises as a hermitian
    characteristic polynomial); a discriminant clearly indicating complex
    roots raises ValidationError.
    """
    roots = _cubic_roots_batch(np.atleast_1d(float(a2)), np.atleast_1d(float(a1)),
                               np.atleast_1d(float(a0)), check=True)
    return roots[0]


def _cubic_roots_batch(a2, a1, a0, check: bool = False) -> np.ndarray:
    """Vectorized real-root solver for -x^3 + a2 x^2 + a1 x + a0.

    Returns roots with shape (*batch, 3), descending along the last axis.
    Uses the trigonometric method on the depressed cubic plus two Newton
    polish steps on the original polynomial.
    """
    a2 = np.asarray(a2, dtype=float)
    a1 = np.asarray(a1, dtype=float)
    a0 = np.asarray(a0, dtype=float)
    # monic form x^3 + B x^2 + C x + D
    b, c, d = -a2, -a1, -a0
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    disc = -4.0 * p ** 3 - 27.0 * q * q
    if check:
        scale = 1.0 + np.maximum(np.abs(p), np.abs(q)) ** 2
        if np.any(disc < -1e-9 * scale):
            raise ValidationError("cubic has complex roots; expected a hermitian spectrum")
    pm = np.minimum(p, 0.0)
    r = np.sqrt(np.maximum(-pm / 3.0, 0.0))
    safe = r > 0.0
    arg = np.where(safe, 3.0 * q / np.where(safe, 2.0 * pm * r, 1.0), 0.0)
    arg = np.clip(arg, -1.0, 1.0)
    phi = np.arccos(arg)
    k = np.arange(3.0)
    t = 2.0 * r[..., None] * np.cos((phi[..., None] - 2.0 * np.pi * k) / 3.0)
    # p >= 0 within noise: (near-)triple root
    t = np.where(safe[..., None], t, -np.sign(q[..., None]) * np.abs(q[..., None]) ** (1.0 / 3.0))
    x = t - shift[..., None]
    for _ in range(2):
        fx = ((x - a2[..., None]) * x - a1[..., None]) * x - a0[..., None]
        dfx = (3.0 * x - 2.0 * a2[..., None]) * x - a1[..., None]
        stable = np.abs(dfx) > 1e-30
        x = np.where(stable, x - fx / np.where(stable, dfx, 1.0), x)
    return -np.sort(-x, axis=-1)


class SpanTracker:
    """Incremental orthonormal basis of a subspace of symmetric matrices.

    Matrices are vectorized and Gram-Schmidt orthogonalized (twice, for
    stability); an insert whose relative residual is below ``tol`` is
    declared dependent and does not grow the basis.
    """

    def __init__(self, ambient_dim: int, tol: float = SPAN_TOL_DEFAULT):
        if ambient_dim < 1:
            raise ValidationError("ambient dimension must be positive")
        if tol <= 0.0:
            raise ValidationError("tolerance must be positive")
        self.ambient_dim = int(ambient_dim)
        self.tol = float(tol)
        self._basis: list[np.ndarray] = []

    @property
    def dim(self) -> int:
        return len(self._basis)

    def ortho_basis(self) -> np.ndarray:
        """Current orthonormal basis, one vectorized matrix per row."""
        if not self._basis:
            return np.zeros((0, self.ambient_dim * self.ambient_dim))
        return np.vstack(self._basis)

    def basis_matrices(self) -> list[np.ndarray]:
        n = self.ambient_dim
        return [vec.reshape(n, n).copy() for vec in self._basis]

    def insert(self, mat: np.ndarray) -> bool:
        """Insert a symmetric matrix; True iff the span dimension grew."""
        m = np.asarray(mat, dtype=float)
        if m.shape != (self.ambient_dim, self.ambient_dim):
            raise DimensionMismatchError(
                f"expected shape {(self.ambient_dim,) * 2}, got {m.shape}")
        v = m.reshape(-1).copy()
        norm0 = np.linalg.norm(v)
        if norm0 == 0.0:
            return False
        for _ in range(2):
            for b in self._basis:
                v -= (b @ v) * b
        res = np.linalg.norm(v)
        if res <= self.tol * norm0:
            return False
        self._basis.append(v / res)
        return True


def span_insert(tracker: SpanTracker, mat: np.ndarray) -> bool:
    """Functional alias for :meth:`SpanTracker.insert`."""
    return tracker.insert(mat)
