"""Orthonormal bases, maximal MUB constructions, and unbiasedness measures.

A Basis is d orthonormal complex columns (one von Neumann measurement);
a BasisSet is an ordered family of them in a common dimension. The
measures defined here compare a family against perfect pairwise mutual
unbiasedness:

* ``distance_sq`` / ``avg_distance_sq``: squared basis distance D^2 and
  its pair average (1 iff pairwise unbiased, 0 iff identical),
* ``pbar``: the best average success probability of the two-input promise
  game played with these measurement bases,
* ``qbar``: pbar rescaled so identical bases give 0 and MUBs give 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .exceptions import DimensionMismatchError, UnsupportedDimensionError, ValidationError
from .finite_field import GaloisField, GaloisRing4, factor_prime_power

ORTHONORMALITY_TOL = 1e-10
MUB_TOL_DEFAULT = 1e-10


@dataclass(frozen=True)
class Basis:
    """Orthonormal basis of C^d; ``matrix`` columns are the basis vectors."""

    matrix: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"basis matrix must be square, got {m.shape}")
        if self.check:
            dev = np.abs(m.conj().T @ m - np.eye(m.shape[0]))
            if float(dev.max()) > ORTHONORMALITY_TOL:
                i, j = np.unravel_index(int(dev.argmax()), dev.shape)
                raise ValidationError(
                    f"columns {i} and {j} violate orthonormality by {dev[i, j]:.3e}")

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    def vector(self, i: int) -> np.ndarray:
        return self.matrix[:, i]

    def projector(self, i: int) -> np.ndarray:
        v = self.matrix[:, i]
        return np.outer(v, v.conj())


@dataclass(frozen=True)
class BasisSet:
    """Ordered family of same-dimension bases (a candidate MUB family)."""

    bases: tuple[Basis, ...]

    def __post_init__(self):
        bs = tuple(self.bases)
        object.__setattr__(self, "bases", bs)
        if not bs:
            raise ValidationError("a basis set needs at least one basis")
        d = bs[0].d
        for k, b in enumerate(bs):
            if b.d != d:
                raise DimensionMismatchError(
                    f"basis {k} has dimension {b.d}, expected {d}")

    @classmethod
    def from_matrices(cls, mats, check: bool = True) -> "BasisSet":
        return cls(tuple(Basis(m, check=check) for m in mats))

    @property
    def d(self) -> int:
        return self.bases[0].d

    @property
    def n(self) -> int:
        return len(self.bases)

    def matrices(self) -> list[np.ndarray]:
        return [b.matrix for b in self.bases]

    def subset(self, indices) -> "BasisSet":
        return BasisSet(tuple(self.bases[i] for i in indices))


def random_basis_set(n: int, d: int, seed: int) -> BasisSet:
    """n independent random bases drawn from per-basis substreams of seed."""
    mats = [numerics.random_basis(d, numerics.derive_seed(seed, y)) for y in range(n)]
    return BasisSet.from_matrices(mats, check=False)


def _pair(b1: Basis, b2: Basis) -> tuple[np.ndarray, np.ndarray]:
    if b1.d != b2.d:
        raise DimensionMismatchError(f"dimensions differ: {b1.d} vs {b2.d}")
    return b1.matrix, b2.matrix


def overlap_moduli(b1: Basis, b2: Basis) -> np.ndarray:
    """Matrix of |<psi^1_i | psi^2_j>|, shape (d, d)."""
    m1, m2 = _pair(b1, b2)
    return np.abs(m1.conj().T @ m2)


def is_mub_pair(b1: Basis, b2: Basis, tol: float = MUB_TOL_DEFAULT) -> bool:
    """True iff every squared overlap equals 1/d within tol."""
    ov = overlap_moduli(b1, b2)
    return float(np.max(np.abs(ov ** 2 - 1.0 / b1.d))) <= tol


def _mub_family_odd(p: int, k: int) -> list[np.ndarray]:
    d = p ** k
    gf = GaloisField(p, k)
    omega = np.exp(2j * np.pi / p)
    sq = [gf.mul(x, x) for x in range(d)]
    mats = [np.eye(d, dtype=complex)]
    for a in range(d):
        cols = np.empty((d, d), dtype=complex)
        for b in range(d):
            phases = [gf.trace(gf.add(gf.mul(a, sq[x]), gf.mul(b, x))) for x in range(d)]
            cols[:, b] = omega ** np.array(phases, dtype=float)
        mats.append(cols / math.sqrt(d))
    return mats


def _mub_family_even(k: int) -> list[np.ndarray]:
    d = 2 ** k
    ring = GaloisRing4(k)
    teich = ring.teichmuller
    mats = [np.eye(d, dtype=complex)]
    for a in teich:
        cols = np.empty((d, d), dtype=complex)
        for col, b in enumerate(teich):
            coef = ring.add(a, ring.add(b, b))  # a + 2b
            phases = [ring.trace4(ring.mul(coef, x)) for x in teich]
            cols[:, col] = 1j ** np.array(phases, dtype=float)
        mats.append(cols / math.sqrt(d))
    return mats


def mub_family(d: int) -> BasisSet:
    """Maximal family of d+1 pairwise mutually unbiased bases.

    Available for prime-power d: odd characteristic uses the quadratic
    Gauss-sum construction over GF(p^k), even uses the Galois-ring
    GR(4, k) Teichmuller construction. The result is verified pairwise
    at tolerance 1e-10 before being returned.
    """
    p, k = factor_prime_power(d)
    mats = _mub_family_even(k) if p == 2 else _mub_family_odd(p, k)
    fam = BasisSet.from_matrices(mats)
    for i in range(len(fam.bases)):
        for j in range(i + 1, len(fam.bases)):
            if not is_mub_pair(fam.bases[i], fam.bases[j]):
                raise RuntimeError(
                    f"MUB construction failed unbiasedness check for d={d}, pair ({i},{j})")
    return fam


def distance_sq(b1: Basis, b2: Basis) -> float:
    """Squared basis distance D^2 = 1 - sum_ij (|<i|j>|^2 - 1/d)^2 / (d-1)."""
    ov = overlap_moduli(b1, b2)
    d = b1.d
    return 1.0 - float(np.sum((ov ** 2 - 1.0 / d) ** 2)) / (d - 1)


def _pair_indices(n: int):
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


def avg_distance_sq(s: BasisSet) -> float:
    """Mean of distance_sq over all unordered basis pairs."""
    if s.n < 2:
        raise ValidationError("need at least two bases")
    pairs = _pair_indices(s.n)
    return sum(distance_sq(s.bases[a], s.bases[b]) for a, b in pairs) / len(pairs)


def pair_pbar(b1: Basis, b2: Basis) -> float:
    """Optimal two-basis game value 1/2 + sum_ij |<i|j>| / (2 d^2)."""
    ov = overlap_moduli(b1, b2)
    d = b1.d
    return 0.5 + float(ov.sum()) / (2.0 * d * d)


def pbar(s: BasisSet) -> float:
    """Maximum average success probability of the pairwise promise game."""
    if s.n < 2:
        raise ValidationError("need at least two bases")
    pairs = _pair_indices(s.n)
    return sum(pair_pbar(s.bases[a], s.bases[b]) for a, b in pairs) / len(pairs)


def classical_pair_value(d: int) -> float:
    """Best classical two-input value, 1/2 (1 + 1/d)."""
    return 0.5 * (1.0 + 1.0 / d)


def quantum_pair_value(d: int) -> float:
    """Best quantum two-input value, 1/2 (1 + 1/sqrt(d)); attained iff MUB."""
    return 0.5 * (1.0 + 1.0 / math.sqrt(d))


def qbar(s: BasisSet) -> float:
    """Normalized unbiasedness: 0 for identical bases, 1 for pairwise MUBs."""
    if s.d < 2:
        raise ValidationError("normalization degenerates for d < 2")
    lo = classical_pair_value(s.d)
    hi = quantum_pair_value(s.d)
    return (pbar(s) - lo) / (hi - lo)


def qbar_direct(s: BasisSet) -> float:
    """qbar evaluated through the expanded double-sum form (cross-check)."""
    if s.d < 2:
        raise ValidationError("normalization degenerates for d < 2")
    d = s.d
    pairs = _pair_indices(s.n)
    total = 0.0
    for a, b in pairs:
        ov = overlap_moduli(s.bases[a], s.bases[b])
        total += float(np.sum(ov - 1.0 / d)) / (d * (math.sqrt(d) - 1.0))
    return total / len(pairs)


def save_basis_set(s: BasisSet, path) -> None:
    """Write a basis set as JSON; numbers round-trip at full precision."""
    payload = {
        "d": s.d,
        "n": s.n,
        "bases": [
            [[[float(v.real), float(v.imag)] for v in b.matrix[:, c]] for c in range(s.d)]
            for b in s.bases
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_basis_set(path) -> BasisSet:
    """Read a basis-set JSON file, validating shape and orthonormality."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed basis file {path}: {exc}") from exc
    try:
        d = int(payload["d"])
        n = int(payload["n"])
        raw = payload["bases"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"basis file {path} is missing required fields") from exc
    if len(raw) != n:
        raise ValidationError(f"basis file lists {len(raw)} bases, header says {n}")
    mats = []
    for k, cols in enumerate(raw):
        arr = np.asarray(cols, dtype=float)
        if arr.shape != (d, d, 2):
            raise ValidationError(f"basis {k} has shape {arr.shape}, expected {(d, d, 2)}")
        m = (arr[..., 0] + 1j * arr[..., 1]).T  # cols[c] is the c-th column
        dev = np.abs(m.conj().T @ m - np.eye(d))
        if float(dev.max()) > 1e-8:
            i, j = np.unravel_index(int(dev.argmax()), dev.shape)
            raise ValidationError(
                f"basis {k}: columns {i} and {j} violate orthonormality by {dev[i, j]:.3e}")
        mats.append(m)
    return BasisSet.from_matrices(mats, check=False)
