"""Exact values of random-access games for fixed measurement bases.

For measurement bases fixed on the receiver side, the optimal sender
strategy is pure-state encoding into the top eigenvector of the summed
measurement projectors, so the game value is an eigenvalue average:

    value = (1 / (n d^n)) * sum_x lambda_max( sum_y P^y_{x_y} ).

n = 2 and n = 3 admit closed forms (two-projector spectrum, cubic
characteristic polynomial on the spanned subspace); larger n falls back
to the dense eigensolver. The promise variant averages the same quantity
over the allowed setting subsets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import bases as _bases
from . import numerics
from .bases import Basis, BasisSet, mub_family, overlap_moduli, pair_pbar
from .exceptions import ResourceLimitError, ValidationError

EVAL_CAP_DEFAULT = 10 ** 7


@dataclass(frozen=True)
class PqracGame:
    """Parameters of an (n, m)^d -> 1 promise game with derived counts."""

    n: int
    m: int
    d: int

    def __post_init__(self):
        if not (2 <= self.m <= self.n):
            raise ValidationError(f"need 2 <= m <= n, got m={self.m}, n={self.n}")
        if self.d < 2:
            raise ValidationError(f"need d >= 2, got {self.d}")

    @property
    def subset_count(self) -> int:
        return math.comb(self.n, self.m)

    @property
    def state_count(self) -> int:
        """A: number of encoded states, C(n, m) d^m."""
        return self.subset_count * self.d ** self.m

    @property
    def measurement_count(self) -> int:
        """B: number of measurement operators, n d."""
        return self.n * self.d

    @property
    def weight(self) -> float:
        """Uniform weight of one (subset, input, queried-setting) triple."""
        return 1.0 / (self.subset_count * self.m * self.d ** self.m)


@dataclass
class GameValueReport:
    """Game value with its per-input breakdown.

    ``per_input_success`` maps each input label to lambda_max of its
    measurement-operator sum (the summed success probability over queried
    settings); ``value`` equals ``weight`` times their total. Encoding
    vectors are attached only when requested.
    """

    value: float
    per_input_success: dict
    weight: float
    encodings: list | None = None


def pair_value(b1: Basis, b2: Basis) -> float:
    """Optimal 2^d -> 1 value for fixed bases: (1/2d^2) sum (1 + overlap)."""
    return pair_pbar(b1, b2)


def three_basis_lambda_max(v1: np.ndarray, v2: np.ndarray, v3: np.ndarray) -> float:
    """Largest eigenvalue of the sum of three rank-1 projectors.

    Works on the <=3 dimensional spanned subspace: the nonzero spectrum of
    the projector sum equals the spectrum of the 3x3 Gram matrix, whose
    characteristic polynomial is -x^3 + 3 x^2 + m x + n.
    """
    g12 = np.vdot(v1, v2)
    g13 = np.vdot(v1, v3)
    g23 = np.vdot(v2, v3)
    m = abs(g12) ** 2 + abs(g13) ** 2 + abs(g23) ** 2 - 3.0
    n0 = (1.0 + 2.0 * (g12 * g23 * np.conj(g13)).real
          - abs(g12) ** 2 - abs(g13) ** 2 - abs(g23) ** 2)
    return float(numerics.cubic_real_roots(3.0, m, n0)[0])


def _lambda_grid_three(mats) -> np.ndarray:
    """lambda_max for all d^3 inputs of a 3-basis game, shape (d, d, d)."""
    b1, b2, b3 = mats
    o12 = b1.conj().T @ b2
    o13 = b1.conj().T @ b3
    o23 = b2.conj().T @ b3
    a = o12[:, :, None]
    b = o13[:, None, :]
    c = o23[None, :, :]
    aa = np.abs(a) ** 2
    bb = np.abs(b) ** 2
    cc = np.abs(c) ** 2
    m = aa + bb + cc - 3.0
    n0 = 1.0 + 2.0 * (a * c * np.conj(b)).real - aa - bb - cc
    return numerics._cubic_roots_batch(np.full_like(m, 3.0), m, n0)[..., 0]


def _encoding_from_columns(cols, gram) -> np.ndarray:
    """Top eigenvector of a projector sum, from its Gram matrix."""
    lam, u = numerics.max_eig(gram)
    v = cols @ u
    return v / np.linalg.norm(v)


def _pair_encoding(psi: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Closed-form top eigenvector of |psi><psi| + |phi><phi|."""
    c = np.vdot(psi, phi)
    phase = c / abs(c) if abs(c) > 0.0 else 1.0
    v = phase * psi + phi
    return v / np.linalg.norm(v)


def _check_cap(n_evals: int, cap: int) -> None:
    if n_evals > cap:
        raise ResourceLimitError(
            f"{n_evals} eigenvalue evaluations exceed the cap {cap}; "
            "raise the cap explicitly to proceed")


def qrac_value(s: BasisSet, cap: int = EVAL_CAP_DEFAULT,
               with_encodings: bool = False) -> GameValueReport:
    """Optimal n^d -> 1 game value for the fixed bases in ``s``."""
    n, d = s.n, s.d
    mats = s.matrices()
    weight = 1.0 / (n * d ** n)
    _check_cap(d ** n, cap)

    per_input: dict = {}
    encodings: list | None = [] if with_encodings else None

    if n == 1:
        for x in range(d):
            per_input[(x,)] = 1.0
            if encodings is not None:
                encodings.append(mats[0][:, x].copy())
        return GameValueReport(1.0, per_input, weight, encodings)

    if n == 2:
        ov = mats[0].conj().T @ mats[1]
        lam = 1.0 + np.abs(ov)
        for x in itertools.product(range(d), repeat=2):
            per_input[x] = float(lam[x])
            if encodings is not None:
                encodings.append(_pair_encoding(mats[0][:, x[0]], mats[1][:, x[1]]))
        value = pair_pbar(s.bases[0], s.bases[1])
        return GameValueReport(value, per_input, weight, encodings)

    if n == 3 and not with_encodings:
        lam = _lambda_grid_three(mats)
        for x in itertools.product(range(d), repeat=3):
            per_input[x] = float(lam[x])
        return GameValueReport(weight * float(lam.sum()), per_input, weight, None)

    total = 0.0
    for x in itertools.product(range(d), repeat=n):
        cols = np.stack([mats[y][:, x[y]] for y in range(n)], axis=1)
        gram = cols.conj().T @ cols
        if with_encodings:
            lam_vec, u = numerics.max_eig(gram)
            lam = float(lam_vec)
            v = cols @ u
            encodings.append(v / np.linalg.norm(v))
        else:
            ev, _ = numerics.hermitian_eig(gram)
            lam = float(ev[-1])
        per_input[x] = lam
        total += lam
    return GameValueReport(weight * total, per_input, weight, encodings)


def pqrac_value(s: BasisSet, m: int, cap: int = EVAL_CAP_DEFAULT,
                with_encodings: bool = False) -> GameValueReport:
    """Optimal (n, m)^d -> 1 promise-game value for the fixed bases.

    Averages the restricted game value over every size-m subset of the
    settings; m = 2 coincides with the pbar measure.
    """
    game = PqracGame(s.n, m, s.d)
    _check_cap(game.state_count, cap)
    per_input: dict = {}
    encodings: list | None = [] if with_encodings else None
    total = 0.0
    for z in itertools.combinations(range(s.n), m):
        sub = s.subset(z)
        rep = qrac_value(sub, cap=cap, with_encodings=with_encodings)
        for x, lam in rep.per_input_success.items():
            per_input[(z, x)] = lam
            total += lam
        if with_encodings:
            encodings.extend(rep.encodings)
    return GameValueReport(game.weight * total, per_input, game.weight, encodings)


def anomaly_scan(d: int, n: int, bin_width: float = 1e-6,
                 cap: int = EVAL_CAP_DEFAULT) -> dict[float, int]:
    """Game values over all n-subsets of the maximal MUB family in dim d.

    Returns {value rounded to bin_width: number of subsets}. More than one
    bin means inequivalent MUB subsets give different game values.
    """
    fam = mub_family(d)
    n_subsets = math.comb(fam.n, n)
    _check_cap(n_subsets * d ** n, cap)
    decimals = max(0, round(-math.log10(bin_width)))
    bins: dict[float, int] = {}
    for z in itertools.combinations(range(fam.n), n):
        v = qrac_value(fam.subset(z), cap=cap).value
        key = round(v, decimals)
        bins[key] = bins.get(key, 0) + 1
    return bins


@dataclass
class UniformCollapseReport:
    """Whether optimal encodings succeed with the same probability in every basis."""

    uniform: bool
    max_deviation: float
    per_input: dict


def uniform_collapse_check(s: BasisSet, tol: float = 1e-6) -> UniformCollapseReport:
    """Check basis-independence of the per-setting success probabilities.

    For each input's optimal encoding v, compares p_y = |<psi^y_{x_y}|v>|^2
    across settings y; uniform iff max_y |p_y - mean| <= tol for every input.
    """
    if s.n < 2:
        raise ValidationError("need at least two bases")
    rep = qrac_value(s, with_encodings=True)
    mats = s.matrices()
    per_input: dict = {}
    worst = 0.0
    for x, v in zip(rep.per_input_success.keys(), rep.encodings):
        probs = np.array([abs(np.vdot(mats[y][:, x[y]], v)) ** 2 for y in range(s.n)])
        dev = float(np.max(np.abs(probs - probs.mean())))
        per_input[x] = dev
        worst = max(worst, dev)
    return UniformCollapseReport(worst <= tol, worst, per_input)
