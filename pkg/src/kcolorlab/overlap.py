"""Overlap matrices and the entropy/energy objective defined on them.

The central object is a k x k matrix of nonnegative reals whose entries sum
to k.  Such a matrix records, for a pair of colorings scaled by k/n, what
fraction of each color class of one coloring lands in each class of the
other.  The objective evaluated on these matrices splits into an entropy
term and an energy term; its maximizers over the doubly stochastic subset
control whether the second moment of the coloring count stays within a
constant factor of the first moment squared.

All types here are immutable values and all operations are pure functions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DomainError

#: Tolerance for structural validity checks (mass, stochasticity).
VALIDITY_TOL = 1e-9

#: Tolerance for analytic identities in tests and self-checks.
IDENTITY_TOL = 1e-12


def _as_matrix(entries: object, k: int) -> np.ndarray:
    arr = np.asarray(entries, dtype=float)
    if arr.shape != (k, k):
        raise DomainError(f"expected a {k}x{k} matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class OverlapMatrix:
    """A k x k nonnegative matrix of total mass k.

    ``entries`` is a read-only float array.  When the matrix arises from a
    discrete overlap count (entries are multiples of k/n) the exact rational
    entries can be kept alongside in ``exact`` so that counting identities
    can be verified without rounding.
    """

    k: int
    entries: np.ndarray
    exact: Optional[tuple] = field(default=None, compare=False)
    tol: float = field(default=VALIDITY_TOL, compare=False)

    def __post_init__(self) -> None:
        if self.k < 2:
            raise DomainError("need at least two colors")
        arr = _as_matrix(self.entries, self.k)
        if np.any(arr < 0):
            raise DomainError("overlap entries must be nonnegative")
        total = float(arr.sum())
        if abs(total - self.k) > self.tol * max(1.0, self.k):
            raise DomainError(
                f"entries must sum to k={self.k}, got {total!r}"
            )
        if self.exact is not None:
            rows = tuple(tuple(Fraction(x) for x in row) for row in self.exact)
            if len(rows) != self.k or any(len(r) != self.k for r in rows):
                raise DomainError("exact entries must form a k x k grid")
            if any(x < 0 for row in rows for x in row):
                raise DomainError("exact entries must be nonnegative")
            if sum(x for row in rows for x in row) != self.k:
                raise DomainError("exact entries must sum to exactly k")
            object.__setattr__(self, "exact", rows)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_entries(cls, entries: object, tol: float = VALIDITY_TOL) -> "OverlapMatrix":
        arr = np.asarray(entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DomainError("entries must form a square matrix")
        return cls(k=arr.shape[0], entries=arr, tol=tol)

    @classmethod
    def from_exact(cls, rows: Sequence[Sequence[Fraction]]) -> "OverlapMatrix":
        k = len(rows)
        exact = tuple(tuple(Fraction(x) for x in row) for row in rows)
        arr = np.array([[float(x) for x in row] for row in exact], dtype=float)
        return cls(k=k, entries=arr, exact=exact)

    @classmethod
    def from_counts(cls, counts: object, n: int) -> "OverlapMatrix":
        """Build the matrix (k/n) * counts from an integer overlap table."""
        grid = np.asarray(counts, dtype=object)
        if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
            raise DomainError("counts must form a square matrix")
        k = grid.shape[0]
        if int(np.sum(grid)) != n:
            raise DomainError("overlap counts must sum to n")
        exact = tuple(
            tuple(Fraction(int(grid[i, j]) * k, n) for j in range(k))
            for i in range(k)
        )
        return cls.from_exact(exact)

    # -- derived quantities -------------------------------------------

    def norm2_sq(self) -> float:
        """Squared Frobenius norm, the quantity entering the energy term."""
        return float(np.sum(self.entries * self.entries))

    def row_sums(self) -> np.ndarray:
        return self.entries.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.entries.sum(axis=0)

    def is_doubly_stochastic(self, tol: float = VALIDITY_TOL) -> bool:
        return bool(
            np.all(np.abs(self.row_sums() - 1.0) <= tol)
            and np.all(np.abs(self.col_sums() - 1.0) <= tol)
        )

    def is_singly_stochastic(self, tol: float = VALIDITY_TOL) -> bool:
        return bool(np.all(np.abs(self.row_sums() - 1.0) <= tol))

    # -- serialization -------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {"k": self.k, "entries": [[float(x) for x in row] for row in self.entries]}
        )

    @classmethod
    def from_json(cls, text: str) -> "OverlapMatrix":
        data = json.loads(text)
        k = int(data["k"])
        return cls(k=k, entries=_as_matrix(data["entries"], k))

    def __repr__(self) -> str:  # keep reprs short in test output
        return f"OverlapMatrix(k={self.k}, mass={float(self.entries.sum()):.6f})"


@dataclass(frozen=True)
class ModelParams:
    """Graph model parameters: colors k, average degree d, optional n and m.

    When ``n`` is given and ``m`` is not, the edge count defaults to
    ceil(d*n/2) so that the average degree of the sampled graph matches d.
    """

    k: int
    d: float
    n: Optional[int] = None
    m: Optional[int] = None

    def __post_init__(self) -> None:
        if self.k < 2:
            raise DomainError("k must be at least 2")
        if not self.d > 0:
            raise DomainError("average degree d must be positive")
        if self.n is not None:
            if self.n < 1:
                raise DomainError("n must be positive when given")
            if self.m is None:
                object.__setattr__(self, "m", math.ceil(self.d * self.n / 2))
        if self.m is not None and self.m < 0:
            raise DomainError("m must be nonnegative")

    @classmethod
    def from_counts(cls, n: int, m: int, k: int) -> "ModelParams":
        """Parameters for a concrete instance, with d = 2m/n."""
        if n < 1:
            raise DomainError("n must be positive")
        return cls(k=k, d=2.0 * m / n, n=n, m=m)


@dataclass(frozen=True)
class ConstantsProfile:
    """Named constants used by region classification and graph structure checks.

    Two stock profiles exist.  ``paper(k)`` keeps every constant at its
    published asymptotic value, which makes several checks vacuous at any
    implementable size (the separability gap closes because kappa exceeds
    1, and the degree thresholds exceed any desk-scale degree).  ``desk(k)``
    caps kappa at 0.4 and scales the degree thresholds 100/300/15 down to
    3/5/2 so that the structural relationships can actually be exercised.
    """

    name: str
    overlap_high: float = 0.51
    overlap_low: float = 0.49
    singly_cut: float = 0.15
    kappa: float = 0.4
    kappa_capped: bool = False
    core_degree: int = 100
    w_degree: int = 300
    p2_degree: int = 15
    density_factor: int = 5
    # Slack constants standing in for hidden vanishing-in-k factors in the
    # free-vertex count bounds; calibrated at desk scale.
    p4_slack1: float = 1.0
    p4_slack2: float = 0.35

    def __post_init__(self) -> None:
        if not (0 < self.overlap_low <= self.overlap_high < 1):
            raise DomainError("need 0 < overlap_low <= overlap_high < 1")
        if not self.kappa > 0:
            raise DomainError("kappa must be positive")

    @staticmethod
    def raw_kappa(k: int) -> float:
        return math.log(k) ** 20 / k

    @classmethod
    def paper(cls, k: int) -> "ConstantsProfile":
        return cls(name="paper", kappa=cls.raw_kappa(k), kappa_capped=False)

    @classmethod
    def desk(cls, k: int) -> "ConstantsProfile":
        raw = cls.raw_kappa(k)
        return cls(
            name="desk",
            kappa=min(raw, 0.4),
            kappa_capped=raw > 0.4,
            core_degree=3,
            w_degree=5,
            p2_degree=2,
        )

    @classmethod
    def by_name(cls, name: str, k: int) -> "ConstantsProfile":
        if name == "paper":
            return cls.paper(k)
        if name == "desk":
            return cls.desk(k)
        raise DomainError(f"unknown constants profile {name!r}")


@dataclass(frozen=True)
class RegionReport:
    """Classification of an overlap matrix against a constants profile."""

    s: int
    separable: bool
    in_d_good: bool
    row_high_cols: tuple
    profile_name: str

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "separable": self.separable,
            "in_d_good": self.in_d_good,
            "row_high_cols": [
                None if c is None else int(c) for c in self.row_high_cols
            ],
            "profile": self.profile_name,
        }


# ---------------------------------------------------------------------------
# scalar entropies


def entropy_h(z: float) -> float:
    """Binary entropy -z ln z - (1-z) ln(1-z), with 0 ln 0 = 0."""
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"binary entropy needs z in [0,1], got {z!r}")
    out = 0.0
    if z > 0.0:
        out -= z * math.log(z)
    if z < 1.0:
        out -= (1.0 - z) * math.log(1.0 - z)
    return out


def entropy_H(p: Iterable[float], tol: float = VALIDITY_TOL) -> float:
    """Shannon entropy -sum p_i ln p_i of a probability vector, 0 ln 0 = 0."""
    arr = np.asarray(list(p) if not isinstance(p, np.ndarray) else p, dtype=float)
    arr = arr.reshape(-1)
    if np.any(arr < 0):
        raise DomainError("probability entries must be nonnegative")
    total = float(arr.sum())
    if abs(total - 1.0) > tol:
        raise DomainError(f"probabilities must sum to 1, got {total!r}")
    pos = arr[arr > 0]
    return float(-np.sum(pos * np.log(pos)))


# ---------------------------------------------------------------------------
# objective on overlap matrices


def _log_arg(rho: OverlapMatrix) -> float:
    return 1.0 - 2.0 / rho.k + rho.norm2_sq() / rho.k**2


def energy_E(rho: OverlapMatrix, params: ModelParams) -> float:
    """Energy term (d/2) ln(1 - 2/k + ||rho||^2 / k^2)."""
    if params.k != rho.k:
        raise DomainError("matrix and params disagree on k")
    arg = _log_arg(rho)
    if arg <= 0:
        raise DomainError(f"energy log argument must be positive, got {arg!r}")
    return 0.5 * params.d * math.log(arg)


def f_value(rho: OverlapMatrix, params: ModelParams) -> float:
    """Objective ln k - (1/k) sum rho_ij ln rho_ij + energy term."""
    if params.k != rho.k:
        raise DomainError("matrix and params disagree on k")
    k = rho.k
    arr = rho.entries
    pos = arr[arr > 0]
    ent = math.log(k) - float(np.sum(pos * np.log(pos))) / k
    return ent + energy_E(rho, params)


def f_gradient(rho: OverlapMatrix, params: ModelParams) -> np.ndarray:
    """Componentwise partial derivatives of the objective.

    Requires strictly positive entries: the entropy part contributes
    -(1/k)(1 + ln rho_ij), which diverges at zero.
    """
    if params.k != rho.k:
        raise DomainError("matrix and params disagree on k")
    arr = rho.entries
    if np.any(arr <= 0):
        raise DomainError("gradient needs strictly positive entries")
    k = rho.k
    arg = _log_arg(rho)
    if arg <= 0:
        raise DomainError(f"energy log argument must be positive, got {arg!r}")
    return -(1.0 + np.log(arr)) / k + params.d * arr / (k * k * arg)


# ---------------------------------------------------------------------------
# named matrices


def special_matrix(kind: str, k: int, s: Optional[int] = None) -> OverlapMatrix:
    """Named matrices used throughout the analysis.

    barycenter: all entries 1/k.
    identity:   the identity permutation matrix.
    stable:     (1 - 1/k) id + (1/k^2) all-ones; doubly stochastic, every
                diagonal entry above the stability cut.
    half:       first k/2 rows are identity rows, the rest all 1/k (singly
                stochastic only); k must be even.
    s_stable:   first s diagonal entries 1, complementary lower-right block
                uniform 1/(k-s); squared norm s+1.
    """
    if k < 2:
        raise DomainError("need at least two colors")
    if kind == "barycenter":
        return OverlapMatrix(k=k, entries=np.full((k, k), 1.0 / k))
    if kind == "identity":
        return OverlapMatrix(k=k, entries=np.eye(k))
    if kind == "stable":
        arr = (1.0 - 1.0 / k) * np.eye(k) + np.full((k, k), 1.0 / k**2)
        return OverlapMatrix(k=k, entries=arr)
    if kind == "half":
        if k % 2 != 0:
            raise DomainError("half matrix needs even k")
        arr = np.full((k, k), 1.0 / k)
        arr[: k // 2] = np.eye(k)[: k // 2]
        return OverlapMatrix(k=k, entries=arr)
    if kind == "s_stable":
        if s is None:
            raise DomainError("s_stable needs the parameter s")
        if not 0 <= s <= k:
            raise DomainError(f"s must lie in [0, k], got {s}")
        arr = np.zeros((k, k))
        for i in range(s):
            arr[i, i] = 1.0
        if s < k:
            arr[s:, s:] = 1.0 / (k - s)
        return OverlapMatrix(k=k, entries=arr)
    raise DomainError(f"unknown special matrix kind {kind!r}")


def classify_region(rho: OverlapMatrix, profile: ConstantsProfile) -> RegionReport:
    """Count high entries, test separability, and locate the matrix.

    s counts entries strictly above overlap_high.  The matrix is separable
    when no entry falls strictly inside (overlap_high, 1 - kappa); when
    kappa >= 1 - overlap_high that interval is empty and every matrix is
    separable.  The good region consists of separable matrices with s < k.
    """
    arr = rho.entries
    hi = profile.overlap_high
    upper = 1.0 - profile.kappa
    s = int(np.count_nonzero(arr > hi))
    separable = not bool(np.any((arr > hi) & (arr < upper)))
    row_high: list = []
    for i in range(rho.k):
        cols = np.nonzero(arr[i] > hi)[0]
        row_high.append(int(cols[0]) if cols.size else None)
    return RegionReport(
        s=s,
        separable=separable,
        in_d_good=separable and s < rho.k,
        row_high_cols=tuple(row_high),
        profile_name=profile.name,
    )


def permute(rho: OverlapMatrix, row_perm: Sequence[int], col_perm: Sequence[int]) -> OverlapMatrix:
    """Reindex rows and columns by the given permutations of range(k)."""
    k = rho.k
    rp = list(row_perm)
    cp = list(col_perm)
    if sorted(rp) != list(range(k)) or sorted(cp) != list(range(k)):
        raise DomainError("row and column permutations must each cover range(k)")
    arr = rho.entries[np.ix_(rp, cp)]
    exact = None
    if rho.exact is not None:
        exact = tuple(tuple(rho.exact[i][j] for j in cp) for i in rp)
    return OverlapMatrix(k=k, entries=arr, exact=exact)
