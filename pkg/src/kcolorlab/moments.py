"""Exact and Monte-Carlo moments of the coloring count, plus tail utilities.

The exact routes work with arbitrary-precision rationals end to end: maps
(or pairs of maps) are enumerated vectorized, reduced to integer histograms
over the forbidden-pair count, and the histogram is then folded against the
hypergeometric edge-placement probability.  The overlap-resolved moment
uses the independent multinomial closed form per intersection table, so the
partition identity between the two routes is a genuine cross-check, never a
tautology.
"""

from __future__ import annotations

import csv
import functools
import json
import math
from dataclasses import dataclass
from decimal import Decimal, getcontext
from fractions import Fraction
from typing import Iterator, Optional, TextIO, Union

import numpy as np

from .errors import BudgetError, DomainError
from .graphs import enumerate_colorings, sample_graph
from .overlap import ConstantsProfile, ModelParams, OverlapMatrix, special_matrix, f_value
from .seeds import rng_for

#: Cap on the number of (pairs of) maps enumerated by the exact routes.
DEFAULT_MOMENT_BUDGET = 60_000_000

Number = Union[Fraction, float]


@dataclass(frozen=True)
class MomentReport:
    """One moment computation: exact rational or Monte-Carlo estimate."""

    n: int
    m: int
    k: int
    order: int
    mode: str
    value: Number
    balanced_only: bool = False
    std_error: Optional[float] = None
    trials: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.mode == "exact":
            if not isinstance(self.value, Fraction):
                raise DomainError("exact reports carry rational values")
            if self.std_error is not None:
                raise DomainError("exact reports carry no standard error")
        elif self.mode == "monte_carlo":
            if self.trials is None or self.trials < 1:
                raise DomainError("monte_carlo reports need trials >= 1")
        else:
            raise DomainError(f"unknown mode {self.mode!r}")

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "order": self.order,
            "mode": self.mode,
            "balanced_only": self.balanced_only,
            "std_error": self.std_error,
            "trials": self.trials,
            "seed": self.seed,
        }
        if isinstance(self.value, Fraction):
            payload["value"] = _decimal_string(self.value)
            payload["value_numerator"] = str(self.value.numerator)
            payload["value_denominator"] = str(self.value.denominator)
        else:
            payload["value"] = float(self.value)
        return json.dumps(payload)

    def csv_row(self) -> dict:
        value = (
            _decimal_string(self.value)
            if isinstance(self.value, Fraction)
            else repr(float(self.value))
        )
        return {
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "order": self.order,
            "mode": self.mode,
            "value": value,
            "stderr": "" if self.std_error is None else repr(self.std_error),
            "seed": "" if self.seed is None else self.seed,
        }


MOMENT_CSV_FIELDS = ["n", "m", "k", "order", "mode", "value", "stderr", "seed"]


def write_moment_csv(reports, out: TextIO) -> None:
    writer = csv.DictWriter(out, fieldnames=MOMENT_CSV_FIELDS)
    writer.writeheader()
    for rep in reports:
        writer.writerow(rep.csv_row())


def _decimal_string(x: Fraction, digits: int = 40) -> str:
    getcontext().prec = digits
    return str(Decimal(x.numerator) / Decimal(x.denominator))


@dataclass(frozen=True)
class PartitionLabel:
    """Which Laplace region an overlap matrix falls into."""

    label: str
    eta: float
    profile_name: str


@dataclass(frozen=True)
class McReport:
    """Monte-Carlo colorability estimate with a 95% confidence halfwidth."""

    n: int
    m: int
    k: int
    fraction: float
    ci95: float
    trials: int
    successes: int
    seed: int
    method: str


# ---------------------------------------------------------------------------
# exact moments via map enumeration


def _all_maps(n: int, k: int) -> np.ndarray:
    """All k^n maps as a (k^n, n) uint8 array in mixed-radix order."""
    count = k**n
    idx = np.arange(count, dtype=np.int64)
    out = np.empty((count, n), dtype=np.uint8)
    for v in range(n):
        out[:, v] = (idx // (k ** (n - 1 - v))) % k
    return out


def _balanced_mask(class_counts: np.ndarray, n: int, k: int) -> np.ndarray:
    """Vectorized integer balancedness test on a (rows, k) count array."""
    dev = k * class_counts.astype(np.int64) - n
    return np.all(dev * dev <= k * k * n, axis=1)


def _class_counts(maps: np.ndarray, k: int) -> np.ndarray:
    return np.stack([(maps == c).sum(axis=1) for c in range(k)], axis=1)


def _fold_histogram(hist: dict, n: int, m: int) -> Fraction:
    """Sum counts[F] * C(N-F, m) / C(N, m) exactly."""
    N = math.comb(n, 2)
    if m > N:
        raise DomainError(f"m={m} exceeds C(n,2)={N}")
    total = Fraction(0)
    denom = math.comb(N, m)
    for F, count in hist.items():
        total += Fraction(count * math.comb(N - F, m), denom)
    return total


@functools.lru_cache(maxsize=64)
def _moment_histogram(n: int, k: int, order: int, balanced_only: bool) -> tuple:
    """Histogram of forbidden-pair counts over all (pairs of) kept maps.

    Returned as a sorted tuple of (F, count) pairs so the cache stores an
    immutable value; the fold over m reuses one histogram for every m.
    """
    comb2 = np.array([math.comb(s, 2) for s in range(n + 1)], dtype=np.int64)
    maps = _all_maps(n, k)
    counts = _class_counts(maps, k)
    f_single = comb2[counts].sum(axis=1)
    balanced = _balanced_mask(counts, n, k)
    keep = balanced if balanced_only else np.ones(len(maps), dtype=bool)

    if order == 1:
        hist_arr = np.bincount(f_single[keep])
        return tuple(
            (F, int(c)) for F, c in enumerate(hist_arr.tolist()) if c
        )

    max_f = math.comb(n, 2)
    global_hist = np.zeros(2 * max_f + 1, dtype=np.int64)
    sigma_rows = np.nonzero(keep)[0]
    for row in sigma_rows:
        sigma = maps[row]
        joint = sigma[None, :].astype(np.int16) * k + maps
        f_o = np.zeros(len(maps), dtype=np.int64)
        for code in range(k * k):
            f_o += comb2[(joint == code).sum(axis=1)]
        f_pair = int(f_single[row]) + f_single - f_o
        np.add.at(global_hist, f_pair[keep], 1)
    return tuple((F, int(c)) for F, c in enumerate(global_hist.tolist()) if c)


def exact_moment(
    n: int,
    m: int,
    k: int,
    order: int = 1,
    balanced_only: bool = False,
    budget: int = DEFAULT_MOMENT_BUDGET,
) -> MomentReport:
    """Exact moment of the proper-coloring count under the m-edge model.

    Order 1 sums the properness probability C(N - F(map), m) / C(N, m)
    over all (optionally balanced) maps; order 2 does the same over pairs
    of maps with the inclusion-exclusion forbidden count of the pair.  The
    heavy lifting is an integer histogram over forbidden counts, cached per
    (n, k, order, balanced_only) so sweeps over m pay for it once.
    """
    if order not in (1, 2):
        raise DomainError("order must be 1 or 2")
    if n < 1 or k < 1:
        raise DomainError("need n >= 1 and k >= 1")
    if k**(order * n) > budget:
        raise BudgetError(
            f"enumerating k^{order * n} = {k ** (order * n)} maps exceeds budget {budget}"
        )
    hist = dict(_moment_histogram(n, k, order, balanced_only))
    return MomentReport(
        n=n, m=m, k=k, order=order, mode="exact",
        value=_fold_histogram(hist, n, m), balanced_only=balanced_only,
    )


# ---------------------------------------------------------------------------
# overlap-resolved second moment (independent multinomial route)


def _multinomial(n: int, cells) -> int:
    out = math.factorial(n)
    for c in cells:
        out //= math.factorial(c)
    return out


def overlap_to_counts(rho: OverlapMatrix, n: int) -> list:
    """Integer intersection table from a matrix with entries multiples of k/n."""
    k = rho.k
    counts = []
    for i in range(k):
        row = []
        for j in range(k):
            if rho.exact is not None:
                cell = rho.exact[i][j] * n / k
            else:
                cell = Fraction(float(rho.entries[i, j])).limit_denominator(10**12) * n / k
            if cell.denominator != 1:
                raise DomainError(
                    f"entry ({i},{j}) = {float(rho.entries[i, j])!r} is not a multiple of k/n"
                )
            row.append(int(cell))
        counts.append(row)
    if sum(sum(r) for r in counts) != n:
        raise DomainError("intersection counts must sum to n")
    return counts


def exact_overlap_moment(n: int, m: int, k: int, rho: OverlapMatrix) -> MomentReport:
    """Exact contribution of one overlap matrix to the balanced second moment.

    Counts the balanced pairs realizing the matrix (a multinomial in the
    intersection table; zero when either marginal is unbalanced) and
    multiplies by the shared properness probability of the pair.
    """
    counts = overlap_to_counts(rho, n)
    rows = [sum(r) for r in counts]
    cols = [sum(counts[i][j] for i in range(k)) for j in range(k)]

    def balanced(sizes) -> bool:
        return all((k * s - n) ** 2 <= k * k * n for s in sizes)

    if not (balanced(rows) and balanced(cols)):
        value = Fraction(0)
    else:
        pairs = _multinomial(n, (c for row in counts for c in row))
        f_pair = (
            sum(math.comb(r, 2) for r in rows)
            + sum(math.comb(c, 2) for c in cols)
            - sum(math.comb(c, 2) for row in counts for c in row)
        )
        N = math.comb(n, 2)
        if m > N:
            raise DomainError(f"m={m} exceeds C(n,2)={N}")
        value = Fraction(pairs * math.comb(N - f_pair, m), math.comb(N, m))
    return MomentReport(
        n=n, m=m, k=k, order=2, mode="exact", value=value, balanced_only=True,
    )


def realizable_overlaps(n: int, k: int, balanced_only: bool = True) -> Iterator[OverlapMatrix]:
    """All overlap matrices of (optionally balanced) map pairs at size n.

    Enumerates nonnegative integer k x k tables summing to n; the balanced
    filter applies to both marginals.
    """

    def tables(cells: int, total: int):
        if cells == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in tables(cells - 1, total - first):
                yield (first,) + rest

    def balanced(sizes) -> bool:
        return all((k * s - n) ** 2 <= k * k * n for s in sizes)

    for flat in tables(k * k, n):
        grid = [list(flat[i * k : (i + 1) * k]) for i in range(k)]
        rows = [sum(r) for r in grid]
        cols = [sum(grid[i][j] for i in range(k)) for j in range(k)]
        if balanced_only and not (balanced(rows) and balanced(cols)):
            continue
        yield OverlapMatrix.from_counts(np.array(grid, dtype=object), n)


def logscale_gap(n: int, k: int, d: float, rho: OverlapMatrix) -> float:
    """|(1/n) ln E[Z_rho,bal] - f(rho)| at m = ceil(d n / 2).

    Undefined (domain error) when the exact moment vanishes, which happens
    when the matrix is unrealizable by balanced pairs at this n.
    """
    m = math.ceil(d * n / 2)
    report = exact_overlap_moment(n, m, k, rho)
    value = report.value
    if value == 0:
        raise DomainError("overlap moment is zero; log-scale gap undefined")
    log_value = math.log(value.numerator) - math.log(value.denominator)
    params = ModelParams(k=k, d=d)
    return abs(log_value / n - f_value(rho, params))


# ---------------------------------------------------------------------------
# Monte-Carlo colorability


def _has_coloring(g, k: int, budget: int) -> bool:
    for _ in enumerate_colorings(g, k, "all", budget):
        return True
    return False


def mc_colorable(
    n: int,
    m: int,
    k: int,
    trials: int,
    seed: int,
    budget: int = 5_000_000,
) -> McReport:
    """Fraction of m-edge samples admitting a proper k-coloring, with 95% CI.

    The halfwidth uses the normal approximation, switching to the Wilson
    interval when either outcome count drops below 30.
    """
    if trials < 1:
        raise DomainError("need at least one trial")
    params = ModelParams.from_counts(n=n, m=m, k=k) if m > 0 else ModelParams(
        k=k, d=1e-9, n=n, m=0
    )
    successes = 0
    for t in range(trials):
        g = sample_graph("gnm", params, seed=int(rng_for(seed, 3, t).integers(2**62)))
        if _has_coloring(g, k, budget):
            successes += 1
    frac = successes / trials
    failures = trials - successes
    if successes >= 30 and failures >= 30:
        half = 1.96 * math.sqrt(frac * (1.0 - frac) / trials)
        method = "normal"
    else:
        z = 1.96
        denom = 1.0 + z * z / trials
        center = (frac + z * z / (2 * trials)) / denom
        wilson_half = (
            z
            * math.sqrt(frac * (1.0 - frac) / trials + z * z / (4 * trials * trials))
            / denom
        )
        # report a halfwidth around the raw fraction that covers the whole
        # Wilson interval, so |fraction - truth| <= ci95 remains the contract
        half = max(frac - (center - wilson_half), (center + wilson_half) - frac)
        method = "wilson"
    return McReport(
        n=n, m=m, k=k, fraction=frac, ci95=half, trials=trials,
        successes=successes, seed=seed, method=method,
    )


def paley_zygmund(ez: Number, ez2: Number) -> Number:
    """Second-moment lower bound ez^2 / ez2 on P[Z > 0]."""
    if not ez > 0 or not ez2 > 0:
        raise DomainError("moments must be positive")
    if isinstance(ez, Fraction) and isinstance(ez2, Fraction):
        return ez * ez / ez2
    return float(ez) ** 2 / float(ez2)


# ---------------------------------------------------------------------------
# Laplace partition and Birkhoff rounding


def laplace_partition(
    rho: OverlapMatrix, eta: float, profile: ConstantsProfile
) -> PartitionLabel:
    """First matching region: near barycenter, non-separable, all-rows-stable, rest."""
    if not eta > 0:
        raise DomainError("eta must be positive")
    bar = special_matrix("barycenter", rho.k)
    dist = float(np.linalg.norm(rho.entries - bar.entries))
    if dist < eta:
        label = "R0"
    else:
        hi = profile.overlap_high
        upper = 1.0 - profile.kappa
        if bool(np.any((rho.entries > hi) & (rho.entries < upper))):
            label = "R1"
        elif all(bool(np.any(rho.entries[i] > hi)) for i in range(rho.k)):
            label = "R2"
        else:
            label = "R3"
    return PartitionLabel(label=label, eta=eta, profile_name=profile.name)


def round_to_birkhoff(rho: OverlapMatrix, tol: float = 1e-12) -> OverlapMatrix:
    """Project a mass-k matrix onto the doubly stochastic set by mass transfers.

    First rows: mass moves from rows above sum 1 to rows below, carrying
    the donor row's column profile, until all row sums equal 1.  Then the
    same operation runs on columns, which cannot disturb the row sums
    because each column transfer moves identical amounts within every row.
    Doubly stochastic inputs pass through unchanged (idempotence).
    """
    arr = rho.entries.copy()
    k = rho.k

    def fix_rows(a: np.ndarray) -> None:
        for _ in range(4 * k):
            sums = a.sum(axis=1)
            excess = np.argmax(sums)
            deficit = np.argmin(sums)
            if sums[excess] - 1.0 <= tol or 1.0 - sums[deficit] <= tol:
                return
            tau = min(sums[excess] - 1.0, 1.0 - sums[deficit])
            share = a[excess] * (tau / sums[excess])
            a[excess] -= share
            a[deficit] += share

    fix_rows(arr)
    arr = arr.T.copy()
    fix_rows(arr)
    arr = arr.T.copy()
    return OverlapMatrix(k=k, entries=np.clip(arr, 0.0, None), tol=1e-8)


def chernoff_tail(mu: float, t: float, side: str) -> float:
    """Poisson-style tail bound exp(-mu * phi(+-t/mu)) with phi(x)=(1+x)ln(1+x)-x."""
    if not mu > 0 or not t > 0:
        raise DomainError("need mu > 0 and t > 0")
    if side == "upper":
        x = t / mu
    elif side == "lower":
        if not t < mu:
            raise DomainError("lower tail needs t < mu")
        x = -t / mu
    else:
        raise DomainError(f"unknown side {side!r}")
    return math.exp(-mu * phi(x))


def phi(x: float) -> float:
    """The Chernoff rate function (1+x)ln(1+x) - x, with phi(-1) = 1."""
    if x < -1:
        raise DomainError("phi needs x >= -1")
    if x == -1:
        return 1.0
    return (1.0 + x) * math.log1p(x) - x
