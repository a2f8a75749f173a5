"""Local-variations machinery over the doubly stochastic overlap matrices.

This module turns the variational argument for "the barycenter is the
global maximizer on the good region" into explicit numerics:

* row averaging and pairwise mass-transfer moves with their sign calculus,
* the stationary step size delta* of the one-variable transfer problem,
* the xi profile whose single interior minimum organizes the s-stable case,
* a projected coordinate ascent restricted to a stability region,
* a multistart certification report comparing the best found value with
  the barycenter value, and
* the closed-form Hessian of the objective at the barycenter in the
  standard chart that eliminates one entry.

Everything is fixed-k numerics: the reports are labelled evidence, never
asymptotic statements.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import DomainError
from .overlap import (
    ConstantsProfile,
    ModelParams,
    OverlapMatrix,
    f_gradient,
    f_value,
    special_matrix,
)
from .seeds import rng_for

#: Entries are clamped to this floor before gradient evaluation only; the
#: matrices themselves keep their exact values.
GRADIENT_FLOOR = 1e-12

#: Stream tags for seed derivation (keep stable across releases).
_STREAM_START = 1
_STREAM_SAMPLER = 2


# ---------------------------------------------------------------------------
# configuration and report types


@dataclass(frozen=True)
class AscentConfig:
    """Knobs for the projected coordinate ascent and its multistart driver."""

    max_iterations: int = 400
    step_tolerance: float = 1e-10
    multistart_count: int = 64
    seed: int = 0
    region: Optional[int] = None

    def __post_init__(self) -> None:
        if self.max_iterations <= 0:
            raise DomainError("max_iterations must be positive")
        if not self.step_tolerance > 0:
            raise DomainError("step_tolerance must be positive")
        if self.multistart_count < 1:
            raise DomainError("multistart_count must be positive")
        if self.region is not None and self.region < 0:
            raise DomainError("region s must be nonnegative")


@dataclass(frozen=True)
class AscentResult:
    """Outcome of one ascent run."""

    matrix: OverlapMatrix
    value: float
    iterations: int
    converged: bool
    hit_iteration_cap: bool


@dataclass(frozen=True)
class CertificationReport:
    """Multistart evidence that the barycenter maximizes f on the good region.

    ``margin`` is reference_value - best_value; a positive margin means no
    start beat the barycenter.  The singly stochastic structural family is
    evaluated separately (``family_*`` fields) because its members are not
    doubly stochastic and can exceed the barycenter value at fixed k.
    """

    k: int
    d: float
    best_matrix: OverlapMatrix
    best_value: float
    reference_value: float
    margin: float
    starts_run: int
    converged_to_barycenter: bool
    profile_name: str
    seed: int
    per_region_best: dict = field(compare=False)
    failed_starts: int = 0
    capped_runs: int = 0
    family_best_value: float = float("nan")
    family_best_s: int = 0
    family_best_alpha: float = float("nan")
    stable_crossover_d: float = float("nan")

    def to_json(self) -> str:
        payload = {
            "k": self.k,
            "d": self.d,
            "best_matrix": json.loads(self.best_matrix.to_json()),
            "best_value": self.best_value,
            "reference_value": self.reference_value,
            "margin": self.margin,
            "starts_run": self.starts_run,
            "converged_to_barycenter": self.converged_to_barycenter,
            "profile": self.profile_name,
            "seed": self.seed,
            "per_region_best": {str(s): v for s, v in self.per_region_best.items()},
            "failed_starts": self.failed_starts,
            "capped_runs": self.capped_runs,
            "family_best_value": self.family_best_value,
            "family_best_s": self.family_best_s,
            "family_best_alpha": self.family_best_alpha,
            "stable_crossover_d": self.stable_crossover_d,
        }
        return json.dumps(payload)


@dataclass(frozen=True)
class XiProfile:
    """The profile xi(b) = k^(2b/k) (1/b - 1/k) and its interior minimum mu."""

    k: int
    mu: float
    monotone_segments: str

    def xi(self, b: float) -> float:
        if not 0 < b:
            raise DomainError("xi needs b > 0")
        return self.k ** (2.0 * b / self.k) * (1.0 / b - 1.0 / self.k)

    def xi_prime(self, b: float) -> float:
        if not 0 < b:
            raise DomainError("xi' needs b > 0")
        pw = self.k ** (2.0 * b / self.k)
        return pw * (
            (2.0 * math.log(self.k) / self.k) * (1.0 / b - 1.0 / self.k)
            - 1.0 / (b * b)
        )

    def grid_check(self, points: int = 10_000) -> dict:
        """Count sign changes of xi' on (0, k/2) and locate the crossing."""
        bs = np.linspace(1e-6, self.k / 2.0, points)
        pw = self.k ** (2.0 * bs / self.k)
        deriv = pw * (
            (2.0 * math.log(self.k) / self.k) * (1.0 / bs - 1.0 / self.k)
            - 1.0 / (bs * bs)
        )
        signs = np.sign(deriv)
        flips = np.nonzero(np.diff(signs) != 0)[0]
        crossing = float(bs[flips[0]]) if flips.size else float("nan")
        return {
            "sign_changes": int(flips.size),
            "crossing_near": crossing,
            "decreasing_before_mu": bool(np.all(deriv[bs < self.mu * 0.999] < 0)),
            "increasing_after_mu": bool(np.all(deriv[bs > self.mu * 1.001] > 0)),
        }


@dataclass(frozen=True)
class HessianReport:
    """Hessian of the objective at the barycenter in the dropped-entry chart."""

    k: int
    d: float
    closed_form_c: float
    matrix: np.ndarray
    spectrum: tuple
    negative_definite: bool


# ---------------------------------------------------------------------------
# elementary moves


def average_rows(rho: OverlapMatrix, i: int, J: Sequence[int]) -> OverlapMatrix:
    """Replace the row-i entries on column set J by their mean."""
    cols = sorted(set(int(j) for j in J))
    if not cols:
        raise DomainError("column set J must be nonempty")
    if cols[0] < 0 or cols[-1] >= rho.k or not 0 <= i < rho.k:
        raise DomainError("indices out of range")
    arr = rho.entries.copy()
    arr[i, cols] = arr[i, cols].mean()
    return OverlapMatrix(k=rho.k, entries=arr)


def variation_sign(rho: OverlapMatrix, i: int, j: int, l: int, params: ModelParams) -> int:
    """Sign of the derivative difference for a mass transfer within row i.

    Computes sign(1 + delta/rho_ij - exp(d*delta / (k - 2 + ||rho||^2/k)))
    with delta = rho_il - rho_ij, which equals the sign of
    d f/d rho_ij - d f/d rho_il.
    """
    arr = rho.entries
    rij = float(arr[i, j])
    ril = float(arr[i, l])
    if rij <= 0 or ril <= 0:
        raise DomainError("variation sign needs strictly positive entries")
    delta = ril - rij
    k = rho.k
    denom = k - 2.0 + rho.norm2_sq() / k
    expr = 1.0 + delta / rij - math.exp(params.d * delta / denom)
    if expr > 0:
        return 1
    if expr < 0:
        return -1
    return 0


def delta_star(
    rho: OverlapMatrix,
    i: int,
    j: int,
    params: ModelParams,
    tol: float = 1e-12,
    max_iter: int = 500,
) -> Optional[float]:
    """Positive stationary step of the in-row transfer problem, if it exists.

    The defining equation is 1 + delta/rho_ij = exp(c * delta) with
    c = d / (k - 2 + ||rho||^2 / k).  A positive root exists exactly when
    the line is initially steeper, i.e. 1/rho_ij > c; it is then unique and
    found by doubling + bisection to absolute tolerance ``tol``.
    """
    rij = float(rho.entries[i, j])
    if rij <= 0:
        raise DomainError("delta_star needs a strictly positive entry")
    k = rho.k
    c = params.d / (k - 2.0 + rho.norm2_sq() / k)
    if not 1.0 / rij > c:
        return None

    def g(delta: float) -> float:
        return 1.0 + delta / rij - math.exp(c * delta)

    hi = 1.0
    steps = 0
    while g(hi) > 0:
        hi *= 2.0
        steps += 1
        if steps > max_iter:
            raise DomainError("delta_star bracketing failed to find a sign change")
    lo = 0.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    raise DomainError("delta_star bisection did not reach tolerance")


def xi_profile(k: int) -> XiProfile:
    """Profile record for xi on (0, k/2); needs k >= 8 so mu is real."""
    if k < 8:
        raise DomainError("xi profile needs k >= 8")
    inside = 1.0 - 2.0 / math.log(k)
    if inside <= 0:
        raise DomainError("xi profile needs ln k > 2")
    mu = 0.5 * k * (1.0 - math.sqrt(inside))
    return XiProfile(
        k=k,
        mu=mu,
        monotone_segments=f"decreasing on (0, {mu:.6g}), increasing on ({mu:.6g}, {k / 2})",
    )


# ---------------------------------------------------------------------------
# region-restricted ascent


def _f_raw(arr: np.ndarray, k: int, d: float) -> float:
    s = kernels.sum_xlogx(arr)
    q = kernels.norm_sq(arr)
    arg = 1.0 - 2.0 / k + q / (k * k)
    if arg <= 0:
        raise DomainError("energy log argument must be positive")
    return math.log(k) - s / k + 0.5 * d * math.log(arg)


def _region_ok(arr: np.ndarray, s: Optional[int], profile: ConstantsProfile, tol: float = 1e-7) -> bool:
    rows = arr.sum(axis=1)
    cols = arr.sum(axis=0)
    if np.any(np.abs(rows - 1.0) > tol) or np.any(np.abs(cols - 1.0) > tol):
        return False
    hi = profile.overlap_high
    upper = 1.0 - profile.kappa
    if np.any((arr > hi) & (arr < upper)):
        return False
    count = int(np.count_nonzero(arr > hi))
    if s is None:
        return count < arr.shape[0]
    return count == s


def _move_caps(arr: np.ndarray, profile: ConstantsProfile):
    """Per-entry masks and step caps that keep a rotation inside the region.

    A non-stable entry may grow up to overlap_high and shrink to zero; a
    stable entry may grow up to 1 and shrink down to 1 - kappa.  Capping at
    these walls preserves both separability and the stability count.
    """
    hi = profile.overlap_high
    upper = 1.0 - profile.kappa
    stable = arr > hi
    gain_cap = np.where(stable, 1.0 - arr, hi - arr)
    lose_cap = np.where(stable, arr - upper, arr)
    can_gain = gain_cap > 0
    can_lose = lose_cap > 0
    return can_gain, can_lose, gain_cap, lose_cap


def _line_search(arr: np.ndarray, quad, t_max: float, d: float, points: int = 33, rounds: int = 3):
    """Best step along a rotation move by iterated grid refinement."""
    i1, j1, i2, j2 = quad
    lo, hi = 0.0, t_max
    best_t, best_f = 0.0, -np.inf
    for _ in range(rounds):
        ts = np.linspace(lo, hi, points)
        vals = kernels.line_f_values(arr, i1, j1, i2, j2, ts, d)
        idx = int(np.argmax(vals))
        best_t, best_f = float(ts[idx]), float(vals[idx])
        span = (hi - lo) / (points - 1)
        lo, hi = max(0.0, best_t - span), min(t_max, best_t + span)
    return best_t, best_f


def _apply_rotation(arr: np.ndarray, quad, t: float) -> None:
    i1, j1, i2, j2 = quad
    arr[i1, j1] += t
    arr[i2, j2] += t
    arr[i1, j2] -= t
    arr[i2, j1] -= t
    np.clip(arr, 0.0, None, out=arr)


def _averaging_proposals(
    arr: np.ndarray,
    s: Optional[int],
    profile: ConstantsProfile,
    d: float,
    current_f: float,
):
    """Row-averaging + rebalancing proposals; best improving candidate or None.

    Averaging the non-stable part of a row never decreases the entropy term
    but breaks column sums, so candidates are rebalanced before being
    checked for region membership and an actual f improvement.
    """
    k = arr.shape[0]
    hi = profile.overlap_high
    best = None
    candidates = []
    for i in range(k):
        cols = np.nonzero(arr[i] <= hi)[0]
        if cols.size < 2:
            continue
        cand = arr.copy()
        cand[i, cols] = cand[i, cols].mean()
        if np.any(cand <= 0):
            cand = np.clip(cand, GRADIENT_FLOOR, None)
        candidates.append(kernels.sinkhorn_balance(cand, 200, 1e-12))
    for cand in candidates:
        if not _region_ok(cand, s, profile):
            continue
        f_new = _f_raw(cand, k, d)
        if f_new > current_f and (best is None or f_new > best[1]):
            best = (cand, f_new)
    return best


def ascend_region(
    start: OverlapMatrix,
    params: ModelParams,
    config: AscentConfig,
    profile: Optional[ConstantsProfile] = None,
) -> AscentResult:
    """Projected coordinate ascent inside a stability region.

    Moves are doubly-stochasticity-preserving 2x2 rotations chosen by the
    gradient, with step caps that keep every entry on its side of the
    separability walls, plus occasional row-averaging proposals that are
    rebalanced and accepted only when they improve f inside the region.
    Terminates when no move improves f by more than step_tolerance.
    """
    if profile is None:
        profile = ConstantsProfile.desk(params.k)
    s = config.region
    arr = start.entries.copy()
    if not _region_ok(arr, s, profile):
        raise DomainError("start matrix is not in the configured region")
    k = params.k
    d = params.d
    f_cur = _f_raw(arr, k, d)
    bar_arr = None
    bar_f = -np.inf
    if s in (None, 0):
        bar_arr = np.full((k, k), 1.0 / k)
        bar_f = _f_raw(bar_arr, k, d)
    iterations = 0
    converged = False
    while iterations < config.max_iterations:
        iterations += 1
        grad_arr = np.clip(arr, GRADIENT_FLOOR, None)
        arg = 1.0 - 2.0 / k + kernels.norm_sq(arr) / (k * k)
        grad = -(1.0 + np.log(grad_arr)) / k + d * grad_arr / (k * k * arg)
        can_gain, can_lose, gain_cap, lose_cap = _move_caps(arr, profile)
        score, i1, j1, i2, j2 = kernels.rotation_scores(
            grad,
            np.ascontiguousarray(can_gain, dtype=np.uint8),
            np.ascontiguousarray(can_lose, dtype=np.uint8),
        )
        best_cand = None
        if i1 >= 0 and score > 0:
            t_max = min(
                gain_cap[i1, j1], gain_cap[i2, j2], lose_cap[i1, j2], lose_cap[i2, j1]
            )
            if t_max > 0:
                t, f_new = _line_search(arr, (i1, j1, i2, j2), float(t_max), d)
                if t > 0 and f_new > f_cur + config.step_tolerance:
                    cand = arr.copy()
                    _apply_rotation(cand, (i1, j1, i2, j2), t)
                    if _region_ok(cand, s, profile):
                        best_cand = (cand, f_new)
        # the all-entries average is the fixed point of repeated row and
        # column averaging; jumping there is a legitimate monotone move and
        # never masks a counterexample (it is unavailable from above)
        if (
            bar_arr is not None
            and bar_f > f_cur + config.step_tolerance
            and (best_cand is None or bar_f > best_cand[1])
        ):
            best_cand = (bar_arr.copy(), bar_f)
        if best_cand is None:
            best_cand = _averaging_proposals(
                arr, s, profile, d, f_cur + config.step_tolerance
            )
        if best_cand is None:
            converged = True
            break
        arr, f_cur = best_cand[0], best_cand[1]
    matrix = OverlapMatrix(k=k, entries=arr, tol=1e-6)
    return AscentResult(
        matrix=matrix,
        value=f_value(matrix, params),
        iterations=iterations,
        converged=converged,
        hit_iteration_cap=not converged,
    )


# ---------------------------------------------------------------------------
# start sampling


def _sample_zero_stable(k: int, rng: np.random.Generator, profile: ConstantsProfile, tries: int = 50) -> Optional[np.ndarray]:
    for _ in range(tries):
        w = rng.gamma(shape=2.0, scale=1.0, size=(k, k)) + 1e-3
        arr = kernels.sinkhorn_balance(w, 400, 1e-10)
        if _region_ok(arr, 0, profile):
            return arr
    return None


def _ipf_to_marginals(w: np.ndarray, r: np.ndarray, c: np.ndarray, iters: int = 400) -> np.ndarray:
    arr = w.copy()
    for _ in range(iters):
        rows = arr.sum(axis=1)
        arr *= (r / np.where(rows > 0, rows, 1.0))[:, None]
        cols = arr.sum(axis=0)
        arr *= (c / np.where(cols > 0, cols, 1.0))[None, :]
    return arr


def _sample_s_stable(
    k: int,
    s: int,
    rng: np.random.Generator,
    profile: ConstantsProfile,
    tries: int = 50,
) -> Optional[np.ndarray]:
    """Random doubly stochastic matrix with exactly s separable-stable entries.

    Picks a random partial permutation for the stable cells, draws their
    values in [1 - kappa, 1), and fits the complement to the residual
    marginals by iterative proportional fitting, retrying on region misses.
    """
    upper = 1.0 - profile.kappa
    for _ in range(tries):
        rows = rng.permutation(k)[:s]
        cols = rng.permutation(k)[:s]
        vals = rng.uniform(max(upper, profile.overlap_high + 1e-9), 1.0 - 1e-9, size=s)
        r = np.ones(k)
        c = np.ones(k)
        r[rows] -= vals
        c[cols] -= vals
        if np.any(r <= 0) or np.any(c <= 0):
            continue
        w = rng.gamma(shape=2.0, scale=1.0, size=(k, k)) + 1e-3
        w[rows, cols] = 0.0
        fitted = _ipf_to_marginals(w, r, c)
        arr = fitted.copy()
        arr[rows, cols] = vals
        if _region_ok(arr, s, profile):
            return arr
    return None


# ---------------------------------------------------------------------------
# certification


def _singly_family_scan(k: int, d: float, alphas: Optional[np.ndarray] = None):
    """Best objective over the structural singly stochastic family.

    Rows 1..s have diagonal 1 - alpha and off-diagonal alpha/(k-1); the
    remaining rows are uniform.  These matrices are singly stochastic only,
    so their values are reported alongside, never merged into, the
    doubly stochastic certification.
    """
    if alphas is None:
        alphas = np.linspace(0.0, 0.49, 99)
    params = ModelParams(k=k, d=d)
    best = (-np.inf, 0, float("nan"))
    for s in range(1, k + 1):
        for alpha in alphas:
            arr = np.full((k, k), 1.0 / k)
            for i in range(s):
                arr[i] = alpha / (k - 1.0)
                arr[i, i] = 1.0 - alpha
            rho = OverlapMatrix(k=k, entries=arr)
            val = f_value(rho, params)
            if val > best[0]:
                best = (val, s, float(alpha))
    return best


def stable_crossover_degree(k: int, tol: float = 1e-9) -> float:
    """Degree d* where the smoothed-identity matrix ties the barycenter.

    The difference f(stable) - f(barycenter) is affine and strictly
    increasing in d, so a sign bracket plus bisection pins the crossover.
    """
    bar = special_matrix("barycenter", k)
    stab = special_matrix("stable", k)

    def gap(d: float) -> float:
        p = ModelParams(k=k, d=d)
        return f_value(stab, p) - f_value(bar, p)

    lo, hi = 1e-6, 1.0
    while gap(hi) < 0:
        hi *= 2.0
        if hi > 1e9:
            raise DomainError("no crossover located below d=1e9")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def certify_barycenter_max(
    params: ModelParams,
    config: AscentConfig,
    profile: Optional[ConstantsProfile] = None,
    workers: int = 1,
    barycenter_threshold: float = 1e-5,
) -> CertificationReport:
    """Multistart ascent over stability regions, reported against f(barycenter).

    Starts cover the zero-stable region (random doubly stochastic points
    plus the barycenter itself) and sampled s >= 1 regions (the block
    s-stable matrices plus random points with s pinned stable cells).  The
    best value found across all regions is compared with the barycenter
    value; the singly stochastic structural family and the smoothed
    identity crossover are evaluated on the side.
    """
    k = params.k
    if profile is None:
        profile = ConstantsProfile.desk(k)
    bar = special_matrix("barycenter", k)
    reference = f_value(bar, params)

    starts: list = []
    n_zero = max(1, config.multistart_count // 2)
    rng_zero = rng_for(config.seed, _STREAM_SAMPLER, 0)
    starts.append((0, bar.entries.copy()))
    failed = 0
    for _ in range(n_zero - 1):
        arr = _sample_zero_stable(k, rng_zero, profile)
        if arr is None:
            failed += 1
        else:
            starts.append((0, arr))
    s_values = [s for s in range(1, k)]
    remaining = max(0, config.multistart_count - n_zero)
    for s in range(1, k):
        block = special_matrix("s_stable", k, s=s)
        if _region_ok(block.entries, s, profile):
            starts.append((s, block.entries.copy()))
    for idx in range(remaining):
        s = s_values[idx % len(s_values)] if s_values else 1
        rng_s = rng_for(config.seed, _STREAM_SAMPLER, 1 + idx)
        arr = _sample_s_stable(k, s, rng_s, profile)
        if arr is None:
            failed += 1
        else:
            starts.append((s, arr))

    def run_one(item):
        index, (s, arr) = item
        start = OverlapMatrix(k=k, entries=arr, tol=1e-6)
        cfg = AscentConfig(
            max_iterations=config.max_iterations,
            step_tolerance=config.step_tolerance,
            multistart_count=1,
            seed=int(rng_for(config.seed, _STREAM_START, index).integers(2**32)),
            region=s,
        )
        return s, ascend_region(start, params, cfg, profile)

    items = list(enumerate(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, items))
    else:
        results = [run_one(item) for item in items]

    best_val = -np.inf
    best_matrix = bar
    capped = 0
    per_region: dict = {}
    for s, res in results:
        if res.hit_iteration_cap:
            capped += 1
        if s not in per_region or res.value > per_region[s]:
            per_region[s] = res.value
        if res.value > best_val:
            best_val = res.value
            best_matrix = res.matrix
    dist = float(np.linalg.norm(best_matrix.entries - bar.entries))
    fam_val, fam_s, fam_alpha = _singly_family_scan(k, params.d)
    return CertificationReport(
        k=k,
        d=params.d,
        best_matrix=best_matrix,
        best_value=float(best_val),
        reference_value=float(reference),
        margin=float(reference - best_val),
        starts_run=len(starts),
        converged_to_barycenter=dist < barycenter_threshold,
        profile_name=profile.name,
        seed=config.seed,
        per_region_best=per_region,
        failed_starts=failed,
        capped_runs=capped,
        family_best_value=float(fam_val),
        family_best_s=int(fam_s),
        family_best_alpha=float(fam_alpha),
        stable_crossover_d=stable_crossover_degree(k),
    )


# ---------------------------------------------------------------------------
# Hessian at the barycenter


def chart_to_matrix(x: np.ndarray, k: int) -> OverlapMatrix:
    """Inverse chart: k^2 - 1 free entries row-major, last entry balances mass."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != k * k - 1:
        raise DomainError("chart vector must have k^2 - 1 entries")
    flat = np.empty(k * k)
    flat[:-1] = x
    flat[-1] = k - float(x.sum())
    return OverlapMatrix(k=k, entries=flat.reshape(k, k), tol=1e-6)


def f_in_chart(x: np.ndarray, params: ModelParams) -> float:
    """Objective pulled back through the chart; used by derivative checks."""
    return f_value(chart_to_matrix(x, params.k), params)


def chart_gradient(x: np.ndarray, params: ModelParams) -> np.ndarray:
    """Analytic gradient of the pulled-back objective (chain rule on the last entry)."""
    rho = chart_to_matrix(x, params.k)
    g = f_gradient(rho, params).reshape(-1)
    return g[:-1] - g[-1]


def hessian_at_barycenter(params: ModelParams) -> HessianReport:
    """Closed-form Hessian -c (Id + AllOnes) at the barycenter's chart point.

    c = 1 - d / (k^2 (1 - 1/k)^2); the spectrum is -c with multiplicity
    k^2 - 2 and -c k^2 with multiplicity 1, so the form is negative
    definite exactly when d < (k - 1)^2.
    """
    k = params.k
    d = params.d
    c = 1.0 - d / (k * k * (1.0 - 1.0 / k) ** 2)
    dim = k * k - 1
    matrix = -c * (np.eye(dim) + np.ones((dim, dim)))
    spectrum = tuple([-c * k * k] + [-c] * (dim - 1))
    return HessianReport(
        k=k,
        d=d,
        closed_form_c=c,
        matrix=matrix,
        spectrum=spectrum,
        negative_definite=c > 0,
    )
