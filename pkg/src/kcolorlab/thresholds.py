"""Closed-form degree thresholds and the chromatic-number window system.

Four explicit degree formulas in the number of colors k, plus the family of
open intervals S_k on the degree axis inside which the chromatic number is
pinned to k.  Everything here is elementary arithmetic on those formulas:
tabulation, window lookup, and the exact density of the union of windows.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

from .errors import DomainError

#: Window constants: left endpoints sit this far below the (k-1)-refined
#: formula, right endpoints this far below the k-refined formula.
WINDOW_LO_SHIFT = 0.99
WINDOW_HI_SHIFT = 1.38


@dataclass(frozen=True)
class ThresholdTable:
    """The four explicit degree thresholds for a fixed number of colors.

    ``d_first_refined`` carries only the explicit part of the refined
    first-moment formula; a vanishing-in-k correction term with unspecified
    constants is dropped, which ``refined_term_dropped`` records.
    """

    k: int
    d_AN: float
    d_cond: float
    d_first_refined: float
    d_first: float
    refined_term_dropped: bool = True

    def ordered(self) -> bool:
        return self.d_AN < self.d_cond < self.d_first_refined < self.d_first

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "d_AN": self.d_AN,
            "d_cond": self.d_cond,
            "d_first_refined": self.d_first_refined,
            "d_first": self.d_first,
            "refined_term_dropped": self.refined_term_dropped,
        }


@dataclass(frozen=True)
class WindowReport:
    """Result of a window lookup: matched k (if any) and overlap diagnostics."""

    k: Optional[int]
    overlap: bool
    matches: tuple


def thresholds(k: int) -> ThresholdTable:
    """Evaluate the four degree thresholds at k colors (k >= 3)."""
    if k < 3:
        raise DomainError(f"thresholds need k >= 3, got {k}")
    base = 2.0 * k * math.log(k) - math.log(k)
    return ThresholdTable(
        k=k,
        d_AN=2.0 * (k - 1) * math.log(k - 1),
        d_cond=base - 2.0 * math.log(2.0),
        d_first_refined=base - 1.0,
        d_first=base,
    )


def window_bounds(k: int) -> tuple:
    """Open-interval endpoints (lo, hi) of the degree window S_k."""
    if k < 3:
        raise DomainError(f"windows need k >= 3, got {k}")
    return (_window_lo(k), _window_hi(k))


def _window_lo(k: int) -> float:
    return 2.0 * (k - 1) * math.log(k - 1) - math.log(k - 1) - WINDOW_LO_SHIFT


def _window_hi(k: int) -> float:
    return 2.0 * k * math.log(k) - math.log(k) - WINDOW_HI_SHIFT


def window_matches(d: float, k_min: int = 3, k_cap: int = 10**7) -> tuple:
    """All k >= k_min with d strictly inside S_k.

    The left endpoints are strictly increasing in k, so the scan stops as
    soon as they pass d.
    """
    if d <= 0:
        raise DomainError("degree must be positive")
    if k_min < 3:
        raise DomainError("k_min must be at least 3")
    hits = []
    k = k_min
    while k <= k_cap:
        lo = _window_lo(k)
        if lo >= d:
            break
        if d < _window_hi(k):
            hits.append(k)
        k += 1
    return tuple(hits)


def chromatic_window(d: float, k_min: int = 3) -> Optional[int]:
    """Smallest k >= k_min with d inside S_k, or None when d misses every window."""
    hits = window_matches(d, k_min)
    return hits[0] if hits else None


def chromatic_window_detail(d: float, k_min: int = 3) -> WindowReport:
    """Window lookup that also reports whether several windows matched."""
    hits = window_matches(d, k_min)
    return WindowReport(
        k=hits[0] if hits else None,
        overlap=len(hits) > 1,
        matches=hits,
    )


def _max_window_index(z: float, k_min: int) -> int:
    """Largest k whose window starts below z (at least k_min - 1 when none do)."""
    k = k_min
    if _window_lo(k) >= z:
        return k_min - 1
    step = 1
    while _window_lo(k + step) < z:
        step *= 2
    lo_k, hi_k = k, k + step  # lo starts below z at lo_k, at/above at hi_k
    while hi_k - lo_k > 1:
        mid = (lo_k + hi_k) // 2
        if _window_lo(mid) < z:
            lo_k = mid
        else:
            hi_k = mid
    return lo_k


def density_S(z: float, k_min: int = 3) -> float:
    """Fraction of (0, z] covered by the union of windows S_k, k >= k_min.

    The windows are pairwise disjoint (consecutive endpoints differ by the
    constant gap WINDOW_HI_SHIFT - WINDOW_LO_SHIFT), so the covered measure
    is the plain sum of clipped interval lengths, computed vectorized.
    """
    if z <= 0:
        raise DomainError("z must be positive")
    if k_min < 3:
        raise DomainError("k_min must be at least 3")
    k_max = _max_window_index(z, k_min)
    if k_max < k_min:
        return 0.0
    ks = np.arange(k_min, k_max + 1, dtype=float)
    los = 2.0 * (ks - 1) * np.log(ks - 1) - np.log(ks - 1) - WINDOW_LO_SHIFT
    his = 2.0 * ks * np.log(ks) - np.log(ks) - WINDOW_HI_SHIFT
    lengths = np.minimum(his, z) - np.maximum(los, 0.0)
    covered = float(np.sum(np.clip(lengths, 0.0, None)))
    return covered / z


def ordering_threshold_k(k_hi: int = 10**6, probe: int = 4096) -> int:
    """Smallest k0 such that the threshold ordering holds on [k0, k_hi].

    Scans upward for the first k where the table is ordered, then spot
    checks a log-spaced sample up to k_hi to confirm the ordering persists.
    """
    k0 = None
    for k in range(3, 1000):
        if thresholds(k).ordered():
            k0 = k
            break
    if k0 is None:
        raise DomainError("threshold ordering never established below k=1000")
    checks = np.unique(
        np.geomspace(k0, k_hi, num=min(probe, k_hi - k0 + 1)).astype(int)
    )
    for k in checks:
        if not thresholds(int(k)).ordered():
            raise DomainError(f"threshold ordering breaks at k={int(k)}")
    return k0


def threshold_rows(ks: Iterable[int]) -> list:
    """CSV-ready rows combining the threshold table with window endpoints."""
    rows = []
    for k in ks:
        tab = thresholds(k)
        lo, hi = window_bounds(k)
        rows.append(
            {
                "k": k,
                "d_AN": tab.d_AN,
                "d_cond": tab.d_cond,
                "d_first_refined": tab.d_first_refined,
                "d_first": tab.d_first,
                "window_lo": lo,
                "window_hi": hi,
            }
        )
    return rows


CSV_FIELDS = ["k", "d_AN", "d_cond", "d_first_refined", "d_first", "window_lo", "window_hi"]


def write_threshold_csv(ks: Sequence[int], out: TextIO) -> None:
    writer = csv.DictWriter(out, fieldnames=CSV_FIELDS)
    writer.writeheader()
    for row in threshold_rows(ks):
        writer.writerow({key: repr(row[key]) if isinstance(row[key], float) else row[key] for key in CSV_FIELDS})
