"""Exact and Monte-Carlo moments, the Laplace partition, rounding, tail bounds."""

from __future__ import annotations

import io
import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from kcolorlab.errors import BudgetError, DomainError
from kcolorlab.moments import (
    MOMENT_CSV_FIELDS,
    McReport,
    MomentReport,
    chernoff_tail,
    exact_moment,
    exact_overlap_moment,
    laplace_partition,
    logscale_gap,
    mc_colorable,
    overlap_to_counts,
    paley_zygmund,
    phi,
    realizable_overlaps,
    round_to_birkhoff,
    write_moment_csv,
)
from kcolorlab.overlap import ConstantsProfile, OverlapMatrix, special_matrix

from conftest import random_doubly_stochastic

# Frozen oracle values (independent scratch enumeration, double precision).
GAP_IDENTITY = {
    4: 0.22907268296853875,
    6: 0.18194060322533603,
    8: 0.15479677888040855,
    10: 0.13539951087890706,
    12: 0.1207043346412927,
}
GAP_FLAT = {
    8: 0.8896886991471663,
    10: 0.6283606374071167,
    12: 0.5479798847162884,
}
PHI_ONE = 0.38629436111989063

ID2 = special_matrix("identity", 2)
BAR2 = special_matrix("barycenter", 2)
DESK3 = ConstantsProfile.desk(3)


def brute_moment(n: int, m: int, k: int, order: int) -> Fraction:
    pairs = list(itertools.combinations(range(n), 2))
    N = len(pairs)
    maps = list(itertools.product(range(k), repeat=n))
    total = Fraction(0)
    if order == 1:
        for s in maps:
            F = sum(1 for u, v in pairs if s[u] == s[v])
            total += Fraction(math.comb(N - F, m), math.comb(N, m))
    else:
        for s in maps:
            for t in maps:
                F = sum(1 for u, v in pairs if s[u] == s[v] or t[u] == t[v])
                total += Fraction(math.comb(N - F, m), math.comb(N, m))
    return total


def two_colorable(n: int, edges) -> bool:
    color = [-1] * n
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    for start in range(n):
        if color[start] >= 0:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if color[u] < 0:
                    color[u] = 1 - color[v]
                    stack.append(u)
                elif color[u] == color[v]:
                    return False
    return True


def exact_colorable_fraction(n: int, m: int) -> Fraction:
    pairs = list(itertools.combinations(range(n), 2))
    good = sum(
        1 for chosen in itertools.combinations(pairs, m) if two_colorable(n, chosen)
    )
    return Fraction(good, math.comb(len(pairs), m))


class TestExactMoment:
    def test_two_vertices_first_moment(self):
        rep = exact_moment(2, 1, 2, order=1)
        assert rep.value == Fraction(2)
        assert rep.mode == "exact" and isinstance(rep.value, Fraction)

    def test_two_vertices_second_moment(self):
        assert exact_moment(2, 1, 2, order=2).value == Fraction(4)

    def test_zero_edges_counts_maps(self):
        assert exact_moment(3, 0, 2, order=1).value == Fraction(8)
        assert exact_moment(3, 0, 2, order=2).value == Fraction(64)

    @pytest.mark.parametrize("m", [1, 3, 5])
    def test_first_moment_bruteforce(self, m):
        assert exact_moment(4, m, 2, order=1).value == brute_moment(4, m, 2, 1)

    @pytest.mark.parametrize("m", [1, 2, 4])
    def test_second_moment_bruteforce(self, m):
        assert exact_moment(4, m, 2, order=2).value == brute_moment(4, m, 2, 2)

    def test_first_moment_bruteforce_k3(self):
        assert exact_moment(4, 3, 3, order=1).value == brute_moment(4, 3, 3, 1)

    def test_balanced_filter(self):
        # at n=7, k=2 only the two constant maps fail the balance window
        rep = exact_moment(7, 0, 2, order=1, balanced_only=True)
        assert rep.value == Fraction(126)
        assert rep.balanced_only

    def test_decreasing_in_m(self):
        values = [exact_moment(5, m, 2, order=1).value for m in range(6)]
        assert values[0] == Fraction(32)
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert values[5] < values[0]

    def test_budget_error(self):
        with pytest.raises(BudgetError):
            exact_moment(40, 1, 3)
        with pytest.raises(BudgetError):
            exact_moment(4, 1, 2, budget=10)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            exact_moment(4, 1, 2, order=3)
        with pytest.raises(DomainError):
            exact_moment(0, 0, 2)
        with pytest.raises(DomainError):
            exact_moment(4, 1, 0)


class TestOverlapRoute:
    @pytest.mark.parametrize("n,m", [(4, 1), (4, 3), (6, 1), (6, 3)])
    def test_identity_direct_count(self, n, m):
        N = math.comb(n, 2)
        forb = 2 * math.comb(n // 2, 2)
        expected = Fraction(
            math.comb(n, n // 2) * math.comb(N - forb, m), math.comb(N, m)
        )
        assert exact_overlap_moment(n, m, 2, ID2).value == expected

    @pytest.mark.parametrize("m", [0, 3, 7])
    def test_partition_identity_k2(self, m):
        total = sum(
            (exact_overlap_moment(6, m, 2, rho).value for rho in realizable_overlaps(6, 2)),
            Fraction(0),
        )
        assert total == exact_moment(6, m, 2, order=2, balanced_only=True).value

    def test_partition_identity_k3(self):
        total = sum(
            (exact_overlap_moment(7, 6, 3, rho).value for rho in realizable_overlaps(7, 3)),
            Fraction(0),
        )
        assert total == exact_moment(7, 6, 3, order=2, balanced_only=True).value

    def test_realizable_counts(self):
        assert sum(1 for _ in realizable_overlaps(8, 3)) == 8514
        # without the balance filter every 2x2 table summing to 4 appears
        assert sum(1 for _ in realizable_overlaps(4, 2, balanced_only=False)) == 35

    def test_counts_round_trip(self):
        rho = OverlapMatrix.from_counts(np.array([[2, 1], [1, 2]], dtype=object), 6)
        assert overlap_to_counts(rho, 6) == [[2, 1], [1, 2]]

    def test_unrealizable_entries_rejected(self):
        with pytest.raises(DomainError):
            overlap_to_counts(special_matrix("barycenter", 3), 4)
        with pytest.raises(DomainError):
            exact_overlap_moment(5, 2, 2, ID2)

    def test_unbalanced_table_contributes_zero(self):
        rho = OverlapMatrix.from_counts(np.array([[6, 0], [0, 0]], dtype=object), 6)
        assert exact_overlap_moment(6, 2, 2, rho).value == Fraction(0)

    def test_m_exceeds_pairs(self):
        with pytest.raises(DomainError):
            exact_overlap_moment(4, 7, 2, ID2)


class TestLogscaleGap:
    def test_identity_frozen_and_decreasing(self):
        gaps = []
        for n, expected in GAP_IDENTITY.items():
            gap = logscale_gap(n, 2, 2.0, ID2)
            assert gap == pytest.approx(expected, abs=1e-12)
            gaps.append(gap)
        assert all(a > b for a, b in zip(gaps, gaps[1:]))

    def test_flat_frozen_and_decreasing(self):
        snapped10 = OverlapMatrix.from_counts(
            np.array([[3, 2], [2, 3]], dtype=object), 10
        )
        gaps = [
            logscale_gap(8, 2, 2.0, BAR2),
            logscale_gap(10, 2, 2.0, snapped10),
            logscale_gap(12, 2, 2.0, BAR2),
        ]
        for gap, expected in zip(gaps, GAP_FLAT.values()):
            assert gap == pytest.approx(expected, abs=1e-12)
        assert gaps[0] > gaps[1] > gaps[2]

    def test_zero_moment_rejected(self):
        with pytest.raises(DomainError):
            logscale_gap(4, 2, 2.0, BAR2)
        snapped6 = OverlapMatrix.from_counts(
            np.array([[2, 1], [1, 2]], dtype=object), 6
        )
        with pytest.raises(DomainError):
            logscale_gap(6, 2, 2.0, snapped6)

    def test_unrealizable_rejected(self):
        with pytest.raises(DomainError):
            logscale_gap(10, 2, 2.0, BAR2)


class TestMonteCarlo:
    def test_no_edges_always_colorable(self):
        rep = mc_colorable(5, 0, 2, trials=10, seed=0)
        assert rep.fraction == 1.0
        assert rep.successes == rep.trials == 10
        assert rep.method == "wilson" and rep.ci95 > 0

    def test_complete_graph_never_two_colorable(self):
        rep = mc_colorable(4, 6, 2, trials=10, seed=0)
        assert rep.fraction == 0.0

    def test_matches_exact_within_ci(self):
        exact = float(exact_colorable_fraction(6, 5))
        rep = mc_colorable(6, 5, 2, trials=300, seed=2)
        assert abs(rep.fraction - exact) <= rep.ci95

    def test_deterministic_in_seed(self):
        a = mc_colorable(6, 5, 2, trials=50, seed=7)
        b = mc_colorable(6, 5, 2, trials=50, seed=7)
        assert a == b

    def test_needs_trials(self):
        with pytest.raises(DomainError):
            mc_colorable(5, 2, 2, trials=0, seed=0)


class TestPaleyZygmund:
    def test_exact_values(self):
        out = paley_zygmund(Fraction(2), Fraction(4))
        assert out == Fraction(1) and isinstance(out, Fraction)
        assert paley_zygmund(Fraction(3), Fraction(9)) == Fraction(1)
        assert paley_zygmund(2.0, 8.0) == pytest.approx(0.5)

    def test_positivity_required(self):
        with pytest.raises(DomainError):
            paley_zygmund(Fraction(0), Fraction(1))
        with pytest.raises(DomainError):
            paley_zygmund(Fraction(1), Fraction(0))

    @pytest.mark.parametrize("m", [2, 4])
    def test_lower_bounds_success_probability(self, m):
        ez = exact_moment(5, m, 2, order=1).value
        ez2 = exact_moment(5, m, 2, order=2).value
        bound = paley_zygmund(ez, ez2)
        assert bound <= exact_colorable_fraction(5, m)


class TestLaplacePartition:
    def test_near_barycenter(self):
        label = laplace_partition(special_matrix("barycenter", 3), 0.1, DESK3)
        assert label.label == "R0"
        assert label.profile_name == "desk"

    def test_band_entry(self):
        entries = np.array(
            [[0.55, 0.25, 0.20], [0.25, 0.55, 0.20], [0.20, 0.20, 0.60]]
        )
        rho = OverlapMatrix(k=3, entries=entries, tol=1e-6)
        assert laplace_partition(rho, 0.05, DESK3).label == "R1"

    def test_all_rows_high(self):
        arr = 0.7 * np.eye(3) + 0.15 * (np.ones((3, 3)) - np.eye(3))
        rho = OverlapMatrix(k=3, entries=arr, tol=1e-6)
        assert laplace_partition(rho, 0.05, DESK3).label == "R2"
        # the stock stable matrix also has every diagonal above the band
        assert laplace_partition(special_matrix("stable", 3), 0.05, DESK3).label == "R2"

    def test_remainder(self):
        arr = np.array(
            [[0.7, 0.15, 0.15], [0.15, 0.7, 0.15], [1 / 3, 1 / 3, 1 / 3]]
        )
        rho = OverlapMatrix(k=3, entries=arr, tol=1e-6)
        assert laplace_partition(rho, 0.05, DESK3).label == "R3"

    def test_eta_positive(self):
        with pytest.raises(DomainError):
            laplace_partition(special_matrix("barycenter", 3), 0.0, DESK3)


class TestBirkhoffRounding:
    def test_doubly_stochastic_fixed(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            arr = random_doubly_stochastic(4, rng)
            out = round_to_birkhoff(OverlapMatrix(k=4, entries=arr))
            assert np.allclose(out.entries, arr, atol=1e-10)

    def test_perturbed_matrix(self):
        rng = np.random.default_rng(1)
        k = 4
        for _ in range(10):
            base = random_doubly_stochastic(k, rng)
            noisy = base + rng.uniform(-0.01, 0.01, size=(k, k))
            noisy = np.clip(noisy, 1e-6, None)
            noisy *= k / noisy.sum()
            maxdev = max(
                np.abs(noisy.sum(axis=1) - 1.0).max(),
                np.abs(noisy.sum(axis=0) - 1.0).max(),
            )
            out = round_to_birkhoff(OverlapMatrix(k=k, entries=noisy, tol=1.0))
            assert np.abs(out.entries.sum(axis=1) - 1.0).max() < 1e-9
            assert np.abs(out.entries.sum(axis=0) - 1.0).max() < 1e-9
            assert out.entries.min() >= 0.0
            assert out.entries.sum() == pytest.approx(k, abs=1e-9)
            dist = np.abs(out.entries - noisy).sum()
            assert dist <= 5 * k**3 * maxdev + 1e-12

    def test_idempotent(self):
        rng = np.random.default_rng(2)
        base = random_doubly_stochastic(3, rng)
        noisy = base + rng.uniform(-0.02, 0.02, size=(3, 3))
        noisy = np.clip(noisy, 1e-6, None)
        noisy *= 3 / noisy.sum()
        once = round_to_birkhoff(OverlapMatrix(k=3, entries=noisy, tol=1.0))
        twice = round_to_birkhoff(once)
        assert np.allclose(once.entries, twice.entries, atol=1e-10)

    def test_random_coloring_overlap(self):
        from kcolorlab.graphs import Coloring, overlap

        rng = np.random.default_rng(3)
        n, k = 99, 3
        a = Coloring(n=n, k=k, assignment=tuple(int(c) for c in rng.integers(0, k, n)))
        b = Coloring(n=n, k=k, assignment=tuple(int(c) for c in rng.integers(0, k, n)))
        rho = overlap(a, b)
        out = round_to_birkhoff(OverlapMatrix(k=k, entries=rho.entries, tol=1.0))
        dist = np.abs(out.entries - rho.entries).sum()
        assert dist <= 5 * k**3 / math.sqrt(n)


class TestChernoff:
    def test_phi_frozen(self):
        assert phi(1.0) == pytest.approx(PHI_ONE, abs=1e-12)
        assert phi(0.0) == 0.0
        assert phi(-1.0) == 1.0
        with pytest.raises(DomainError):
            phi(-1.5)

    def test_small_t_near_one(self):
        assert chernoff_tail(5.0, 1e-12, "upper") == pytest.approx(1.0, abs=1e-12)

    def test_dominates_binomial(self):
        n, p, t = 20, 0.3, 4.0
        mu = n * p
        upper = sum(
            math.comb(n, j) * p**j * (1 - p) ** (n - j)
            for j in range(int(mu + t), n + 1)
        )
        lower = sum(
            math.comb(n, j) * p**j * (1 - p) ** (n - j)
            for j in range(0, int(mu - t) + 1)
        )
        assert upper <= chernoff_tail(mu, t, "upper")
        assert lower <= chernoff_tail(mu, t, "lower")

    def test_domain(self):
        with pytest.raises(DomainError):
            chernoff_tail(0.0, 1.0, "upper")
        with pytest.raises(DomainError):
            chernoff_tail(5.0, 0.0, "upper")
        with pytest.raises(DomainError):
            chernoff_tail(5.0, 6.0, "lower")
        with pytest.raises(DomainError):
            chernoff_tail(5.0, 1.0, "both")


class TestReports:
    def test_exact_json_round_trip(self):
        rep = exact_moment(4, 2, 2, order=1)
        data = json.loads(rep.to_json())
        assert data["mode"] == "exact"
        assert Fraction(int(data["value_numerator"]), int(data["value_denominator"])) == rep.value

    def test_exact_requires_fraction(self):
        with pytest.raises(DomainError):
            MomentReport(n=4, m=2, k=2, order=1, mode="exact", value=0.5)

    def test_monte_carlo_requires_trials(self):
        with pytest.raises(DomainError):
            MomentReport(n=4, m=2, k=2, order=1, mode="monte_carlo", value=0.5)

    def test_unknown_mode(self):
        with pytest.raises(DomainError):
            MomentReport(n=4, m=2, k=2, order=1, mode="guess", value=Fraction(1))

    def test_csv_deterministic(self):
        reports = [exact_moment(4, m, 2, order=1) for m in (0, 2)]
        bufs = []
        for _ in range(2):
            buf = io.StringIO()
            write_moment_csv(reports, buf)
            bufs.append(buf.getvalue())
        assert bufs[0] == bufs[1]
        header = bufs[0].splitlines()[0]
        assert header.split(",") == MOMENT_CSV_FIELDS
