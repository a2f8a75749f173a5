"""Random graphs, planted colorings, enumeration, and structural predicates.

Samplers cover the uniform edge-count and Bernoulli models plus their
planted (bichromatic-only) variants.  Enumeration is exact backtracking
with forward checking under explicit node budgets; overlap matrices from
coloring pairs carry exact rational entries so counting identities can be
checked without rounding.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Optional

import numpy as np

from .errors import BudgetError, DomainError
from .overlap import ConstantsProfile, ModelParams, OverlapMatrix
from .seeds import rng_for

#: Default cap on backtracking nodes for exact enumerations.
DEFAULT_BUDGET = 5_000_000


def _exact_cut(x: float) -> Fraction:
    """Exact rational for a profile constant written as a short decimal."""
    return Fraction(str(x))


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1 with canonical edge order."""

    n: int
    edges: tuple

    def __post_init__(self) -> None:
        if self.n < 0:
            raise DomainError("n must be nonnegative")
        canon = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise DomainError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DomainError(f"edge ({u},{v}) outside vertex range")
            canon.append((u, v) if u < v else (v, u))
        canon.sort()
        for a, b in zip(canon, canon[1:]):
            if a == b:
                raise DomainError(f"duplicate edge {a}")
        object.__setattr__(self, "edges", tuple(canon))

    @cached_property
    def adjacency(self) -> tuple:
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(s) for s in adj)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "edges": [[u, v] for u, v in self.edges]})

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        data = json.loads(text)
        return cls(n=int(data["n"]), edges=tuple((int(u), int(v)) for u, v in data["edges"]))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={len(self.edges)})"


@dataclass(frozen=True)
class Coloring:
    """Total assignment of colors 0..k-1 to vertices 0..n-1."""

    n: int
    k: int
    assignment: tuple

    def __post_init__(self) -> None:
        assign = tuple(int(c) for c in self.assignment)
        if len(assign) != self.n:
            raise DomainError("assignment length must equal n")
        if any(not 0 <= c < self.k for c in assign):
            raise DomainError("colors must lie in range(k)")
        object.__setattr__(self, "assignment", assign)

    @cached_property
    def class_sizes(self) -> tuple:
        sizes = [0] * self.k
        for c in self.assignment:
            sizes[c] += 1
        return tuple(sizes)

    @cached_property
    def classes(self) -> tuple:
        groups = [[] for _ in range(self.k)]
        for v, c in enumerate(self.assignment):
            groups[c].append(v)
        return tuple(tuple(g) for g in groups)

    def is_balanced(self) -> bool:
        """Every class size within sqrt(n) of n/k, checked in integers.

        |s - n/k| <= sqrt(n)  <=>  (k s - n)^2 <= k^2 n, which avoids any
        floating point at the boundary.
        """
        return all(
            (self.k * s - self.n) ** 2 <= self.k * self.k * self.n
            for s in self.class_sizes
        )

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "k": self.k, "assignment": list(self.assignment)})

    @classmethod
    def from_json(cls, text: str) -> "Coloring":
        data = json.loads(text)
        return cls(n=int(data["n"]), k=int(data["k"]), assignment=tuple(data["assignment"]))

    def __repr__(self) -> str:
        return f"Coloring(n={self.n}, k={self.k})"


@dataclass(frozen=True)
class ClusterSet:
    """A coloring's cluster: balanced proper colorings retaining every class majority."""

    center: Coloring
    members: tuple


@dataclass(frozen=True)
class ValidationReport:
    proper: bool
    balanced: bool


@dataclass(frozen=True)
class GoodReport:
    """The three goodness tests: balanced, separable, cluster not oversized."""

    t1: bool
    t2: bool
    t3: bool
    cluster_size: int

    @property
    def good(self) -> bool:
        return self.t1 and self.t2 and self.t3


# ---------------------------------------------------------------------------
# sampling


def _all_pairs(n: int) -> list:
    return list(itertools.combinations(range(n), 2))


def _bichromatic_pairs(n: int, sigma: Coloring) -> list:
    colors = sigma.assignment
    return [(u, v) for u, v in itertools.combinations(range(n), 2) if colors[u] != colors[v]]


def planted_p_probability(params: ModelParams, sigma: Coloring) -> Fraction:
    """Exact Bernoulli probability calibrated so the expected edge count is m.

    Solves p * (C(n,2) - F(sigma)) = m for p, where F counts the
    monochromatic pairs excluded by the planting.
    """
    if params.n is None or params.m is None:
        raise DomainError("planted_p needs n and m")
    available = math.comb(params.n, 2) - forbidden_count(sigma)
    if available <= 0:
        raise DomainError("no bichromatic pairs available")
    p = Fraction(params.m, available)
    if p > 1:
        raise DomainError(f"m={params.m} exceeds available bichromatic pairs {available}")
    return p


def sample_graph(
    model: str,
    params: ModelParams,
    sigma: Optional[Coloring] = None,
    seed: int = 0,
) -> Graph:
    """Draw one graph from gnm, gnp, planted_m, or planted_p.

    gnm: exactly m uniform edges.  gnp: each pair independently with
    p = d/n.  planted_m: m uniform edges among the bichromatic pairs of
    sigma.  planted_p: each bichromatic pair independently with the exact
    calibrated probability.  Deterministic per (model, params, seed).
    """
    if params.n is None:
        raise DomainError("sampling needs n")
    n = params.n
    rng = rng_for(seed)
    if model == "gnm":
        pairs = _all_pairs(n)
        if params.m is None or params.m > len(pairs):
            raise DomainError(f"m={params.m} exceeds {len(pairs)} available pairs")
        idx = rng.choice(len(pairs), size=params.m, replace=False)
        return Graph(n=n, edges=tuple(pairs[i] for i in idx))
    if model == "gnp":
        p = params.d / n
        if not 0 <= p <= 1:
            raise DomainError(f"edge probability {p} outside [0,1]")
        pairs = _all_pairs(n)
        mask = rng.random(len(pairs)) < p
        return Graph(n=n, edges=tuple(pr for pr, hit in zip(pairs, mask) if hit))
    if model in ("planted_m", "planted_p"):
        if sigma is None:
            raise DomainError(f"{model} requires a planted coloring")
        if sigma.n != n:
            raise DomainError("planted coloring has the wrong n")
        pairs = _bichromatic_pairs(n, sigma)
        if model == "planted_m":
            if params.m is None or params.m > len(pairs):
                raise DomainError(
                    f"m={params.m} exceeds {len(pairs)} bichromatic pairs"
                )
            idx = rng.choice(len(pairs), size=params.m, replace=False)
            return Graph(n=n, edges=tuple(pairs[i] for i in idx))
        p = float(planted_p_probability(params, sigma))
        mask = rng.random(len(pairs)) < p
        return Graph(n=n, edges=tuple(pr for pr, hit in zip(pairs, mask) if hit))
    raise DomainError(f"unknown graph model {model!r}")


def random_balanced(n: int, k: int, seed: int = 0) -> Coloring:
    """Uniform coloring with class sizes as equal as possible.

    The size multiset is fixed (n mod k classes get the extra vertex); both
    the color-to-size matching and the vertex assignment are shuffled.
    """
    if n < k:
        raise DomainError("need n >= k for a balanced coloring")
    rng = rng_for(seed)
    base, extra = divmod(n, k)
    sizes = [base + 1] * extra + [base] * (k - extra)
    colors = list(rng.permutation(k))
    labels: list = []
    for color, size in zip(colors, sizes):
        labels.extend([int(color)] * size)
    labels = list(np.array(labels)[rng.permutation(n)])
    return Coloring(n=n, k=k, assignment=tuple(labels))


# ---------------------------------------------------------------------------
# predicates and counts


def validate_coloring(g: Graph, sigma: Coloring) -> ValidationReport:
    """Properness (every edge bichromatic) and balancedness of sigma on g."""
    if sigma.n != g.n:
        raise DomainError("coloring and graph disagree on n")
    colors = sigma.assignment
    proper = all(colors[u] != colors[v] for u, v in g.edges)
    return ValidationReport(proper=proper, balanced=sigma.is_balanced())


def forbidden_count(sigma: Coloring, tau: Optional[Coloring] = None) -> int:
    """Monochromatic vertex pairs under sigma, or under either of two colorings.

    The pair version is inclusion-exclusion over the class intersections:
    sum C(r_i,2) + sum C(c_j,2) - sum C(o_ij,2).
    """
    if tau is None:
        return sum(math.comb(s, 2) for s in sigma.class_sizes)
    if tau.n != sigma.n or tau.k != sigma.k:
        raise DomainError("colorings disagree on n or k")
    counts = overlap_counts(sigma, tau)
    total = sum(math.comb(s, 2) for s in sigma.class_sizes)
    total += sum(math.comb(s, 2) for s in tau.class_sizes)
    total -= sum(math.comb(int(c), 2) for row in counts for c in row)
    return total


def overlap_counts(sigma: Coloring, tau: Coloring) -> list:
    """Integer intersection table |sigma^-1(i) n tau^-1(j)|."""
    if tau.n != sigma.n or tau.k != sigma.k:
        raise DomainError("colorings disagree on n or k")
    k = sigma.k
    counts = [[0] * k for _ in range(k)]
    for a, b in zip(sigma.assignment, tau.assignment):
        counts[a][b] += 1
    return counts


def overlap(sigma: Coloring, tau: Coloring) -> OverlapMatrix:
    """Exact rational overlap matrix (k/n) |sigma^-1(i) n tau^-1(j)|."""
    return OverlapMatrix.from_counts(np.array(overlap_counts(sigma, tau), dtype=object), sigma.n)


def _enumerate_colorings(
    g: Graph,
    k: int,
    balanced_only: bool,
    budget: int,
) -> Iterator[tuple]:
    """Backtracking generator over proper colorings (optionally balanced).

    Vertices are processed in descending-degree order with forward checking
    against colored neighbors; balanced mode prunes on the maximum feasible
    class size.  One budget unit is one attempted assignment.
    """
    n = g.n
    if n == 0:
        yield ()
        return
    order = sorted(range(n), key=lambda v: -g.degree(v))
    adj = g.adjacency
    assign = [-1] * n
    sizes = [0] * k
    max_size = n
    if balanced_only:
        # integer ceiling of n/k + sqrt(n): largest s with (k s - n)^2 <= k^2 n
        max_size = (n + math.isqrt(k * k * n)) // k
    nodes = 0

    def recurse(pos: int) -> Iterator[tuple]:
        nonlocal nodes
        if pos == n:
            yield tuple(assign)
            return
        v = order[pos]
        banned = {assign[u] for u in adj[v] if assign[u] >= 0}
        for c in range(k):
            if c in banned:
                continue
            if sizes[c] >= max_size:
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetError(
                    f"coloring enumeration exceeded budget of {budget} nodes"
                )
            assign[v] = c
            sizes[c] += 1
            yield from recurse(pos + 1)
            assign[v] = -1
            sizes[c] -= 1

    for full in recurse(0):
        col = Coloring(n=n, k=k, assignment=full)
        if balanced_only and not col.is_balanced():
            continue
        yield full


def count_colorings(g: Graph, k: int, mode: str = "all", budget: int = DEFAULT_BUDGET) -> int:
    """Exact number of proper k-colorings (mode 'all') or balanced ones."""
    if mode not in ("all", "balanced"):
        raise DomainError(f"unknown counting mode {mode!r}")
    return sum(1 for _ in _enumerate_colorings(g, k, mode == "balanced", budget))


def enumerate_colorings(
    g: Graph, k: int, mode: str = "all", budget: int = DEFAULT_BUDGET
) -> Iterator[Coloring]:
    """Yield the proper (optionally balanced) colorings as Coloring values."""
    if mode not in ("all", "balanced"):
        raise DomainError(f"unknown counting mode {mode!r}")
    for assign in _enumerate_colorings(g, k, mode == "balanced", budget):
        yield Coloring(n=g.n, k=k, assignment=assign)


def cluster(
    g: Graph,
    sigma: Coloring,
    profile: ConstantsProfile,
    budget: int = DEFAULT_BUDGET,
) -> ClusterSet:
    """All balanced proper colorings retaining a majority of every class.

    Membership demands (k/n) o_ii > overlap_high for every color i, where
    o_ii counts vertices keeping color i.  The backtracking tracks, per
    class, how many retentions are still achievable and prunes branches
    that cannot reach the threshold.  sigma itself must be proper: the
    cluster of an improper coloring is not meaningful here.
    """
    check = validate_coloring(g, sigma)
    if not check.proper:
        raise DomainError("cluster needs a proper center coloring")
    n, k = sigma.n, sigma.k
    cut = _exact_cut(profile.overlap_high)
    # o_ii > cut * n / k, as an integer threshold: smallest integer strictly above
    need = [0] * k
    for i in range(k):
        bound = cut * n / k
        need[i] = int(bound) + 1 if bound == int(bound) else math.ceil(bound)
    sizes = sigma.class_sizes
    if any(need[i] > sizes[i] for i in range(k)):
        return ClusterSet(center=sigma, members=())
    order = sorted(range(n), key=lambda v: -g.degree(v))
    adj = g.adjacency
    assign = [-1] * n
    class_counts = [0] * k
    retained = [0] * k
    remaining = list(sizes)
    max_size = (n + math.isqrt(k * k * n)) // k
    nodes = 0
    members: list = []

    def recurse(pos: int) -> None:
        nonlocal nodes
        if pos == n:
            col = Coloring(n=n, k=k, assignment=tuple(assign))
            if col.is_balanced():
                members.append(col)
            return
        v = order[pos]
        own = sigma.assignment[v]
        banned = {assign[u] for u in adj[v] if assign[u] >= 0}
        for c in range(k):
            if c in banned or class_counts[c] >= max_size:
                continue
            if c != own and retained[own] + remaining[own] - 1 < need[own]:
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetError(f"cluster enumeration exceeded budget of {budget} nodes")
            assign[v] = c
            class_counts[c] += 1
            remaining[own] -= 1
            if c == own:
                retained[own] += 1
            recurse(pos + 1)
            assign[v] = -1
            class_counts[c] -= 1
            remaining[own] += 1
            if c == own:
                retained[own] -= 1

    recurse(0)
    return ClusterSet(center=sigma, members=tuple(members))


def coloring_separable(
    g: Graph,
    sigma: Coloring,
    profile: ConstantsProfile,
    budget: int = DEFAULT_BUDGET,
) -> bool:
    """No overlap entry with any balanced proper coloring in the forbidden band.

    True iff for every balanced proper tau and all i, j: whenever the
    overlap entry exceeds overlap_high it already reaches 1 - kappa.  The
    comparison runs on exact rationals.
    """
    if sigma.n != g.n:
        raise DomainError("coloring and graph disagree on n")
    n, k = sigma.n, sigma.k
    hi = _exact_cut(profile.overlap_high)
    upper = 1 - _exact_cut(profile.kappa)
    if upper <= hi:
        return True
    for tau in enumerate_colorings(g, k, "balanced", budget):
        counts = overlap_counts(sigma, tau)
        for row in counts:
            for c in row:
                val = Fraction(c * k, n)
                if hi < val < upper:
                    return False
    return True


def is_good(
    g: Graph,
    sigma: Coloring,
    ez_reference,
    profile: ConstantsProfile,
    budget: int = DEFAULT_BUDGET,
) -> GoodReport:
    """Three-part goodness test: balanced, separable, cluster within the mean.

    ez_reference should be the exact first moment of the coloring count for
    the same (n, m, k), supplied by the moment estimator.
    """
    t1 = validate_coloring(g, sigma).balanced
    t2 = coloring_separable(g, sigma, profile, budget)
    members = cluster(g, sigma, profile, budget).members
    t3 = len(members) <= ez_reference
    return GoodReport(t1=t1, t2=t2, t3=bool(t3), cluster_size=len(members))
