"""Core computation, the W/U/Z construction, vertex census, and property checks.

The core of (G, sigma) is the largest vertex set in which every member has
at least core_degree neighbors inside the set in every color class other
than its own; it is computed by peeling to the fixed point, which is
order-independent because the defining condition is closed under unions.
On top of the core sit the free/complete vertex census, the W/U/Z
overapproximation of the complement of the core, four expansion property
predicates, and the cluster-size upper bound driven by the census.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError
from .graphs import Coloring, Graph
from .overlap import ConstantsProfile
from .seeds import rng_for


@dataclass(frozen=True)
class CoreResult:
    """The core vertex set plus the removal order that produced it."""

    core_vertices: frozenset
    peel_trace: tuple
    profile_name: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "core_vertices": sorted(self.core_vertices),
                "peel_trace": [
                    {"vertex": v, "reason": reason} for v, reason in self.peel_trace
                ],
                "profile": self.profile_name,
            }
        )


@dataclass(frozen=True)
class CrSets:
    """The W (per color pair), U, and Z sets of the constructive core bound."""

    W: dict
    U: frozenset
    Z: frozenset
    profile_name: str

    def w_union(self) -> frozenset:
        out: set = set()
        for vs in self.W.values():
            out |= vs
        return frozenset(out)

    def to_json(self) -> str:
        return json.dumps(
            {
                "W": {f"{i},{j}": sorted(vs) for (i, j), vs in self.W.items()},
                "U": sorted(self.U),
                "Z": sorted(self.Z),
                "profile": self.profile_name,
            }
        )


@dataclass(frozen=True)
class VertexCensus:
    """Free-degree counts and the derived free/complete vertex sets.

    ``free_degree`` counts colors (including the vertex's own, which always
    qualifies under a proper coloring) with no core neighbor of that color;
    ``free_degree_excl_own`` reports the same count without the vertex's
    own color, since the literal reading is ambiguous.
    """

    free_degree: dict
    free_degree_excl_own: dict
    f1: frozenset
    f2: frozenset
    sigma_complete: frozenset
    profile_name: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "free_degree": {str(v): d for v, d in sorted(self.free_degree.items())},
                "free_degree_excl_own": {
                    str(v): d for v, d in sorted(self.free_degree_excl_own.items())
                },
                "f1": sorted(self.f1),
                "f2": sorted(self.f2),
                "sigma_complete": sorted(self.sigma_complete),
                "profile": self.profile_name,
            }
        )


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of one expansion property check.

    ``exhaustive`` distinguishes a proven "holds" from a randomized search
    that merely found no witness; ``witness`` carries the violating set or
    vertex list when one exists.
    """

    which: str
    holds: bool
    exhaustive: bool
    witness: Optional[tuple]
    detail: str


# ---------------------------------------------------------------------------
# core


def core(g: Graph, sigma: Coloring, profile: ConstantsProfile) -> CoreResult:
    """Peel to the largest set where everyone keeps core_degree foreign neighbors.

    Maintains per-vertex counts of remaining neighbors in every other color
    class and removes any vertex whose count drops below core_degree in
    some class, until no such vertex remains.  The result is independent of
    the removal order.
    """
    if sigma.n != g.n:
        raise DomainError("coloring and graph disagree on n")
    n, k = g.n, sigma.k
    need = profile.core_degree
    colors = sigma.assignment
    counts = [[0] * k for _ in range(n)]
    for u, v in g.edges:
        counts[u][colors[v]] += 1
        counts[v][colors[u]] += 1

    def deficient(v: int) -> Optional[int]:
        for i in range(k):
            if i != colors[v] and counts[v][i] < need:
                return i
        return None

    alive = [True] * n
    trace: list = []
    queue = [v for v in range(n) if deficient(v) is not None]
    queued = set(queue)
    while queue:
        v = queue.pop()
        queued.discard(v)
        if not alive[v]:
            continue
        miss = deficient(v)
        if miss is None:
            continue
        alive[v] = False
        trace.append((v, f"fewer than {need} core neighbors of color {miss}"))
        for u in g.adjacency[v]:
            if alive[u]:
                counts[u][colors[v]] -= 1
                if u not in queued and deficient(u) is not None:
                    queue.append(u)
                    queued.add(u)
    return CoreResult(
        core_vertices=frozenset(v for v in range(n) if alive[v]),
        peel_trace=tuple(trace),
        profile_name=profile.name,
    )


def core_is_valid(g: Graph, sigma: Coloring, vertices, profile: ConstantsProfile) -> bool:
    """Direct check of the core condition on an arbitrary vertex set."""
    vs = set(vertices)
    colors = sigma.assignment
    for v in vs:
        counts = [0] * sigma.k
        for u in g.adjacency[v]:
            if u in vs:
                counts[colors[u]] += 1
        for i in range(sigma.k):
            if i != colors[v] and counts[i] < profile.core_degree:
                return False
    return True


# ---------------------------------------------------------------------------
# W / U / Z construction


def cr_sets(g: Graph, sigma: Coloring, profile: ConstantsProfile) -> CrSets:
    """The three-stage overapproximation of the core's complement.

    W flags vertices with too few neighbors toward some other class; U
    flags vertices with too many neighbors into the flagged part of another
    class; Z grows U by repeatedly absorbing any vertex with at least
    core_degree neighbors already inside Z, stopping when no vertex
    qualifies.  The guarantee V \\ (W u Z) subset-of core is checked by the
    caller against the peeled core.
    """
    if sigma.n != g.n:
        raise DomainError("coloring and graph disagree on n")
    n, k = g.n, sigma.k
    colors = sigma.assignment
    adj = g.adjacency
    classes = [set() for _ in range(k)]
    for v in range(n):
        classes[colors[v]].add(v)

    W: dict = {}
    for i in range(k):
        for j in range(k):
            if i == j:
                W[(i, j)] = frozenset()
                continue
            W[(i, j)] = frozenset(
                v
                for v in classes[i]
                if sum(1 for u in adj[v] if colors[u] == j) < profile.w_degree
            )
    w_by_class = [set() for _ in range(k)]
    for (i, _j), vs in W.items():
        w_by_class[i] |= vs

    U: set = set()
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            for v in classes[i]:
                if sum(1 for u in adj[v] if u in w_by_class[j]) > profile.core_degree:
                    U.add(v)

    Z = set(U)
    frontier = True
    while frontier:
        frontier = False
        for v in range(n):
            if v in Z:
                continue
            if sum(1 for u in adj[v] if u in Z) >= profile.core_degree:
                Z.add(v)
                frontier = True
    return CrSets(W=W, U=frozenset(U), Z=frozenset(Z), profile_name=profile.name)


# ---------------------------------------------------------------------------
# census


def vertex_census(
    g: Graph,
    sigma: Coloring,
    core_vertices,
    profile: ConstantsProfile,
) -> VertexCensus:
    """Free degrees, the a-free sets for a in {1, 2}, and the complete vertices.

    free_degree(v) counts colors i with no core neighbor of v colored i,
    the vertex's own color included; F_a collects vertices with
    free_degree >= a + 1.  A vertex is complete when every color other
    than its own is represented among its core neighbors.
    """
    if sigma.n != g.n:
        raise DomainError("coloring and graph disagree on n")
    vs = frozenset(core_vertices)
    colors = sigma.assignment
    k = sigma.k
    free: dict = {}
    free_excl: dict = {}
    complete: set = set()
    for v in range(g.n):
        present = set()
        for u in g.adjacency[v]:
            if u in vs:
                present.add(colors[u])
        missing = [i for i in range(k) if i not in present]
        free[v] = len(missing)
        free_excl[v] = len([i for i in missing if i != colors[v]])
        if all(i in present for i in range(k) if i != colors[v]):
            complete.add(v)
    f1 = frozenset(v for v, deg in free.items() if deg >= 2)
    f2 = frozenset(v for v, deg in free.items() if deg >= 3)
    return VertexCensus(
        free_degree=free,
        free_degree_excl_own=free_excl,
        f1=f1,
        f2=f2,
        sigma_complete=frozenset(complete),
        profile_name=profile.name,
    )


def cluster_bound(census: VertexCensus, k: int) -> int:
    """Upper bound 2^|F1 minus F2| * k^|F2| on the cluster size."""
    only_f1 = len(census.f1 - census.f2)
    return (2**only_f1) * (k ** len(census.f2))


# ---------------------------------------------------------------------------
# property predicates


def _p1_window(n: int, k: int) -> tuple:
    lo = math.ceil(0.509 * n / k)
    hi = math.floor((1.0 - k**-0.499) * n / k)
    return lo, hi


def _check_p1(
    g: Graph,
    sigma: Coloring,
    profile: ConstantsProfile,
    budget: int,
    seed: int,
    samples: int,
) -> PropertyReport:
    """Subsets of one class in a size window must dominate almost everyone else.

    For each class i and subset S in the window, the number of outside
    vertices with no neighbor in S must stay below n/k - |S| - n^(2/3).
    The window is typically empty at desk scale, making the property
    vacuous; that is reported rather than hidden.
    """
    n, k = g.n, sigma.k
    lo, hi = _p1_window(n, k)
    if lo > hi:
        return PropertyReport(
            which="P1",
            holds=True,
            exhaustive=True,
            witness=None,
            detail=f"size window [{lo}, {hi}] is empty; property vacuous",
        )
    classes = [[] for _ in range(k)]
    for v, c in enumerate(sigma.assignment):
        classes[c].append(v)
    adj = g.adjacency
    bound_base = n / k - n ** (2.0 / 3.0)

    def violated(i: int, subset: tuple) -> bool:
        sset = set(subset)
        others = [v for v in range(n) if sigma.assignment[v] != i]
        no_neighbor = sum(1 for v in others if not (adj[v] & sset))
        return not no_neighbor < bound_base - len(subset)

    total = sum(
        math.comb(len(classes[i]), size)
        for i in range(k)
        for size in range(lo, min(hi, len(classes[i])) + 1)
    )
    if total <= budget:
        for i in range(k):
            for size in range(lo, min(hi, len(classes[i])) + 1):
                for subset in itertools.combinations(classes[i], size):
                    if violated(i, subset):
                        return PropertyReport(
                            which="P1",
                            holds=False,
                            exhaustive=True,
                            witness=(i, subset),
                            detail="violating subset found by exhaustive scan",
                        )
        return PropertyReport(
            which="P1", holds=True, exhaustive=True, witness=None,
            detail=f"exhaustive over {total} subsets",
        )
    rng = rng_for(seed, 11)
    for _ in range(samples):
        i = int(rng.integers(k))
        size = int(rng.integers(lo, min(hi, len(classes[i])) + 1))
        if size > len(classes[i]):
            continue
        subset = tuple(rng.choice(classes[i], size=size, replace=False))
        if violated(i, subset):
            return PropertyReport(
                which="P1", holds=False, exhaustive=False, witness=(i, subset),
                detail="violating subset found by randomized search",
            )
    return PropertyReport(
        which="P1", holds=True, exhaustive=False, witness=None,
        detail=f"no witness found in {samples} randomized subsets",
    )


def _check_p2(g: Graph, sigma: Coloring, profile: ConstantsProfile) -> PropertyReport:
    """At most kappa*n/(3k) outside vertices may be sparse toward each class."""
    n, k = g.n, sigma.k
    colors = sigma.assignment
    limit = profile.kappa * n / (3 * k)
    for i in range(k):
        sparse = [
            v
            for v in range(n)
            if colors[v] != i
            and sum(1 for u in g.adjacency[v] if colors[u] == i) < profile.p2_degree
        ]
        if len(sparse) > limit:
            return PropertyReport(
                which="P2", holds=False, exhaustive=True,
                witness=(i, tuple(sparse)),
                detail=f"{len(sparse)} sparse vertices toward class {i}, limit {limit:.3f}",
            )
    return PropertyReport(
        which="P2", holds=True, exhaustive=True, witness=None,
        detail=f"all classes within the {limit:.3f} sparse-vertex limit",
    )


def _dense_core(g: Graph, min_degree: int) -> frozenset:
    """Largest subgraph of minimum degree >= min_degree (standard peeling)."""
    alive = [True] * g.n
    deg = [g.degree(v) for v in range(g.n)]
    stack = [v for v in range(g.n) if deg[v] < min_degree]
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        for u in g.adjacency[v]:
            if alive[u]:
                deg[u] -= 1
                if deg[u] < min_degree:
                    stack.append(u)
    return frozenset(v for v in range(g.n) if alive[v])


def _check_p3(
    g: Graph,
    k: int,
    profile: ConstantsProfile,
    budget: int,
    seed: int,
    samples: int,
) -> PropertyReport:
    """No small set may span more than density_factor times its size in edges.

    A violating set cannot be fully peeled by removing vertices of degree
    at most density_factor, so an empty (density_factor + 1)-core proves
    the property outright.  Otherwise small subsets of the dense remainder
    are scanned exhaustively under budget, then randomly.
    """
    n = g.n
    factor = profile.density_factor
    s_max = math.floor(k ** (-4.0 / 3.0) * n)
    if s_max < 2:
        return PropertyReport(
            which="P3", holds=True, exhaustive=True, witness=None,
            detail=f"size cap {s_max} admits no multi-vertex subset",
        )
    dense = _dense_core(g, factor + 1)
    if not dense:
        return PropertyReport(
            which="P3", holds=True, exhaustive=True, witness=None,
            detail=f"graph has empty {factor + 1}-core; no set can exceed density {factor}",
        )

    def span(subset: tuple) -> int:
        sset = set(subset)
        return sum(1 for u, v in g.edges if u in sset and v in sset)

    pool = sorted(dense)
    total = sum(math.comb(len(pool), size) for size in range(2, min(s_max, len(pool)) + 1))
    if total <= budget:
        for size in range(2, min(s_max, len(pool)) + 1):
            for subset in itertools.combinations(pool, size):
                if span(subset) > factor * size:
                    return PropertyReport(
                        which="P3", holds=False, exhaustive=True, witness=subset,
                        detail="dense subset found by exhaustive scan",
                    )
        return PropertyReport(
            which="P3", holds=True, exhaustive=True, witness=None,
            detail=f"exhaustive over {total} subsets of the {factor + 1}-core",
        )
    rng = rng_for(seed, 13)
    for _ in range(samples):
        size = int(rng.integers(2, min(s_max, len(pool)) + 1))
        subset = tuple(rng.choice(pool, size=size, replace=False))
        if span(subset) > factor * size:
            return PropertyReport(
                which="P3", holds=False, exhaustive=False, witness=subset,
                detail="dense subset found by randomized search",
            )
    return PropertyReport(
        which="P3", holds=True, exhaustive=False, witness=None,
        detail=f"no witness found in {samples} randomized subsets",
    )


def _check_p4(g: Graph, sigma: Coloring, profile: ConstantsProfile) -> PropertyReport:
    """Free-vertex counts stay under the profile's slack-adjusted caps."""
    res = core(g, sigma, profile)
    census = vertex_census(g, sigma, res.core_vertices, profile)
    n, k = g.n, sigma.k
    cap1 = (n / k) * (1.0 + profile.p4_slack1)
    cap2 = profile.p4_slack2 * n
    ok1 = len(census.f1) <= cap1
    ok2 = len(census.f2) <= cap2
    witness = None
    if not ok1:
        witness = tuple(sorted(census.f1))
    elif not ok2:
        witness = tuple(sorted(census.f2))
    return PropertyReport(
        which="P4",
        holds=ok1 and ok2,
        exhaustive=True,
        witness=witness,
        detail=(
            f"|F1|={len(census.f1)} vs cap {cap1:.2f}; "
            f"|F2|={len(census.f2)} vs cap {cap2:.2f}"
        ),
    )


def check_property(
    g: Graph,
    sigma: Optional[Coloring],
    which: str,
    profile: ConstantsProfile,
    budget: int = 200_000,
    seed: int = 0,
    samples: int = 2_000,
    k: Optional[int] = None,
) -> PropertyReport:
    """Dispatch to one of the four expansion property checks.

    P1, P2, and P4 need the coloring; P3 is graph-only but needs k for its
    size cap (taken from sigma when present).
    """
    if which in ("P1", "P2", "P4") and sigma is None:
        raise DomainError(f"{which} needs a coloring")
    if which == "P1":
        return _check_p1(g, sigma, profile, budget, seed, samples)
    if which == "P2":
        return _check_p2(g, sigma, profile)
    if which == "P3":
        kk = sigma.k if sigma is not None else k
        if kk is None:
            raise DomainError("P3 needs k (directly or via a coloring)")
        return _check_p3(g, kk, profile, budget, seed, samples)
    if which == "P4":
        return _check_p4(g, sigma, profile)
    raise DomainError(f"unknown property {which!r}")
