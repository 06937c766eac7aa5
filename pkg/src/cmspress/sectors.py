"""Sector decompositions of the vertex set and boundary chains.

At each cutoff N_k the vertices above the cutoff split into sectors:
weakly connected components of the induced subgraph by default, or the
whole tail as a single sector when the metric is certified vanishing (all
deep vertices accumulate to one boundary point and any two are joined
through the full graph).  Infiniteness of a sector cannot be decided
numerically, so generators supply certificates; without one the verdict
never reaches "sectorial".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import ValidationError
from .metrics import VertexMetric, vertex_set_diameter
from .shifts import ShiftSpec

# Desk-scale trend rule: deltas must fall strictly and by this factor
# overall before a decomposition without an analytic bound counts as
# shrinking toward zero.
DELTA_DROP_FACTOR = 0.75


@dataclass
class Sector:
    key: str
    indices: tuple
    labels: tuple
    diameter: float
    infinite: Optional[bool]
    note: str = ""
    connectivity: str = "induced"  # induced component vs generator certificate


@dataclass
class SectorLevel:
    k: int
    cutoff: int
    effective_cutoff: int
    absorbed: tuple
    sectors: list
    delta_k: float


@dataclass
class SectorDecomposition:
    spec: ShiftSpec
    metric: VertexMetric
    n_max: int
    levels: list
    nesting: dict  # (k, sector_idx) -> parent sector_idx at level k-1
    mode: str      # "components" | "vanishing_tail"

    def level(self, k: int) -> SectorLevel:
        for lv in self.levels:
            if lv.k == k:
                return lv
        raise ValidationError(f"no level k={k}; probed levels: {[l.k for l in self.levels]}")


@dataclass
class SectorCertificate:
    verdict: str  # "sectorial" | "not_sectorial" | "inconclusive"
    witness: Optional[dict]
    checks: list = field(default_factory=list)

    def __post_init__(self):
        if self.verdict == "not_sectorial" and not self.witness:
            raise ValidationError("a not_sectorial verdict must carry a witness")


def _components(indices: list, edges: list) -> list[list[int]]:
    parent = {i: i for i in indices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict[int, list] = {}
    for i in indices:
        groups.setdefault(find(i), []).append(i)
    return [sorted(g) for g in sorted(groups.values(), key=lambda g: g[0])]


def decompose(spec: ShiftSpec, vm: VertexMetric, cutoffs: Sequence[int],
              n_max: int) -> SectorDecomposition:
    """Sector structure of the vertex set over a cutoff ladder.

    Components certified finite are absorbed into the head while any
    infinite ones remain; if every component is finite they are kept as
    sectors for ``verify`` to flag."""
    cuts = [int(c) for c in cutoffs]
    if cuts != sorted(cuts) or len(set(cuts)) != len(cuts):
        raise ValidationError("cutoffs must be strictly increasing", field="cutoffs")
    if not cuts or cuts[-1] >= n_max:
        raise ValidationError("cutoffs must stay below N_max", field="cutoffs")
    edges = spec.edges_upto(n_max)
    vanishing = (vm.vanishing_bound(2) is not None and spec.is_infinite
                 and spec.tail_is_graph_connected())
    mode = "vanishing_tail" if vanishing else "components"
    levels: list[SectorLevel] = []
    for k, cut in enumerate(cuts, start=1):
        tail = list(range(cut + 1, n_max + 1))
        if mode == "vanishing_tail":
            labels = tuple(spec.label(i) for i in tail)
            diam = vertex_set_diameter(vm, labels)
            sec = Sector(key="tail", indices=tuple(tail), labels=labels,
                         diameter=diam, infinite=True,
                         note="vanishing metric: single accumulation point; "
                              "connectivity through the full graph",
                         connectivity="certified")
            levels.append(SectorLevel(k=k, cutoff=cut, effective_cutoff=cut,
                                      absorbed=(), sectors=[sec], delta_k=diam))
            continue
        tail_set = set(tail)
        tail_edges = [(a, b) for a, b in edges if a in tail_set and b in tail_set]
        comps = _components(tail, tail_edges)
        infos = [spec.classify_tail_component(c, cut) for c in comps]
        finite = [c for c, info in zip(comps, infos) if info.infinite is False]
        rest = [(c, info) for c, info in zip(comps, infos) if info.infinite is not False]
        if rest:
            absorbed = tuple(i for c in finite for i in c)
            kept = rest
        else:
            absorbed = ()
            kept = list(zip(comps, infos))
        sectors = []
        for c, info in kept:
            labels = tuple(spec.label(i) for i in c)
            diam = vertex_set_diameter(vm, labels)
            sectors.append(Sector(key=info.key, indices=tuple(c), labels=labels,
                                  diameter=diam, infinite=info.infinite,
                                  note=info.note))
        delta = max((s.diameter for s in sectors), default=0.0)
        eff = max([cut] + [max(c) for c in finite]) if rest and finite else cut
        levels.append(SectorLevel(k=k, cutoff=cut, effective_cutoff=eff,
                                  absorbed=absorbed, sectors=sectors, delta_k=delta))

    nesting: dict = {}
    for k in range(1, len(levels)):
        lo, hi = levels[k - 1], levels[k]
        absorbed_prev = set(lo.absorbed)
        where_prev = {}
        for pj, par in enumerate(lo.sectors):
            for i in par.indices:
                where_prev[i] = pj
        for si, sec in enumerate(hi.sectors):
            parents = {where_prev[i] for i in sec.indices
                       if i not in absorbed_prev and i in where_prev}
            nesting[(hi.k, si)] = sorted(parents)
    return SectorDecomposition(spec=spec, metric=vm, n_max=n_max, levels=levels,
                               nesting=nesting, mode=mode)


def verify(dec: SectorDecomposition) -> SectorCertificate:
    """Check every sector clause at desk scale: no edges between distinct
    sectors, diameters within the level bound and shrinking, unique
    nesting, infiniteness certificates."""
    checks = []
    violations = []

    edges = dec.spec.edges_upto(dec.n_max)
    for lv in dec.levels:
        where = {}
        for si, sec in enumerate(lv.sectors):
            for i in sec.indices:
                where[i] = si
        bad = None
        for a, b in edges:
            sa, sb = where.get(a), where.get(b)
            if sa is not None and sb is not None and sa != sb:
                bad = {"level": lv.k, "edge": (dec.spec.label(a), dec.spec.label(b)),
                       "sectors": (lv.sectors[sa].key, lv.sectors[sb].key)}
                break
        checks.append({"check": "no_cross_edges", "level": lv.k, "passed": bad is None})
        if bad:
            violations.append({"kind": "edge_between_sectors", **bad})

    diam_ok = all(s.diameter <= lv.delta_k + 1e-12 for lv in dec.levels for s in lv.sectors)
    checks.append({"check": "diameters_within_bound", "passed": diam_ok})
    if not diam_ok:
        violations.append({"kind": "diameter_excess"})

    deltas = [lv.delta_k for lv in dec.levels]
    analytic = dec.metric.vanishing_bound(2) is not None
    decreasing = all(deltas[i + 1] < deltas[i] - 1e-15 for i in range(len(deltas) - 1))
    dropped = bool(deltas and deltas[-1] <= DELTA_DROP_FACTOR * deltas[0])
    trend_ok = analytic or (decreasing and dropped)
    checks.append({"check": "delta_shrinks", "passed": trend_ok, "deltas": deltas,
                   "analytic_bound": analytic})
    if not trend_ok:
        violations.append({"kind": "diameter_stagnation", "deltas": deltas})

    nest_ok = True
    for (k, si), parents in dec.nesting.items():
        if len(parents) != 1:
            nest_ok = False
            violations.append({"kind": "non_unique_parent", "level": k,
                               "sector": dec.level(k).sectors[si].key,
                               "parents": parents})
            break
    checks.append({"check": "nesting_unique", "passed": nest_ok})

    finite_sec = next((s for lv in dec.levels for s in lv.sectors if s.infinite is False), None)
    unknown = any(s.infinite is None for lv in dec.levels for s in lv.sectors)
    checks.append({"check": "infinite_certificates",
                   "passed": finite_sec is None and not unknown})
    if finite_sec is not None:
        violations.append({"kind": "finite_residual_sector", "sector": finite_sec.key,
                           "size": len(finite_sec.indices)})

    if violations:
        return SectorCertificate(verdict="not_sectorial", witness=violations[0],
                                 checks=checks)
    if unknown:
        return SectorCertificate(verdict="inconclusive",
                                 witness={"kind": "missing_infiniteness_certificate"},
                                 checks=checks)
    return SectorCertificate(verdict="sectorial", witness=None, checks=checks)


@dataclass
class BoundaryChain:
    """Nested sector chain V_1 >= V_2 >= ... naming one boundary point."""

    point_id: str
    limit_key: str
    sector_indices: dict  # level k -> index into that level's sector list
    dec: SectorDecomposition

    def sector_at(self, k: int) -> Sector:
        lv = self.dec.level(k)
        return lv.sectors[self.sector_indices[k]]


def boundary_chains(dec: SectorDecomposition) -> list[BoundaryChain]:
    """Maximal nested chains through the nesting map, one per boundary
    point seen at the deepest probed level.  Requires a sectorial verdict."""
    cert = verify(dec)
    if cert.verdict != "sectorial":
        raise ValidationError(
            f"boundary chains need a sectorial decomposition (got {cert.verdict})")
    deepest = dec.levels[-1]
    chains = []
    for si, sec in enumerate(deepest.sectors):
        path = {deepest.k: si}
        cur_k, cur_si = deepest.k, si
        for lv in reversed(dec.levels[:-1]):
            parents = dec.nesting.get((cur_k, cur_si))
            if not parents:
                raise ValidationError(f"broken nesting above level {cur_k}")
            cur_k, cur_si = lv.k, parents[0]
            path[lv.k] = cur_si
        point = _point_name(dec.spec, sec.key)
        chains.append(BoundaryChain(point_id=point, limit_key=point,
                                    sector_indices=path, dec=dec))
    return chains


def _point_name(spec: ShiftSpec, sector_key: str) -> str:
    if sector_key == "tail":
        return "inf"
    return sector_key
