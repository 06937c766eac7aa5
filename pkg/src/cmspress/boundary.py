"""Boundary models of metric compactifications and the compactified shift.

A boundary model lists the boundary symbols together with three edge
sets: vertex -> symbol, symbol -> vertex, symbol -> symbol.  Gallery
generators carry analytic certificates; for other specs a heuristic mode
probes accumulation numerically and tags every edge it adds, keeping
heuristic output out of the lemma assertions.

Boundary transitions of a non-Markov completion may need more states
than boundary points: a point reachable from the interior and also
mapping back into it is split into an entry phase and an exit phase so
the finite model contains no interior -> boundary -> interior path that
the completion itself lacks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ValidationError
from .metrics import MetricClassification
from .pressure import power_iteration
from .sectors import SectorDecomposition, boundary_chains, verify
from .shifts import ShiftSpec, TruncatedSFT, truncate


@dataclass(frozen=True)
class BoundarySymbol:
    id: str
    source: str            # "vanishing_point" | "sector_chain" | "declared"
    point_id: str          # boundary point this symbol represents
    limit_key: str         # key under which potentials declare the limit


@dataclass
class BoundaryModel:
    symbols: list
    to_boundary: set       # (vertex label, symbol id)
    from_boundary: set     # (symbol id, vertex label)
    within_boundary: set   # (symbol id, symbol id)
    provenance: dict = field(default_factory=dict)  # edge -> "analytic"|"heuristic"

    def __post_init__(self):
        ids = {s.id for s in self.symbols}
        if len(ids) != len(self.symbols):
            raise ValidationError("boundary symbol ids must be distinct")
        for a, b in self.within_boundary:
            if a not in ids or b not in ids:
                raise ValidationError(f"within-boundary edge ({a},{b}) uses unknown symbols")
        for v, s in self.to_boundary:
            if s not in ids:
                raise ValidationError(f"to-boundary edge ({v},{s}) uses an unknown symbol")
        for s, v in self.from_boundary:
            if s not in ids:
                raise ValidationError(f"from-boundary edge ({s},{v}) uses an unknown symbol")

    def symbol(self, sid: str) -> BoundarySymbol:
        for s in self.symbols:
            if s.id == sid:
                return s
        raise ValidationError(f"no boundary symbol {sid!r}")

    def analytic_only(self) -> bool:
        return all(v == "analytic" for v in self.provenance.values())

    def to_json(self) -> dict:
        return {
            "symbols": [{"id": s.id, "source": s.source, "point": s.point_id,
                         "limit_key": s.limit_key} for s in self.symbols],
            "to_boundary": sorted([str(v), s] for v, s in self.to_boundary),
            "from_boundary": sorted([s, str(v)] for s, v in self.from_boundary),
            "within_boundary": sorted([a, b] for a, b in self.within_boundary),
            "provenance": {f"{a}->{b}": tag for (a, b), tag in
                           sorted(self.provenance.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1])))},
        }


@dataclass
class CompactifiedShift:
    """Base truncation merged with the boundary symbols into one finite
    topological Markov chain."""

    base: TruncatedSFT
    model: BoundaryModel

    def merged_adjacency(self) -> tuple[list, np.ndarray]:
        """States [("base", label)... ("boundary", limit_key)...] and their
        adjacency; restricted to base states it equals the truncation."""
        base_labels = list(self.base.labels)
        sids = [s.id for s in self.model.symbols]
        n_b = len(base_labels)
        n = n_b + len(sids)
        mat = np.zeros((n, n), dtype=bool)
        mat[:n_b, :n_b] = self.base.matrix
        spos = {sid: n_b + i for i, sid in enumerate(sids)}
        bpos = {lab: i for i, lab in enumerate(base_labels)}
        for v, s in self.model.to_boundary:
            if v in bpos:
                mat[bpos[v], spos[s]] = True
        for s, v in self.model.from_boundary:
            if v in bpos:
                mat[spos[s], bpos[v]] = True
        for a, b in self.model.within_boundary:
            mat[spos[a], spos[b]] = True
        labels = [("base", lab) for lab in base_labels]
        labels += [("boundary", self.model.symbol(sid).limit_key) for sid in sids]
        return labels, mat


def compactify(spec: ShiftSpec, model: BoundaryModel, n_base: int) -> CompactifiedShift:
    t = truncate(spec, n_base)
    if t.is_empty:
        raise ValidationError("base truncation is empty")
    return CompactifiedShift(base=t, model=model)


def probe_finite_entropy(spec: ShiftSpec, base_index: int = 1,
                         periods: Sequence[int] = (1, 2, 3, 4),
                         n_lo: int = 32, n_hi: int = 64) -> dict:
    """Closed-word counts through a fixed base must not grow with the
    truncation bound at fixed period (Gurevich counts through a cylinder
    explode exactly when the entropy is infinite)."""
    out = {"base": base_index, "stable": True, "counts": {}}
    for n in (n_lo, n_hi):
        t = truncate(spec, n)
        if t.is_empty or base_index not in t.indices:
            raise ValidationError("finite-entropy probe needs the base in the truncation")
        a = t.matrix.astype(float)
        b = t.indices.index(base_index)
        power = np.eye(len(t))
        for p in range(1, max(periods) + 1):
            power = power @ a
            if p in periods:
                out["counts"].setdefault(p, {})[n] = int(round(power[b, b]))
    for p in periods:
        if out["counts"][p][n_lo] != out["counts"][p][n_hi]:
            out["stable"] = False
    return out


def build_boundary_model(spec: ShiftSpec,
                         dec_or_class: Union[SectorDecomposition, MetricClassification],
                         probe_levels: Sequence[int] = (16, 32, 64),
                         n_max: int = 128) -> BoundaryModel:
    """Heuristic boundary model from a sector decomposition or a vanishing
    classification.  Every edge is tagged "heuristic"; gallery entries
    carry analytic certificates instead (see gallery.instantiate).

    Aborts when the finite-entropy probe sees growing closed-orbit counts.
    """
    probe = probe_finite_entropy(spec)
    if not probe["stable"]:
        raise ValidationError(
            f"finite-entropy probe failed: closed-orbit counts grow {probe['counts']}")

    if isinstance(dec_or_class, MetricClassification):
        if dec_or_class.vanishing.value != "yes":
            raise ValidationError(
                "heuristic mode from a classification needs a vanishing verdict; "
                "pass a sector decomposition instead")
        sym = BoundarySymbol(id="inf", source="vanishing_point", point_id="inf",
                             limit_key="inf")
        to_b, from_b = set(), set()
        prov = {}
        t = truncate(spec, n_max)
        deep_sets = {L: {lab for i, lab in zip(t.indices, t.labels) if i > L}
                     for L in probe_levels}
        for i, lab in zip(t.indices, t.labels):
            if i > min(probe_levels):
                continue
            pos = t.pos_of_label(lab)
            outs = {t.labels[q] for q in t.out_positions(pos)}
            ins = {t.labels[q] for q in np.flatnonzero(t.matrix[:, pos])}
            if all(outs & deep_sets[L] for L in probe_levels):
                to_b.add((lab, "inf"))
                prov[(lab, "inf")] = "heuristic"
            if all(ins & deep_sets[L] for L in probe_levels):
                from_b.add(("inf", lab))
                prov[("inf", lab)] = "heuristic"
        within = {("inf", "inf")}
        prov[("inf", "inf")] = "heuristic"
        return BoundaryModel(symbols=[sym], to_boundary=to_b, from_boundary=from_b,
                             within_boundary=within, provenance=prov)

    dec = dec_or_class
    cert = verify(dec)
    if cert.verdict != "sectorial":
        raise ValidationError(
            f"heuristic boundary model needs a sectorial decomposition (got {cert.verdict})")
    chains = boundary_chains(dec)
    symbols = [BoundarySymbol(id=c.point_id, source="sector_chain",
                              point_id=c.point_id, limit_key=c.limit_key)
               for c in chains]
    to_b, from_b = set(), set()
    prov = {}
    t = truncate(spec, dec.n_max)
    head_cut = dec.levels[0].cutoff
    for c in chains:
        sec_sets = {lv.k: set(c.sector_at(lv.k).labels) for lv in dec.levels}
        for i, lab in zip(t.indices, t.labels):
            if i > head_cut:
                continue
            pos = t.pos_of_label(lab)
            outs = {t.labels[q] for q in t.out_positions(pos)}
            ins = {t.labels[q] for q in np.flatnonzero(t.matrix[:, pos])}
            if all(outs & sec_sets[lv.k] for lv in dec.levels):
                to_b.add((lab, c.point_id))
                prov[(lab, c.point_id)] = "heuristic"
            if all(ins & sec_sets[lv.k] for lv in dec.levels):
                from_b.add((c.point_id, lab))
                prov[(c.point_id, lab)] = "heuristic"
    # under a sectorial certificate boundary-to-boundary is the identity
    within = {(s.id, s.id) for s in symbols}
    for e in within:
        prov[e] = "heuristic"
    return BoundaryModel(symbols=symbols, to_boundary=to_b, from_boundary=from_b,
                         within_boundary=within, provenance=prov)


@dataclass
class ExcursionVerdict:
    passed: bool
    witness: Optional[list]  # [vertex, symbol..., vertex] when failing
    m_max: int


def check_no_excursion(model_or_cs, m_max: int) -> ExcursionVerdict:
    """Search for interior -> boundary^m -> interior paths, m <= m_max.

    The completion of a finite-entropy CMS admits none, so a faithful
    model must not either."""
    if m_max < 1:
        raise ValidationError("m_max must be >= 1", field="m_max")
    model = model_or_cs.model if isinstance(model_or_cs, CompactifiedShift) else model_or_cs
    succ: dict = {}
    for a, b in model.within_boundary:
        succ.setdefault(a, []).append(b)
    exits = {s for s, _ in model.from_boundary}
    exit_vertex = {}
    for s, v in sorted(model.from_boundary, key=lambda e: (str(e[0]), str(e[1]))):
        exit_vertex.setdefault(s, v)
    for v, s0 in sorted(model.to_boundary, key=lambda e: (str(e[0]), str(e[1]))):
        frontier = {s0: [s0]}
        for _ in range(m_max):
            for sid, path in sorted(frontier.items()):
                if sid in exits:
                    return ExcursionVerdict(
                        passed=False,
                        witness=[v] + path + [exit_vertex[sid]],
                        m_max=m_max)
            nxt = {}
            for sid, path in frontier.items():
                for b in succ.get(sid, []):
                    if b not in nxt:
                        nxt[b] = path + [b]
            frontier = nxt
            if not frontier:
                break
    return ExcursionVerdict(passed=True, witness=None, m_max=m_max)


def boundary_entropy(model_or_cs) -> float:
    """log spectral radius of the boundary-to-boundary adjacency."""
    model = model_or_cs.model if isinstance(model_or_cs, CompactifiedShift) else model_or_cs
    if not model.symbols:
        raise ValidationError("empty boundary")
    sids = [s.id for s in model.symbols]
    pos = {sid: i for i, sid in enumerate(sids)}
    mat = np.zeros((len(sids), len(sids)))
    for a, b in model.within_boundary:
        mat[pos[a], pos[b]] = 1.0
    if not model.within_boundary:
        raise ValidationError("no boundary-to-boundary transitions")
    # states with no outgoing edge never recur; prune to the recurrent part
    keep = list(range(len(sids)))
    while True:
        outs = mat[np.ix_(keep, keep)].sum(axis=1)
        ins = mat[np.ix_(keep, keep)].sum(axis=0)
        alive = [k for k, o, i in zip(keep, outs, ins) if o > 0 and i > 0]
        if alive == keep:
            break
        keep = alive
        if not keep:
            raise ValidationError("boundary dynamics has no recurrent part")
    lam, _, _, _ = power_iteration(mat[np.ix_(keep, keep)])
    return math.log(lam)
