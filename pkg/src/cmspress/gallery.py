"""Named example systems, each bundled with its metric, an analytic
boundary certificate, and expected-value oracles.

The boundary certificates encode transition structure that holds in the
completion but is not numerically decidable: which vertices reach the
boundary, which boundary points re-enter the interior, and the dynamics
among boundary symbols.  Loop systems get a two-phase presentation of
their single accumulation point (entry/exit) because the completion is
not Markov over one symbol: the interior can enter and leave the
boundary, but never within one excursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .boundary import BoundaryModel, BoundarySymbol
from .errors import ValidationError
from .metrics import (BirthDeathParityMetric, DoubleRenewalMetric,
                      EmbeddingMetric, TreeBackwardMetric, VertexMetric,
                      ZargaryanMetric)
from .shifts import ShiftSpec, make_generator

DEFAULT_TREE_DEPTH = 3


@dataclass
class GalleryEntry:
    name: str
    spec: ShiftSpec
    metric: VertexMetric
    theta: float
    boundary: BoundaryModel
    oracles: dict
    sector_cutoffs: tuple
    sector_n_max: int
    notes: str = ""


def _analytic(edges) -> dict:
    return {e: "analytic" for e in edges}


def _single_point_model(to_vertex: Optional[int], from_vertex: Optional[int]) -> BoundaryModel:
    sym = BoundarySymbol(id="inf", source="vanishing_point", point_id="inf",
                         limit_key="inf")
    to_b = {(to_vertex, "inf")} if to_vertex is not None else set()
    from_b = {("inf", from_vertex)} if from_vertex is not None else set()
    within = {("inf", "inf")}
    return BoundaryModel(symbols=[sym], to_boundary=to_b, from_boundary=from_b,
                         within_boundary=within,
                         provenance=_analytic(to_b | from_b | within))


def _two_phase_model(point: str, hub_label) -> BoundaryModel:
    """Entry/exit presentation of one accumulation point that the hub both
    feeds and receives; no entry->exit link, so no spurious excursion."""
    sin = BoundarySymbol(id=f"{point}[in]", source="vanishing_point",
                         point_id=point, limit_key=point)
    sout = BoundarySymbol(id=f"{point}[out]", source="vanishing_point",
                          point_id=point, limit_key=point)
    to_b = {(hub_label, sin.id)}
    from_b = {(sout.id, hub_label)}
    within = {(sin.id, sin.id), (sout.id, sout.id)}
    return BoundaryModel(symbols=[sin, sout], to_boundary=to_b, from_boundary=from_b,
                         within_boundary=within,
                         provenance=_analytic(to_b | from_b | within))


def _double_renewal_model() -> BoundaryModel:
    syms = [BoundarySymbol(id="+inf", source="sector_chain", point_id="+inf",
                           limit_key="+inf"),
            BoundarySymbol(id="-inf", source="sector_chain", point_id="-inf",
                           limit_key="-inf")]
    to_b = {(0, "+inf"), (0, "-inf")}
    within = {("+inf", "+inf"), ("-inf", "-inf")}
    return BoundaryModel(symbols=syms, to_boundary=to_b, from_boundary=set(),
                         within_boundary=within, provenance=_analytic(to_b | within))


def _dyadic_tree_model(depth: int) -> BoundaryModel:
    suffixes = []

    def rec(s):
        if len(s) == depth:
            suffixes.append(s)
            return
        rec("1" + s)
        rec("3" + s)

    rec("")
    suffixes.sort()
    syms = [BoundarySymbol(id=f"suffix:{s}", source="sector_chain",
                           point_id=f"suffix:{s}", limit_key=f"suffix:{s}")
            for s in suffixes]
    to_b = {("<2>", sym.id) for sym in syms}
    within = {(sym.id, sym.id) for sym in syms}
    return BoundaryModel(symbols=syms, to_boundary=to_b, from_boundary=set(),
                         within_boundary=within, provenance=_analytic(to_b | within))


def _zigzag2_model() -> BoundaryModel:
    syms = [BoundarySymbol(id="inf1", source="declared", point_id="inf1",
                           limit_key="inf1"),
            BoundarySymbol(id="inf2", source="declared", point_id="inf2",
                           limit_key="inf2")]
    to_b = {(0, "inf1"), (0, "inf2")}
    within = {("inf1", "inf2"), ("inf2", "inf1")}
    return BoundaryModel(symbols=syms, to_boundary=to_b, from_boundary=set(),
                         within_boundary=within, provenance=_analytic(to_b | within))


def _zigzag3_model() -> BoundaryModel:
    # orbit phases project onto the three accumulation points; reading an
    # orbit gives (inf1, inf2, inf3, inf2, inf1, inf3) repeated
    points = {0: "inf1", 1: "inf3", 2: "inf1", 3: "inf2", 4: "inf3", 5: "inf2"}
    syms = [BoundarySymbol(id=f"orbit{p}", source="declared",
                           point_id=points[p], limit_key=points[p])
            for p in range(6)]
    within = {(f"orbit{p}", f"orbit{(p - 1) % 6}") for p in range(6)}
    to_b = {(0, f"orbit{p}") for p in range(6)}
    return BoundaryModel(symbols=syms, to_boundary=to_b, from_boundary=set(),
                         within_boundary=within, provenance=_analytic(to_b | within))


def _birth_death_model() -> BoundaryModel:
    syms = [BoundarySymbol(id="inf_odd", source="declared", point_id="inf_odd",
                           limit_key="inf_odd"),
            BoundarySymbol(id="inf_even", source="declared", point_id="inf_even",
                           limit_key="inf_even")]
    within = {(a.id, b.id) for a in syms for b in syms}
    return BoundaryModel(symbols=syms, to_boundary=set(), from_boundary=set(),
                         within_boundary=within, provenance=_analytic(within))


def catalogue() -> list[str]:
    return ["renewal", "backwards_renewal", "random_walk_1side", "double_renewal",
            "dyadic_tree", "loop_system", "circle_loops", "zigzag_2", "zigzag_3",
            "birth_death_parity"]


def instantiate(name: str, **params) -> GalleryEntry:
    """Fully wired gallery entry; unknown names list the catalogue."""
    if name not in catalogue():
        raise ValidationError(
            f"unknown gallery entry {name!r}; catalogue: {', '.join(catalogue())}",
            field="name")

    if name == "renewal":
        spec = make_generator(name)
        return GalleryEntry(
            name=name, spec=spec, metric=ZargaryanMetric(), theta=0.5,
            boundary=_single_point_model(to_vertex=1, from_vertex=None),
            oracles={"h_top": math.log(2),
                     "h_top_note": "classical value, reproduced by the truncation schedule",
                     "boundary_entropy": 0.0, "sectorial": "yes", "boundary_points": 1},
            sector_cutoffs=(4, 16, 64), sector_n_max=256)

    if name == "backwards_renewal":
        spec = make_generator(name)
        return GalleryEntry(
            name=name, spec=spec, metric=ZargaryanMetric(), theta=0.5,
            boundary=_single_point_model(to_vertex=None, from_vertex=1),
            oracles={"h_top": math.log(2),
                     "h_top_note": "time reversal of the renewal shift",
                     "boundary_entropy": 0.0, "sectorial": "yes", "boundary_points": 1},
            sector_cutoffs=(4, 16, 64), sector_n_max=256)

    if name == "random_walk_1side":
        spec = make_generator(name)
        return GalleryEntry(
            name=name, spec=spec, metric=ZargaryanMetric(), theta=0.5,
            boundary=_single_point_model(to_vertex=None, from_vertex=None),
            oracles={"h_top": math.log(2),
                     "h_top_note": "walk with steps +-1; truncated spectral radii 2cos(pi/(N+1)) -> 2",
                     "boundary_entropy": 0.0, "sectorial": "yes", "boundary_points": 1},
            sector_cutoffs=(4, 16, 64), sector_n_max=256)

    if name == "double_renewal":
        spec = make_generator(name)
        return GalleryEntry(
            name=name, spec=spec, metric=DoubleRenewalMetric(), theta=0.5,
            boundary=_double_renewal_model(),
            oracles={"h_top": math.log(1.0 + math.sqrt(3.0)),
                     "h_top_note": "first-return series z + 2z^2/(1-z) = 1",
                     "boundary_entropy": 0.0, "sectorial": "yes", "boundary_points": 2},
            sector_cutoffs=(4, 16, 64), sector_n_max=400)

    if name == "dyadic_tree":
        depth = int(params.pop("depth", DEFAULT_TREE_DEPTH))
        spec = make_generator(name)
        cutoffs = tuple(2 ** k - 1 for k in range(1, depth + 1))
        return GalleryEntry(
            name=name, spec=spec, metric=TreeBackwardMetric(), theta=0.5,
            boundary=_dyadic_tree_model(depth),
            oracles={"h_top": math.log(3),
                     "h_top_note": "full 3-shift with a 2-shift removed; z/(1-2z)=1 at z=1/3",
                     "boundary_entropy": 0.0, "sectorial": "yes",
                     "boundary_points": f"Cantor set, 2^{depth} chains at probe depth"},
            sector_cutoffs=cutoffs, sector_n_max=2 ** (depth + 4) - 1,
            notes="boundary reported through sector chains at finite depth")

    if name == "loop_system":
        spec = make_generator(name, **params)
        return GalleryEntry(
            name=name, spec=spec, metric=ZargaryanMetric(), theta=0.5,
            boundary=_two_phase_model("inf", hub_label=1),
            oracles={"h_top": math.log(2) if spec.p(1) == 1 and spec.p_tail == 1 and not spec.p_prefix else None,
                     "h_top_note": "geometric loop series sum z^n = 1 at z = 1/2 for unit counts",
                     "boundary_entropy": 0.0, "sectorial": "yes", "boundary_points": 1},
            sector_cutoffs=(4, 16, 64), sector_n_max=300)

    if name == "circle_loops":
        spec = make_generator(name, **params)
        order = list(range(1, 4097))
        metric = EmbeddingMetric(position_fn=spec.position, scale=2.0,
                                 label_order=order)
        return GalleryEntry(
            name=name, spec=spec, metric=metric, theta=0.5,
            boundary=_two_phase_model("angle0", hub_label=1),
            oracles={"h_top": math.log(2) if spec.p(1) == 1 and spec.p_tail == 1 and not spec.p_prefix else None,
                     "h_top_note": "same graph as the unit loop system",
                     "boundary_entropy": 0.0, "sectorial": "no",
                     "boundary_points": "unit circle, fixed pointwise"},
            sector_cutoffs=(4, 16, 64), sector_n_max=300,
            notes="deep loops keep diameter near the circle diameter")

    if name == "zigzag_2":
        spec = make_generator(name)
        order = [spec.label(i) for i in range(1, 4097)]
        metric = EmbeddingMetric(position_fn=spec.position, scale=2.0,
                                 label_order=order)
        return GalleryEntry(
            name=name, spec=spec, metric=metric, theta=0.5,
            boundary=_zigzag2_model(),
            oracles={"h_top": math.log(2),
                     "h_top_note": "renewal shift relabeled onto the zig-zag",
                     "boundary_entropy": 0.0, "sectorial": "no", "boundary_points": 2},
            sector_cutoffs=(8, 32, 128), sector_n_max=512,
            notes="tail stays one component of diameter >= the zig-zag amplitude")

    if name == "zigzag_3":
        spec = make_generator(name)
        order = [spec.label(i) for i in range(1, 4097)]
        metric = EmbeddingMetric(position_fn=spec.position, scale=2.0,
                                 label_order=order)
        return GalleryEntry(
            name=name, spec=spec, metric=metric, theta=0.5,
            boundary=_zigzag3_model(),
            oracles={"h_top": math.log(2),
                     "h_top_note": "renewal shift relabeled onto the period-6 zig-zag",
                     "boundary_entropy": 0.0, "sectorial": "no", "boundary_points": 3},
            sector_cutoffs=(8, 32, 128), sector_n_max=512,
            notes="boundary dynamics is one period-6 orbit over three points")

    if name == "birth_death_parity":
        spec = make_generator(name)
        return GalleryEntry(
            name=name, spec=spec, metric=BirthDeathParityMetric(), theta=0.5,
            boundary=_birth_death_model(),
            oracles={"h_top": math.log(3),
                     "h_top_note": "steps {-1,0,+1}: truncated spectral radii 1+2cos(pi/(N+1)) -> 3",
                     "boundary_entropy": math.log(2), "sectorial": "no",
                     "boundary_points": 2, "interior_rich": "yes"},
            sector_cutoffs=(8, 32, 128), sector_n_max=512,
            notes="odd-gap pairs keep the connected tail at diameter 1")

    raise ValidationError(f"unhandled gallery entry {name}")  # pragma: no cover


def entry_to_json(entry: GalleryEntry, embed_points: int = 256) -> dict:
    """Round-trippable JSON export; generator-backed embeddings are
    materialized as explicit point lists."""
    metric_json = entry.metric.to_json()
    if isinstance(entry.metric, EmbeddingMetric) and "points" not in metric_json:
        labels = entry.metric.enumerate_labels(embed_points)
        metric_json = {
            "family": "embedding",
            "scale": entry.metric.scale,
            "labels": [lab for lab in labels],
            "points": [list(entry.metric.position(lab)) for lab in labels],
        }
    return {
        "name": entry.name,
        "spec": entry.spec.to_json(),
        "metric": metric_json,
        "theta": entry.theta,
        "boundary": entry.boundary.to_json(),
        "oracles": {k: v for k, v in sorted(entry.oracles.items())},
        "sector_cutoffs": list(entry.sector_cutoffs),
        "sector_n_max": entry.sector_n_max,
        "notes": entry.notes,
    }
