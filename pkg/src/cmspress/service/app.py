"""FastAPI service exposing the analysis operations.

The CLI drives this app in-process by default; `cmspress serve` runs it
under uvicorn for remote clients.  Validation failures map to HTTP 400,
numeric non-convergence to HTTP 500 with kind "non_convergence".
"""

from __future__ import annotations

import functools
import math

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import gallery as gallery_mod
from ..boundary import (BoundaryModel, BoundarySymbol, check_no_excursion,
                        boundary_entropy, build_boundary_model, compactify,
                        probe_finite_entropy)
from ..diffprobe import kink_scan, pressure_curve
from ..errors import ConvergenceError, ValidationError
from ..metrics import ShiftMetric, classify
from ..potentials import discretize
from ..pressure import (PressureEstimate, compactified_pressure,
                        gurevich_pressure, interior_pressure, loop_entropy,
                        separated_set_pressure, sft_pressure)
from ..sectors import boundary_chains, decompose, verify
from ..serialization import parse_metric, parse_potential, parse_spec
from ..shifts import truncate
from .models import (BoundaryRequest, BoundaryResponse, ClassifyRequest,
                     ClassifyResponse, ConjectureRequest, ConjectureResponse,
                     DiffScanRequest, DiffScanResponse, GalleryItem,
                     GalleryListResponse, PressureRequest, PressureResponse,
                     PressureRow, SectorInfo, SectorLevelInfo, SectorsRequest,
                     SectorsResponse)

app = FastAPI(title="cmspress", description="Pressure and compactification "
              "analysis for countable Markov shifts")


def _http_validation(exc: ValidationError) -> HTTPException:
    return HTTPException(status_code=400, detail={
        "kind": "validation", "error": str(exc), "field": exc.field})


def _http_convergence(exc: ConvergenceError) -> HTTPException:
    return HTTPException(status_code=500, detail={
        "kind": "non_convergence", "error": str(exc),
        "diagnostics": exc.diagnostics})


def _guard(fn):
    @functools.wraps(fn)
    def wrapped(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as exc:
            raise _http_validation(exc) from exc
        except ConvergenceError as exc:
            raise _http_convergence(exc) from exc
    return wrapped


def _resolve_spec(req) -> tuple:
    """(spec, entry or None) from an explicit payload or a gallery name."""
    if req.gallery is not None:
        entry = gallery_mod.instantiate(req.gallery)
        return entry.spec, entry
    if req.spec is None:
        raise ValidationError("provide either spec or gallery", field="spec")
    return parse_spec(req.spec), None


def _estimate_to_response(est: PressureEstimate, method: str, seed: int) -> PressureResponse:
    rows = [PressureRow(**{k: row.get(k) for k in
                           ("N", "n", "value", "lower", "upper", "increment")})
            for row in est.history]
    upper = None if math.isinf(est.upper) else est.upper
    return PressureResponse(method=method, value=est.value, lower=est.lower,
                            upper=upper, params=_jsonable(est.params), rows=rows,
                            seed=seed)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


@app.get("/health")
def health():
    return {"status": "ok"}


@app.get("/gallery", response_model=GalleryListResponse)
@_guard
def gallery_list():
    items = []
    for name in gallery_mod.catalogue():
        e = gallery_mod.instantiate(name)
        items.append(GalleryItem(name=name, oracles=_jsonable(e.oracles),
                                 notes=e.notes))
    return GalleryListResponse(entries=items)


@app.get("/gallery/{name}")
@_guard
def gallery_export(name: str):
    entry = gallery_mod.instantiate(name)
    return _jsonable(gallery_mod.entry_to_json(entry))


@app.post("/pressure", response_model=PressureResponse)
@_guard
def pressure(req: PressureRequest):
    spec, entry = _resolve_spec(req)
    p = parse_potential(req.potential)
    method = req.method

    if method in ("interior", "interior_sup"):
        schedule = req.schedule or [4, 8, 16, 32, 64, 128]
        est = interior_pressure(spec, p, schedule)
        return _estimate_to_response(est, "interior_sup", req.seed)

    if method == "spectral":
        n = req.N or 64
        t = truncate(spec, n)
        est = sft_pressure(t, discretize(p, max(p.depth, 1), t))
        est.history = [{"N": n, "value": est.value, "lower": est.lower,
                        "upper": est.upper, "increment": None}]
        return _estimate_to_response(est, "spectral", req.seed)

    if method == "gurevich":
        base = req.base if req.base is not None else spec.label(1)
        est = gurevich_pressure(spec, p, base, req.n_max or 20, req.N_max or 128)
        est.history = [{"n": r["n"], "value": r["value"]} for r in est.history]
        return _estimate_to_response(est, "gurevich", req.seed)

    if method in ("separated", "separated_sets"):
        if req.metric is None:
            raise ValidationError("separated-set pressure needs a metric",
                                  field="metric")
        vm = parse_metric(req.metric)
        sm = ShiftMetric(vm, req.theta)
        t = truncate(spec, req.N or 64)
        rep = separated_set_pressure(t, p, sm, req.n or 8, req.eps or 0.25)
        return PressureResponse(
            method="separated_sets", value=rep["value"], lower=rep["value"],
            upper=None,
            params=_jsonable({k: v for k, v in rep.items() if k != "value"}),
            seed=req.seed)

    if method == "loop_gf":
        p_seq = req.p_seq or [1] * (req.cutoff or 60)
        h = loop_entropy(p_seq, req.cutoff or len(p_seq))
        return PressureResponse(method="loop_gf", value=h, lower=h, upper=h,
                                params={"cutoff": req.cutoff or len(p_seq)},
                                seed=req.seed)

    if method == "compactified":
        if entry is not None:
            model = entry.boundary
        elif req.boundary is not None:
            model = parse_boundary_model(req.boundary)
        else:
            raise ValidationError(
                "compactified pressure needs a boundary model or gallery entry",
                field="boundary")
        cs = compactify(spec, model, req.N or 128)
        est = compactified_pressure(cs, discretize(p, 1, cs.base)
                                    if p.depth > 1 else p)
        return _estimate_to_response(est, "compactified", req.seed)

    raise ValidationError(f"unknown pressure method {method!r}", field="method")


def parse_boundary_model(data: dict) -> BoundaryModel:
    from ..serialization import _coerce_label

    try:
        syms = [BoundarySymbol(id=s["id"], source=s.get("source", "declared"),
                               point_id=s.get("point", s["id"]),
                               limit_key=s.get("limit_key", s["id"]))
                for s in data["symbols"]]
        to_b = {(_coerce_label(v), s) for v, s in data.get("to_boundary", [])}
        from_b = {(s, _coerce_label(v)) for s, v in data.get("from_boundary", [])}
        within = {(a, b) for a, b in data.get("within_boundary", [])}
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed boundary model: {exc}",
                              field="boundary") from exc
    prov = {}
    for edge in to_b | from_b | within:
        prov[edge] = "analytic"
    return BoundaryModel(symbols=syms, to_boundary=to_b, from_boundary=from_b,
                         within_boundary=within, provenance=prov)


@app.post("/sectors", response_model=SectorsResponse)
@_guard
def sectors(req: SectorsRequest):
    spec, entry = _resolve_spec(req)
    if entry is not None:
        vm = entry.metric
        cutoffs = req.cutoffs if req.cutoffs else entry.sector_cutoffs
        nmax = min(req.nmax, entry.sector_n_max) if req.nmax else entry.sector_n_max
    else:
        if req.metric is None:
            raise ValidationError("sector analysis needs a metric", field="metric")
        vm = parse_metric(req.metric)
        cutoffs, nmax = req.cutoffs, req.nmax
    dec = decompose(spec, vm, cutoffs, nmax)
    cert = verify(dec)
    levels = []
    for lv in dec.levels:
        levels.append(SectorLevelInfo(
            k=lv.k, cutoff=lv.cutoff, effective_cutoff=lv.effective_cutoff,
            absorbed=len(lv.absorbed), delta_k=lv.delta_k,
            sectors=[SectorInfo(key=s.key, size=len(s.indices),
                                labels_head=[str(x) for x in s.labels[:6]],
                                diameter=s.diameter, infinite=s.infinite,
                                connectivity=s.connectivity, note=s.note)
                     for s in lv.sectors]))
    chains = None
    if cert.verdict == "sectorial":
        chains = [{"point": c.point_id, "limit_key": c.limit_key,
                   "sectors": {str(k): v for k, v in c.sector_indices.items()}}
                  for c in boundary_chains(dec)]
    return SectorsResponse(
        mode=dec.mode, levels=levels,
        nesting={f"{k}:{si}": parents for (k, si), parents in sorted(dec.nesting.items())},
        verdict=cert.verdict, witness=_jsonable(cert.witness),
        checks=_jsonable(cert.checks), chains=chains, seed=req.seed)


@app.post("/boundary", response_model=BoundaryResponse)
@_guard
def boundary(req: BoundaryRequest):
    spec, entry = _resolve_spec(req)
    probe = probe_finite_entropy(spec)
    if entry is not None:
        model = entry.boundary
        mode = "analytic"
    else:
        if req.metric is None:
            raise ValidationError("heuristic boundary inference needs a metric",
                                  field="metric")
        vm = parse_metric(req.metric)
        if req.cutoffs:
            dec = decompose(spec, vm, req.cutoffs, req.nmax)
            model = build_boundary_model(spec, dec, n_max=req.nmax)
        else:
            cls = classify(vm, max(req.nmax, 64), [0.5, 0.25])
            model = build_boundary_model(spec, cls, n_max=req.nmax)
        mode = "heuristic"
    m_max = req.m_max or (len(model.symbols) + 2)
    verdict = check_no_excursion(model, m_max)
    sym_ids = {s.id for s in model.symbols}
    identity = model.within_boundary <= {(s, s) for s in sym_ids}
    try:
        b_ent = boundary_entropy(model)
    except ValidationError:
        b_ent = None
    return BoundaryResponse(
        mode=mode, model=_jsonable(model.to_json()),
        no_excursion={"passed": verdict.passed,
                      "witness": _jsonable(verdict.witness), "m_max": m_max},
        within_nonempty=bool(model.within_boundary),
        within_is_identity=identity, boundary_entropy=b_ent,
        finite_entropy_probe=_jsonable(probe), seed=req.seed)


@app.post("/diff-scan", response_model=DiffScanResponse)
@_guard
def diff_scan(req: DiffScanRequest):
    if req.spec is not None:
        spec = parse_spec(req.spec)
    else:
        raise ValidationError("diff-scan needs a spec", field="spec")
    n = req.N or (spec.n if hasattr(spec, "n") else 64)
    t = truncate(spec, n)
    phi = parse_potential(req.phi)
    psi = parse_potential(req.psi)
    if len(req.grid) != 3:
        raise ValidationError("grid must be [start, stop, step]", field="grid")
    start, stop, step = req.grid
    if step <= 0 or stop <= start:
        raise ValidationError("grid must satisfy start < stop, step > 0",
                              field="grid")
    count = int(round((stop - start) / step))
    grid = [start + i * step for i in range(count + 1)]
    phi_d = discretize(phi, max(phi.depth, 1), t)
    psi_d = discretize(psi, max(psi.depth, 1), t)
    curve = pressure_curve(t, phi_d, psi_d, grid)
    v = curve.values
    rows = []
    for i, tt in enumerate(curve.t_grid):
        d2 = (v[i + 1] - 2 * v[i] + v[i - 1]) if 0 < i < len(v) - 1 else 0.0
        rows.append({"t": float(tt), "P": float(v[i]), "d2P": float(d2)})
    kinks = kink_scan(curve, req.tol)
    return DiffScanResponse(rows=rows, kinks=_jsonable(kinks.locations),
                            tol=req.tol, seed=req.seed)


@app.post("/metric-classify", response_model=ClassifyResponse)
@_guard
def metric_classify(req: ClassifyRequest):
    vm = parse_metric(req.metric)
    c = classify(vm, req.n_max, req.eps_grid)
    return ClassifyResponse(
        vanishing={"verdict": c.vanishing.value, "witness": _jsonable(c.vanishing.witness)},
        totally_bounded={"verdict": c.totally_bounded.value,
                         "witness": _jsonable(c.totally_bounded.witness)},
        net_sizes={f"eps={e}|N={n}": size for (e, n), size in sorted(c.net_sizes.items())},
        seed=req.seed)


@app.post("/explore-conjecture", response_model=ConjectureResponse)
@_guard
def explore_conjecture(req: ConjectureRequest):
    entry = gallery_mod.instantiate(req.name)
    dec = decompose(entry.spec, entry.metric, entry.sector_cutoffs,
                    min(entry.sector_n_max, 300))
    cert = verify(dec)
    pot = req.potential or {"kind": "locally_constant", "depth": 1, "table": {},
                            "default": 0.0, "boundary_limits": {"default": 0.0}}
    p = parse_potential(pot)
    schedule = req.schedule or [8, 16, 32, 64, 128]
    inner = interior_pressure(entry.spec, p, schedule)
    cs = compactify(entry.spec, entry.boundary, schedule[-1])
    outer = compactified_pressure(cs, p)
    return ConjectureResponse(
        name=req.name, sectorial_verdict=cert.verdict,
        interior=_estimate_to_response(inner, "interior_sup", req.seed),
        compactified=_estimate_to_response(outer, "compactified", req.seed),
        difference=outer.value - inner.value,
        note="dual estimates reported without a pass/fail assertion; the "
             "equality of both pressures for general totally bounded metrics "
             "is an open question",
        seed=req.seed)
