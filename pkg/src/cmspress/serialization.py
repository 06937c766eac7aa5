"""JSON wire formats for shift specs, metrics, and potentials.

Shift specs: {"kind":"generator","name":"renewal","params":{}} or
{"kind":"explicit","n":3,"edges":[[1,1],[1,2],...]}.  Metrics:
{"family":"zargaryan"} etc.; embeddings carry explicit point lists with
an optional parallel "labels" list (defaulting to 1..n).  Potentials:
{"kind":"locally_constant","depth":1,"table":{"1":0.0},"default":0.0}
or {"kind":"vertex_formula","name":"reciprocal","boundary_limits":
{"inf":0.0}}; affine combinations nest.
"""

from __future__ import annotations

from typing import Any

from .errors import ValidationError
from .metrics import EmbeddingMetric, VertexMetric, make_metric
from .potentials import Affine, LocallyConstant, Potential, make_formula
from .shifts import ExplicitSpec, ShiftSpec, make_generator


def _require(d: dict, key: str, ctx: str):
    if key not in d:
        raise ValidationError(f"{ctx} is missing required field {key!r}", field=key)
    return d[key]


def parse_spec(data: dict) -> ShiftSpec:
    if not isinstance(data, dict):
        raise ValidationError("shift spec must be a JSON object", field="spec")
    kind = _require(data, "kind", "shift spec")
    if kind == "explicit":
        n = _require(data, "n", "explicit spec")
        edges = _require(data, "edges", "explicit spec")
        return ExplicitSpec(n, [tuple(e) for e in edges])
    if kind == "generator":
        name = _require(data, "name", "generator spec")
        params = data.get("params", {}) or {}
        return make_generator(name, **params)
    raise ValidationError(f"unknown spec kind {kind!r}", field="kind")


def _coerce_label(raw):
    if isinstance(raw, str):
        if raw.startswith("<"):
            return raw
        try:
            return int(raw)
        except ValueError:
            return raw
    return raw


def parse_metric(data: dict) -> VertexMetric:
    if not isinstance(data, dict):
        raise ValidationError("metric spec must be a JSON object", field="metric")
    d = dict(data)
    family = _require(d, "family", "metric spec")
    d.pop("family")
    if family == "embedding":
        points = _require(d, "points", "embedding metric")
        if isinstance(points, dict):
            pts = {_coerce_label(k): tuple(v) for k, v in points.items()}
        else:
            labels = d.get("labels")
            if labels is None:
                labels = list(range(1, len(points) + 1))
            if len(labels) != len(points):
                raise ValidationError("labels and points must have equal length",
                                      field="labels")
            pts = {_coerce_label(lab): tuple(p) for lab, p in zip(labels, points)}
        order = [_coerce_label(lab) for lab in d["labels"]] if "labels" in d else None
        return EmbeddingMetric(points=pts, scale=d.get("scale"), label_order=order)
    return make_metric(family, **d)


def metric_to_json(vm: VertexMetric) -> dict:
    return vm.to_json()


def parse_potential(data: dict) -> Potential:
    if not isinstance(data, dict):
        raise ValidationError("potential spec must be a JSON object", field="potential")
    kind = _require(data, "kind", "potential spec")
    if kind == "locally_constant":
        depth = int(_require(data, "depth", "locally constant potential"))
        raw = _require(data, "table", "locally constant potential")
        table = {}
        for key, val in raw.items():
            parts = key.split("|") if isinstance(key, str) else list(key)
            table[tuple(_coerce_label(p) for p in parts)] = float(val)
        return LocallyConstant(depth, table, default=float(data.get("default", 0.0)),
                               boundary_limits=data.get("boundary_limits"))
    if kind == "vertex_formula":
        name = _require(data, "name", "vertex formula potential")
        return make_formula(name, boundary_limits=data.get("boundary_limits"))
    if kind == "affine":
        raw_terms = _require(data, "terms", "affine potential")
        return Affine([(float(c), parse_potential(sub)) for c, sub in raw_terms])
    raise ValidationError(f"unknown potential kind {kind!r}", field="kind")


def spec_to_json(spec: ShiftSpec) -> dict:
    return spec.to_json()


def potential_to_json(p: Potential) -> dict:
    return p.to_json()
