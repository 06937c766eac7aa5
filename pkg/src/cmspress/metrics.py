"""Vertex metrics, their classification, and the induced shift metric.

A vertex metric rho maps label pairs into [0,1].  The induced metric on
sequences is d(x,y) = sum_n theta^n rho(x_n, y_n) for theta in (0,1).
Built-in families carry analytic certificates (vanishing bounds, net
constructions) so classification is exact for the gallery; user-supplied
data gets desk-scale numeric verdicts marked inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError

DEFAULT_THETA = 0.5


class VertexMetric:
    """Symmetric function on vertex labels with values in [0,1]."""

    family = "abstract"

    @property
    def params(self) -> dict:
        return {}

    def rho(self, a, b) -> float:
        raise NotImplementedError

    def enumerate_labels(self, n: int) -> list:
        """First n labels in the family's canonical probe order."""
        return list(range(1, n + 1))

    # -- analytic certificates (None when the family has none) ------------

    def vanishing_bound(self, n: int) -> Optional[float]:
        """Analytic bound for sup_{i,j >= n} rho over the enumeration."""
        return None

    def non_vanishing_floor(self) -> Optional[float]:
        """Positive c such that sup_{i,j >= n} rho >= c for every n."""
        return None

    def net_size_bound(self, eps: float) -> Optional[int]:
        """Analytic bound for the size of an eps-net of the whole vertex set."""
        return None

    def not_totally_bounded_reason(self) -> Optional[str]:
        return None

    def diameter(self, labels: Sequence) -> Optional[float]:
        """Analytic diameter of a label set, when the family can supply it."""
        return None

    def to_json(self) -> dict:
        d = {"family": self.family}
        d.update(self.params)
        return d


class ZargaryanMetric(VertexMetric):
    """rho(a,b) = |1/a - 1/b| on the positive integers; vanishing type."""

    family = "zargaryan"

    def rho(self, a, b):
        a, b = int(a), int(b)
        if a < 1 or b < 1:
            raise ValidationError(f"zargaryan metric needs labels >= 1, got ({a},{b})")
        return abs(1.0 / a - 1.0 / b)

    def vanishing_bound(self, n):
        return 1.0 / max(n, 1)

    def net_size_bound(self, eps):
        return int(math.ceil(1.0 / eps)) + 1

    def diameter(self, labels):
        vals = [1.0 / int(a) for a in labels]
        return max(vals) - min(vals)


class DiscreteMetric(VertexMetric):
    """rho(a,b) = 1 for a != b; neither vanishing nor totally bounded."""

    family = "discrete"

    def rho(self, a, b):
        return 0.0 if a == b else 1.0

    def non_vanishing_floor(self):
        return 1.0

    def not_totally_bounded_reason(self):
        return "any eps<1 net must contain every vertex"

    def diameter(self, labels):
        return 0.0 if len(set(labels)) <= 1 else 1.0


class TreeBackwardMetric(VertexMetric):
    """Backward-counting metric on dyadic tree labels <w2>.

    rho = 1/(1 + first backward position where the w-parts differ); the
    shorter word is padded in front with a blank that mismatches
    everything.
    """

    family = "tree_backward"

    @staticmethod
    def _word(label):
        s = str(label)
        if not (s.startswith("<") and s.endswith("2>")):
            raise ValidationError(f"tree label {label!r} must look like <w2>")
        return s[1:-2]

    def rho(self, a, b):
        wa, wb = self._word(a), self._word(b)
        if wa == wb:
            return 0.0
        la, lb = len(wa), len(wb)
        i = 0
        while i < min(la, lb) and wa[la - 1 - i] == wb[lb - 1 - i]:
            i += 1
        return 1.0 / (1.0 + i)

    def enumerate_labels(self, n):
        from .shifts import DyadicTreeSpec

        g = DyadicTreeSpec()
        return [g.label(i) for i in range(1, n + 1)]

    def non_vanishing_floor(self):
        # Deep words differing in their last letter sit at distance 1.
        return 1.0

    def net_size_bound(self, eps):
        # Suffix classes of length L have diameter <= 1/(1+L) < eps.
        L = int(math.ceil(1.0 / eps))
        return 2 ** (L + 1)

    def diameter(self, labels):
        # Backward agreement is ultrametric-like, so the pairwise minimum
        # equals the longest common suffix length of the whole set.
        words = [self._word(a) for a in labels]
        if len(set(words)) <= 1:
            return 0.0
        suffix = words[0]
        for w in words[1:]:
            m = 0
            while m < min(len(suffix), len(w)) and suffix[len(suffix) - 1 - m] == w[len(w) - 1 - m]:
                m += 1
            suffix = suffix[len(suffix) - m:]
        return 1.0 / (1.0 + len(suffix))


class DoubleRenewalMetric(VertexMetric):
    """Two-sided metric on Z: 1 across signs, |1/a - 1/b| within a sign."""

    family = "double_renewal"

    def rho(self, a, b):
        a, b = int(a), int(b)
        if a == b:
            return 0.0
        if a * b <= 0:
            return 1.0
        return abs(1.0 / a - 1.0 / b)

    def enumerate_labels(self, n):
        from .shifts import DoubleRenewalSpec

        g = DoubleRenewalSpec()
        return [g.label(i) for i in range(1, n + 1)]

    def non_vanishing_floor(self):
        return 1.0

    def net_size_bound(self, eps):
        return 2 * (int(math.ceil(1.0 / eps)) + 1) + 1

    def diameter(self, labels):
        labs = [int(a) for a in labels]
        pos = [1.0 / a for a in labs if a > 0]
        neg = [1.0 / a for a in labs if a < 0]
        if (pos and neg) or (0 in labs and len(set(labs)) > 1):
            return 1.0
        vals = pos or neg
        if not vals:
            return 0.0
        return max(vals) - min(vals)


class BirthDeathParityMetric(VertexMetric):
    """rho = 1 for odd gaps, |1/a - 1/b| for even gaps, on positive ints."""

    family = "birth_death_parity"

    def rho(self, a, b):
        a, b = int(a), int(b)
        if a == b:
            return 0.0
        if (a - b) % 2 == 1:
            return 1.0
        return abs(1.0 / a - 1.0 / b)

    def non_vanishing_floor(self):
        return 1.0

    def net_size_bound(self, eps):
        return 2 * (int(math.ceil(1.0 / eps)) + 1)

    def diameter(self, labels):
        labs = sorted(int(a) for a in labels)
        if len(set(labs)) <= 1:
            return 0.0
        if any((labs[i] - labs[j]) % 2 == 1 for i in range(len(labs)) for j in range(i)):
            return 1.0
        return 1.0 / labs[0] - 1.0 / labs[-1]


class EmbeddingMetric(VertexMetric):
    """Euclidean metric of a planar embedding, rescaled into [0,1].

    ``points`` maps labels to coordinates; alternatively a position
    function (label -> (x,y)) covers generator-backed placements.
    """

    family = "embedding"

    def __init__(self, points=None, position_fn=None, scale: float = None,
                 label_order: Optional[Sequence] = None):
        if points is None and position_fn is None:
            raise ValidationError("embedding metric needs points or a position function",
                                  field="points")
        self._points = dict(points) if points is not None else None
        self._fn = position_fn
        self._order = list(label_order) if label_order is not None else None
        if scale is None:
            if self._points is None:
                raise ValidationError("embedding with a position function needs a scale",
                                      field="scale")
            xs = np.array(list(self._points.values()), dtype=float)
            d = 0.0
            for i in range(len(xs)):
                d = max(d, float(np.max(np.hypot(xs[:, 0] - xs[i, 0], xs[:, 1] - xs[i, 1]))))
            scale = d if d > 0 else 1.0
        self.scale = float(scale)

    @property
    def params(self):
        out = {"scale": self.scale}
        if self._points is not None:
            out["points"] = {str(k): list(v) for k, v in sorted(self._points.items(), key=lambda kv: str(kv[0]))}
        return out

    def position(self, label):
        if self._points is not None:
            try:
                return self._points[label]
            except KeyError:
                raise ValidationError(f"label {label!r} has no embedded point") from None
        return self._fn(label)

    def rho(self, a, b):
        pa, pb = self.position(a), self.position(b)
        return math.hypot(pa[0] - pb[0], pa[1] - pb[1]) / self.scale

    def enumerate_labels(self, n):
        if self._order is not None:
            return self._order[:n]
        if self._points is not None:
            return sorted(self._points)[:n]
        return list(range(1, n + 1))

    def diameter(self, labels):
        pts = np.array([self.position(a) for a in labels], dtype=float)
        d = 0.0
        for i in range(len(pts)):
            d = max(d, float(np.max(np.hypot(pts[:, 0] - pts[i, 0], pts[:, 1] - pts[i, 1]))))
        return d / self.scale


_FAMILIES = {
    "zargaryan": ZargaryanMetric,
    "discrete": DiscreteMetric,
    "tree_backward": TreeBackwardMetric,
    "double_renewal": DoubleRenewalMetric,
    "birth_death_parity": BirthDeathParityMetric,
    "embedding": EmbeddingMetric,
}


def metric_families() -> list[str]:
    return sorted(_FAMILIES)


def make_metric(family: str, **params) -> VertexMetric:
    try:
        cls = _FAMILIES[family]
    except KeyError:
        raise ValidationError(
            f"unknown metric family {family!r}; available: {', '.join(metric_families())}",
            field="family") from None
    return cls(**params)


@dataclass(frozen=True)
class ShiftMetric:
    """d(x,y) = sum theta^n rho(x_n, y_n) on sequences."""

    vm: VertexMetric
    theta: float = DEFAULT_THETA

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise ValidationError("theta must lie strictly in (0,1)", field="theta")


@dataclass
class Verdict:
    value: str  # "yes" | "no" | "inconclusive"
    witness: dict = field(default_factory=dict)


@dataclass
class MetricClassification:
    """Vanishing / totally-bounded verdicts with supporting evidence."""

    vanishing: Verdict
    totally_bounded: Verdict
    net_sizes: dict = field(default_factory=dict)  # (eps, N) -> greedy net size

    def __post_init__(self):
        # vanishing type implies totally bounded (one-point tail)
        if self.vanishing.value == "yes" and self.totally_bounded.value != "yes":
            raise ValidationError("vanishing metric classified as not totally bounded")


def rho_eval(vm: VertexMetric, a, b) -> float:
    """Metric value on a label pair, range-checked."""
    v = vm.rho(a, b)
    if not 0.0 <= v <= 1.0 + 1e-12:
        raise ValidationError(f"rho({a},{b}) = {v} outside [0,1]")
    return float(v)


def _greedy_net(vm: VertexMetric, labels: Sequence, eps: float) -> list:
    """First-fit eps-net: keep a label iff it is farther than eps from all
    kept ones.  Every vertex then lies within eps of the net."""
    net: list = []
    for lab in labels:
        if all(vm.rho(lab, m) > eps for m in net):
            net.append(lab)
    return net


def classify(vm: VertexMetric, n_max: int, eps_grid: Sequence[float]) -> MetricClassification:
    """Desk-scale classification of a vertex metric.

    Analytic certificates decide when available; otherwise numeric trends
    over the first ``n_max`` vertices are reported as inconclusive.
    """
    if n_max < 2:
        raise ValidationError("n_max must be >= 2", field="n_max")
    labels = vm.enumerate_labels(n_max)

    probe_ns = sorted({2, n_max // 8, n_max // 4, n_max // 2, 3 * n_max // 4} - {0, 1})
    tail_sup = {}
    for n in probe_ns:
        tail = labels[n - 1:]
        step = max(1, len(tail) // 64)
        sample = tail[::step]
        s = 0.0
        for i in range(len(sample)):
            for j in range(i + 1, len(sample)):
                s = max(s, vm.rho(sample[i], sample[j]))
        tail_sup[n] = s

    if vm.vanishing_bound(2) is not None:
        for n, s in tail_sup.items():
            bound = vm.vanishing_bound(n)
            if s > bound + 1e-12:
                raise ValidationError(
                    f"vanishing certificate violated at n={n}: sup {s} > bound {bound}")
        vanishing = Verdict("yes", {"certificate": "analytic bound",
                                    "bounds": {n: vm.vanishing_bound(n) for n in probe_ns},
                                    "observed": tail_sup})
    elif vm.non_vanishing_floor() is not None:
        vanishing = Verdict("no", {"certificate": "tail separation floor",
                                   "floor": vm.non_vanishing_floor(),
                                   "observed": tail_sup})
    else:
        trending = all(tail_sup[probe_ns[i + 1]] <= tail_sup[probe_ns[i]] + 1e-12
                       for i in range(len(probe_ns) - 1))
        vanishing = Verdict("inconclusive", {"observed": tail_sup, "nonincreasing": trending})

    net_sizes = {}
    ladder = sorted({n_max // 4, n_max // 2, n_max} - {0})
    for eps in eps_grid:
        if eps <= 0:
            raise ValidationError("eps values must be positive", field="eps_grid")
        for n in ladder:
            net_sizes[(float(eps), n)] = len(_greedy_net(vm, labels[:n], eps))

    if vm.vanishing_bound(2) is not None or vm.net_size_bound(min(eps_grid)) is not None:
        tb = Verdict("yes", {"certificate": "analytic net bound"
                             if vm.net_size_bound(min(eps_grid)) is not None
                             else "vanishing implies totally bounded"})
    elif vm.not_totally_bounded_reason() is not None:
        tb = Verdict("no", {"certificate": vm.not_totally_bounded_reason()})
    else:
        stable = all(net_sizes[(float(e), ladder[-1])] == net_sizes[(float(e), ladder[-2])]
                     for e in eps_grid) if len(ladder) >= 2 else False
        tb = Verdict("yes" if stable else "inconclusive", {"stable_across_ladder": stable})

    return MetricClassification(vanishing=vanishing, totally_bounded=tb, net_sizes=net_sizes)


def shift_distance(sm: ShiftMetric, x, y, n: int) -> tuple[float, float]:
    """Partial sum of d over the first n coordinates plus a sound tail bound.

    The true distance lies in [value, value + tail_bound]."""
    xs, ys = list(x), list(y)
    if len(xs) < n or len(ys) < n:
        raise ValidationError(f"both words need length >= {n}")
    value = 0.0
    w = 1.0
    for k in range(n):
        value += w * rho_eval(sm.vm, xs[k], ys[k])
        w *= sm.theta
    tail = sm.theta ** n / (1.0 - sm.theta)
    return value, tail


def vertex_set_diameter(vm: VertexMetric, labels: Sequence) -> float:
    """Max of rho over pairs; analytic family shortcut when available."""
    labs = list(labels)
    if not labs:
        raise ValidationError("diameter of an empty set")
    exact = vm.diameter(labs)
    if exact is not None:
        return float(exact)
    d = 0.0
    for i in range(len(labs)):
        for j in range(i + 1, len(labs)):
            d = max(d, rho_eval(vm, labs[i], labs[j]))
    return d
