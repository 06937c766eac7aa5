"""Potentials on shift spaces: locally constant tables, vertex formulas,
and affine combinations, with variations and discretization.

The n-th variation of a potential is the sup over n-cylinders of its
oscillation inside the cylinder; locally constant potentials of depth m
have zero variation for n >= m.  Potentials over compactified systems
evaluate on boundary symbols through declared limits only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import ValidationError
from .shifts import PeriodicOrbit, TruncatedSFT, Word, enumerate_words


class Potential:
    """Real function on the shift space with computable evaluation."""

    kind = "abstract"
    depth: int = 1

    @property
    def sup_norm(self) -> float:
        raise NotImplementedError

    def word_value(self, labels: Sequence) -> float:
        """Value on the cylinder of ``labels``; needs len(labels) >= depth."""
        raise NotImplementedError

    def boundary_value(self, key: str) -> float:
        """Declared limit at a boundary symbol; raises when undeclared."""
        raise ValidationError(
            f"potential {self.kind!r} declares no boundary limit for {key!r}",
            field="boundary_limits")

    def has_boundary_limits(self) -> bool:
        return False

    def to_json(self) -> dict:
        raise NotImplementedError


class LocallyConstant(Potential):
    """Depends on the first ``depth`` coordinates through a finite table."""

    kind = "locally_constant"

    def __init__(self, depth: int, table: dict, default: float = 0.0,
                 boundary_limits: Optional[dict] = None):
        if depth < 1:
            raise ValidationError("depth must be >= 1", field="depth")
        self.depth = int(depth)
        self.table = {}
        for key, val in table.items():
            tk = tuple(key) if isinstance(key, (tuple, list)) else (key,)
            if len(tk) != self.depth:
                raise ValidationError(
                    f"table key {key!r} has length {len(tk)}, expected {self.depth}",
                    field="table")
            self.table[tk] = float(val)
        self.default = float(default)
        self.boundary_limits = dict(boundary_limits or {})

    @property
    def sup_norm(self):
        vals = [abs(v) for v in self.table.values()] + [abs(self.default)]
        vals += [abs(v) for v in self.boundary_limits.values()]
        return max(vals)

    def word_value(self, labels):
        if len(labels) < self.depth:
            raise ValidationError(
                f"word of length {len(labels)} too short for depth {self.depth}")
        return self.table.get(tuple(labels[: self.depth]), self.default)

    def boundary_value(self, key):
        if key in self.boundary_limits:
            return float(self.boundary_limits[key])
        if "default" in self.boundary_limits:
            return float(self.boundary_limits["default"])
        return super().boundary_value(key)

    def has_boundary_limits(self):
        return bool(self.boundary_limits)

    def to_json(self):
        return {"kind": self.kind, "depth": self.depth,
                "table": {"|".join(str(s) for s in k): v for k, v in sorted(self.table.items(), key=lambda kv: tuple(map(str, kv[0])))},
                "default": self.default,
                "boundary_limits": dict(self.boundary_limits)}


class VertexFormula(Potential):
    """Depends on the first coordinate through a bounded formula.

    Boundary limits must be declared explicitly per boundary symbol key;
    no symbolic limit computation is attempted.
    """

    kind = "vertex_formula"
    depth = 1

    def __init__(self, name: str, fn: Callable, sup_norm: float,
                 boundary_limits: Optional[dict] = None):
        self.name = name
        self._fn = fn
        self._sup = float(sup_norm)
        self.boundary_limits = dict(boundary_limits or {})

    @property
    def sup_norm(self):
        return self._sup

    def word_value(self, labels):
        if len(labels) < 1:
            raise ValidationError("empty word")
        v = float(self._fn(labels[0]))
        if abs(v) > self._sup + 1e-12:
            raise ValidationError(
                f"formula {self.name!r} exceeded its declared bound at {labels[0]!r}")
        return v

    def boundary_value(self, key):
        if key in self.boundary_limits:
            return float(self.boundary_limits[key])
        if "default" in self.boundary_limits:
            return float(self.boundary_limits["default"])
        return super().boundary_value(key)

    def has_boundary_limits(self):
        return bool(self.boundary_limits)

    def to_json(self):
        return {"kind": self.kind, "name": self.name,
                "boundary_limits": dict(self.boundary_limits)}


class Affine(Potential):
    """Linear combination sum_i coef_i * p_i."""

    kind = "affine"

    def __init__(self, terms: Sequence[tuple[float, Potential]]):
        if not terms:
            raise ValidationError("affine potential needs at least one term", field="terms")
        self.terms = [(float(c), p) for c, p in terms]
        self.depth = max(p.depth for _, p in self.terms)

    @property
    def sup_norm(self):
        # triangle-inequality bound, tight enough for error control
        return sum(abs(c) * p.sup_norm for c, p in self.terms)

    def word_value(self, labels):
        return sum(c * p.word_value(labels) for c, p in self.terms)

    def boundary_value(self, key):
        return sum(c * p.boundary_value(key) for c, p in self.terms)

    def has_boundary_limits(self):
        return all(p.has_boundary_limits() for _, p in self.terms)

    def to_json(self):
        return {"kind": self.kind,
                "terms": [[c, p.to_json()] for c, p in self.terms]}


def constant(c: float) -> LocallyConstant:
    """The constant potential c, as a depth-1 table with default c."""
    return LocallyConstant(1, {}, default=float(c), boundary_limits={"default": float(c)})


# Named vertex formulas available through the JSON interface.
_FORMULAS: dict[str, tuple[Callable, float]] = {
    # 1/x0 on positive integer labels
    "reciprocal": (lambda a: 1.0 / int(a), 1.0),
    # 1/|x0| extended by 1 at the hub label 0 (double renewal alphabet)
    "reciprocal_abs": (lambda a: 1.0 if int(a) == 0 else 1.0 / abs(int(a)), 1.0),
    # sign of the first coordinate (double renewal alphabet)
    "sign": (lambda a: float((int(a) > 0) - (int(a) < 0)), 1.0),
}


def formula_names() -> list[str]:
    return sorted(_FORMULAS)


def make_formula(name: str, boundary_limits: Optional[dict] = None) -> VertexFormula:
    try:
        fn, sup = _FORMULAS[name]
    except KeyError:
        raise ValidationError(
            f"unknown vertex formula {name!r}; available: {', '.join(formula_names())}",
            field="name") from None
    return VertexFormula(name, fn, sup, boundary_limits=boundary_limits)


def eval_potential(p: Potential, w: Word | Sequence) -> tuple[float, float]:
    """(value on the cylinder of w, oscillation uncertainty).

    Uncertainty is zero once the word is at least as long as the depth."""
    labels = tuple(w)
    if len(labels) < 1:
        raise ValidationError("cannot evaluate on an empty word")
    if len(labels) < p.depth:
        raise ValidationError(
            f"word of length {len(labels)} shorter than potential depth {p.depth}")
    return p.word_value(labels), 0.0


def variation(p: Potential, n: int, t: TruncatedSFT) -> float:
    """n-th variation of p over the truncation: sup over n-cylinders of the
    oscillation among admissible completions to evaluation depth."""
    if n < 1:
        raise ValidationError("variation order must be >= 1", field="n")
    if n >= p.depth:
        return 0.0
    # Oscillation over each n-cylinder among its depth-length completions.
    groups: dict[tuple, list[float]] = {}
    for w in enumerate_words(t, p.depth):
        groups.setdefault(tuple(w)[:n], []).append(p.word_value(tuple(w)))
    best = 0.0
    for vals in groups.values():
        best = max(best, max(vals) - min(vals))
    return best


def discretize(p: Potential, n: int, t: TruncatedSFT) -> LocallyConstant:
    """Locally constant depth-n approximation within variation(p, n) of p.

    Each n-cylinder takes the value of its lexicographically least
    admissible completion (the enumeration order is the lex order)."""
    if n < 1:
        raise ValidationError("discretization depth must be >= 1", field="n")
    table: dict[tuple, float] = {}
    if n >= p.depth:
        for w in enumerate_words(t, n):
            table[tuple(w)] = p.word_value(tuple(w))
    else:
        for w in enumerate_words(t, p.depth):
            table.setdefault(tuple(w)[:n], p.word_value(tuple(w)))
    default = min(table.values()) if table else 0.0
    limits = dict(getattr(p, "boundary_limits", {}) or {})
    return LocallyConstant(n, table, default=default, boundary_limits=limits)


def birkhoff_sum(p: Potential, w) -> float:
    """Sum of p along the orbit of w.

    Periodic orbits are read cyclically over one period; plain words must
    carry enough symbols at every shift position."""
    if isinstance(w, PeriodicOrbit):
        labels = tuple(w.word)
        n = w.period
        ext = labels + labels * ((p.depth // n) + 1)
        return sum(p.word_value(ext[i: i + max(p.depth, 1)]) for i in range(n))
    labels = tuple(w)
    n = len(labels)
    if p.depth > 1 and n < 1:
        raise ValidationError("empty word")
    total = 0.0
    for i in range(n):
        if i + p.depth > n:
            raise ValidationError(
                f"word too short for depth {p.depth} at shift {i}; "
                "use a periodic orbit for cyclic reading")
        total += p.word_value(labels[i: i + p.depth])
    return total
