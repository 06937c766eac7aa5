"""Countable Markov shifts as directed graphs on a countable vertex set.

A shift is specified either by an explicit finite adjacency list or by a
named generator answering transition queries lazily, so the countable
alphabet never materializes.  Vertices are enumerated internally by
positive integers 1, 2, 3, ...; generators with signed or word-shaped
alphabets (double renewal, dyadic tree) store a bijection and all
reporting uses the original labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Optional, Sequence

import numpy as np

from .errors import ValidationError

Label = Hashable


@dataclass(frozen=True)
class TailComponentInfo:
    """Generator certificate for one weak component of a truncated tail.

    ``infinite`` is True/False when the generator can certify whether the
    component extends beyond every finite truncation, None when unknown.
    """

    key: str
    infinite: Optional[bool]
    note: str = ""


class ShiftSpec:
    """A countable-vertex directed-graph shift.

    Subclasses provide a total, deterministic transition predicate on
    labels plus the enumeration label(i) <-> index(label).
    """

    name: str = "abstract"
    is_infinite: bool = True

    @property
    def params(self) -> dict:
        return {}

    def label(self, index: int) -> Label:
        raise NotImplementedError

    def index(self, label: Label) -> int:
        raise NotImplementedError

    def transition_labels(self, a: Label, b: Label) -> bool:
        raise NotImplementedError

    def transition(self, i: int, j: int) -> bool:
        return self.transition_labels(self.label(i), self.label(j))

    def edges_upto(self, n: int) -> list[tuple[int, int]]:
        """All edges among internal indices {1..n}; quadratic fallback."""
        out = []
        labels = [self.label(i) for i in range(1, n + 1)]
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if self.transition_labels(labels[i - 1], labels[j - 1]):
                    out.append((i, j))
        return out

    def classify_tail_component(self, indices: Sequence[int], n_cut: int) -> TailComponentInfo:
        """Certificate for a weak component of the subgraph on indices > n_cut."""
        return TailComponentInfo(key=f"c{min(indices)}", infinite=None)

    def tail_is_graph_connected(self) -> bool:
        """True when any two vertices are joined by a directed path in the
        full graph (holds for every topologically mixing generator)."""
        return False

    def to_json(self) -> dict:
        return {"kind": "generator", "name": self.name, "params": self.params}


class ExplicitSpec(ShiftSpec):
    """Finite shift given by an adjacency list over integer labels 1..n."""

    name = "explicit"
    is_infinite = False

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 1:
            raise ValidationError("explicit spec needs n >= 1", field="n")
        self.n = int(n)
        self._edges = set()
        for a, b in edges:
            a, b = int(a), int(b)
            if not (1 <= a <= self.n and 1 <= b <= self.n):
                raise ValidationError(f"edge ({a},{b}) outside 1..{self.n}", field="edges")
            self._edges.add((a, b))

    def label(self, index):
        if not 1 <= index <= self.n:
            raise ValidationError(f"index {index} outside 1..{self.n}")
        return index

    def index(self, label):
        return self.label(int(label))

    def transition_labels(self, a, b):
        return (a, b) in self._edges

    def edges_upto(self, n):
        m = min(n, self.n)
        return sorted((a, b) for a, b in self._edges if a <= m and b <= m)

    def classify_tail_component(self, indices, n_cut):
        return TailComponentInfo(key=f"c{min(indices)}", infinite=False,
                                 note="explicit spec is finite")

    def to_json(self):
        return {"kind": "explicit", "n": self.n, "edges": sorted(self._edges)}


class RenewalSpec(ShiftSpec):
    """Renewal shift: 1 -> j for all j, i -> i-1 for i >= 2."""

    name = "renewal"

    def label(self, index):
        return index

    def index(self, label):
        return int(label)

    def transition_labels(self, a, b):
        return a == 1 or b == a - 1

    def edges_upto(self, n):
        out = [(1, j) for j in range(1, n + 1)]
        out += [(i, i - 1) for i in range(2, n + 1)]
        return out

    def classify_tail_component(self, indices, n_cut):
        # The tail is a single chain i -> i-1 reaching past every bound.
        return TailComponentInfo(key="tail", infinite=True, note="chain i->i-1")

    def tail_is_graph_connected(self):
        return True


class BackwardsRenewalSpec(ShiftSpec):
    """Backwards renewal shift: i -> 1 and i -> i+1 for all i."""

    name = "backwards_renewal"

    def label(self, index):
        return index

    def index(self, label):
        return int(label)

    def transition_labels(self, a, b):
        return b == 1 or b == a + 1

    def edges_upto(self, n):
        out = [(i, 1) for i in range(1, n + 1)]
        out += [(i, i + 1) for i in range(1, n)]
        return out

    def classify_tail_component(self, indices, n_cut):
        return TailComponentInfo(key="tail", infinite=True, note="chain i->i+1")

    def tail_is_graph_connected(self):
        return True


class RandomWalk1SideSpec(ShiftSpec):
    """One-sided random walk: 1 -> {1,2}, i -> i+-1 for i >= 2."""

    name = "random_walk_1side"

    def label(self, index):
        return index

    def index(self, label):
        return int(label)

    def transition_labels(self, a, b):
        if a == 1:
            return b in (1, 2)
        return b in (a - 1, a + 1)

    def edges_upto(self, n):
        out = [(1, 1)]
        if n >= 2:
            out.append((1, 2))
        for i in range(2, n + 1):
            out.append((i, i - 1))
            if i + 1 <= n:
                out.append((i, i + 1))
        return out

    def classify_tail_component(self, indices, n_cut):
        return TailComponentInfo(key="tail", infinite=True, note="birth-death chain")

    def tail_is_graph_connected(self):
        return True


class BirthDeathParitySpec(ShiftSpec):
    """One-sided birth and death chain: a -> {a-1, a, a+1}, 1 -> {1, 2}."""

    name = "birth_death_parity"

    def label(self, index):
        return index

    def index(self, label):
        return int(label)

    def transition_labels(self, a, b):
        if a == 1:
            return b in (1, 2)
        return b in (a - 1, a, a + 1)

    def edges_upto(self, n):
        out = []
        for i in range(1, n + 1):
            lo = 1 if i == 1 else i - 1
            for j in (lo, i, i + 1) if i > 1 else (1, 2):
                if 1 <= j <= n:
                    out.append((i, j))
        return sorted(set(out))

    def classify_tail_component(self, indices, n_cut):
        return TailComponentInfo(key="tail", infinite=True, note="birth-death chain")

    def tail_is_graph_connected(self):
        return True


class DoubleRenewalSpec(ShiftSpec):
    """Renewal shift doubled over the integers: 0 -> j for all j in Z,
    i -> i-1 for i >= 1, i -> i+1 for i <= -1.

    Internal enumeration: 1<->0, 2k<->+k, 2k+1<->-k.
    """

    name = "double_renewal"

    def label(self, index):
        if index == 1:
            return 0
        k, r = divmod(index, 2)
        return k if r == 0 else -k

    def index(self, label):
        a = int(label)
        if a == 0:
            return 1
        return 2 * a if a > 0 else 2 * (-a) + 1

    def transition_labels(self, a, b):
        if a == 0:
            return True
        if a >= 1:
            return b == a - 1
        return b == a + 1

    def edges_upto(self, n):
        out = []
        for j in range(1, n + 1):
            out.append((1, j))
        for i in range(2, n + 1):
            a = self.label(i)
            b = a - 1 if a > 0 else a + 1
            j = self.index(b)
            if j <= n:
                out.append((i, j))
        return out

    def classify_tail_component(self, indices, n_cut):
        signs = {1 if self.label(i) > 0 else -1 for i in indices}
        if signs == {1}:
            return TailComponentInfo(key="+inf", infinite=True, note="positive chain")
        if signs == {-1}:
            return TailComponentInfo(key="-inf", infinite=True, note="negative chain")
        return TailComponentInfo(key="mixed", infinite=True, note="contains the hub range")

    def tail_is_graph_connected(self):
        return True


class DyadicTreeSpec(ShiftSpec):
    """Shift on the dyadic tree with a renewal-like structure.

    Vertices are the words <w2> for w in {1,3}*; the root "2" maps to
    everything and <w2> maps only to <w'2> with w' = w minus its first
    letter.  Breadth-first enumeration: depth-d words occupy indices
    2^d .. 2^(d+1)-1.
    """

    name = "dyadic_tree"

    def label(self, index):
        d = index.bit_length() - 1
        offset = index - (1 << d)
        w = "".join("3" if (offset >> (d - 1 - i)) & 1 else "1" for i in range(d))
        return f"<{w}2>"

    def index(self, label):
        w = self._word(label)
        d = len(w)
        offset = 0
        for ch in w:
            offset = (offset << 1) | (1 if ch == "3" else 0)
        return (1 << d) + offset

    @staticmethod
    def _word(label):
        s = str(label)
        if not (s.startswith("<") and s.endswith("2>")):
            raise ValidationError(f"tree label {label!r} must look like <w2>")
        return s[1:-2]

    def transition_labels(self, a, b):
        wa, wb = self._word(a), self._word(b)
        if wa == "":
            return True
        return wb == wa[1:]

    def edges_upto(self, n):
        out = [(1, j) for j in range(1, n + 1)]
        for i in range(2, n + 1):
            j = self.index(f"<{self._word(self.label(i))[1:]}2>")
            if j <= n:
                out.append((i, j))
        return out

    def classify_tail_component(self, indices, n_cut):
        # Every word has the two deeper predecessors 1w, 3w, so any tail
        # component extends without bound.  Key = common backward suffix.
        words = [self._word(self.label(i)) for i in indices]
        suffix = words[0]
        for w in words[1:]:
            m = 0
            while m < min(len(suffix), len(w)) and suffix[len(suffix) - 1 - m] == w[len(w) - 1 - m]:
                m += 1
            suffix = suffix[len(suffix) - m:]
        return TailComponentInfo(key=f"suffix:{suffix}", infinite=True,
                                 note="predecessors 1w,3w stay in the tail")

    def tail_is_graph_connected(self):
        return True


def _as_p_sequence(p) -> list[int]:
    if p is None:
        return []
    return [int(x) for x in p]


class LoopSystemSpec(ShiftSpec):
    """Loop system: p(n) loops of length n based at a single hub vertex.

    p is given as a finite prefix list (1-indexed by n) and extends by
    ``p_tail`` (default 1) for larger n.  p(1) in {0,1} toggles the hub
    self-loop; a 0/1 transition matrix cannot hold more.
    """

    name = "loop_system"

    def __init__(self, p: Optional[Sequence[int]] = None, p_tail: int = 1):
        self.p_prefix = _as_p_sequence(p)
        self.p_tail = int(p_tail)
        if self.p(1) not in (0, 1):
            raise ValidationError("p(1) must be 0 or 1 (hub self-loop flag)", field="p")
        # blocks[m] = (n, k, start_index) for the m-th loop of length >= 2
        self._blocks: list[tuple[int, int, int]] = []
        self._next_start = 2

    @property
    def params(self):
        return {"p": self.p_prefix, "p_tail": self.p_tail}

    def p(self, n: int) -> int:
        if 1 <= n <= len(self.p_prefix):
            return self.p_prefix[n - 1]
        return self.p_tail

    def _extend_blocks(self, upto_index: int) -> None:
        while self._next_start <= upto_index:
            if self._blocks:
                n, k, _ = self._blocks[-1]
                k += 1
            else:
                n, k = 2, 1
            while k > self.p(n):
                n, k = n + 1, 1
            self._blocks.append((n, k, self._next_start))
            self._next_start += n - 1

    def _block_of(self, index: int) -> tuple[int, int, int, int]:
        """(ordinal m, loop length n, loop number k, start index) of the
        block holding ``index``."""
        if index == 1:
            raise ValidationError("index 1 is the hub, not a loop vertex")
        self._extend_blocks(index)
        lo, hi = 0, len(self._blocks) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self._blocks[mid][2] <= index:
                lo = mid
            else:
                hi = mid - 1
        n, k, start = self._blocks[lo]
        return lo + 1, n, k, start

    def loop_position(self, index: int) -> tuple[int, int, int]:
        """(loop length n, loop number k, position i in 1..n-1) of a vertex."""
        _, n, k, start = self._block_of(index)
        return n, k, index - start + 1

    def label(self, index):
        return index

    def index(self, label):
        return int(label)

    def transition_labels(self, a, b):
        a, b = int(a), int(b)
        if a == 1:
            if b == 1:
                return self.p(1) == 1
            n, k, i = self.loop_position(b)
            return i == 1
        n, k, i = self.loop_position(a)
        if i < n - 1:
            if b == 1:
                return False
            return self.loop_position(b) == (n, k, i + 1)
        return b == 1

    def edges_upto(self, n):
        out = []
        if self.p(1) == 1:
            out.append((1, 1))
        for i in range(2, n + 1):
            ln, k, pos = self.loop_position(i)
            if pos == 1:
                out.append((1, i))
            if pos < ln - 1:
                if i + 1 <= n:
                    out.append((i, i + 1))
            else:
                out.append((i, 1))
        return out

    def classify_tail_component(self, indices, n_cut):
        n, k, _ = self.loop_position(min(indices))
        # A loop segment never grows: each loop has exactly n-1 vertices.
        return TailComponentInfo(key=f"loop({n},{k})", infinite=False,
                                 note="segment of a finite loop")

    def tail_is_graph_connected(self):
        return True


class CircleLoopsSpec(LoopSystemSpec):
    """Loop system whose vertices are placed on circles of radii r_n -> 1.

    Graph structure identical to the loop system; the placement only
    matters through the embedding metric.  Loop number m (in enumeration
    order) sits on the circle of radius ``radii(m)``, its vertices
    equidistributed starting at angle 0.
    """

    name = "circle_loops"

    def __init__(self, p=None, p_tail: int = 1, radii: Optional[Sequence[float]] = None):
        super().__init__(p=p, p_tail=p_tail)
        self.radii_prefix = [float(r) for r in radii] if radii else []

    @property
    def params(self):
        return {"p": self.p_prefix, "p_tail": self.p_tail, "radii": self.radii_prefix}

    def radius(self, m: int) -> float:
        if 1 <= m <= len(self.radii_prefix):
            return self.radii_prefix[m - 1]
        return 1.0 - 2.0 ** (-m)

    def position(self, index: int) -> tuple[float, float]:
        if index == 1:
            return (0.0, 0.0)
        m, n, _, start = self._block_of(index)
        r = self.radius(m)
        ang = 2.0 * np.pi * (index - start) / (n - 1)
        return (r * float(np.cos(ang)), r * float(np.sin(ang)))


class ZigZag2Spec(ShiftSpec):
    """Renewal shift on {0,1,2,...} placed on a zig-zag accumulating on two
    points: even vertices at x=0, odd at x=1, heights -1/n increasing.
    """

    name = "zigzag_2"
    boundary_points = 2

    def label(self, index):
        return index - 1

    def index(self, label):
        return int(label) + 1

    def transition_labels(self, a, b):
        return a == 0 or b == a - 1

    def edges_upto(self, n):
        out = [(1, j) for j in range(1, n + 1)]
        out += [(i, i - 1) for i in range(2, n + 1)]
        return out

    def position(self, label) -> tuple[float, float]:
        a = int(label)
        if a == 0:
            return (0.5, -1.5)
        return (0.0 if a % 2 == 0 else 1.0, -1.0 / a)

    def classify_tail_component(self, indices, n_cut):
        return TailComponentInfo(key="tail", infinite=True, note="chain i->i-1")

    def tail_is_graph_connected(self):
        return True


class ZigZag3Spec(ZigZag2Spec):
    """Renewal shift placed on a period-6 zig-zag over three accumulation
    points x=0, 1/2, 1; reading an orbit downhill visits them in the
    pattern (0, 1/2, 1, 1/2, 0, 1) repeated.
    """

    name = "zigzag_3"
    boundary_points = 3

    # x-position by vertex number mod 6; chosen so that (x_n, x_{n-1}, ...)
    # cycles through (0, 1/2, 1, 1/2, 0, 1).
    _XS = (0.0, 1.0, 0.0, 0.5, 1.0, 0.5)

    def position(self, label):
        a = int(label)
        if a == 0:
            return (0.5, -1.5)
        return (self._XS[a % 6], -1.0 / a)


_GENERATORS = {
    "renewal": RenewalSpec,
    "backwards_renewal": BackwardsRenewalSpec,
    "random_walk_1side": RandomWalk1SideSpec,
    "double_renewal": DoubleRenewalSpec,
    "dyadic_tree": DyadicTreeSpec,
    "loop_system": LoopSystemSpec,
    "circle_loops": CircleLoopsSpec,
    "zigzag_2": ZigZag2Spec,
    "zigzag_3": ZigZag3Spec,
    "birth_death_parity": BirthDeathParitySpec,
}


def generator_names() -> list[str]:
    return sorted(_GENERATORS)


def make_generator(name: str, **params) -> ShiftSpec:
    try:
        cls = _GENERATORS[name]
    except KeyError:
        raise ValidationError(
            f"unknown generator {name!r}; available: {', '.join(generator_names())}",
            field="name") from None
    return cls(**params)


@dataclass(frozen=True)
class Word:
    """An admissible finite word, stored as original labels."""

    symbols: tuple

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]


@dataclass(frozen=True)
class PeriodicOrbit:
    """A closed word: the closing transition word[-1] -> word[0] is allowed."""

    word: Word

    @property
    def period(self) -> int:
        return len(self.word)


class TruncatedSFT:
    """Maximal subshift of a spec on internal indices {1..N}.

    Rows/columns of ``matrix`` follow ``indices`` (increasing).  Every
    retained vertex has in- and out-degree >= 1 within the retained set.
    """

    def __init__(self, spec: ShiftSpec, N: int, indices: Sequence[int], matrix: np.ndarray):
        self.spec = spec
        self.N = N
        self.indices = tuple(indices)
        self.labels = tuple(spec.label(i) for i in self.indices)
        self.matrix = matrix.astype(bool)
        self._pos = {idx: p for p, idx in enumerate(self.indices)}
        self._labelpos = {lab: p for p, lab in enumerate(self.labels)}

    def __len__(self):
        return len(self.indices)

    @property
    def is_empty(self) -> bool:
        return len(self.indices) == 0

    def pos_of_label(self, label) -> int:
        try:
            return self._labelpos[label]
        except KeyError:
            raise ValidationError(f"label {label!r} not in truncation") from None

    def out_positions(self, p: int) -> np.ndarray:
        return np.flatnonzero(self.matrix[p])

    def allows(self, a_label, b_label) -> bool:
        return bool(self.matrix[self.pos_of_label(a_label), self.pos_of_label(b_label)])

    def to_spec(self) -> ExplicitSpec:
        """Explicit spec on the original internal indices (for re-truncation)."""
        n = max(self.indices) if self.indices else 1
        edges = []
        for p, i in enumerate(self.indices):
            for q in self.out_positions(p):
                edges.append((i, self.indices[q]))
        return ExplicitSpec(n, edges)


def truncate(spec: ShiftSpec, N: int) -> TruncatedSFT:
    """Maximal subshift on indices {1..N}: prune zero in/out degree vertices
    to a fixpoint.  May return an empty truncation."""
    if N < 1:
        raise ValidationError("truncation bound must be >= 1", field="N")
    edges = spec.edges_upto(N)
    keep = set(range(1, N + 1))
    out_deg = {i: 0 for i in keep}
    in_deg = {i: 0 for i in keep}
    edge_set = set(edges)
    for a, b in edge_set:
        out_deg[a] += 1
        in_deg[b] += 1
    changed = True
    while changed:
        changed = False
        dead = [i for i in keep if out_deg[i] == 0 or in_deg[i] == 0]
        if dead:
            changed = True
            for i in dead:
                keep.discard(i)
            edge_set = {(a, b) for a, b in edge_set if a in keep and b in keep}
            out_deg = {i: 0 for i in keep}
            in_deg = {i: 0 for i in keep}
            for a, b in edge_set:
                out_deg[a] += 1
                in_deg[b] += 1
    indices = sorted(keep)
    pos = {i: p for p, i in enumerate(indices)}
    mat = np.zeros((len(indices), len(indices)), dtype=bool)
    for a, b in edge_set:
        mat[pos[a], pos[b]] = True
    return TruncatedSFT(spec, N, indices, mat)


def _bfs_dists(succ: list[list[int]], src: int) -> list[int]:
    dist = [-1] * len(succ)
    dist[src] = 0
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for v in succ[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def is_topologically_mixing(t: TruncatedSFT) -> bool:
    """Primitivity of the adjacency matrix (equivalent to A^k > 0 for some
    k <= (N-1)^2 + 1): strong connectivity plus cycle-length gcd 1."""
    if t.is_empty:
        raise ValidationError("empty subshift")
    n = len(t)
    succ = [list(map(int, t.out_positions(p))) for p in range(n)]
    pred = [[] for _ in range(n)]
    for u in range(n):
        for v in succ[u]:
            pred[v].append(u)
    if min(_bfs_dists(succ, 0)) < 0 or min(_bfs_dists(pred, 0)) < 0:
        return False
    dist = _bfs_dists(succ, 0)
    g = 0
    for u in range(n):
        for v in succ[u]:
            g = math.gcd(g, dist[u] + 1 - dist[v])
    return g == 1


def mixing_bound(t: TruncatedSFT) -> int:
    """Least M with every ordered vertex pair joined by a path of length <= M."""
    if not is_topologically_mixing(t):
        raise ValidationError("mixing bound needs a topologically mixing truncation")
    n = len(t)
    succ = [list(map(int, t.out_positions(p))) for p in range(n)]
    best = 1
    for src in range(n):
        dist = _bfs_dists(succ, src)
        # distance from src back to itself: shortest cycle through src
        self_len = min((dist[u] + 1 for u in range(n) if t.matrix[u, src]), default=-1)
        if self_len < 0:
            raise ValidationError("vertex with no return path")
        best = max(best, self_len, max(d for i, d in enumerate(dist) if i != src) if n > 1 else 1)
    return best


def enumerate_words(t: TruncatedSFT, n: int) -> list[Word]:
    """All admissible words of length n, lexicographic in the internal
    vertex enumeration."""
    if n < 1:
        raise ValidationError("word length must be >= 1", field="n")
    if t.is_empty:
        return []
    words: list[Word] = []
    size = len(t)
    stack: list[int] = []

    def rec(prefix: list[int]):
        if len(prefix) == n:
            words.append(Word(tuple(t.labels[p] for p in prefix)))
            return
        if not prefix:
            cands = range(size)
        else:
            cands = t.out_positions(prefix[-1])
        for q in cands:
            prefix.append(int(q))
            rec(prefix)
            prefix.pop()

    rec(stack)
    return words


def periodic_orbits(t: TruncatedSFT, n: int, base: Optional[Label] = None,
                    primitive_only: bool = False) -> list[PeriodicOrbit]:
    """Closed words of length n (not necessarily primitive); optionally
    restricted to word[0] = base and/or primitive words only."""
    if n < 1:
        raise ValidationError("period must be >= 1", field="n")
    if t.is_empty:
        return []
    out: list[PeriodicOrbit] = []
    size = len(t)
    starts = [t.pos_of_label(base)] if base is not None else range(size)

    def rec(start: int, prefix: list[int]):
        if len(prefix) == n:
            if t.matrix[prefix[-1], start]:
                word = tuple(t.labels[p] for p in prefix)
                if primitive_only and _is_non_primitive(word):
                    return
                out.append(PeriodicOrbit(Word(word)))
            return
        for q in t.out_positions(prefix[-1]):
            prefix.append(int(q))
            rec(start, prefix)
            prefix.pop()

    for s in starts:
        rec(s, [int(s)])
    return out


def _is_non_primitive(word: tuple) -> bool:
    n = len(word)
    for d in range(1, n):
        if n % d == 0 and word == word[d:] + word[:d]:
            return True
    return False
