"""Pressure estimation for truncated shifts and their compactifications.

Locally constant potentials of depth m are handled by recoding to the
m-block shift, turning the transfer operator into a nonnegative matrix
whose spectral radius is found by power iteration with Collatz-Wielandt
brackets.  Interior pressure runs a truncation schedule; Gurevich sums,
separated-set collapses and loop generating functions give independent
routes to the same growth rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConvergenceError, ValidationError
from .metrics import ShiftMetric, VertexMetric
from .potentials import Potential, birkhoff_sum, discretize
from .shifts import (ShiftSpec, TruncatedSFT, Word, enumerate_words,
                     is_topologically_mixing, mixing_bound, truncate)

POWER_TOL = 1e-13
POWER_MAX_ITER = 100_000
MAX_DENSE_STATES = 4000


@dataclass
class PressureEstimate:
    """Pressure value with a bracket and method metadata."""

    value: float
    lower: float
    upper: float
    method: str
    params: dict = field(default_factory=dict)
    history: list = field(default_factory=list)  # per-step rows for reports

    def __post_init__(self):
        if not (self.lower - 1e-9 <= self.value <= self.upper + 1e-9):
            raise ValidationError(
                f"estimate {self.value} outside its bracket [{self.lower}, {self.upper}]")


@dataclass
class MarkovMeasure:
    """Stationary Markov measure on a recoded state set."""

    states: list  # label tuples
    pi: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        rows = self.P.sum(axis=1)
        if np.max(np.abs(rows - 1.0)) > 1e-12:
            raise ValidationError("transition matrix rows must sum to 1")
        if np.max(np.abs(self.pi @ self.P - self.pi)) > 1e-10:
            raise ValidationError("pi is not stationary for P")


@dataclass
class EquilibriumData:
    measure: MarkovMeasure
    pressure: float
    left: np.ndarray
    right: np.ndarray


def _recode(t: TruncatedSFT, depth: int) -> tuple[list[tuple], np.ndarray]:
    """States of the depth-block shift and their adjacency (overlap) matrix."""
    if depth <= 1:
        states = [(lab,) for lab in t.labels]
        return states, t.matrix.copy()
    words = enumerate_words(t, depth)
    states = [tuple(w) for w in words]
    pos = {s: i for i, s in enumerate(states)}
    m = np.zeros((len(states), len(states)), dtype=bool)
    for s in states:
        p = pos[s]
        tail = s[1:]
        for q in t.out_positions(t.pos_of_label(s[-1])):
            u = tail + (t.labels[q],)
            if u in pos:
                m[p, pos[u]] = True
    return states, m


def _weighted_matrix(states: Sequence[tuple], adj: np.ndarray, p: Potential) -> np.ndarray:
    w = np.array([math.exp(p.word_value(s)) for s in states])
    return adj.astype(float) * w[:, None]


def power_iteration(mat: np.ndarray, tol: float = POWER_TOL,
                    max_iter: int = None) -> tuple[float, np.ndarray, tuple[float, float], int]:
    """Perron root of a nonnegative matrix with no zero rows/columns.

    Returns (radius, right vector, Collatz-Wielandt bracket, iterations).
    The bracket [min_u (Ax)_u/x_u, max_u (Ax)_u/x_u] is valid for any
    positive test vector, also on reducible matrices where it may stay
    loose.  A diagonal shift removes periodicity without changing the
    eigenvector; the reported radius is shift-corrected.
    """
    if max_iter is None:
        max_iter = POWER_MAX_ITER
    n = mat.shape[0]
    if n == 0:
        raise ValidationError("empty matrix")
    if n > MAX_DENSE_STATES:
        raise ValidationError(f"matrix of size {n} exceeds the dense limit {MAX_DENSE_STATES}")
    if n == 1:
        lam = float(mat[0, 0])
        return lam, np.ones(1), (lam, lam), 1
    shift = max(1e-3, 1e-3 * float(mat.max()))
    x = np.full(n, 1.0 / math.sqrt(n))
    lam_prev = None
    width_prev = None
    it_done = None
    for it in range(1, max_iter + 1):
        z = mat @ x
        lam = float(x @ z)  # Rayleigh value; x is a unit vector
        with np.errstate(divide="ignore", invalid="ignore"):
            quot = z / x
        lower = float(np.min(quot))
        upper = float(np.max(quot))
        lam = min(max(lam, lower), upper)
        width = upper - lower
        lam_ok = (lam_prev is not None
                  and abs(lam - lam_prev) <= tol * max(1.0, abs(lam)))
        # valid brackets need not close on reducible matrices; stop once
        # they no longer improve
        width_ok = (width_prev is not None and math.isfinite(width)
                    and width_prev - width <= tol * max(1.0, abs(lam)))
        if lam_ok and width_ok:
            it_done = it
            break
        lam_prev, width_prev = lam, width
        y = z + shift * x  # diagonal shift keeps periodic matrices converging
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            raise ConvergenceError("power iteration collapsed to zero",
                                   {"iteration": it})
        x = y / norm
    if it_done is None:
        raise ConvergenceError(
            "power iteration did not converge",
            {"iterations": max_iter, "last": lam_prev, "tolerance": tol})
    return lam, x, (lower, upper), it_done


def sft_pressure(t: TruncatedSFT, p: Potential) -> PressureEstimate:
    """log of the spectral radius of the transfer matrix on the recoded
    block shift; bracket from Collatz-Wielandt row quotients."""
    if t.is_empty:
        raise ValidationError("pressure of an empty truncation")
    states, adj = _recode(t, p.depth)
    if not states:
        raise ValidationError("no admissible words at the requested depth")
    mat = _weighted_matrix(states, adj, p)
    lam, _, (lo, hi), iters = power_iteration(mat)
    return PressureEstimate(
        value=math.log(lam), lower=math.log(max(lo, 1e-300)), upper=math.log(hi),
        method="spectral",
        params={"states": len(states), "depth": p.depth, "iterations": iters})


def equilibrium_measure(t: TruncatedSFT, p: Potential) -> EquilibriumData:
    """Perron eigendata of the transfer matrix and the associated Gibbs
    Markov measure: P(u,v) = A(u,v) e^{phi(u)} r_v / (lambda r_u)."""
    if not is_topologically_mixing(t):
        raise ValidationError("equilibrium measure needs a mixing truncation")
    states, adj = _recode(t, p.depth)
    mat = _weighted_matrix(states, adj, p)
    lam, right, _, _ = power_iteration(mat)
    lam_l, left, _, _ = power_iteration(mat.T)
    n = len(states)
    P = mat * right[None, :] / (lam * right[:, None])
    P = P / P.sum(axis=1, keepdims=True)  # clean residual rounding
    pi = left * right
    pi = pi / pi.sum()
    measure = MarkovMeasure(states=states, pi=pi, P=P)
    return EquilibriumData(measure=measure, pressure=math.log(lam), left=left, right=right)


def measure_free_energy(m: MarkovMeasure, p: Potential) -> tuple[float, float]:
    """(entropy, integral of p) for a stationary Markov measure."""
    with np.errstate(divide="ignore"):
        logP = np.where(m.P > 0, np.log(np.where(m.P > 0, m.P, 1.0)), 0.0)
    entropy = float(-np.sum(m.pi[:, None] * m.P * logP))
    integral = 0.0
    for i, s in enumerate(m.states):
        if len(s) < p.depth:
            raise ValidationError(
                f"measure states of length {len(s)} cannot integrate depth {p.depth}")
        integral += float(m.pi[i]) * p.word_value(s)
    return entropy, integral


def interior_pressure(spec: ShiftSpec, p: Potential,
                      schedule: Sequence[int]) -> PressureEstimate:
    """sup over the truncation schedule of the restricted pressures.

    The sequence is monotone (nested compact invariant sets); the final
    increment is the convergence diagnostic."""
    sched = list(schedule)
    if sched != sorted(sched) or len(set(sched)) != len(sched):
        raise ValidationError("schedule must be strictly increasing", field="schedule")
    history = []
    best: Optional[PressureEstimate] = None
    prev_val = None
    for N in sched:
        t = truncate(spec, N)
        if t.is_empty:
            history.append({"N": N, "value": None, "lower": None, "upper": None,
                            "increment": None})
            continue
        est = sft_pressure(t, discretize(p, max(p.depth, 1), t))
        inc = None if prev_val is None else est.value - prev_val
        if prev_val is not None and est.value < prev_val - 1e-9:
            raise ValidationError(
                f"interior pressure decreased at N={N}: {est.value} < {prev_val}")
        history.append({"N": N, "value": est.value, "lower": est.lower,
                        "upper": est.upper, "increment": inc})
        prev_val = est.value
        best = est
    if best is None:
        raise ValidationError("all truncations in the schedule were empty")
    return PressureEstimate(
        value=best.value, lower=best.lower, upper=best.upper,
        method="interior_sup",
        params={"schedule": sched, "final_increment": history[-1]["increment"]},
        history=history)


def gurevich_pressure(spec: ShiftSpec, p: Potential, base, n_max: int,
                      N_max: int) -> PressureEstimate:
    """max over n <= n_max of (1/n) log sum over period-n closed words at
    ``base`` (symbols <= N_max) of e^{S_n phi}.

    Closed words at a fixed base concatenate, so each term is a certified
    lower bound for the limsup growth rate."""
    t = truncate(spec, N_max)
    if t.is_empty:
        raise ValidationError("empty truncation")
    if not is_topologically_mixing(t):
        raise ValidationError("gurevich sums need a mixing truncation")
    q = discretize(p, max(p.depth, 1), t)
    if q.depth > 1:
        raise ValidationError("gurevich sums support depth-1 potentials; discretize first")
    states, adj = _recode(t, 1)
    mat = _weighted_matrix(states, adj, q)
    b = t.pos_of_label(base)
    n = mat.shape[0]
    col = np.zeros(n)
    col[b] = 1.0
    logscale = 0.0
    history = []
    best = None
    best_n = None
    for step in range(1, n_max + 1):
        col = mat @ col
        m = float(col.max())
        if m <= 0:
            raise ValidationError(f"no closed orbits of period {step} through {base!r}")
        col /= m
        logscale += math.log(m)
        zb = float(col[b])
        if zb > 0:
            g = (logscale + math.log(zb)) / step
            history.append({"n": step, "value": g})
            if best is None or g > best:
                best, best_n = g, step
        else:
            history.append({"n": step, "value": None})
    if best is None:
        raise ValidationError(f"no closed orbits through {base!r} up to period {n_max}")
    return PressureEstimate(
        value=best, lower=best, upper=math.inf, method="gurevich",
        params={"base": base, "n_max": n_max, "N_max": N_max, "argmax_n": best_n},
        history=history)


def loop_entropy(p_seq: Sequence[int], cutoff: int) -> float:
    """Entropy of a loop system from its loop counts: log(1/z*) where z*
    solves sum_{n<=cutoff} p(n) z^n = 1, by bisection."""
    ps = [int(x) for x in p_seq[:cutoff]]
    ps += [0] * (cutoff - len(ps))
    if any(x < 0 for x in ps):
        raise ValidationError("loop counts must be nonnegative", field="p_seq")
    if not any(ps):
        raise ValidationError("loop counts must not be all zero", field="p_seq")

    def g(z: float) -> float:
        acc = 0.0
        zp = 1.0
        for x in ps:
            zp *= z
            acc += x * zp
        return acc

    if g(1.0) < 1.0:
        raise ValidationError("cutoff too small: truncated series never reaches 1",
                              field="cutoff")
    lo, hi = 0.0, 1.0
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if g(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    z_star = 0.5 * (lo + hi)
    return -math.log(z_star)


def separated_set_pressure(t: TruncatedSFT, p: Potential, sm: ShiftMetric,
                           n: int, eps: float) -> dict:
    """Certified lower bound on the (n, eps')-separated growth rate.

    The alphabet collapses to a greedily chosen vertex set with pairwise
    rho above eps*(1-theta).  One periodic point per closed n-word over
    the collapsed subgraph forms an (n, eps')-separated family for eps' =
    the achieved pairwise minimum, with exact cyclic Birkhoff weights;
    when no closed words exist the family falls back to one cylinder
    point per plain n-word."""
    if n < 1:
        raise ValidationError("n must be >= 1", field="n")
    if eps <= 0:
        raise ValidationError("eps must be positive", field="eps")
    if t.is_empty:
        raise ValidationError("empty truncation")
    threshold = eps * (1.0 - sm.theta)
    kept: list = []
    for lab in t.labels:
        if all(sm.vm.rho(lab, m) > threshold for m in kept):
            kept.append(lab)
    achieved = min((sm.vm.rho(a, b) for i, a in enumerate(kept) for b in kept[:i]),
                   default=math.inf)
    sub_edges = [(a, b) for a in kept for b in kept if t.allows(a, b)]
    from .shifts import ExplicitSpec

    relabel = {lab: i + 1 for i, lab in enumerate(kept)}
    sub = truncate(ExplicitSpec(len(kept), [(relabel[a], relabel[b]) for a, b in sub_edges]),
                   len(kept))
    if sub.is_empty:
        raise ValidationError("collapsed subgraph has no admissible words; lower eps")
    back = {i + 1: lab for i, lab in enumerate(kept)}
    q = discretize(p, max(p.depth, 1), t)
    if q.depth > 1:
        raise ValidationError("separated-set sums support depth-1 potentials")
    weights = np.array([math.exp(q.word_value((back[i],))) for i in sub.labels])
    transfer = sub.matrix.astype(float) * weights[:, None]
    closed_sum = float(np.trace(np.linalg.matrix_power(transfer, n)))
    if closed_sum > 0.0:
        value = math.log(closed_sum) / n
        family = "periodic"
    else:
        value = _log_weighted_word_sum(sub.matrix.astype(float), weights, n) / n
        family = "cylinder"
    return {
        "value": value,
        "family": family,
        "net_size": len(kept),
        "net": kept,
        "threshold": threshold,
        "achieved_separation": achieved,
        "certified_eps": min(achieved, eps) if math.isfinite(achieved) else eps,
        "n": n,
        "eps": eps,
    }


def _log_weighted_word_sum(adj: np.ndarray, weights: np.ndarray, n: int) -> float:
    """log of the sum over admissible n-words of prod_i w(symbol_i),
    rescaled per step against overflow."""
    transfer = adj * weights[:, None]
    vec = weights.astype(float).copy()
    logscale = 0.0
    for _ in range(n - 1):
        vec = transfer @ vec
        m = float(vec.max())
        if m <= 0:
            raise ValidationError("no admissible words of the requested length")
        vec /= m
        logscale += math.log(m)
    return logscale + math.log(float(vec.sum()))


def compactified_pressure(cs, p: Potential) -> PressureEstimate:
    """Pressure of the finite compactified system: base truncation plus
    boundary symbols carrying the potential's declared limits."""
    from .boundary import CompactifiedShift

    if not isinstance(cs, CompactifiedShift):
        raise ValidationError("compactified_pressure needs a CompactifiedShift")
    if p.depth > 1:
        raise ValidationError(
            "compactified pressure supports depth-1 potentials "
            "(boundary limits are per symbol)")
    labels, adj = cs.merged_adjacency()
    weights = []
    for kind, key in labels:
        if kind == "base":
            weights.append(math.exp(p.word_value((key,))))
        else:
            weights.append(math.exp(p.boundary_value(key)))
    mat = adj.astype(float) * np.array(weights)[:, None]
    lam, _, (lo, hi), iters = power_iteration(mat)
    return PressureEstimate(
        value=math.log(lam), lower=math.log(max(lo, 1e-300)), upper=math.log(hi),
        method="compactified",
        params={"states": len(labels), "boundary_symbols": len(cs.model.symbols),
                "iterations": iters})


def random_markov_measure(t: TruncatedSFT, rng: np.random.Generator,
                          depth: int = 1) -> MarkovMeasure:
    """Dirichlet(1,..,1) rows on allowed edges with the stationary vector
    from a direct linear solve."""
    states, adj = _recode(t, depth)
    n = len(states)
    P = np.zeros((n, n))
    for i in range(n):
        row = np.flatnonzero(adj[i])
        P[i, row] = rng.dirichlet(np.ones(len(row)))
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = np.linalg.solve(A, b)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    # polish stationarity; a couple of power steps suffice at this scale
    for _ in range(4):
        pi = pi @ P
        pi /= pi.sum()
    return MarkovMeasure(states=states, pi=pi, P=P)


def variational_witness_check(t: TruncatedSFT, p: Potential, samples: int,
                              seed: int = 0) -> dict:
    """Sampled variational principle: every sampled Markov measure has
    free energy below the pressure; the equilibrium measure attains it."""
    if not is_topologically_mixing(t):
        raise ValidationError("witness check needs a mixing truncation")
    est = sft_pressure(t, p)
    rng = np.random.default_rng(seed)
    worst_gap = math.inf
    violations = 0
    max_free = -math.inf
    for _ in range(samples):
        m = random_markov_measure(t, rng, depth=p.depth)
        h, integral = measure_free_energy(m, p)
        free = h + integral
        max_free = max(max_free, free)
        gap = est.value - free
        worst_gap = min(worst_gap, gap)
        if free > est.value + 1e-9:
            violations += 1
    eq = equilibrium_measure(t, p)
    h, integral = measure_free_energy(eq.measure, p)
    attained_gap = abs(h + integral - est.value)
    return {
        "pressure": est.value,
        "samples": samples,
        "violations": violations,
        "max_sampled_free_energy": max_free,
        "min_gap": worst_gap,
        "equilibrium_gap": attained_gap,
        "equilibrium_attains": attained_gap <= 1e-8,
    }


@dataclass
class EquidistributionReport:
    orbit: list
    length: int
    sector_iterates: int
    head_iterates: int
    mixing_bound: int
    empirical: dict
    integral: float
    boundary_value: float
    eps_k: float
    error_bound: float
    bound_holds: bool


def boundary_equidistribution(spec: ShiftSpec, dec, chain, k: int, n: int,
                              p: Potential) -> EquidistributionReport:
    """Periodic orbit spending n iterates inside the level-k sector of a
    boundary chain and at most M_k + 2 in the head, with the approximation
    bound |int phi dmu_z - phi(x_v)| <= eps_k + (M_k+2)/n * ||phi||."""
    from .sectors import SectorDecomposition

    if not isinstance(dec, SectorDecomposition):
        raise ValidationError("need a sector decomposition")
    if p.depth > 1:
        raise ValidationError("equidistribution reports support depth-1 potentials")
    level = dec.level(k)
    sector = chain.sector_at(k)
    n_cut = level.effective_cutoff
    need = n_cut + n + 8
    if dec.n_max < need:
        raise ValidationError(
            f"decomposition truncated at {dec.n_max}; need N_max >= {need} "
            f"for n = {n} sector iterates", field="n")
    t = truncate(spec, dec.n_max)
    head_labels = [spec.label(i) for i in range(1, n_cut + 1) if i in set(t.indices)]
    head_relabel = {lab: i + 1 for i, lab in enumerate(head_labels)}
    from .shifts import ExplicitSpec

    head_edges = [(head_relabel[a], head_relabel[b])
                  for a in head_labels for b in head_labels if t.allows(a, b)]
    head_t = truncate(ExplicitSpec(len(head_labels), head_edges), len(head_labels))
    if head_t.is_empty:
        raise ValidationError("head truncation is empty; raise the cutoff")
    m_k = mixing_bound(head_t)
    head_set = set(head_labels)
    sector_set = set(sector.labels) & set(t.labels)

    pos_of = {lab: i for i, lab in enumerate(t.labels)}
    succ = [list(t.out_positions(i)) for i in range(len(t.labels))]
    sector_pos = {pos_of[lab] for lab in sector_set}

    # backward DP: layers[j][v] = next step of a j-step internal walk from v
    # that ends at a vertex with an exit edge into the head
    exit_heads = {}
    for u in sorted(sector_pos):
        for v in succ[u]:
            if t.labels[v] in head_set:
                exit_heads[u] = t.labels[v]
                break
    if not exit_heads:
        raise ValidationError("no edge from the sector back into the head")
    layers: list[dict] = [{u: None for u in sorted(exit_heads)}]
    sector_edges = [(u, v) for u in sorted(sector_pos) for v in succ[u]
                    if v in sector_pos]
    for _ in range(n - 1):
        prev = layers[-1]
        nxt: dict = {}
        for u, v in sector_edges:
            if v in prev and u not in nxt:
                nxt[u] = v
        if not nxt:
            raise ValidationError(
                f"the sector admits no internal walk of length {n}; "
                "raise N_max or lower n")
        layers.append(nxt)

    h0 = None
    s0 = None
    deepest = layers[-1]
    for h in head_labels:
        hp = pos_of[h]
        cands = [v for v in succ[hp] if v in deepest]
        if cands:
            h0, s0 = h, min(cands)
            break
    if h0 is None:
        raise ValidationError("no head vertex reaches the sector deeply enough")

    walk = []
    u = s0
    for j in range(n - 1, -1, -1):
        walk.append(t.labels[u])
        u = layers[j][u]
    exit_head = exit_heads[pos_of[walk[-1]]]

    # shortest head path exit_head -> h0
    hsucc = {a: [b for b in head_labels if t.allows(a, b)] for a in head_labels}
    prev = {exit_head: None}
    frontier = [exit_head]
    while frontier and h0 not in prev:
        nxt = []
        for a in frontier:
            for b in hsucc[a]:
                if b not in prev:
                    prev[b] = a
                    nxt.append(b)
        frontier = nxt
    if h0 not in prev:
        raise ValidationError("no head path closing the orbit")
    path = []
    cur = h0
    while cur is not None:
        path.append(cur)
        cur = prev[cur]
    path.reverse()  # exit_head ... h0

    orbit_labels = [h0] + walk + path[:-1]
    orbit = Word(tuple(orbit_labels))
    # validate the closed word
    for i, a in enumerate(orbit_labels):
        b = orbit_labels[(i + 1) % len(orbit_labels)]
        if not spec.transition_labels(a, b):
            raise ValidationError(f"constructed orbit broke at {a!r} -> {b!r}")

    length = len(orbit_labels)
    head_iters = sum(1 for a in orbit_labels if a in head_set)
    sector_iters = sum(1 for a in orbit_labels if a in sector_set)
    counts: dict = {}
    for a in orbit_labels:
        counts[a] = counts.get(a, 0) + 1
    empirical = {a: c / length for a, c in counts.items()}

    integral = birkhoff_sum(p, Word(tuple(orbit_labels))) / length
    x_v = p.boundary_value(chain.limit_key)
    sector_vals = [p.word_value((lab,)) for lab in sector.labels]
    eps_k = (max(sector_vals) - min(sector_vals)) if sector_vals else 0.0
    eps_k = max(eps_k, max((abs(v - x_v) for v in sector_vals), default=0.0))
    bound = eps_k + (m_k + 2) / n * p.sup_norm
    err = abs(integral - x_v)
    return EquidistributionReport(
        orbit=orbit_labels, length=length, sector_iterates=sector_iters,
        head_iterates=head_iters, mixing_bound=m_k, empirical=empirical,
        integral=integral, boundary_value=x_v, eps_k=eps_k,
        error_bound=bound, bound_holds=bool(err <= bound + 1e-12))
