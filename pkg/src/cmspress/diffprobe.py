"""Numeric probes of pressure regularity: curves along potential lines,
one-sided Gateaux quotients against equilibrium integrals, kink scans,
and the convexity/translation/monotonicity/Lipschitz axioms.

Mixing finite shifts with locally constant potentials have analytic
pressure, so non-differentiability is exhibited on reducible systems
(pressure of a disjoint union is the max of the component pressures);
the dense non-differentiability sets of the compact theory live beyond
locally constant functions and are out of numeric reach.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .potentials import Affine, LocallyConstant, Potential, constant
from .pressure import equilibrium_measure, measure_free_energy, sft_pressure
from .shifts import TruncatedSFT, is_topologically_mixing

DEFAULT_STEP = 1e-4


@dataclass
class PressureCurve:
    """P(phi + t psi) sampled on a grid."""

    phi: Potential
    psi: Potential
    t_grid: np.ndarray
    values: np.ndarray
    backend: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.t_grid) <= 0):
            raise ValidationError("grid must be strictly increasing", field="t_grid")
        if not np.all(np.isfinite(self.values)):
            raise ValidationError("pressure curve contains non-finite values")


@dataclass
class KinkReport:
    """Grid points where one-sided slopes separate beyond tolerance."""

    locations: list  # dicts with t, left_slope, right_slope, gap
    tol: float

    def __post_init__(self):
        for loc in self.locations:
            if loc["left_slope"] > loc["right_slope"] + 1e-12:
                raise ValidationError("kink with left slope above right slope "
                                      "contradicts convexity")


def _line_potential(phi: Potential, psi: Potential, t: float) -> Potential:
    if t == 0.0:
        return phi
    return Affine([(1.0, phi), (float(t), psi)])


def pressure_curve(t: TruncatedSFT, phi: Potential, psi: Potential,
                   grid: Sequence[float]) -> PressureCurve:
    g = np.asarray(list(grid), dtype=float)
    values = np.array([sft_pressure(t, _line_potential(phi, psi, tt)).value for tt in g])
    return PressureCurve(phi=phi, psi=psi, t_grid=g, values=values,
                         backend={"method": "spectral", "states": len(t)})


def gateaux_derivative(t: TruncatedSFT, phi: Potential, psi: Potential,
                       h: float = DEFAULT_STEP) -> tuple[float, float]:
    """One-sided difference quotients of P(phi + t psi) at t = 0."""
    if h <= 0:
        raise ValidationError("step must be positive", field="h")
    p0 = sft_pressure(t, phi).value
    p_plus = sft_pressure(t, _line_potential(phi, psi, h)).value
    p_minus = sft_pressure(t, _line_potential(phi, psi, -h)).value
    return (p0 - p_minus) / h, (p_plus - p0) / h


def kink_scan(curve: PressureCurve, tol: float) -> KinkReport:
    """Detect one-sided slope gaps above tol on a uniform grid.

    A slope jump J contributes J*h to the second difference while smooth
    curvature contributes only O(h^2), so the two-scale combination
    (4*D2(h) - D2(2h)) / (2h) estimates J with the curvature cancelled;
    grid points where both the raw second difference exceeds tol*h and
    this estimate exceeds tol are reported with their one-sided slopes.
    """
    g, v = curve.t_grid, curve.values
    steps = np.diff(g)
    if np.max(steps) - np.min(steps) > 1e-9 * np.max(steps):
        raise ValidationError("kink scan needs a uniform grid", field="t_grid")
    if len(g) < 5:
        raise ValidationError("kink scan needs at least 5 grid points", field="t_grid")
    h = float(steps[0])
    locations = []
    for i in range(2, len(g) - 2):
        d2 = v[i + 1] - 2.0 * v[i] + v[i - 1]
        d2_wide = v[i + 2] - 2.0 * v[i] + v[i - 2]
        gap_est = (4.0 * d2 - d2_wide) / (2.0 * h)
        if d2 > tol * h and gap_est > tol:
            left = (v[i] - v[i - 1]) / h
            right = (v[i + 1] - v[i]) / h
            locations.append({"t": float(g[i]), "left_slope": float(left),
                              "right_slope": float(right), "gap": float(gap_est)})
    return KinkReport(locations=locations, tol=tol)


def _random_table(t: TruncatedSFT, rng: np.random.Generator, depth: int = 1,
                  scale: float = 1.0) -> LocallyConstant:
    if depth == 1:
        keys = [(lab,) for lab in t.labels]
    else:
        from .shifts import enumerate_words

        keys = [tuple(w) for w in enumerate_words(t, depth)]
    vals = rng.uniform(-scale, scale, size=len(keys))
    return LocallyConstant(depth, dict(zip(keys, vals)), default=0.0,
                           boundary_limits={"default": 0.0})


def check_pressure_axioms(t: TruncatedSFT, trials: int, tol: float,
                          seed: int = 0) -> dict:
    """Randomized check of translation, monotonicity, Lipschitz continuity
    and midpoint convexity of the pressure on locally constant potentials."""
    if not is_topologically_mixing(t):
        raise ValidationError("axiom checks need a mixing truncation")
    rng = np.random.default_rng(seed)
    worst = {"translation": 0.0, "monotonicity": 0.0, "lipschitz": 0.0,
             "convexity": 0.0}
    for trial in range(trials):
        depth = 1 if trial % 3 else 2
        phi = _random_table(t, rng, depth)
        psi = _random_table(t, rng, depth)
        c = float(rng.uniform(-2.0, 2.0))
        p_phi = sft_pressure(t, phi).value
        p_psi = sft_pressure(t, psi).value

        shifted = sft_pressure(t, Affine([(1.0, phi), (1.0, constant(c))])).value
        worst["translation"] = max(worst["translation"], abs(shifted - (p_phi + c)))

        # phi <= psi_dom pointwise by construction
        bump = _random_table(t, rng, depth, scale=0.5)
        dom = Affine([(1.0, phi), (1.0, bump), (1.0, constant(0.5))])
        p_dom = sft_pressure(t, dom).value
        worst["monotonicity"] = max(worst["monotonicity"], p_phi - p_dom)

        diff = _sup_diff(t, phi, psi)
        worst["lipschitz"] = max(worst["lipschitz"], abs(p_phi - p_psi) - diff)

        mid = Affine([(0.5, phi), (0.5, psi)])
        p_mid = sft_pressure(t, mid).value
        worst["convexity"] = max(worst["convexity"], p_mid - 0.5 * (p_phi + p_psi))

    return {"trials": trials, "tol": tol, "worst": worst,
            "passed": all(v <= tol for v in worst.values())}


def _sup_diff(t: TruncatedSFT, phi: Potential, psi: Potential) -> float:
    from .shifts import enumerate_words

    depth = max(phi.depth, psi.depth)
    return max(abs(phi.word_value(tuple(w)) - psi.word_value(tuple(w)))
               for w in enumerate_words(t, depth))


def derivative_duality_check(t: TruncatedSFT, pairs: int, h: float = DEFAULT_STEP,
                             seed: int = 0) -> dict:
    """Both one-sided quotients should match the equilibrium integral
    int psi d(mu_phi) on a mixing truncation."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        phi = _random_table(t, rng, 1)
        psi = _random_table(t, rng, 1)
        left, right = gateaux_derivative(t, phi, psi, h)
        eq = equilibrium_measure(t, phi)
        _, integral = measure_free_energy(eq.measure, psi)
        worst = max(worst, abs(left - integral), abs(right - integral))
    return {"pairs": pairs, "h": h, "worst_gap": worst}
