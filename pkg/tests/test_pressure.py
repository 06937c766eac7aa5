import math

import numpy as np
import pytest

from conftest import random_mixing_sft

from cmspress.errors import ValidationError
from cmspress.metrics import ShiftMetric, make_metric
from cmspress.potentials import (LocallyConstant, birkhoff_sum, constant,
                                 make_formula)
from cmspress.pressure import (equilibrium_measure, gurevich_pressure,
                               interior_pressure, loop_entropy,
                               measure_free_energy, power_iteration,
                               random_markov_measure, separated_set_pressure,
                               sft_pressure, variational_witness_check)
from cmspress.shifts import (ExplicitSpec, Word, enumerate_words,
                             make_generator, truncate)

LOG2 = math.log(2.0)


def brute_force_rate(t, p, n):
    """(1/n) log sum over admissible n-words of e^{S_n phi}, by explicit
    enumeration; independent of the spectral path."""
    total = 0.0
    for w in enumerate_words(t, n):
        labels = tuple(w)
        s = sum(p.word_value(labels[i:]) for i in range(len(labels) - p.depth + 1))
        total += math.exp(s)
    return math.log(total) / n


def test_sft_pressure_full_shift(full2):
    est = sft_pressure(full2, constant(0.0))
    assert est.value == pytest.approx(LOG2, abs=1e-12)
    assert est.lower <= est.value <= est.upper


def test_sft_pressure_weighted_full_shift(full2):
    a, b = 0.3, -0.7
    p = LocallyConstant(1, {1: a, 2: b})
    est = sft_pressure(full2, p)
    closed_form = math.log(math.exp(a) + math.exp(b))
    assert est.value == pytest.approx(closed_form, abs=1e-12)
    # cross-check against direct word sums at n = 14
    n = 14
    rate = brute_force_rate(full2, p, n)
    assert abs(est.value - rate) <= 2 * math.log(2) / n


def test_sft_pressure_two_cycle(two_cycle):
    assert sft_pressure(two_cycle, constant(0.0)).value == pytest.approx(0.0, abs=1e-12)


def test_spectral_vs_brute_force_on_gallery_truncations():
    from cmspress.gallery import catalogue, instantiate

    n = 14
    for name in catalogue():
        t = truncate(instantiate(name).spec, 6)
        if t.is_empty or len(t) > 10:
            continue
        est = sft_pressure(t, constant(0.0))
        rate = brute_force_rate(t, constant(0.0), n)
        assert abs(est.value - rate) <= 2 * math.log(max(len(t), 2)) / n, name


def test_depth_two_recoding_matches_brute_force(full2):
    p = LocallyConstant(2, {(1, 1): 0.4, (1, 2): -0.3, (2, 1): 0.1}, default=0.2)
    est = sft_pressure(full2, p)
    n = 13
    total = 0.0
    for w in enumerate_words(full2, n + 1):
        labels = tuple(w)
        s = sum(p.word_value(labels[i:i + 2]) for i in range(n))
        total += math.exp(s)
    # n-step Birkhoff sums over (n+1)-words bound the block pressure
    assert abs(est.value - math.log(total) / n) <= 2 * math.log(3) / n


def test_collatz_wielandt_bracket_random():
    rng = np.random.default_rng(123)
    for _ in range(20):
        n = int(rng.integers(2, 7))
        mat = rng.uniform(0.0, 1.0, size=(n, n))
        mat[mat < 0.3] = 0.0
        mat += np.eye(n) * 0.1  # no dead rows
        lam, _, (lo, hi), _ = power_iteration(mat)
        true = max(abs(np.linalg.eigvals(mat)))
        assert lo - 1e-9 <= lam <= hi + 1e-9
        assert lo - 1e-9 <= true <= hi + 1e-9
        assert lam == pytest.approx(true, rel=1e-9)


def test_interior_pressure_renewal_monotone():
    est = interior_pressure(make_generator("renewal"), constant(0.0),
                            [4, 8, 16, 32, 64])
    values = [row["value"] for row in est.history]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    assert est.value == pytest.approx(LOG2, abs=1e-3)
    assert est.history[-1]["increment"] < 1e-3


def test_interior_pressure_exact_for_finite_spec(full2):
    est = interior_pressure(ExplicitSpec(2, [(1, 1), (1, 2), (2, 1), (2, 2)]),
                            constant(0.0), [2, 3])
    assert est.history[0]["value"] == pytest.approx(LOG2, abs=1e-12)


def test_interior_pressure_random_walk_rate():
    # truncated spectral radii 2 cos(pi/(N+1)) -> 2
    spec = make_generator("random_walk_1side")
    for n in (8, 16, 32):
        est = interior_pressure(spec, constant(0.0), [n])
        assert est.value == pytest.approx(math.log(2 * math.cos(math.pi / (n + 1))),
                                          abs=5e-3)


def test_interior_pressure_empty_errors():
    with pytest.raises(ValidationError):
        interior_pressure(ExplicitSpec(2, [(1, 2)]), constant(0.0), [2])


def test_gurevich_full_shift(full2):
    est = gurevich_pressure(ExplicitSpec(2, [(1, 1), (1, 2), (2, 1), (2, 2)]),
                            constant(0.0), 1, 16, 2)
    # closed n-words at vertex 1 number 2^(n-1)
    for row in est.history:
        n = row["n"]
        assert row["value"] == pytest.approx((n - 1) / n * LOG2, abs=1e-12)
    assert est.value == pytest.approx(15 / 16 * LOG2, abs=1e-12)


def test_gurevich_renewal_approaches_log2():
    est = gurevich_pressure(make_generator("renewal"), constant(0.0), 1, 24, 64)
    assert est.value <= LOG2 + 1e-12
    assert est.value >= 0.6


def test_gurevich_single_loop_gives_potential_value():
    est = gurevich_pressure(ExplicitSpec(1, [(1, 1)]),
                            LocallyConstant(1, {1: 0.37}), 1, 6, 1)
    assert est.value == pytest.approx(0.37, abs=1e-12)


def test_loop_entropy_values():
    assert loop_entropy([1] * 60, 60) == pytest.approx(LOG2, abs=1e-9)
    assert loop_entropy([2], 1) == pytest.approx(LOG2, abs=1e-12)
    assert loop_entropy([0, 1], 2) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValidationError):
        loop_entropy([0, 0, 1], 2)  # truncated series stays below 1


def test_loop_entropy_matches_gurevich_counts():
    h = loop_entropy([1] * 60, 60)
    est = gurevich_pressure(make_generator("loop_system"), constant(0.0),
                            1, 20, 256)
    assert abs(h - est.value) <= 5e-2


def test_separated_full_shift(full2):
    sm = ShiftMetric(make_metric("discrete"), 0.5)
    rep = separated_set_pressure(full2, constant(0.0), sm, 10, 0.5)
    assert rep["value"] == pytest.approx(LOG2, abs=1e-12)
    assert rep["net_size"] == 2


def test_separated_single_point():
    t = truncate(make_generator("renewal"), 16)
    sm = ShiftMetric(make_metric("zargaryan"), 0.5)
    rep = separated_set_pressure(t, make_formula("reciprocal", {"inf": 0.0}),
                                 sm, 1, 2.0)
    assert rep["net"] == [1]
    assert rep["value"] == pytest.approx(1.0, abs=1e-12)  # phi at the single vertex


def test_separated_renewal_collapse():
    t = truncate(make_generator("renewal"), 16)
    sm = ShiftMetric(make_metric("zargaryan"), 0.5)
    rep = separated_set_pressure(t, constant(0.0), sm, 8, 1 / 8)
    assert rep["net"] == [1, 2, 3, 4, 6, 10]
    assert 0.60 <= rep["value"] <= LOG2
    # oracle: the pruned collapsed graph is the renewal truncation at 4,
    # whose closed 8-word count is the trace of A^8
    a = truncate(make_generator("renewal"), 4).matrix.astype(float)
    expected = math.log(np.trace(np.linalg.matrix_power(a, 8))) / 8
    assert rep["value"] == pytest.approx(expected, abs=1e-12)


def test_equilibrium_full_shift_symmetric(full2):
    eq = equilibrium_measure(full2, constant(0.0))
    assert np.allclose(eq.measure.pi, [0.5, 0.5], atol=1e-10)
    assert np.allclose(eq.measure.P, [[0.5, 0.5], [0.5, 0.5]], atol=1e-10)


def test_equilibrium_weighted_full_shift(full2):
    eq = equilibrium_measure(full2, LocallyConstant(1, {1: math.log(2), 2: 0.0}))
    # transfer matrix [[2,2],[1,1]]: radius 3, right (2,1), left (1,1)
    assert eq.pressure == pytest.approx(math.log(3), abs=1e-12)
    assert np.allclose(eq.measure.P[0], [2 / 3, 1 / 3], atol=1e-10)
    assert np.allclose(eq.measure.P[1], [2 / 3, 1 / 3], atol=1e-10)
    assert np.allclose(eq.measure.pi, [2 / 3, 1 / 3], atol=1e-10)


def test_equilibrium_self_consistency_random():
    rng = np.random.default_rng(42)
    t = random_mixing_sft(4, 8)
    for _ in range(50):
        table = {(lab,): float(rng.normal()) for lab in t.labels}
        p = LocallyConstant(1, table)
        eq = equilibrium_measure(t, p)
        h, integral = measure_free_energy(eq.measure, p)
        assert abs(h + integral - eq.pressure) < 1e-8


def test_equilibrium_needs_mixing(two_cycle):
    with pytest.raises(ValidationError):
        equilibrium_measure(two_cycle, constant(0.0))


def test_measure_free_energy_cases(full2, two_cycle):
    eq = equilibrium_measure(full2, constant(0.0))
    h, integral = measure_free_energy(eq.measure, constant(0.0))
    assert h == pytest.approx(LOG2, abs=1e-10) and integral == 0.0

    point = random_markov_measure(truncate(ExplicitSpec(1, [(1, 1)]), 1),
                                  np.random.default_rng(0))
    p = LocallyConstant(1, {1: 0.8})
    h, integral = measure_free_energy(point, p)
    assert h == pytest.approx(0.0, abs=1e-12) and integral == pytest.approx(0.8)

    cyc_measure = random_markov_measure(two_cycle, np.random.default_rng(1))
    phi = LocallyConstant(1, {1: 1.0, 2: 0.0})
    h, integral = measure_free_energy(cyc_measure, phi)
    w = Word((1, 2))
    assert h == pytest.approx(0.0, abs=1e-12)
    assert integral == pytest.approx(birkhoff_sum(phi, w) / 2, abs=1e-12)


def test_tangent_inequality_random(full2):
    # P(phi+psi) - P(phi) >= int psi d mu_phi
    rng = np.random.default_rng(77)
    for _ in range(100):
        phi = LocallyConstant(1, {1: float(rng.normal()), 2: float(rng.normal())})
        psi = LocallyConstant(1, {1: float(rng.normal()), 2: float(rng.normal())})
        eq = equilibrium_measure(full2, phi)
        _, integral = measure_free_energy(eq.measure, psi)
        from cmspress.potentials import Affine

        lhs = sft_pressure(full2, Affine([(1.0, phi), (1.0, psi)])).value
        assert lhs - eq.pressure >= integral - 1e-8


def test_variational_witness(full2, two_cycle):
    rep = variational_witness_check(full2, constant(0.0), 200, seed=11)
    assert rep["violations"] == 0
    assert rep["max_sampled_free_energy"] <= LOG2 + 1e-9
    assert rep["equilibrium_attains"]

    t = random_mixing_sft(4, 21)
    phi = LocallyConstant(1, {lab: v for lab, v in zip(t.labels, (0.2, -0.4, 1.0, 0.0))})
    rep = variational_witness_check(t, phi, 100, seed=12)
    assert rep["violations"] == 0 and rep["equilibrium_attains"]


def test_power_iteration_nonconvergence():
    from cmspress.errors import ConvergenceError

    mat = truncate(make_generator("renewal"), 16).matrix.astype(float)
    with pytest.raises(ConvergenceError):
        power_iteration(mat, max_iter=2)
