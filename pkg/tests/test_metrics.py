import math
from fractions import Fraction

import numpy as np
import pytest

from cmspress.errors import ValidationError
from cmspress.metrics import (ShiftMetric, classify, make_metric, rho_eval,
                              shift_distance, vertex_set_diameter)

FAMILIES = {
    "zargaryan": {},
    "discrete": {},
    "tree_backward": {},
    "double_renewal": {},
    "birth_death_parity": {},
}


def sample_labels(vm, n):
    return vm.enumerate_labels(n)


def test_rho_values_zargaryan():
    z = make_metric("zargaryan")
    assert abs(rho_eval(z, 2, 3) - 1.0 / 6.0) < 1e-15
    assert rho_eval(z, 5, 5) == 0.0


def test_rho_values_tree():
    # worked pairs: nodes at depth 3/2/3 whose words differ at backward
    # position 0 (distance 1) resp. position 1 (distance 1/2)
    t = make_metric("tree_backward")
    x1, x2, x3 = "<1312>", "<132>", "<3332>"
    assert rho_eval(t, x1, x2) == 1.0
    assert rho_eval(t, x1, x3) == 1.0
    assert rho_eval(t, x2, x3) == 0.5


def test_rho_values_birth_death():
    bd = make_metric("birth_death_parity")
    assert abs(rho_eval(bd, 3, 5) - 2.0 / 15.0) < 1e-15
    assert rho_eval(bd, 3, 4) == 1.0


def test_rho_domain_errors():
    z = make_metric("zargaryan")
    with pytest.raises(ValidationError):
        z.rho(0, 3)
    t = make_metric("tree_backward")
    with pytest.raises(ValidationError):
        t.rho("12", "<32>")


def test_metric_axioms_sampled():
    rng = np.random.default_rng(20240811)
    for family, kw in FAMILIES.items():
        vm = make_metric(family, **kw)
        labels = sample_labels(vm, 120)
        n = len(labels)
        for _ in range(10_000):
            i, j, k = rng.integers(0, n, size=3)
            a, b, c = labels[i], labels[j], labels[k]
            dab = vm.rho(a, b)
            assert 0.0 <= dab <= 1.0
            assert dab == vm.rho(b, a)
            if a == b:
                assert dab == 0.0
            assert dab <= vm.rho(a, c) + vm.rho(c, b) + 1e-12, (family, a, b, c)


def test_embedding_metric_axioms_sampled():
    from cmspress.gallery import instantiate

    rng = np.random.default_rng(7)
    for name in ("zigzag_2", "zigzag_3", "circle_loops"):
        vm = instantiate(name).metric
        labels = vm.enumerate_labels(120)
        for _ in range(10_000):
            i, j, k = rng.integers(0, len(labels), size=3)
            a, b, c = labels[i], labels[j], labels[k]
            dab = vm.rho(a, b)
            assert 0.0 <= dab <= 1.0
            assert dab == vm.rho(b, a)
            assert dab <= vm.rho(a, c) + vm.rho(c, b) + 1e-12


def test_classification_verdicts():
    c = classify(make_metric("zargaryan"), 400, [0.5, 0.25])
    assert c.vanishing.value == "yes"
    assert c.totally_bounded.value == "yes"

    d = classify(make_metric("discrete"), 200, [0.5])
    assert d.vanishing.value == "no"
    assert d.totally_bounded.value == "no"
    assert d.net_sizes[(0.5, 200)] == 200

    t = classify(make_metric("tree_backward"), 254, [0.5, 1 / 3, 0.25])
    assert t.vanishing.value == "no"
    assert t.totally_bounded.value == "yes"

    dr = classify(make_metric("double_renewal"), 200, [0.5])
    assert dr.vanishing.value == "no"
    assert dr.totally_bounded.value == "yes"


def test_zargaryan_vanishing_bound_numeric():
    # certificate sup_{i,j >= n} rho <= 1/n, verified densely
    z = make_metric("zargaryan")
    for n in (2, 10, 100, 500):
        labels = list(range(n, 1001, 7))
        worst = max(z.rho(a, b) for a in labels[:20] for b in labels)
        assert worst <= 1.0 / n + 1e-15


def test_classification_consistency_guard():
    from cmspress.metrics import MetricClassification, Verdict

    with pytest.raises(ValidationError):
        MetricClassification(vanishing=Verdict("yes"),
                             totally_bounded=Verdict("no"))


def test_tree_net_sizes_stabilize():
    t = make_metric("tree_backward")
    c = classify(t, 254, [0.5, 1 / 3])
    ladder = sorted({n for (_, n) in c.net_sizes})
    for eps in (0.5, 1 / 3):
        sizes = [c.net_sizes[(eps, n)] for n in ladder]
        assert sizes[-1] == sizes[-2]


def test_shift_distance_cases():
    z = ShiftMetric(make_metric("zargaryan"), 0.5)
    v, tail = shift_distance(z, (1, 1, 1), (1, 1, 1), 3)
    assert v == 0.0 and abs(tail - 0.5 ** 3 / 0.5) < 1e-15

    v, tail = shift_distance(z, (1, 1), (2, 1), 2)
    assert abs(v - 0.5) < 1e-15

    d = ShiftMetric(make_metric("discrete"), 0.5)
    x = tuple(range(1, 11))
    y = tuple(range(11, 21))
    v, tail = shift_distance(d, x, y, 10)
    # geometric sum over coordinates 0..9 of theta^k
    exact = sum(Fraction(1, 2 ** k) for k in range(10))
    assert abs(v - float(exact)) < 1e-15
    assert abs(tail - 2.0 ** -9) < 1e-18


def test_shift_distance_tail_soundness_sampled():
    rng = np.random.default_rng(99)
    z = ShiftMetric(make_metric("zargaryan"), 0.5)
    for _ in range(1000):
        n_long = int(rng.integers(6, 14))
        x = tuple(int(v) for v in rng.integers(1, 50, size=n_long))
        y = tuple(int(v) for v in rng.integers(1, 50, size=n_long))
        n_short = int(rng.integers(1, n_long))
        v_short, tail = shift_distance(z, x, y, n_short)
        v_long, _ = shift_distance(z, x, y, n_long)
        assert v_short - 1e-12 <= v_long <= v_short + tail + 1e-12


def test_cylinder_topology_bound_sampled():
    # words agreeing on n symbols sit within theta^n/(1-theta)
    rng = np.random.default_rng(5)
    sm = ShiftMetric(make_metric("discrete"), 0.5)
    for _ in range(200):
        n = int(rng.integers(1, 10))
        shared = [int(v) for v in rng.integers(1, 9, size=n)]
        x = tuple(shared + [1, 2, 3])
        y = tuple(shared + [4, 5, 6])
        v, tail = shift_distance(sm, x, y, n)
        assert v == 0.0
        assert tail <= 0.5 ** n / 0.5 + 1e-15


def test_vertex_set_diameter():
    z = make_metric("zargaryan")
    assert vertex_set_diameter(z, [7]) == 0.0
    for n in (3, 5, 11):
        got = vertex_set_diameter(z, range(n, 2 * n + 1))
        brute = max(abs(1 / a - 1 / b) for a in range(n, 2 * n + 1)
                    for b in range(n, 2 * n + 1))
        assert abs(got - 1.0 / (2 * n)) < 1e-15
        assert abs(got - brute) < 1e-15
    d = make_metric("discrete")
    assert vertex_set_diameter(d, [1, 5, 9]) == 1.0
    with pytest.raises(ValidationError):
        vertex_set_diameter(z, [])


def test_analytic_diameters_match_brute_force():
    from cmspress.gallery import instantiate

    rng = np.random.default_rng(11)
    for family in ("zargaryan", "tree_backward", "double_renewal",
                   "birth_death_parity"):
        vm = make_metric(family)
        labels = vm.enumerate_labels(80)
        for _ in range(50):
            pick = [labels[i] for i in rng.choice(len(labels),
                                                  size=rng.integers(2, 9),
                                                  replace=False)]
            got = vertex_set_diameter(vm, pick)
            brute = max(vm.rho(a, b) for a in pick for b in pick)
            assert abs(got - brute) < 1e-12, (family, pick)


def test_theta_validation():
    with pytest.raises(ValidationError):
        ShiftMetric(make_metric("zargaryan"), 1.0)
    with pytest.raises(ValidationError):
        ShiftMetric(make_metric("zargaryan"), 0.0)
