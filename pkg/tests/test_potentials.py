import math

import numpy as np
import pytest

from cmspress.errors import ValidationError
from cmspress.potentials import (Affine, LocallyConstant, birkhoff_sum,
                                 constant, discretize, eval_potential,
                                 make_formula, variation)
from cmspress.shifts import (PeriodicOrbit, Word, enumerate_words,
                             make_generator, truncate)


@pytest.fixture
def renewal3():
    return truncate(make_generator("renewal"), 3)


def test_eval_locally_constant():
    p = LocallyConstant(1, {1: 0.7, 2: -0.2})
    assert eval_potential(p, (2, 1, 1)) == (-0.2, 0.0)
    assert eval_potential(p, (9,)) == (0.0, 0.0)  # default off the table


def test_eval_vertex_formula():
    f = make_formula("reciprocal", {"inf": 0.0})
    assert eval_potential(f, (4, 1)) == (0.25, 0.0)
    assert f.boundary_value("inf") == 0.0
    with pytest.raises(ValidationError):
        f.boundary_value("other")


def test_eval_affine_linearity():
    p1 = LocallyConstant(1, {1: 1.0, 2: 3.0})
    p2 = make_formula("reciprocal", {"inf": 0.0})
    combo = Affine([(2.0, p1), (1.0, p2)])
    v, unc = eval_potential(combo, (2, 1))
    assert abs(v - (2.0 * 3.0 + 0.5)) < 1e-15
    assert unc == 0.0


def test_eval_word_too_short():
    p = LocallyConstant(2, {(1, 1): 1.0})
    with pytest.raises(ValidationError):
        eval_potential(p, (1,))


def test_variation(renewal3):
    lc2 = LocallyConstant(2, {(1, 1): 1.0, (1, 2): 0.5}, default=0.0)
    assert variation(lc2, 3, renewal3) == 0.0
    assert variation(lc2, 2, renewal3) == 0.0
    # oscillation over 1-cylinders: [1] carries completions 11, 12, 13
    got = variation(lc2, 1, renewal3)
    vals = {(1, 1): 1.0, (1, 2): 0.5, (1, 3): 0.0}
    assert abs(got - (max(vals.values()) - min(vals.values()))) < 1e-15
    # formulas depend on the first symbol only
    f = make_formula("reciprocal", {"inf": 0.0})
    assert variation(f, 1, renewal3) == 0.0
    assert variation(constant(4.0), 1, renewal3) == 0.0


def test_discretize_vertex_formula(renewal3):
    t4 = truncate(make_generator("renewal"), 4)
    f = make_formula("reciprocal", {"inf": 0.0})
    d = discretize(f, 1, t4)
    assert d.table == {(1,): 1.0, (2,): 0.5, (3,): 1.0 / 3.0, (4,): 0.25}
    assert d.boundary_limits == {"inf": 0.0}


def test_discretize_identity_when_deep_enough(renewal3):
    p = LocallyConstant(1, {1: 2.0, 2: -1.0}, default=0.25)
    d = discretize(p, 2, renewal3)
    for w in enumerate_words(renewal3, 2):
        assert d.word_value(tuple(w)) == p.word_value(tuple(w))


def test_discretize_error_bound_sampled(renewal3):
    lc2 = LocallyConstant(2, {(1, 1): 1.0, (1, 2): 0.5, (3, 2): -0.25}, default=0.0)
    v1 = variation(lc2, 1, renewal3)
    d = discretize(lc2, 1, renewal3)
    rng = np.random.default_rng(17)
    words = enumerate_words(renewal3, 5)
    for _ in range(100):
        w = tuple(words[rng.integers(0, len(words))])
        assert abs(d.word_value(w) - lc2.word_value(w)) <= v1 + 1e-12
    for k in (1, 2, 3):
        assert variation(d, k, renewal3) == 0.0


def test_variation_summable_for_locally_constant(renewal3):
    lc = LocallyConstant(2, {(1, 1): 1.0}, default=0.0)
    total = sum(variation(lc, n, renewal3) for n in range(1, 12))
    assert math.isfinite(total)
    assert all(variation(lc, n, renewal3) == 0.0 for n in range(2, 12))


def test_birkhoff_sums():
    assert birkhoff_sum(constant(2.5), Word((1, 2, 1))) == 7.5
    f = make_formula("reciprocal", {"inf": 0.0})
    assert birkhoff_sum(f, PeriodicOrbit(Word((1, 2)))) == 1.5
    table = LocallyConstant(1, {1: 0.25, 2: 1.0, 3: -0.5})
    orbit = PeriodicOrbit(Word((1, 3, 2)))
    assert abs(birkhoff_sum(table, orbit) - (0.25 + 1.0 - 0.5)) < 1e-15


def test_birkhoff_cyclic_reading_depth2():
    p = LocallyConstant(2, {(1, 2): 1.0, (2, 1): 0.25}, default=0.0)
    orbit = PeriodicOrbit(Word((1, 2)))
    # pairs read cyclically: (1,2) then (2,1)
    assert abs(birkhoff_sum(p, orbit) - 1.25) < 1e-15
    with pytest.raises(ValidationError):
        birkhoff_sum(p, Word((1, 2)))  # aperiodic word lacks the wrap pair


def test_birkhoff_linearity_sampled(renewal3):
    rng = np.random.default_rng(3)
    words = enumerate_words(renewal3, 6)
    phi = LocallyConstant(1, {1: 0.3, 2: -0.1, 3: 2.0})
    psi = make_formula("reciprocal", {"inf": 0.0})
    for _ in range(200):
        a, b = rng.normal(size=2)
        w = words[rng.integers(0, len(words))]
        combo = Affine([(a, phi), (b, psi)])
        lhs = birkhoff_sum(combo, w)
        rhs = a * birkhoff_sum(phi, w) + b * birkhoff_sum(psi, w)
        assert abs(lhs - rhs) < 1e-12


def test_sup_norm_and_formula_bounds():
    f = make_formula("reciprocal", {"inf": 0.0})
    assert f.sup_norm == 1.0
    s = make_formula("sign", {"+inf": 1.0, "-inf": -1.0})
    assert s.word_value((-3,)) == -1.0
    assert s.word_value((0,)) == 0.0
    r = make_formula("reciprocal_abs", {"default": 0.0})
    assert r.word_value((0,)) == 1.0
    assert r.word_value((-4,)) == 0.25
