import numpy as np
import pytest

from cmspress.errors import ValidationError
from cmspress.gallery import catalogue, instantiate
from cmspress.shifts import (ExplicitSpec, enumerate_words,
                             is_topologically_mixing, make_generator,
                             mixing_bound, periodic_orbits, truncate)


def prune_oracle(n, edges):
    """Independent fixpoint pruning over plain edge lists."""
    keep = set(range(1, n + 1))
    es = set(edges)
    while True:
        outs = {a for a, _ in es}
        ins = {b for _, b in es}
        dead = {v for v in keep if v not in outs or v not in ins}
        if not dead:
            return keep, es
        keep -= dead
        es = {(a, b) for a, b in es if a in keep and b in keep}


def edges_of(t):
    return sorted((t.indices[p], t.indices[q])
                  for p in range(len(t)) for q in t.out_positions(p))


def test_truncate_renewal_three():
    t = truncate(make_generator("renewal"), 3)
    assert t.indices == (1, 2, 3)
    assert edges_of(t) == [(1, 1), (1, 2), (1, 3), (2, 1), (3, 2)]
    keep, es = prune_oracle(3, [(1, 1), (1, 2), (1, 3), (2, 1), (3, 2)])
    assert set(edges_of(t)) == es and set(t.indices) == keep


def test_truncate_random_walk_single_vertex():
    t = truncate(make_generator("random_walk_1side"), 1)
    assert t.indices == (1,)
    assert edges_of(t) == [(1, 1)]


def test_truncate_to_empty():
    t = truncate(ExplicitSpec(2, [(1, 2)]), 2)
    assert t.is_empty


def test_truncate_prunes_to_oracle_fixpoint():
    spec = ExplicitSpec(5, [(1, 2), (2, 1), (1, 3), (3, 4), (5, 1)])
    t = truncate(spec, 5)
    keep, es = prune_oracle(5, [(1, 2), (2, 1), (1, 3), (3, 4), (5, 1)])
    assert set(t.indices) == keep
    assert set(edges_of(t)) == es


def test_mixing(full2, two_cycle):
    assert is_topologically_mixing(full2)
    assert not is_topologically_mixing(two_cycle)
    assert is_topologically_mixing(truncate(make_generator("renewal"), 3))


def test_mixing_empty_errors():
    t = truncate(ExplicitSpec(2, [(1, 2)]), 2)
    with pytest.raises(ValidationError):
        is_topologically_mixing(t)


def test_mixing_bound(full2):
    assert mixing_bound(full2) == 1
    assert mixing_bound(truncate(make_generator("renewal"), 3)) == 3
    assert mixing_bound(truncate(ExplicitSpec(1, [(1, 1)]), 1)) == 1


def test_enumerate_words(full2, two_cycle):
    assert [w.symbols for w in enumerate_words(full2, 2)] == [
        (1, 1), (1, 2), (2, 1), (2, 2)]
    assert [w.symbols for w in enumerate_words(two_cycle, 3)] == [
        (1, 2, 1), (2, 1, 2)]
    t = truncate(make_generator("renewal"), 2)
    assert [w.symbols for w in enumerate_words(t, 2)] == [(1, 1), (1, 2), (2, 1)]


def test_words_respect_transitions():
    for name in ("renewal", "double_renewal", "dyadic_tree", "birth_death_parity"):
        spec = make_generator(name)
        t = truncate(spec, 10)
        for w in enumerate_words(t, 4):
            for a, b in zip(w.symbols, w.symbols[1:]):
                assert spec.transition_labels(a, b)


def test_periodic_orbits(full2, two_cycle):
    assert len(periodic_orbits(full2, 2)) == 4
    assert len(periodic_orbits(two_cycle, 3)) == 0
    t4 = truncate(make_generator("renewal"), 4)
    words = sorted(o.word.symbols for o in periodic_orbits(t4, 3, base=1))
    assert words == [(1, 1, 1), (1, 1, 2), (1, 2, 1), (1, 3, 2)]


def test_orbit_counts_match_trace_on_gallery():
    for name in catalogue():
        t = truncate(instantiate(name).spec, 12)
        if t.is_empty:
            continue
        a = t.matrix.astype(np.int64)
        power = np.eye(len(t), dtype=np.int64)
        for n in range(1, 9):
            power = power @ a
            assert len(periodic_orbits(t, n)) == int(np.trace(power)), (name, n)


def test_primitive_orbit_filter(full2):
    orbits = periodic_orbits(full2, 2, primitive_only=True)
    assert sorted(o.word.symbols for o in orbits) == [(1, 2), (2, 1)]


def test_pruning_idempotent_and_monotone():
    for name in ("renewal", "backwards_renewal", "loop_system", "dyadic_tree"):
        spec = make_generator(name)
        for n in (3, 7, 12):
            t = truncate(spec, n)
            again = truncate(t.to_spec(), n)
            assert set(again.indices) == set(t.indices)
            assert set(edges_of(again)) == set(edges_of(t))
            bigger = truncate(spec, n + 1)
            assert set(t.indices) <= set(bigger.indices)


def test_double_renewal_enumeration_bijection():
    spec = make_generator("double_renewal")
    for i in range(1, 60):
        assert spec.index(spec.label(i)) == i
    assert [spec.label(i) for i in range(1, 6)] == [0, 1, -1, 2, -2]


def test_tree_enumeration_and_transitions():
    spec = make_generator("dyadic_tree")
    assert [spec.label(i) for i in range(1, 8)] == [
        "<2>", "<12>", "<32>", "<112>", "<132>", "<312>", "<332>"]
    for i in range(1, 40):
        assert spec.index(spec.label(i)) == i
    assert spec.transition_labels("<2>", "<1312>")
    assert spec.transition_labels("<132>", "<32>")
    assert not spec.transition_labels("<132>", "<12>")


def test_loop_system_layout():
    spec = make_generator("loop_system")
    assert spec.loop_position(2) == (2, 1, 1)
    assert spec.loop_position(3) == (3, 1, 1)
    assert spec.loop_position(4) == (3, 1, 2)
    assert spec.transition_labels(1, 1)
    assert spec.transition_labels(4, 1)
    assert not spec.transition_labels(3, 1)
    assert spec.transition_labels(3, 4)


def test_generator_catalogue_errors():
    with pytest.raises(ValidationError):
        make_generator("nope")
