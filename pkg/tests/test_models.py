import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dglkit.dgl import coproduct, disk, free_dgl, sphere, validate
from dglkit.free_lie import GeneratorSet, parse_expression
from dglkit.models import (
    CutoffIncomplete,
    DGLMorphism,
    GLPresentation,
    ModelError,
    NotAChainMap,
    associated_dgl,
    bigraded_model,
    coformal_check,
    filtered_model,
    free_target,
    identity_morphism,
    minimal_model,
    structure_morphism,
    verify_bigraded_model,
    verify_quasi_iso,
)


def secondary():
    return free_dgl(
        [("a", 1), ("b", 1), ("c", 1), ("d", 1), ("x", 4), ("y", 4), ("z", 4), ("w", 4)], 6,
        {"x": "[[b,a],c]", "y": "[[b,a],d]", "z": "[[d,c],a]", "w": "[[d,c],b]"},
    )


def abelian(degree, cutoff=7):
    g = GeneratorSet([("a", degree)], cutoff)
    return GLPresentation(g, [parse_expression("[a,a]", g)])


def test_free_target_needs_no_higher_stages():
    g = GeneratorSet([("a", 1), ("b", 2)], 6)
    m = bigraded_model(free_target(g), 5, 3)
    assert set(m.filtration) == {0}
    assert m.gens.names == ("a", "b")
    assert all(v.is_zero() for v in m.components[0])


def test_odd_abelian_kills_the_square():
    m = bigraded_model(abelian(1), 4, 3)
    table = m.table()
    ones = [key for key in table if key[0] == 1]
    assert ones == [(1, 2)] and len(table[(1, 2)]) == 1
    i = m.gens.index[table[(1, 2)][0]]
    assert m.components[0][i] == parse_expression("[a,a]", m.gens)
    # total degree is filtration plus internal degree
    assert m.gens.degrees[i] == 3


def test_even_abelian_stays_in_filtration_zero():
    m = bigraded_model(abelian(2), 6, 3)
    assert set(m.filtration) == {0}


@given(st.sampled_from([1, 3]), st.integers(2, 3))
@settings(max_examples=6, deadline=None)
def test_bigraded_model_checks(degree, filt):
    m = bigraded_model(abelian(degree, 8), 6, filt)
    assert verify_bigraded_model(m) == {"decomposable": True, "square_zero": True, "quasi_isomorphism": True}
    assert validate(associated_dgl(m)) == []


def test_relation_beyond_cutoff_is_incomplete():
    small = GeneratorSet([("a", 3)], 5)
    relation = parse_expression("[a,a]", GeneratorSet([("a", 3)], 7))
    with pytest.raises(CutoffIncomplete):
        GLPresentation(small, [relation])


def test_linear_relation_rejected():
    g = GeneratorSet([("a", 2), ("b", 2)], 5)
    with pytest.raises(ModelError, match="linear"):
        GLPresentation(g, [parse_expression("a - b", g)])


def test_minimal_model_of_minimal_is_identity():
    B = secondary()
    M, phi = minimal_model(B)
    assert M is B
    assert verify_quasi_iso(phi, 5)


def test_minimal_model_of_disk_is_empty():
    M, phi = minimal_model(disk(3, "y", cutoff=6))
    assert len(M.gens) == 0


def test_minimal_model_of_free_odd():
    B = free_dgl([("a", 1)], 6)
    M, _ = minimal_model(B)
    assert M is B


def test_minimal_model_of_sphere_and_disk():
    B = coproduct([sphere(2, "x", cutoff=6), disk(3, "y", cutoff=6)])
    M, phi = minimal_model(B)
    assert M.gens.names == ("x",)
    assert verify_quasi_iso(phi, 5)


def test_zero_differential_filtered_model_has_no_perturbation():
    m = filtered_model(free_dgl([("a", 1), ("b", 2)], 5), 3)
    assert m.perturbation_orders() == []


def test_secondary_filtered_model():
    B = secondary()
    m = filtered_model(B, 3)
    assert m.perturbation_orders() == [1]
    assert verify_quasi_iso(structure_morphism(m), 5)
    assert validate(associated_dgl(m)) == []


def test_coformal_reports():
    assert coformal_check(free_dgl([("a", 1), ("b", 1)], 5), 3).coformal
    sphere_disk = coproduct([sphere(2, "x", cutoff=6), disk(3, "y", cutoff=6)])
    report = coformal_check(sphere_disk, 3)
    assert report.coformal and report.n0 is None
    r = coformal_check(secondary(), 3)
    assert not r.coformal and r.n0 == 2
    assert r.classes and all(c["component"] == 1 for c in r.classes)
    assert "n0 = r + 1" in r.convention


def test_massey_fixture_has_order_two():
    B = free_dgl([("a", 1), ("b", 1), ("x", 3), ("y", 3)], 5, {"x": "[a,a]", "y": "[a,b]"})
    r = coformal_check(B, 3)
    assert (r.coformal, r.n0) == (False, 2)


def test_verify_quasi_iso_cases():
    S = sphere(2, "x", cutoff=6)
    assert verify_quasi_iso(identity_morphism(S), 5)
    zero = DGLMorphism(S, S, (S.gens.zero(2),))
    assert not verify_quasi_iso(zero, 5)
    D = disk(3, "y", cutoff=6)
    broken = DGLMorphism(D, D, (D.gens.gen(0), D.gens.zero(2)))
    with pytest.raises(NotAChainMap):
        verify_quasi_iso(broken, 5)
