from hypothesis import given, settings
from hypothesis import strategies as st

from dglkit.dgl import disk, free_dgl, sphere
from dglkit.dgl_homology import (
    COHOMOLOGY_CONVENTION,
    abelianize,
    bigraded_homology,
    cohomology,
    cohomology_direct,
    compare_with_coformal,
)
from dglkit.free_lie import GeneratorSet, parse_expression
from dglkit.models import GLPresentation, associated_dgl, bigraded_model


def secondary():
    return free_dgl(
        [("a", 1), ("b", 1), ("c", 1), ("d", 1), ("x", 4), ("y", 4), ("z", 4), ("w", 4)], 6,
        {"x": "[[b,a],c]", "y": "[[b,a],d]", "z": "[[d,c],a]", "w": "[[d,c],b]"},
    )


def odd_abelian():
    g = GeneratorSet([("a", 1)], 7)
    return associated_dgl(bigraded_model(GLPresentation(g, [parse_expression("[a,a]", g)]), 4, 3))


def test_abelianization_examples():
    free = abelianize(free_dgl([("a", 1), ("b", 1)], 4))
    assert len(free.labels) == 2 and all(m.is_zero() for m in free.boundary.values())
    dsk = abelianize(disk(3, "y", cutoff=4))
    assert dsk.boundary[3].entries == {(0, 0): 1}
    assert dsk.betti(2) == 0 and dsk.betti(3) == 0
    r = abelianize(secondary())
    assert len(r.labels) == 8 and all(m.is_zero() for m in r.boundary.values())


def test_free_is_concentrated_in_dimension_zero():
    for method in ("minimal", "canonical"):
        h = bigraded_homology(free_dgl([("a", 1), ("b", 2)], 5), 2, 3, method)
        assert h.nonzero() == {(0, 1): 1, (0, 2): 1}


def test_odd_abelian_has_one_class_in_dimension_one():
    h = bigraded_homology(odd_abelian(), 2, 3)
    assert h.dim(1, 2) == 1


def test_disk_is_zero():
    for method in ("minimal", "canonical"):
        assert bigraded_homology(disk(3, "y", cutoff=5), 2, 3, method).nonzero() == {}


def test_cohomology_examples():
    h = bigraded_homology(sphere(2, "x", cutoff=5), 2, 3)
    zero = cohomology(h, {}, range(-3, 3))
    assert all(v == 0 for v in zero.dims.values())
    co = cohomology(h, {2: 1}, range(-3, 3))
    assert co.dims[(0, 0)] == 1
    assert all(v == 0 for (s, _), v in co.dims.items() if s > 0)
    assert co.convention == COHOMOLOGY_CONVENTION


@given(st.dictionaries(st.integers(0, 4), st.integers(0, 2), max_size=3),
       st.dictionaries(st.integers(0, 4), st.integers(0, 2), max_size=3))
@settings(max_examples=30, deadline=None)
def test_cohomology_additive_in_coefficients(m1, m2):
    h = bigraded_homology(free_dgl([("a", 1), ("b", 2)], 5), 1, 3)
    both = {k: m1.get(k, 0) + m2.get(k, 0) for k in set(m1) | set(m2)}
    t = range(-3, 4)
    a, b, c = cohomology(h, m1, t).dims, cohomology(h, m2, t).dims, cohomology(h, both, t).dims
    assert all(c[k] == a[k] + b[k] for k in c)


def test_universal_coefficients_match_cochains():
    d = free_dgl([("a", 1), ("b", 1), ("x", 3), ("y", 3)], 5, {"x": "[a,a]", "y": "[a,b]"})
    coeffs = {1: 1, 3: 2}
    t = range(-2, 3)
    assert cohomology(bigraded_homology(d, 1, 3), coeffs, t).dims == cohomology_direct(d, coeffs, 1, 3, t).dims


def test_comparison_with_coformal_model():
    cert = compare_with_coformal(free_dgl([("a", 1), ("b", 2)], 5), 2, 4)
    assert cert.holds and all(a == b for a, b in cert.dims.values())
    r = compare_with_coformal(secondary(), 2, 5)
    assert r.holds
    assert all(a <= b for a, b in r.dims.values())
