"""Differential graded Lie algebras on free graded Lie algebras."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .exact_linear import ChainComplexQ, HomologyAt, QuotientCoordinates, SparseMatrix, homology_at
from .free_lie import (
    GeneratorSet,
    LieElement,
    bracket,
    decompose,
    from_coordinates,
    map_monomials,
)


class DGLError(ValueError):
    pass


class DGL:
    """Free graded Lie algebra with a derivation given on generators."""

    def __init__(self, gens: GeneratorSet, differential: Mapping[str, LieElement] | Sequence[LieElement]):
        self.gens = gens
        self.cutoff = gens.cutoff
        if isinstance(differential, Mapping):
            unknown = set(differential) - set(gens.names)
            if unknown:
                raise DGLError(f"differential given on unknown generators: {', '.join(sorted(unknown))}")
            values = [differential.get(n) for n in gens.names]
        else:
            values = list(differential)
            if len(values) != len(gens):
                raise DGLError("differential list length differs from generator count")
        diff: List[LieElement] = []
        for name, deg, v in zip(gens.names, gens.degrees, values):
            if v is None or v.is_zero():
                diff.append(gens.zero(deg - 1))
                continue
            if v.gens.signature() != gens.signature():
                raise DGLError(f"differential of {name} lives over a different generator set")
            if v.degree != deg - 1:
                raise DGLError(
                    f"differential of {name} has degree {v.degree}, expected {deg - 1} "
                    f"(the differential lowers degree by one)"
                )
            diff.append(LieElement(gens, deg - 1, v.terms))
        self.differential: Tuple[LieElement, ...] = tuple(diff)
        self._homology: Dict[int, "HomologyDegree"] = {}

    def __repr__(self):
        return f"DGL({self.gens!r})"

    def of(self, name: str) -> LieElement:
        return self.differential[self.gens.index[name]]

    def d(self, e: LieElement) -> LieElement:
        return extend_derivation(self, e)

    def chain_complex(self, through: int) -> ChainComplexQ:
        return dgl_chain_complex(self, through)


def extend_derivation(dgl: DGL, e: LieElement) -> LieElement:
    g = dgl.gens

    def combine(u, v, du, dv):
        ue = LieElement(g, None, {u: 1})
        ve = LieElement(g, None, {v: 1})
        sign = -1 if g.word_degree(u) % 2 else 1
        return bracket(du, ve) + sign * bracket(ue, dv)

    deg = None if e.degree is None else e.degree - 1
    out = map_monomials(e, lambda i: dgl.differential[i], g.zero(), combine)
    return LieElement(g, deg, out.terms)


@dataclass
class Violation:
    generator: str
    residue: LieElement

    def __str__(self):
        return f"d(d({self.generator})) = {self.residue}"


def validate(dgl: DGL) -> List[Violation]:
    out = []
    for name, deg, v in zip(dgl.gens.names, dgl.gens.degrees, dgl.differential):
        if deg > dgl.cutoff:
            continue
        r = extend_derivation(dgl, v)
        if not r.is_zero():
            out.append(Violation(name, r))
    return out


def boundary_matrix(dgl: DGL, n: int) -> SparseMatrix:
    """Matrix of d : L_n -> L_{n-1} in the monomial bases."""
    cached = dgl._homology.get(("boundary", n))
    if cached is not None:
        return cached
    g = dgl.gens
    src = g.basis_words(n) if n >= 1 else []
    tgt = g.basis_words(n - 1) if n >= 2 else []
    pos = {w: i for i, w in enumerate(tgt)}
    ent = {}
    for j, w in enumerate(src):
        img = extend_derivation(dgl, LieElement(g, n, {w: 1}))
        for t, c in img.terms.items():
            ent[(pos[t], j)] = c
    m = dgl._homology[("boundary", n)] = SparseMatrix(len(tgt), len(src), ent)
    return m


def dgl_chain_complex(dgl: DGL, through: int) -> ChainComplexQ:
    g = dgl.gens
    top = min(through + 1, dgl.cutoff)
    bases = {n: list(g.basis_words(n)) for n in range(1, top + 1)}
    bases[0] = []
    bounds = {n: boundary_matrix(dgl, n) for n in range(1, top + 1)}
    return ChainComplexQ(bases, bounds)


@dataclass
class HomologyDegree:
    degree: int
    betti: int
    representatives: List[LieElement]
    cycle_dim: int
    boundary_rank: int


@dataclass
class HomologyPresentation:
    dgl: DGL
    through: int
    degrees: Dict[int, HomologyDegree] = field(default_factory=dict)

    def betti(self) -> Dict[int, int]:
        return {n: h.betti for n, h in sorted(self.degrees.items())}


def homology_degree(dgl: DGL, n: int) -> HomologyDegree:
    cached = dgl._homology.get(n)
    if cached is not None:
        return cached
    g = dgl.gens
    dim = len(g.basis_words(n))
    dn = boundary_matrix(dgl, n)
    if n + 1 <= dgl.cutoff:
        dn1 = boundary_matrix(dgl, n + 1)
    else:
        raise DGLError(f"homology in degree {n} needs degree {n + 1} which exceeds cutoff {dgl.cutoff}")
    cx = ChainComplexQ({n - 1: [None] * dn.rows, n: [None] * dim, n + 1: [None] * dn1.cols},
                       {n: dn, n + 1: dn1})
    h: HomologyAt = homology_at(cx, n)
    from .exact_linear import rank as _rank
    reps = [from_coordinates(g, n, v) for v in h.representatives]
    r1 = _rank(dn1)
    res = HomologyDegree(n, h.betti, reps, dim - _rank(dn), r1)
    dgl._homology[n] = res
    return res


def chain_homology(dgl: DGL, through: int) -> HomologyPresentation:
    if through > dgl.cutoff - 1:
        raise DGLError(f"homology through degree {through} needs cutoff >= {through + 1}")
    out = HomologyPresentation(dgl, through)
    for n in range(1, through + 1):
        out.degrees[n] = homology_degree(dgl, n)
    return out


def is_boundary(dgl: DGL, e: LieElement) -> bool:
    from .exact_linear import in_span
    if e.is_zero():
        return True
    n = e.degree
    dn1 = boundary_matrix(dgl, n + 1)
    cols = [dn1.column(j) for j in range(dn1.cols)]
    return in_span(decompose(e), cols) is not None


def homology_class(dgl: DGL, e: LieElement) -> List[Fraction]:
    """Coordinates of the class of a cycle in terms of the representatives."""
    n = e.degree
    if e.is_zero():
        return [Fraction(0)] * homology_degree(dgl, n).betti if n else []
    if not extend_derivation(dgl, e).is_zero():
        raise DGLError("element is not a cycle")
    reader = dgl._homology.get(("reader", n))
    if reader is None:
        h = homology_degree(dgl, n)
        dn1 = boundary_matrix(dgl, n + 1)
        reader = QuotientCoordinates(len(dgl.gens.basis_words(n)), dn1.column_dicts(),
                                     [decompose(r) for r in h.representatives])
        dgl._homology[("reader", n)] = reader
    coeffs = reader.coordinates(decompose(e))
    if coeffs is None:
        raise DGLError("cycle is not in the span of representatives and boundaries")
    return coeffs


def is_minimal(dgl: DGL) -> bool:
    return all(v.is_zero() or v.min_bracket_length() >= 2 for v in dgl.differential)


# ---------------------------------------------------------------------------
# building blocks


def free_dgl(generators: Sequence[Tuple[str, int]], cutoff: int, differential: Mapping[str, str] = None) -> DGL:
    from .free_lie import parse_expression
    g = GeneratorSet(generators, cutoff)
    diff = {k: parse_expression(v, g) for k, v in (differential or {}).items()}
    return DGL(g, diff)


def sphere(k: int, name: str, cutoff: int = 8) -> DGL:
    if k < 1:
        raise DGLError("sphere dimension must be >= 1")
    return DGL(GeneratorSet([(name, k)], cutoff), {})


def boundary_name(name: str) -> str:
    return "∂" + name


def disk(k: int, name: str, cutoff: int = 8) -> DGL:
    """Disk of dimension k: generators name (degree k) and its boundary (degree k-1)."""
    if k < 2:
        raise DGLError("disk dimension must be >= 2 so that its boundary sphere is connected")
    g = GeneratorSet([(name, k), (boundary_name(name), k - 1)], cutoff)
    return DGL(g, {name: g.generator(boundary_name(name))})


def boundary_of_disk(dsk: DGL) -> DGL:
    if len(dsk.gens) != 2 or dsk.differential[0] != dsk.gens.gen(1):
        raise DGLError("not a disk")
    return sphere(dsk.gens.degrees[1], dsk.gens.names[1], dsk.cutoff)


def transport(e: LieElement, target: GeneratorSet, rename: Mapping[str, str] = None) -> LieElement:
    """Re-express ``e`` over ``target`` by generator name (optionally renamed)."""
    from .free_lie import lie_morphism
    src = e.gens
    images = []
    for n in src.names:
        t = rename.get(n, n) if rename else n
        images.append(target.generator(t))
    out = lie_morphism(e, images, target)
    return LieElement(target, e.degree, out.terms)


def coproduct(ds: Sequence[DGL], cutoff: Optional[int] = None) -> DGL:
    if len(ds) == 1 and cutoff is None:
        return ds[0]
    cutoff = cutoff if cutoff is not None else min(d.cutoff for d in ds)
    seen: Dict[str, int] = {}
    gens = []
    renames = []
    for idx, d in enumerate(ds):
        ren = {}
        for n, deg in zip(d.gens.names, d.gens.degrees):
            new = n
            k = 1
            while new in seen:
                k += 1
                new = f"{n}_{k}"
            seen[new] = idx
            ren[n] = new
            gens.append((new, deg))
        renames.append(ren)
    g = GeneratorSet(gens, cutoff)
    diff = {}
    for d, ren in zip(ds, renames):
        for n, v in zip(d.gens.names, d.differential):
            if not v.is_zero():
                diff[ren[n]] = transport(v, g, ren)
    return DGL(g, diff)


# ---------------------------------------------------------------------------
# simplicial sets and the half-smash


@dataclass
class FiniteSimplicialSet:
    """Nondegenerate simplices with their faces.

    ``faces[a]`` lists d_0 a, ..., d_k a; ``None`` marks a degenerate face.
    """

    simplices: Dict[int, List[str]]
    faces: Dict[str, Tuple[Optional[str], ...]]
    basepoint: str

    def dim_of(self, a: str) -> int:
        for k, names in self.simplices.items():
            if a in names:
                return k
        raise KeyError(a)

    def all_simplices(self) -> List[Tuple[int, str]]:
        return [(k, a) for k in sorted(self.simplices) for a in self.simplices[k]]

    def check(self) -> List[str]:
        """Face identities d_i d_j = d_{j-1} d_i (i < j) where both sides are nondegenerate."""
        bad = []
        for k, a in self.all_simplices():
            fs = self.faces.get(a, ())
            if k == 0:
                continue
            if len(fs) != k + 1:
                bad.append(f"{a}: expected {k + 1} faces")
                continue
            if k < 2:
                continue
            for j in range(k + 1):
                for i in range(j):
                    fj, fi = fs[j], fs[i]
                    lhs = self.faces[fj][i] if fj is not None else None
                    rhs = self.faces[fi][j - 1] if fi is not None else None
                    if fj is not None and fi is not None and lhs != rhs:
                        bad.append(f"{a}: d{i}d{j} != d{j - 1}d{i}")
        return bad


def point() -> FiniteSimplicialSet:
    return FiniteSimplicialSet({0: ["*"]}, {"*": ()}, "*")


def standard_simplex(n: int) -> FiniteSimplicialSet:
    from itertools import combinations
    simp: Dict[int, List[str]] = {}
    faces: Dict[str, Tuple[Optional[str], ...]] = {}
    for k in range(n + 1):
        for verts in combinations(range(n + 1), k + 1):
            name = "".join(str(v) for v in verts) if n < 10 else "-".join(str(v) for v in verts)
            simp.setdefault(k, []).append(name)
            if k == 0:
                faces[name] = ()
            else:
                fs = []
                for i in range(k + 1):
                    rest = verts[:i] + verts[i + 1:]
                    fs.append("".join(str(v) for v in rest) if n < 10 else "-".join(str(v) for v in rest))
                faces[name] = tuple(fs)
    return FiniteSimplicialSet(simp, faces, "0")


def simplicial_sphere(n: int) -> FiniteSimplicialSet:
    """Delta[n] / boundary: a basepoint and one n-simplex."""
    if n < 1:
        raise ValueError("sphere dimension must be >= 1")
    top_faces = ("*", "*") if n == 1 else tuple([None] * (n + 1))
    return FiniteSimplicialSet({0: ["*"], n: ["e"]}, {"*": (), "e": top_faces}, "*")


def _linear_coefficients(v: LieElement) -> Dict[int, Fraction]:
    out = {}
    for w, c in v.terms.items():
        if len(w) != 1:
            raise DGLError("half-smash needs generator differentials that are linear in the generators")
        out[w[0]] = c
    return out


def half_smash(dgl: DGL, cx: FiniteSimplicialSet, cutoff: Optional[int] = None) -> DGL:
    """Generators (x, a) of degree |x| + dim a with
    d(x, a) = sum_i (-1)^(i+|x|) (x, d_i a) + (dx, a).

    The term (dx, a) is read linearly, which requires dx to be a linear
    combination of generators (spheres, disks and their coproducts).
    """
    cutoff = dgl.cutoff if cutoff is None else cutoff
    g = dgl.gens
    lin = [_linear_coefficients(v) for v in dgl.differential]
    gens = []
    for k, a in cx.all_simplices():
        for name, deg in zip(g.names, g.degrees):
            gens.append((pair_name(name, a, cx), deg + k))
    h = GeneratorSet(gens, cutoff)
    diff = {}
    for k, a in cx.all_simplices():
        fs = cx.faces.get(a, ())
        for xi, (name, m) in enumerate(zip(g.names, g.degrees)):
            acc = h.zero(m + k - 1)
            if k > 0:
                for i, f in enumerate(fs):
                    if f is None:
                        continue
                    sign = -1 if (i + m) % 2 else 1
                    acc = acc + sign * h.generator(pair_name(name, f, cx))
            for yi, c in lin[xi].items():
                acc = acc + c * h.generator(pair_name(g.names[yi], a, cx))
            if not acc.is_zero():
                diff[pair_name(name, a, cx)] = acc
    return DGL(h, diff)


def pair_name(x: str, a: str, cx: FiniteSimplicialSet) -> str:
    if len(cx.simplices) == 1 and len(cx.simplices.get(0, [])) == 1:
        return x
    return f"({x},{a})"
