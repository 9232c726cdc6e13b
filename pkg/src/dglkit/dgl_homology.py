"""Abelianization, bigraded homology H_{s,t}, cohomology with trivial coefficients."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Tuple

from .dgl import DGL
from .exact_linear import EchelonSpan, QuotientCoordinates, SparseMatrix, kernel_basis, rank
from .free_lie import LieElement
from .models import BigradedModel, filtered_model
from .resolution import CanonicalResolution, canonical_resolution, minimal_cw_resolution

COHOMOLOGY_CONVENTION = "H^s_t(L; M) pairs H_{s,j}(L) with M_{j+t}"


class HomologyError(ValueError):
    pass


@dataclass
class AbelianChain:
    """Indecomposables of a free DGL: one label per generator, linear part of the differential."""

    labels: List[str]
    degrees: List[int]
    boundary: Dict[int, SparseMatrix]   # t -> matrix from degree t to degree t - 1

    def basis(self, t: int) -> List[int]:
        return [i for i, d in enumerate(self.degrees) if d == t]

    def betti(self, t: int) -> int:
        dim = len(self.basis(t))
        out = self.boundary.get(t)
        inn = self.boundary.get(t + 1)
        return dim - (rank(out) if out else 0) - (rank(inn) if inn else 0)


def _linear_part(e: LieElement) -> Dict[int, Fraction]:
    return {w[0]: c for w, c in e.terms.items() if len(w) == 1}


def abelianize(d: DGL) -> AbelianChain:
    g = d.gens
    by_degree: Dict[int, List[int]] = {}
    for i, k in enumerate(g.degrees):
        by_degree.setdefault(k, []).append(i)
    pos = {i: idx for idx_list in by_degree.values() for idx, i in enumerate(idx_list)}
    boundary = {}
    for t, src in by_degree.items():
        tgt = by_degree.get(t - 1, [])
        ent = {}
        for j, i in enumerate(src):
            for a, c in _linear_part(d.differential[i]).items():
                ent[(pos[a], j)] = c
        boundary[t] = SparseMatrix(len(tgt), len(src), ent)
    return AbelianChain(list(g.names), list(g.degrees), boundary)


# ---------------------------------------------------------------------------
# simplicial graded vector spaces


@dataclass
class LevelHomology:
    representatives: List[List[Fraction]]
    reader: QuotientCoordinates


class SimplicialChains:
    """Levelwise abelianized resolution: chains in t per level n, with face matrices."""

    def __init__(self, W: CanonicalResolution, top: int, deg_cutoff: int):
        self.W = W
        self.top = top
        self.deg_cutoff = deg_cutoff
        self.ab = [abelianize(W.dgls[n]) for n in range(top + 1)]
        self._homology: Dict[Tuple[int, int], LevelHomology] = {}
        self._faces: Dict[Tuple[int, int, int], SparseMatrix] = {}

    def face_matrix(self, n: int, i: int, t: int) -> SparseMatrix:
        key = (n, i, t)
        hit = self._faces.get(key)
        if hit is None:
            src = self.ab[n].basis(t)
            tgt = self.ab[n - 1].basis(t)
            pos = {a: r for r, a in enumerate(tgt)}
            ent = {}
            for j, gi in enumerate(src):
                for a, c in _linear_part(self.W.faces[(n, i)][gi]).items():
                    ent[(pos[a], j)] = c
            hit = self._faces[key] = SparseMatrix(len(tgt), len(src), ent)
        return hit

    def level_homology(self, n: int, t: int) -> LevelHomology:
        key = (n, t)
        hit = self._homology.get(key)
        if hit is None:
            ab = self.ab[n]
            dim = len(ab.basis(t))
            out = ab.boundary.get(t) or SparseMatrix(0, dim, {})
            inn = ab.boundary.get(t + 1) or SparseMatrix(dim, 0, {})
            bounds = inn.column_dicts()
            span = EchelonSpan(dim)
            for b in bounds:
                span.add(b)
            reps = []
            for z in kernel_basis(out):
                if span.add(z):
                    reps.append(z)
            hit = self._homology[key] = LevelHomology(reps, QuotientCoordinates(dim, bounds, reps))
        return hit

    def induced_face(self, n: int, i: int, t: int) -> SparseMatrix:
        src = self.level_homology(n, t)
        tgt = self.level_homology(n - 1, t)
        m = self.face_matrix(n, i, t)
        cols = []
        for z in src.representatives:
            img = m.apply(z)
            coords = tgt.reader.coordinates(img)
            if coords is None:
                raise HomologyError(f"face d_{i} does not preserve cycles at level {n}, degree {t}")
            cols.append(coords)
        return SparseMatrix.from_columns(cols, len(tgt.representatives))

    def moore_betti(self, s: int, t: int) -> int:
        """pi_s of the simplicial vector space n -> H'_t(Ab W_n), via the Moore complex."""
        if s + 1 > self.top:
            raise HomologyError(f"pi_{s} needs simplicial dimension {s + 1}")

        def moore_basis(n):
            size = len(self.level_homology(n, t).representatives)
            if n == 0:
                return [[Fraction(int(a == b)) for a in range(size)] for b in range(size)]
            stacked = []
            for i in range(1, n + 1):
                stacked.extend(self.induced_face(n, i, t).to_dense())
            if not stacked:
                return [[Fraction(int(a == b)) for a in range(size)] for b in range(size)]
            return kernel_basis(SparseMatrix.from_dense(stacked, size))

        def d0_on(n, basis):
            if n == 0:
                return None
            m = self.induced_face(n, 0, t)
            return [m.apply(v) for v in basis]

        ns = moore_basis(s)
        cycles = len(ns)
        if s > 0:
            imgs = d0_on(s, ns)
            rows = len(self.level_homology(s - 1, t).representatives)
            cycles -= rank(SparseMatrix.from_columns(imgs, rows))
        ns1 = moore_basis(s + 1)
        imgs = d0_on(s + 1, ns1)
        rows = len(self.level_homology(s, t).representatives)
        bnd = rank(SparseMatrix.from_columns(imgs, rows)) if imgs else 0
        return cycles - bnd


@dataclass
class BigradedHomology:
    betti: Dict[Tuple[int, int], int]
    labels: Dict[Tuple[int, int], List[str]] = field(default_factory=dict)
    method: str = "minimal"
    simp_range: int = 0
    deg_range: int = 0
    incomplete: List[str] = field(default_factory=list)

    def dim(self, s: int, t: int) -> int:
        return self.betti.get((s, t), 0)

    def nonzero(self) -> Dict[Tuple[int, int], int]:
        return {k: v for k, v in sorted(self.betti.items()) if v}


def homology_canonical(d: DGL, simp_range: int, deg_range: int) -> BigradedHomology:
    """H_{s,t} for s <= simp_range, t <= deg_range through the canonical resolution."""
    W = canonical_resolution(d, simp_range + 1, deg_range + 1)
    chains = SimplicialChains(W, simp_range + 1, deg_range + 1)
    betti = {}
    for s in range(simp_range + 1):
        for t in range(1, deg_range + 1):
            betti[(s, t)] = chains.moore_betti(s, t)
    return BigradedHomology(betti, {}, "canonical", simp_range, deg_range)


def homology_from_model(model: BigradedModel, simp_range: int, deg_range: int,
                        certify: bool = True) -> BigradedHomology:
    """Count nondegenerate spheres of the minimal CW resolution built from a model.

    With ``certify`` the resolution is built and the CW and minimality
    conditions are checked; otherwise the spheres are read off the model's
    generators, which the construction puts in bijection with them.
    """
    betti = {(s, t): 0 for s in range(simp_range + 1) for t in range(1, deg_range + 1)}
    labels: Dict[Tuple[int, int], List[str]] = {}
    if certify:
        cw = minimal_cw_resolution(model)
        if not cw.cw_property:
            raise HomologyError("resolution from the model fails the CW property")
        if not cw.decomposable:
            raise HomologyError("resolution from the model is not minimal")
        cells = [(s, name, e.degree) for s, items in cw.spheres.items() for name, e in items]
    else:
        if not all(v.is_zero() or v.min_bracket_length() >= 2 for v in model.components[0]):
            raise HomologyError("model differential is not decomposable")
        cells = [(model.filtration[i], name, model.internal_degree(i)) for i, name in enumerate(model.gens.names)]
    for s, name, t in cells:
        if (s, t) in betti:
            betti[(s, t)] += 1
            labels.setdefault((s, t), []).append(name)
    return BigradedHomology(betti, labels, "minimal", simp_range, deg_range, list(model.incomplete))


def _model_ranges(d: DGL, simp_range: int, deg_range: int) -> BigradedModel:
    if deg_range > d.cutoff - 1:
        raise HomologyError(f"internal degrees through {deg_range} need a DGL cutoff of at least {deg_range + 1}")
    return filtered_model(d, simp_range)


def bigraded_homology(d: DGL, simp_range: int, deg_range: int, method: str = "minimal",
                      certify: bool = True) -> BigradedHomology:
    if method == "canonical":
        return homology_canonical(d, simp_range, deg_range)
    if method == "minimal":
        return homology_from_model(_model_ranges(d, simp_range, deg_range), simp_range, deg_range, certify)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# cohomology with trivial coefficients


@dataclass
class BigradedCohomology:
    dims: Dict[Tuple[int, int], int]
    convention: str = COHOMOLOGY_CONVENTION


def cohomology(h: BigradedHomology, coefficients: Mapping[int, int], t_range: range) -> BigradedCohomology:
    """Universal coefficients: dim H^s_t = sum_j dim H_{s,j} * dim M_{j+t}."""
    dims = {}
    for s in range(h.simp_range + 1):
        for t in t_range:
            dims[(s, t)] = sum(h.dim(s, j) * coefficients.get(j + t, 0) for j in range(1, h.deg_range + 1))
    return BigradedCohomology(dims)


def _precompose(A: SparseMatrix, m: int) -> SparseMatrix:
    """Matrix of f -> f o A on Hom(X, M) with f stored row-major (m x dim X)."""
    x, y = A.rows, A.cols
    ent = {}
    for (b, c), v in A.entries.items():
        for a in range(m):
            ent[(a * y + c, a * x + b)] = v
    return SparseMatrix(m * y, m * x, ent)


class _CochainLevels:
    """Hom(Ab W_n, M) in slot j with internal cohomology and induced cofaces."""

    def __init__(self, chains: SimplicialChains, coefficients: Mapping[int, int]):
        self.chains = chains
        self.coefficients = coefficients
        self._cache: Dict[Tuple[int, int, int], LevelHomology] = {}

    def _boundary(self, n: int, j: int) -> SparseMatrix:
        ab = self.chains.ab[n]
        m = ab.boundary.get(j)
        if m is None:
            m = SparseMatrix(len(ab.basis(j - 1)), len(ab.basis(j)), {})
        return m

    def level(self, n: int, j: int, t: int) -> LevelHomology:
        key = (n, j, t)
        hit = self._cache.get(key)
        if hit is None:
            mdim = self.coefficients.get(j + t, 0)
            dim = len(self.chains.ab[n].basis(j)) * mdim
            out = _precompose(self._boundary(n, j + 1), mdim)
            inn = _precompose(self._boundary(n, j), mdim) if j > 1 else SparseMatrix(dim, 0, {})
            bounds = inn.column_dicts()
            span = EchelonSpan(dim)
            for b in bounds:
                span.add(b)
            reps = [z for z in kernel_basis(out) if span.add(z)] if dim else []
            hit = self._cache[key] = LevelHomology(reps, QuotientCoordinates(dim, bounds, reps))
        return hit

    def alternating_coface(self, n: int, j: int, t: int) -> SparseMatrix:
        """Sum of (-1)^i d_i^* from level n to level n + 1 on cohomology classes."""
        src = self.level(n, j, t)
        tgt = self.level(n + 1, j, t)
        mdim = self.coefficients.get(j + t, 0)
        size = len(src.representatives)
        total = None
        for i in range(n + 2):
            pre = _precompose(self.chains.face_matrix(n + 1, i, j), mdim)
            cols = []
            for f in src.representatives:
                coords = tgt.reader.coordinates(pre.apply(f))
                if coords is None:
                    raise HomologyError("coface does not preserve cocycles")
                cols.append([c if i % 2 == 0 else -c for c in coords])
            m = SparseMatrix.from_columns(cols, len(tgt.representatives)) if cols else SparseMatrix(len(tgt.representatives), 0, {})
            total = m if total is None else SparseMatrix(m.rows, m.cols, _add_entries(total.entries, m.entries))
        return total if total is not None else SparseMatrix(len(tgt.representatives), size, {})


def _add_entries(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return out


def cohomology_direct(d: DGL, coefficients: Mapping[int, int], simp_range: int, deg_range: int,
                      t_range: range) -> BigradedCohomology:
    """Cochains Hom(Ab W, M) on the canonical resolution: cohomology in the
    internal direction, then cohomotopy of the alternating coface complex."""
    W = canonical_resolution(d, simp_range + 1, deg_range + 1)
    chains = SimplicialChains(W, simp_range + 1, deg_range + 1)
    levels = _CochainLevels(chains, coefficients)
    dims = {}
    for t in t_range:
        for s in range(simp_range + 1):
            total = 0
            for j in range(1, deg_range + 1):
                size = len(levels.level(s, j, t).representatives)
                if not size:
                    continue
                out_rank = rank(levels.alternating_coface(s, j, t))
                in_rank = rank(levels.alternating_coface(s - 1, j, t)) if s > 0 else 0
                total += size - out_rank - in_rank
            dims[(s, t)] = total
    return BigradedCohomology(dims)


# ---------------------------------------------------------------------------
# comparison with the coformal model


@dataclass
class ComparisonCertificate:
    dims: Dict[Tuple[int, int], Tuple[int, int]]          # (s, t) -> (dim for d, dim for coformal)
    injection: Dict[Tuple[int, int], Dict[str, str]]
    holds: bool


def coformal_counterpart(model: BigradedModel) -> BigradedModel:
    """The same bigraded generators with the perturbations dropped: a model of (H'(d), 0)."""
    return BigradedModel(model.gens, model.filtration, {0: model.components[0]}, model.target,
                         model.deg_cutoff, model.filt_cutoff, list(model.incomplete))


def compare_with_coformal(d: DGL, simp_range: int, deg_range: int, certify: bool = False) -> ComparisonCertificate:
    model = _model_ranges(d, simp_range, deg_range)
    ours = homology_from_model(model, simp_range, deg_range, certify)
    theirs = homology_from_model(coformal_counterpart(model), simp_range, deg_range, certify)
    dims = {}
    inj = {}
    holds = True
    for key in sorted(set(ours.betti) | set(theirs.betti)):
        a, b = ours.dim(*key), theirs.dim(*key)
        dims[key] = (a, b)
        if a > b:
            holds = False
        src = ours.labels.get(key, [])
        tgt = set(theirs.labels.get(key, []))
        inj[key] = {x: x for x in src if x in tgt}
        if len(inj[key]) != len(src):
            holds = False
    return ComparisonCertificate(dims, inj, holds)
