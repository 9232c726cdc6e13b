"""The free-DGL comonad, canonical simplicial resolutions, and the theta / ladder calculus."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .dgl import DGL, extend_derivation, validate
from .free_lie import GeneratorSet, LieElement, Word, bracket, lie_morphism
from .simplicial_lie import SimplicialGradedLie, shuffle_bracket


class ResolutionError(ValueError):
    pass


def bracket_name(inner: str) -> str:
    return "⟨" + inner + "⟩"


@dataclass
class FreeCover:
    """F(B): one generator <m> per basis monomial m of B through the cutoff."""

    base: DGL
    dgl: DGL
    payloads: List[Word]          # generator index -> basis word of the base
    index: Dict[Word, int]        # basis word of the base -> generator index

    @property
    def gens(self) -> GeneratorSet:
        return self.dgl.gens

    def wrap(self, e: LieElement) -> LieElement:
        """<e>, extended linearly over the monomial basis of the base."""
        out = {(self.index[w],): c for w, c in e.terms.items()}
        return LieElement(self.gens, e.degree, out)

    def counit(self, e: LieElement) -> LieElement:
        images = self.__dict__.get("_counit_images")
        if images is None:
            images = self.__dict__["_counit_images"] = [LieElement(self.base.gens, None, {w: 1}) for w in self.payloads]
        out = lie_morphism(e, images, self.base.gens)
        return LieElement(self.base.gens, e.degree, out.terms)

    def is_sphere(self, i: int) -> bool:
        w = self.payloads[i]
        return extend_derivation(self.base, LieElement(self.base.gens, None, {w: 1})).is_zero()


def comonad_F(b: DGL, cutoff: Optional[int] = None) -> FreeCover:
    cutoff = b.cutoff if cutoff is None else cutoff
    gb = b.gens
    gens: List[Tuple[str, int]] = []
    payloads: List[Word] = []
    for k in range(1, cutoff + 1):
        for w in gb.basis_words(k):
            gens.append((bracket_name(gb.monomial_string(w)), k))
            payloads.append(w)
    g = GeneratorSet(gens, cutoff)
    index = {w: i for i, w in enumerate(payloads)}
    diff = []
    for w, (_, k) in zip(payloads, gens):
        dw = extend_derivation(b, LieElement(gb, k, {w: 1}))
        diff.append(LieElement(g, k - 1, {(index[m],): c for m, c in dw.terms.items()}))
    return FreeCover(b, DGL(g, diff), payloads, index)


class CanonicalResolution(SimplicialGradedLie):
    """W_n = F^{n+1}(B) with d_i omitting and s_j repeating the i-th / j-th
    pair of brackets, counted from the outside starting at 0."""

    def __init__(self, base: DGL, simp_cutoff: int, deg_cutoff: Optional[int] = None):
        deg_cutoff = base.cutoff if deg_cutoff is None else deg_cutoff
        self.base = base
        covers: List[FreeCover] = []
        prev = base
        for n in range(simp_cutoff + 1):
            cov = comonad_F(prev, deg_cutoff)
            covers.append(cov)
            prev = cov.dgl
        self.covers = covers
        self.dgls = [c.dgl for c in covers]
        levels = {n: c.gens for n, c in enumerate(covers)}
        super().__init__(levels, {}, {})
        self.simp_cutoff = simp_cutoff
        for n in range(1, simp_cutoff + 1):
            for i in range(n + 1):
                self.faces[(n, i)] = [self._face_gen(n, i, k) for k in range(len(levels[n]))]
        for n in range(simp_cutoff):
            for j in range(n + 1):
                self.degens[(n, j)] = [self._degen_gen(n, j, k) for k in range(len(levels[n]))]

    def payload(self, n: int, k: int) -> LieElement:
        cov = self.covers[n]
        return LieElement(cov.base.gens, cov.gens.degrees[k], {cov.payloads[k]: 1})

    def augmentation(self, e: LieElement) -> LieElement:
        return self.covers[0].counit(e)

    def _face_gen(self, n: int, i: int, k: int) -> LieElement:
        w = self.payload(n, k)  # element of W_{n-1}
        if i == 0:
            return w
        if n - 1 == 0:
            inner = self.covers[0].counit(w)  # i == 1
        else:
            inner = self.face(i - 1, w, n - 1)
        return self.covers[n - 1].wrap(inner)

    def _degen_gen(self, n: int, j: int, k: int) -> LieElement:
        x = self.levels[n].gen(k)
        if j == 0:
            return self.covers[n + 1].wrap(x)
        w = self.payload(n, k)
        if n == 0:
            raise ResolutionError("s_j with j > 0 undefined in dimension 0")
        inner = self.degeneracy(j - 1, w, n - 1)
        return self.covers[n + 1].wrap(inner)

    def differential(self, e: LieElement) -> LieElement:
        return extend_derivation(self.dgls[self.level_of(e)], e)

    def is_sphere(self, n: int, k: int) -> bool:
        return self.covers[n].is_sphere(k)


def canonical_resolution(b: DGL, simp_cutoff: int, deg_cutoff: Optional[int] = None) -> CanonicalResolution:
    return CanonicalResolution(b, simp_cutoff, deg_cutoff)


# ---------------------------------------------------------------------------
# theta embedding and ladders


class LadderError(ResolutionError):
    pass


class ThetaEmbedding:
    """x -> x^(s) in the canonical resolution of a model's associated DGL.

    x^(s) lives in W_{n-s} with degree k + s for x of filtration n and
    internal degree k; x^(n) = <x> in W_0 and theta(x) = x^(0).
    """

    def __init__(self, model, resolution: Optional[CanonicalResolution] = None, verify: bool = True):
        from .models import associated_dgl
        self.model = model
        top = max(model.filtration, default=0)
        if resolution is None:
            resolution = canonical_resolution(associated_dgl(model), top, model.gens.cutoff)
        if resolution.simp_cutoff < top:
            raise ResolutionError(f"resolution stops at dimension {resolution.simp_cutoff}, model needs {top}")
        if resolution.base.gens.names != model.gens.names:
            raise ResolutionError("resolution does not resolve the model's associated DGL")
        self.W = resolution
        self.verify = verify
        self._memo: Dict[Tuple[int, int], LieElement] = {}
        self._tree: Dict[Tuple[Word, int], LieElement] = {}
        self.checked: List[Tuple[str, int]] = []

    def _zero(self, level: int, degree: int) -> LieElement:
        return self.W.levels[level].zero(degree)

    def _spread(self, w: Word, m: int) -> LieElement:
        """Sum over r_1 + ... = m of the tree of w evaluated on y_j^(r_j)."""
        key = (w, m)
        hit = self._tree.get(key)
        if hit is not None:
            return hit
        g = self.model.gens
        f = self.model.word_filtration(w)
        internal = g.word_degree(w) - f
        level = f - m
        if level < 0:
            raise LadderError("negative level")
        parts = g.split(w)
        if parts is None:
            out = self.ladder(w[0], m)
        else:
            u, v = parts
            out = self._zero(level, internal + m)
            fu, fv = self.model.word_filtration(u), self.model.word_filtration(v)
            du, dv = g.word_degree(u), g.word_degree(v)
            for m1 in range(max(0, m - fv), min(m, fu) + 1):
                a = self._spread(u, m1)
                b = self._spread(v, m - m1)
                if a.is_zero() or b.is_zero():
                    continue
                # top face then acts like the internal differential; all-bottom split has sign +1
                sign = -1 if ((fu - m1) * dv + (fv - m + m1) * du) % 2 else 1
                out = out + sign * shuffle_bracket(self.W, a, b)
        self._tree[key] = out
        return out

    def ladder(self, i: int, s: int) -> LieElement:
        """x^(s) for the i-th generator; zero above its filtration."""
        key = (i, s)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        model = self.model
        n = model.filtration[i]
        k = model.internal_degree(i)
        if s > n:
            return self._zero(0, k + s)
        if s == n:
            out = self.W.covers[0].wrap(LieElement(model.gens, n + k, {(i,): 1}))
        else:
            level = n - s
            inner = self._zero(level - 1, k + s)
            for r, values in sorted(model.components.items()):
                if r > s:
                    continue
                for w, c in values[i].terms.items():
                    inner = inner + c * self._spread(w, s - r)
            out = self.W.covers[level].wrap(inner)
        self._memo[key] = out
        if self.verify:
            self._check(i, s, out)
        return out

    def _check(self, i: int, s: int, xs: LieElement):
        n = self.model.filtration[i]
        level = n - s
        name = self.model.gens.names[i]
        for j in range(1, level):
            if not self.W.face(j, xs, level).is_zero():
                raise LadderError(f"{name}^({s}): face d_{j} is nonzero")
        if level >= 1:
            top = self.W.face(level, xs, level)
            nxt = self.ladder(i, s + 1)
            if top != self.W.differential(nxt):
                raise LadderError(f"{name}^({s}): face d_{level} differs from the differential of {name}^({s + 1})")
        self.checked.append((name, s))

    def theta(self, i: int) -> LieElement:
        return self.ladder(i, 0)

    def all_ladders(self) -> Dict[str, List[LieElement]]:
        out = {}
        for i, name in enumerate(self.model.gens.names):
            out[name] = [self.ladder(i, s) for s in range(self.model.filtration[i] + 1)]
        return out


def theta(model, resolution: Optional[CanonicalResolution] = None, verify: bool = True) -> ThetaEmbedding:
    return ThetaEmbedding(model, resolution, verify)


@dataclass
class CWResolution:
    """Sub-object of a canonical resolution spanned by theta images and their degeneracies."""

    embedding: ThetaEmbedding
    spheres: Dict[int, List[Tuple[str, LieElement]]]   # simplicial dimension -> (generator, theta image)
    cw_property: bool
    decomposable: bool

    @property
    def W(self) -> CanonicalResolution:
        return self.embedding.W

    def sphere_counts(self) -> Dict[Tuple[int, int], int]:
        """(simplicial dimension, internal degree) -> number of nondegenerate spheres."""
        out: Dict[Tuple[int, int], int] = {}
        for n, items in self.spheres.items():
            for _, e in items:
                out[(n, e.degree)] = out.get((n, e.degree), 0) + 1
        return out

    def degenerate_images(self, n: int) -> List[LieElement]:
        """All iterated degeneracies of lower spheres landing in dimension n."""
        out = []
        for m in range(n):
            for _, e in self.spheres.get(m, []):
                frontier = [(e, m)]
                while frontier:
                    nxt = []
                    for x, lvl in frontier:
                        for j in range(lvl + 1):
                            y = self.W.degeneracy(j, x, lvl)
                            if lvl + 1 == n:
                                out.append(y)
                            else:
                                nxt.append((y, lvl + 1))
                    frontier = nxt
        return out


def minimal_cw_resolution(model, resolution: Optional[CanonicalResolution] = None) -> CWResolution:
    emb = ThetaEmbedding(model, resolution, verify=True)
    spheres: Dict[int, List[Tuple[str, LieElement]]] = {}
    cw = True
    dec = True
    for i, name in enumerate(model.gens.names):
        n = model.filtration[i]
        ladders = [emb.ladder(i, s) for s in range(n, -1, -1)]
        x0 = ladders[-1]
        spheres.setdefault(n, []).append((name, x0))
        # in homology: theta(x) is a cycle, inner faces vanish, and the last
        # face is the boundary of x^(1) (already certified by the ladder check)
        if not emb.W.differential(x0).is_zero():
            cw = False
        for j in range(1, n):
            if not emb.W.face(j, x0, n).is_zero():
                cw = False
        if n >= 1 and emb.W.face(n, x0, n) != emb.W.differential(ladders[-2]):
            cw = False
        d0 = model.components[0][i]
        if not d0.is_zero() and d0.min_bracket_length() < 2:
            dec = False
    return CWResolution(emb, dict(sorted(spheres.items())), cw, dec)
