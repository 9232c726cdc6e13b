"""Simplicial graded Lie algebras, shuffle brackets, Moore complexes and Dold-Kan."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .exact_linear import SparseMatrix, in_span, kernel_basis
from .free_lie import GeneratorSet, LieElement, bracket, decompose, from_coordinates, lie_morphism


class SimplicialError(ValueError):
    pass


class PreconditionError(SimplicialError):
    pass


# ---------------------------------------------------------------------------
# shuffles


@dataclass(frozen=True)
class Shuffle:
    p: int
    q: int
    sigma: Tuple[int, ...]
    tau: Tuple[int, ...]

    @property
    def epsilon(self) -> int:
        return self.p + sum(s - i for i, s in enumerate(self.sigma, start=1))


def shuffles(p: int, q: int) -> List[Tuple[Shuffle, int]]:
    if p < 0 or q < 0:
        raise ValueError("shuffle sizes must be non-negative")
    out = []
    universe = range(p + q)
    for sigma in combinations(universe, p):
        tau = tuple(i for i in universe if i not in sigma)
        sh = Shuffle(p, q, sigma, tau)
        out.append((sh, -1 if sh.epsilon % 2 else 1))
    return out


# ---------------------------------------------------------------------------
# simplicial graded Lie algebras


class SimplicialGradedLie:
    """Levels are free graded Lie algebras; faces and degeneracies are Lie maps
    given by generator images.

    ``faces[(n, i)]`` lists the images in level n-1 of the generators of level n
    under d_i; ``degens[(n, j)]`` lists images in level n+1 under s_j.
    """

    def __init__(self, levels: Dict[int, GeneratorSet],
                 faces: Dict[Tuple[int, int], Sequence[LieElement]],
                 degens: Dict[Tuple[int, int], Sequence[LieElement]]):
        self.levels = levels
        self.simp_cutoff = max(levels)
        self.faces = faces
        self.degens = degens
        self._level_of = {id(g): n for n, g in levels.items()}
        self._face_mats: Dict[Tuple[int, int, int], SparseMatrix] = {}

    @property
    def deg_cutoff(self) -> int:
        return min(g.cutoff for g in self.levels.values())

    def level_of(self, e: LieElement) -> int:
        n = self._level_of.get(id(e.gens))
        if n is None:
            raise SimplicialError("element does not belong to this simplicial object")
        return n

    def face(self, i: int, e: LieElement, n: Optional[int] = None) -> LieElement:
        n = self.level_of(e) if n is None else n
        if not 0 <= i <= n or n == 0:
            raise SimplicialError(f"face d_{i} undefined in dimension {n}")
        out = lie_morphism(e, self.faces[(n, i)], self.levels[n - 1])
        return LieElement(self.levels[n - 1], e.degree, out.terms)

    def degeneracy(self, j: int, e: LieElement, n: Optional[int] = None) -> LieElement:
        n = self.level_of(e) if n is None else n
        if not 0 <= j <= n:
            raise SimplicialError(f"degeneracy s_{j} undefined in dimension {n}")
        if n + 1 > self.simp_cutoff:
            raise SimplicialError(f"dimension {n + 1} exceeds simplicial cutoff {self.simp_cutoff}")
        out = lie_morphism(e, self.degens[(n, j)], self.levels[n + 1])
        return LieElement(self.levels[n + 1], e.degree, out.terms)

    # linear-simplicial interface used by the Moore complex
    def basis(self, n: int, s: int):
        return self.levels[n].basis_words(s)

    def dim(self, n: int, s: int) -> int:
        return len(self.levels[n].basis_words(s))

    def face_matrix(self, n: int, i: int, s: int) -> SparseMatrix:
        key = (n, i, s)
        m = self._face_mats.get(key)
        if m is None:
            src = self.levels[n]
            tgt_basis = self.levels[n - 1].basis_words(s)
            pos = {w: k for k, w in enumerate(tgt_basis)}
            ent = {}
            for j, w in enumerate(src.basis_words(s)):
                img = self.face(i, LieElement(src, s, {w: 1}), n)
                for t, c in img.terms.items():
                    ent[(pos[t], j)] = c
            m = self._face_mats[key] = SparseMatrix(len(tgt_basis), self.dim(n, s), ent)
        return m

    def vector(self, e: LieElement, s: int) -> List[Fraction]:
        return decompose(e, s)

    def element(self, n: int, s: int, vec) -> LieElement:
        return from_coordinates(self.levels[n], s, vec)

    def check_identities(self) -> List[str]:
        """Simplicial identities on generators of every level."""
        bad = []
        N = self.simp_cutoff
        for n, g in sorted(self.levels.items()):
            for k in range(len(g)):
                if g.degrees[k] > g.cutoff:
                    continue
                x = g.gen(k)
                name = g.names[k]
                if n >= 2:
                    for j in range(n + 1):
                        for i in range(j):
                            lhs = self.face(i, self.face(j, x, n), n - 1)
                            rhs = self.face(j - 1, self.face(i, x, n), n - 1)
                            if lhs != rhs:
                                bad.append(f"d{i}d{j} != d{j - 1}d{i} on {name} (dim {n})")
                if n + 1 <= N:
                    for j in range(n + 1):
                        sx = self.degeneracy(j, x, n)
                        for i in range(n + 2):
                            lhs = self.face(i, sx, n + 1)
                            if i < j:
                                rhs = self.degeneracy(j - 1, self.face(i, x, n), n - 1) if n >= 1 else None
                            elif i in (j, j + 1):
                                rhs = x
                            else:
                                rhs = self.degeneracy(j, self.face(i - 1, x, n), n - 1) if n >= 1 else None
                            if rhs is not None and lhs != rhs:
                                bad.append(f"d{i}s{j} identity fails on {name} (dim {n})")
                if n + 2 <= N:
                    for j in range(n + 1):
                        for i in range(j + 1):
                            lhs = self.degeneracy(i, self.degeneracy(j, x, n), n + 1)
                            rhs = self.degeneracy(j + 1, self.degeneracy(i, x, n), n + 1)
                            if lhs != rhs:
                                bad.append(f"s{i}s{j} != s{j + 1}s{i} on {name} (dim {n})")
        return bad


def shuffle_bracket(A: SimplicialGradedLie, x: LieElement, y: LieElement) -> LieElement:
    p = A.level_of(x)
    q = A.level_of(y)
    if p + q > A.simp_cutoff:
        raise SimplicialError(f"dimension {p + q} exceeds simplicial cutoff {A.simp_cutoff}")
    t = y.degree or 0
    target = A.levels[p + q]
    deg = None if x.degree is None or y.degree is None else x.degree + y.degree
    acc = target.zero(deg)
    if x.is_zero() or y.is_zero():
        return acc
    for sh, sign in shuffles(p, q):
        if (p * t) % 2:
            sign = -sign
        xs, dx = x, p
        for j in sh.tau:
            xs = A.degeneracy(j, xs, dx)
            dx += 1
        ys, dy = y, q
        for j in sh.sigma:
            ys = A.degeneracy(j, ys, dy)
            dy += 1
        acc = acc + sign * bracket(xs, ys)
    return acc


def shuffle_inner_faces_vanish(A: SimplicialGradedLie, x: LieElement, y: LieElement) -> bool:
    """Faces d_1..d_{p+q-1} kill the shuffle bracket of partially normalized inputs."""
    p, q = A.level_of(x), A.level_of(y)
    for i in range(1, p):
        if not A.face(i, x, p).is_zero():
            raise PreconditionError(f"d_{i} x is nonzero")
    for j in range(1, q):
        if not A.face(j, y, q).is_zero():
            raise PreconditionError(f"d_{j} y is nonzero")
    z = shuffle_bracket(A, x, y)
    return all(A.face(k, z, p + q).is_zero() for k in range(1, p + q))


def last_face_rule(A: SimplicialGradedLie, x: LieElement, y: LieElement, exact_signs: bool = False) -> bool:
    """Check d_{p+q}[[x,y]] = [[d_p x, y]] + (-1)^q [[x, d_q y]] exactly.

    With ``exact_signs`` the identity checked is the one the shuffle signs
    actually produce: d_{p+q}[[x,y]] = (-1)^(q+t) [[d_p x, y]] + [[x, d_q y]],
    t the internal degree of y.  The two agree when q and t are even.
    """
    p, q = A.level_of(x), A.level_of(y)
    if p + q == 0:
        return True
    lhs = A.face(p + q, shuffle_bracket(A, x, y), p + q)
    rhs = A.levels[p + q - 1].zero(lhs.degree)
    t = y.degree or 0
    first = (-1) ** (q + t) if exact_signs else 1
    second = 1 if exact_signs else (-1) ** q
    if p > 0:
        rhs = rhs + first * shuffle_bracket(A, A.face(p, x, p), y)
    if q > 0:
        rhs = rhs + second * shuffle_bracket(A, x, A.face(q, y, q))
    return lhs == rhs


# ---------------------------------------------------------------------------
# Moore complex


@dataclass
class MooreComplex:
    """C_{p,s} = common kernel of d_1..d_p with boundary (-1)^s d_0.

    ``basis[(p, s)]`` holds coordinate vectors in the ambient level basis;
    ``boundary[(p, s)]`` is the matrix C_{p,s} -> C_{p-1,s} in those bases.
    """

    basis: Dict[Tuple[int, int], List[List[Fraction]]] = field(default_factory=dict)
    boundary: Dict[Tuple[int, int], SparseMatrix] = field(default_factory=dict)
    simp_cutoff: int = 0
    deg_cutoff: int = 0

    def dim(self, p: int, s: int) -> int:
        return len(self.basis.get((p, s), ()))

    def square_zero(self) -> bool:
        for (p, s), m in self.boundary.items():
            prev = self.boundary.get((p - 1, s))
            if prev is not None and not prev.matmul(m).is_zero():
                return False
        return True


def _stack(mats: Sequence[SparseMatrix], cols: int) -> SparseMatrix:
    ent = {}
    off = 0
    for m in mats:
        for (r, c), v in m.entries.items():
            ent[(r + off, c)] = v
        off += m.rows
    return SparseMatrix(off, cols, ent)


def moore_basis(A, p: int, s: int) -> List[List[Fraction]]:
    dim = A.dim(p, s)
    if p == 0:
        return [[Fraction(int(i == j)) for i in range(dim)] for j in range(dim)]
    mats = [A.face_matrix(p, i, s) for i in range(1, p + 1)]
    return kernel_basis(_stack(mats, dim))


def moore(A, simp_cutoff: Optional[int] = None, deg_cutoff: Optional[int] = None,
          degrees: Optional[Sequence[int]] = None) -> MooreComplex:
    """Moore complex of any linear simplicial object exposing dim/face_matrix."""
    P = A.simp_cutoff if simp_cutoff is None else simp_cutoff
    S = A.deg_cutoff if deg_cutoff is None else deg_cutoff
    degs = list(degrees) if degrees is not None else list(range(0 if getattr(A, "has_degree_zero", False) else 1, S + 1))
    mc = MooreComplex(simp_cutoff=P, deg_cutoff=S)
    for s in degs:
        for p in range(P + 1):
            mc.basis[(p, s)] = moore_basis(A, p, s)
        for p in range(1, P + 1):
            d0 = A.face_matrix(p, 0, s)
            src = mc.basis[(p, s)]
            tgt = mc.basis[(p - 1, s)]
            sign = -1 if s % 2 else 1
            ent = {}
            for j, v in enumerate(src):
                img = [sign * c for c in d0.apply(v)]
                coeffs = in_span(img, tgt)
                if coeffs is None:
                    raise SimplicialError(f"d_0 leaves the Moore complex at ({p},{s})")
                for i, c in enumerate(coeffs):
                    if c:
                        ent[(i, j)] = c
            mc.boundary[(p, s)] = SparseMatrix(len(tgt), len(src), ent)
    return mc


def moore_elements(A: SimplicialGradedLie, mc: MooreComplex, p: int, s: int) -> List[LieElement]:
    return [A.element(p, s, v) for v in mc.basis.get((p, s), [])]


def moore_homology_dims(mc: MooreComplex) -> Dict[Tuple[int, int], int]:
    """dim ker(boundary at p) - rank(boundary at p+1); top dimension excluded."""
    from .exact_linear import rank
    out = {}
    for (p, s) in sorted(mc.basis):
        if p >= mc.simp_cutoff:
            continue
        dim = mc.dim(p, s)
        bp = mc.boundary.get((p, s))
        zp = dim - (rank(bp) if bp is not None else 0)
        bq = mc.boundary.get((p + 1, s))
        out[(p, s)] = zp - (rank(bq) if bq is not None else 0)
    return out


# ---------------------------------------------------------------------------
# Dold-Kan for bigraded vector spaces


@dataclass
class BigradedChainComplex:
    """dims[(p, s)] and boundary[(p, s)] : C_{p,s} -> C_{p-1,s}."""

    dims: Dict[Tuple[int, int], int]
    boundary: Dict[Tuple[int, int], SparseMatrix] = field(default_factory=dict)

    def d(self, p: int, s: int) -> SparseMatrix:
        m = self.boundary.get((p, s))
        if m is None:
            return SparseMatrix.zero(self.dims.get((p - 1, s), 0), self.dims.get((p, s), 0))
        return m

    def square_zero(self) -> bool:
        for (p, s) in self.boundary:
            if p >= 2 and not self.d(p - 1, s).matmul(self.d(p, s)).is_zero():
                return False
        return True


def surjections(n: int, k: int) -> List[Tuple[int, ...]]:
    """Order-preserving surjections [n] -> [k] as value tuples."""
    out = []
    # choose the k positions (out of 1..n) where the value increases
    for jumps in combinations(range(1, n + 1), k):
        vals = []
        cur = 0
        js = set(jumps)
        for i in range(n + 1):
            if i in js:
                cur += 1
            vals.append(cur)
        out.append(tuple(vals))
    return out


def degeneracy_indices(eta: Tuple[int, ...]) -> Tuple[int, ...]:
    """Index set I = (i_1 < ... < i_lambda) of positions where eta does not jump."""
    return tuple(i for i in range(len(eta) - 1) if eta[i] == eta[i + 1])


class GammaObject:
    """Gamma(C): in dimension n, one copy of C_{k,s} per surjection [n] -> [k].

    A surjection with lambda = n - k repeated values corresponds to a
    strictly increasing index set i_1 < ... < i_lambda < n.
    """

    has_degree_zero = True

    def __init__(self, C: BigradedChainComplex, simp_cutoff: int):
        self.C = C
        self.simp_cutoff = simp_cutoff
        self.degrees = sorted({s for (_, s) in C.dims})
        self.deg_cutoff = max(self.degrees) if self.degrees else 0
        self._labels: Dict[Tuple[int, int], List[Tuple[Tuple[int, ...], int]]] = {}

    def labels(self, n: int, s: int):
        key = (n, s)
        lab = self._labels.get(key)
        if lab is None:
            lab = []
            for k in range(n + 1):
                dk = self.C.dims.get((k, s), 0)
                for eta in surjections(n, k):
                    for b in range(dk):
                        lab.append((eta, b))
            self._labels[key] = lab
        return lab

    def dim(self, n: int, s: int) -> int:
        return len(self.labels(n, s))

    def _index(self, n, s):
        return {lab: i for i, lab in enumerate(self.labels(n, s))}

    def face_matrix(self, n: int, i: int, s: int) -> SparseMatrix:
        src = self.labels(n, s)
        pos = self._index(n - 1, s)
        ent = {}
        sign = -1 if s % 2 else 1
        for j, (eta, b) in enumerate(src):
            comp = eta[:i] + eta[i + 1:]  # eta composed with the coface missing i
            image = sorted(set(comp))
            k = eta[-1]
            if len(image) == k + 1:
                ent[(pos[(comp, b)], j)] = Fraction(1)
            elif len(image) == k and image[0] == 1:
                # factors through the coface missing 0: apply the chain differential
                eta2 = tuple(v - 1 for v in comp)
                col = self.C.d(k, s).column(b)
                for r, c in enumerate(col):
                    if c:
                        ent[(pos[(eta2, r)], j)] = ent.get((pos[(eta2, r)], j), 0) + sign * c
        return SparseMatrix(self.dim(n - 1, s), len(src), ent)

    def degeneracy_matrix(self, n: int, j: int, s: int) -> SparseMatrix:
        src = self.labels(n, s)
        pos = self._index(n + 1, s)
        ent = {}
        for c, (eta, b) in enumerate(src):
            comp = eta[: j + 1] + eta[j:]
            ent[(pos[(comp, b)], c)] = Fraction(1)
        return SparseMatrix(self.dim(n + 1, s), len(src), ent)

    def check_identities(self) -> bool:
        for s in self.degrees:
            for n in range(2, self.simp_cutoff + 1):
                for j in range(n + 1):
                    for i in range(j):
                        a = self.face_matrix(n - 1, i, s).matmul(self.face_matrix(n, j, s))
                        b = self.face_matrix(n - 1, j - 1, s).matmul(self.face_matrix(n, i, s))
                        if a.entries != b.entries:
                            return False
        return True


def gamma(C: BigradedChainComplex, simp_cutoff: int) -> GammaObject:
    return GammaObject(C, simp_cutoff)


def normalize_N(A: GammaObject) -> BigradedChainComplex:
    """Moore complex of a Gamma object, expressed on the identity summands.

    Raises if the Moore subspace differs from the span of the identity
    summands (which would break the round trip).
    """
    mc = moore(A, degrees=A.degrees)
    dims: Dict[Tuple[int, int], int] = {}
    bounds: Dict[Tuple[int, int], SparseMatrix] = {}
    for s in A.degrees:
        for p in range(A.simp_cutoff + 1):
            labels = A.labels(p, s)
            ident = tuple(range(p + 1))
            idx = [i for i, (eta, _) in enumerate(labels) if eta == ident]
            units = [[Fraction(int(r == i)) for r in range(len(labels))] for i in idx]
            basis = mc.basis[(p, s)]
            if len(basis) != len(units):
                raise SimplicialError(f"Moore dimension mismatch at ({p},{s})")
            for v in basis:
                if in_span(v, units) is None:
                    raise SimplicialError(f"Moore vector outside identity summand at ({p},{s})")
            dims[(p, s)] = len(units)
            if p >= 1:
                d0 = A.face_matrix(p, 0, s)
                sign = -1 if s % 2 else 1
                prev = [i for i, (eta, _) in enumerate(A.labels(p - 1, s)) if eta == tuple(range(p))]
                ent = {}
                for col, i in enumerate(idx):
                    img = d0.column(i)
                    for row, r in enumerate(prev):
                        if img[r]:
                            ent[(row, col)] = sign * img[r]
                bounds[(p, s)] = SparseMatrix(len(prev), len(idx), ent)
    return BigradedChainComplex(dims, bounds)


# ---------------------------------------------------------------------------
# face multi-indices


@dataclass(frozen=True)
class FaceMultiIndex:
    n: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        e = self.entries
        if any(a >= b for a, b in zip(e, e[1:])):
            raise ValueError("face multi-index must be strictly increasing")
        if e and (e[0] < 1 or e[-1] > self.n):
            raise ValueError("face multi-index entries must lie in 1..n")

    @property
    def s(self) -> int:
        return len(self.entries)


def face_multi_indices(n: int, s: int) -> List[FaceMultiIndex]:
    return [FaceMultiIndex(n, I) for I in combinations(range(1, n + 1), s)]


def deleted_vertices(n: int, faces_applied_first_to_last: Sequence[int]) -> Tuple[int, ...]:
    """Original vertices removed by applying face maps in the given order."""
    alive = list(range(n + 1))
    removed = []
    for k in faces_applied_first_to_last:
        if not 0 <= k < len(alive):
            raise ValueError(f"face d_{k} undefined")
        removed.append(alive.pop(k))
    return tuple(sorted(removed))


def kappa(I: FaceMultiIndex, j: int) -> Tuple[int, FaceMultiIndex]:
    """Unique k with d_k o d_{I without i_j} = d_I."""
    if not 1 <= j <= I.s:
        raise ValueError(f"position {j} out of range 1..{I.s}")
    rest = I.entries[: j - 1] + I.entries[j:]
    target = deleted_vertices(I.n, list(reversed(I.entries)))
    found = [k for k in range(I.n - I.s + 2)
             if deleted_vertices(I.n, list(reversed(rest)) + [k]) == target]
    if len(found) != 1:
        raise ValueError("face rewriting did not give a unique index")
    return found[0], FaceMultiIndex(I.n, rest)
