"""Bigraded, filtered and minimal models; coformality and first obstruction order.

Conventions used throughout:

* a bigraded generator x in filtration n with internal degree k has total
  degree n + k, and all Koszul signs use total degree;
* the bigraded differential preserves internal degree and lowers filtration
  by one; the perturbation component of index r lowers filtration by r + 1;
* the first nonzero perturbation of index r is reported as obstruction order
  n0 = r + 1 (so a first-order perturbation is a secondary operation).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .dgl import (
    DGL,
    DGLError,
    boundary_matrix,
    extend_derivation,
    homology_class,
    homology_degree,
    is_minimal,
    validate,
)
from .exact_linear import EchelonSpan, SparseMatrix, in_span, kernel_basis, rank
from .free_lie import (
    GeneratorSet,
    LieElement,
    bracket,
    decompose,
    format_element,
    from_coordinates,
    lie_morphism,
)

N0_CONVENTION = "first nonzero perturbation component d_r (r >= 1) gives n0 = r + 1"


class ModelError(ValueError):
    pass


class CutoffIncomplete(ModelError):
    pass


# ---------------------------------------------------------------------------
# graded Lie algebra targets


def class_name(rep: LieElement, fallback: str, used: set) -> str:
    """Reuse a generator's name when a class is represented by that generator alone."""
    name = None
    if len(rep.terms) == 1:
        (w, c), = rep.terms.items()
        if len(w) == 1 and c == 1:
            name = rep.gens.names[w[0]]
    if name is None or name in used:
        name = _fresh_name(fallback, used)
    used.add(name)
    return name


class GLPresentation:
    """Graded Lie algebra L(V)/(relations); relations must be decomposable."""

    def __init__(self, gens: GeneratorSet, relations: Sequence[LieElement] = ()):
        self.gens = gens
        self.relations = [r for r in relations if not r.is_zero()]
        for r in self.relations:
            if r.min_bracket_length() < 2:
                raise ModelError(
                    f"relation {format_element(r)} has a linear term; eliminate the generator first"
                )
            if r.degree > gens.cutoff:
                raise CutoffIncomplete(f"relation {format_element(r)} has degree {r.degree} beyond cutoff {gens.cutoff}")
        self._ideal: Dict[int, List[LieElement]] = {}

    def ideal(self, k: int) -> List[LieElement]:
        """Basis of the ideal generated by the relations in degree k."""
        cached = self._ideal.get(k)
        if cached is not None:
            return cached
        g = self.gens
        basis = g.basis_words(k)
        pos = {w: i for i, w in enumerate(basis)}
        span = EchelonSpan(len(basis))
        out: List[LieElement] = []

        def offer(e: LieElement):
            if e.is_zero():
                return
            vec = {pos[w]: c for w, c in e.terms.items()}
            if span.add(vec):
                out.append(e)

        for r in self.relations:
            if r.degree == k:
                offer(r)
        for i, d in enumerate(g.degrees):
            if d < k:
                for e in self.ideal(k - d):
                    offer(bracket(g.gen(i), e))
        self._ideal[k] = out
        return out

    def kernel_vectors(self, k: int) -> List[List[Fraction]]:
        return [decompose(e, k) for e in self.ideal(k)]

    def dim(self, k: int) -> int:
        return len(self.gens.basis_words(k)) - len(self.ideal(k))


class HomologyTarget:
    """H'(B) presented by a minimal generating set of cycle representatives."""

    def __init__(self, B: DGL, through: int):
        self.B = B
        self.through = through
        names: List[Tuple[str, int]] = []
        reps: List[LieElement] = []
        used = set()
        for k in range(1, through + 1):
            h = homology_degree(B, k)
            if h.betti == 0:
                continue
            # decomposable classes in degree k
            dec = EchelonSpan(h.betti)
            for i in range(1, k):
                for u in homology_degree(B, i).representatives:
                    for v in homology_degree(B, k - i).representatives:
                        e = bracket(u, v)
                        if not e.is_zero():
                            dec.add(homology_class(B, e))
            count = 0
            for idx, rep in enumerate(h.representatives):
                unit = [Fraction(int(j == idx)) for j in range(h.betti)]
                if dec.add(unit):
                    count += 1
                    reps.append(rep)
                    names.append((class_name(rep, f"h{k}_{count}", used), k))
        self.gens = GeneratorSet(names, through)
        self.representatives = reps
        self._kernel: Dict[int, List[List[Fraction]]] = {}

    def realize(self, e: LieElement) -> LieElement:
        out = lie_morphism(e, self.representatives, self.B.gens)
        return LieElement(self.B.gens, e.degree, out.terms)

    def kernel_vectors(self, k: int) -> List[List[Fraction]]:
        cached = self._kernel.get(k)
        if cached is None:
            basis = self.gens.basis_words(k)
            betti = homology_degree(self.B, k).betti
            cols = []
            for w in basis:
                img = self.realize(LieElement(self.gens, k, {w: 1}))
                cols.append(homology_class(self.B, img) if not img.is_zero() else [Fraction(0)] * betti)
            m = SparseMatrix.from_columns(cols, betti)
            cached = self._kernel[k] = kernel_basis(m)
        return cached

    def dim(self, k: int) -> int:
        return homology_degree(self.B, k).betti


# ---------------------------------------------------------------------------
# bigraded free Lie algebras


@dataclass
class BigradedModel:
    gens: GeneratorSet                     # total degrees
    filtration: Tuple[int, ...]
    components: Dict[int, Tuple[LieElement, ...]]  # r -> d_r on generators
    target: object
    deg_cutoff: int
    filt_cutoff: int
    incomplete: List[str] = field(default_factory=list)
    psi: Optional[Tuple[LieElement, ...]] = None  # images in a target DGL (filtered models)

    @property
    def names(self):
        return self.gens.names

    def internal_degree(self, i: int) -> int:
        return self.gens.degrees[i] - self.filtration[i]

    def word_filtration(self, w) -> int:
        return sum(self.filtration[i] for i in w)

    def bigraded_basis(self, n: int, k: int):
        total = n + k
        if total > self.gens.cutoff:
            return []
        return [w for w in self.gens.basis_words(total) if self.word_filtration(w) == n]

    def generators_at(self, n: int, k: int) -> List[int]:
        return [i for i in range(len(self.gens)) if self.filtration[i] == n and self.internal_degree(i) == k]

    def differential(self) -> Tuple[LieElement, ...]:
        out = []
        for i in range(len(self.gens)):
            acc = self.gens.zero(self.gens.degrees[i] - 1)
            for r in sorted(self.components):
                acc = acc + self.components[r][i]
            out.append(acc)
        return tuple(out)

    def perturbation_orders(self) -> List[int]:
        return sorted(r for r, vals in self.components.items()
                      if r >= 1 and any(not v.is_zero() for v in vals))

    def table(self) -> Dict[Tuple[int, int], List[str]]:
        out: Dict[Tuple[int, int], List[str]] = {}
        for i, name in enumerate(self.gens.names):
            out.setdefault((self.filtration[i], self.internal_degree(i)), []).append(name)
        return out


FilteredModel = BigradedModel


def associated_dgl(model: BigradedModel, perturbed: bool = True) -> DGL:
    if perturbed:
        diff = model.differential()
    else:
        diff = model.components[0]
    return DGL(model.gens, list(diff))


def _fresh_name(base: str, taken: set) -> str:
    name = base
    while name in taken:
        name = "_" + name
    return name


def bigraded_model(target, deg_cutoff: int, filt_cutoff: int, total_cutoff: Optional[int] = None) -> BigradedModel:
    """Bigraded model of a graded Lie algebra target, built degree by degree.

    Works one internal degree at a time: in internal degree k the new
    generators contribute only linearly, so killing homology filtration by
    filtration is exact linear algebra.
    """
    V = target.gens
    if deg_cutoff > V.cutoff:
        raise CutoffIncomplete(f"target known only through degree {V.cutoff}")
    if total_cutoff is None:
        total_cutoff = deg_cutoff + filt_cutoff + 1
    gens = GeneratorSet(list(zip(V.names, V.degrees)), total_cutoff)
    filtration: List[int] = [0] * len(V)
    diff: List[LieElement] = [gens.zero(d - 1) for d in V.degrees]
    taken = set(V.names)
    incomplete: List[str] = []

    def basis_nk(n, k):
        if n + k > total_cutoff:
            return []
        return [w for w in gens.basis_words(n + k) if sum(filtration[i] for i in w) == n]

    def d_matrix(src, tgt, degree):
        pos = {w: i for i, w in enumerate(tgt)}
        dgl = DGL(gens, diff)
        ent = {}
        for j, w in enumerate(src):
            img = extend_derivation(dgl, LieElement(gens, degree, {w: 1}))
            for t, c in img.terms.items():
                ent[(pos[t], j)] = c
        return SparseMatrix(len(tgt), len(src), ent)

    for k in range(1, deg_cutoff + 1):
        n = 0
        while True:
            An = basis_nk(n, k)
            An1 = basis_nk(n + 1, k)
            image = EchelonSpan(len(An))
            pos = {w: i for i, w in enumerate(An)}
            if An1:
                for col in d_matrix(An1, An, n + 1 + k).column_dicts():
                    image.add(col)
            if n == 0:
                vbasis = V.basis_words(k)
                candidates = []
                for vec in target.kernel_vectors(k):
                    e = {vbasis[i]: c for i, c in enumerate(vec) if c}
                    candidates.append({pos[w]: c for w, c in e.items()})
            else:
                An_1 = basis_nk(n - 1, k)
                dn = d_matrix(An, An_1, n + k) if An_1 else SparseMatrix(0, len(An), {})
                candidates = [{i: c for i, c in enumerate(v) if c} for v in kernel_basis(dn)]
            new_vals = []
            for cand in candidates:
                if image.add(cand):
                    new_vals.append(cand)
            if new_vals:
                if n + 1 + k > total_cutoff:
                    pass
                elif n + 1 > filt_cutoff:
                    incomplete.append(f"filtration {n + 1}, internal degree {k}: {len(new_vals)} generator(s) beyond cutoff")
                else:
                    new = []
                    for idx, vec in enumerate(new_vals, start=1):
                        base = f"u{n + 1}_{k}" if len(new_vals) == 1 else f"u{n + 1}_{k}_{idx}"
                        name = _fresh_name(base, taken)
                        taken.add(name)
                        new.append((name, n + 1 + k))
                    old_gens = gens
                    gens = gens.extended(new)
                    diff = [LieElement(gens, v.degree, v.terms) for v in diff]
                    for vec in new_vals:
                        diff.append(LieElement(gens, n + k, {An[i]: c for i, c in vec.items()}))
                        filtration.append(n + 1)
            # stop when nothing lives above this filtration in internal degree k
            if n + 1 > filt_cutoff or n + 1 + k > total_cutoff:
                break
            if not basis_nk(n + 1, k) and all(not basis_nk(m, k) for m in range(n + 2, filt_cutoff + 2)):
                break
            n += 1
    return BigradedModel(gens, tuple(filtration), {0: tuple(diff)}, target, deg_cutoff, filt_cutoff, incomplete)


def free_target(gens: GeneratorSet) -> GLPresentation:
    return GLPresentation(gens, [])


# ---------------------------------------------------------------------------
# morphisms and quasi-isomorphisms


@dataclass
class DGLMorphism:
    source: DGL
    target: DGL
    images: Tuple[LieElement, ...]

    def __call__(self, e: LieElement) -> LieElement:
        out = lie_morphism(e, self.images, self.target.gens)
        return LieElement(self.target.gens, e.degree, out.terms)

    def chain_map_defects(self) -> List[str]:
        bad = []
        for i, name in enumerate(self.source.gens.names):
            if self.source.gens.degrees[i] > self.target.cutoff:
                continue
            lhs = self(self.source.differential[i])
            rhs = extend_derivation(self.target, self.images[i])
            if lhs != rhs:
                bad.append(name)
        return bad


class NotAChainMap(ModelError):
    pass


def identity_morphism(d: DGL) -> DGLMorphism:
    return DGLMorphism(d, d, tuple(d.gens.gen(i) for i in range(len(d.gens))))


def verify_quasi_iso(m: DGLMorphism, through: int) -> bool:
    bad = m.chain_map_defects()
    if bad:
        raise NotAChainMap(f"morphism does not commute with differentials on {', '.join(bad)}")
    for n in range(1, through + 1):
        hs = homology_degree(m.source, n)
        ht = homology_degree(m.target, n)
        if hs.betti != ht.betti:
            return False
        if hs.betti == 0:
            continue
        cols = [homology_class(m.target, m(r)) for r in hs.representatives]
        if rank(SparseMatrix.from_columns(cols, ht.betti)) != ht.betti:
            return False
    return True


def verify_bigraded_model(model: BigradedModel) -> Dict[str, bool]:
    """Decomposability, square zero, and homology = target in filtration 0 only."""
    dgl = associated_dgl(model, perturbed=False)
    decomposable = is_minimal(dgl)
    square_zero = not validate(dgl)
    quasi = True
    V = model.target.gens
    for k in range(1, model.deg_cutoff + 1):
        for n in range(0, model.filt_cutoff):
            if n + 1 + k > model.gens.cutoff:
                # no room for the killing generators: outside the constructed range
                continue
            An = model.bigraded_basis(n, k)
            An1 = model.bigraded_basis(n + 1, k)
            pos = {w: i for i, w in enumerate(An)}
            image = EchelonSpan(len(An))
            for w in An1:
                img = extend_derivation(dgl, LieElement(model.gens, None, {w: 1}))
                image.add({pos[t]: c for t, c in img.terms.items()})
            if n == 0:
                # boundaries must be exactly the kernel of A_0 -> target
                vbasis = V.basis_words(k)
                ker = model.target.kernel_vectors(k)
                if len(image) != len(ker):
                    quasi = False
                for vec in ker:
                    e = {pos[vbasis[i]]: c for i, c in enumerate(vec) if c}
                    if not image.contains(e):
                        quasi = False
            else:
                cycles = EchelonSpan(len(An))
                An_1 = model.bigraded_basis(n - 1, k)
                tpos = {w: i for i, w in enumerate(An_1)}
                ent = {}
                for j, w in enumerate(An):
                    img = extend_derivation(dgl, LieElement(model.gens, None, {w: 1}))
                    for t, c in img.terms.items():
                        ent[(tpos[t], j)] = c
                z = len(An) - rank(SparseMatrix(len(An_1), len(An), ent))
                if z != len(image):
                    quasi = False
    return {"decomposable": decomposable, "square_zero": square_zero, "quasi_isomorphism": quasi}


# ---------------------------------------------------------------------------
# filtered models


def filtered_model(B: DGL, filt_cutoff: int) -> BigradedModel:
    """Perturb the bigraded model of H'(B) into a model of B.

    Generators are processed by total degree ascending, then filtration
    descending.  For a generator x of filtration n with u = d_0 x we solve
    the linear system  D(u + c) = 0,  psi(u + c) = d_B y  for c in filtration
    <= n - 2 and y in B, preferring y and high-filtration corrections.
    """
    if validate(B):
        raise ModelError("target does not satisfy d^2 = 0")
    through = B.cutoff - 1
    H = HomologyTarget(B, through)
    bg = bigraded_model(H, through, filt_cutoff, B.cutoff)
    g = bg.gens
    keep = [i for i in range(len(g)) if g.degrees[i] <= B.cutoff]
    if len(keep) != len(g):
        # drop generators past the total-degree range of B; they only index higher words
        names = [(g.names[i], g.degrees[i]) for i in keep]
        g2 = GeneratorSet(names, B.cutoff)
        remap = {i: j for j, i in enumerate(keep)}
        def move(e):
            return LieElement(g2, e.degree, {tuple(remap[a] for a in w): c for w, c in e.terms.items()})
        d0 = [move(bg.components[0][i]) for i in keep]
        filt = tuple(bg.filtration[i] for i in keep)
        g = g2
    else:
        g = GeneratorSet(list(zip(g.names, g.degrees)), B.cutoff)
        d0 = [LieElement(g, v.degree, v.terms) for v in bg.components[0]]
        filt = bg.filtration
    order = sorted(range(len(g)), key=lambda i: (g.degrees[i], -filt[i], i))
    D: List[Optional[LieElement]] = [None] * len(g)
    psi: List[Optional[LieElement]] = [None] * len(g)
    comps: Dict[int, List[LieElement]] = {0: list(d0)}
    reps = H.representatives
    name_to_rep = dict(zip(H.gens.names, reps))

    def wfilt(w):
        return sum(filt[i] for i in w)

    for i in order:
        n = filt[i]
        deg = g.degrees[i]
        if n == 0:
            D[i] = g.zero(deg - 1)
            psi[i] = name_to_rep[g.names[i]]
            continue
        # the current partial DGL and morphism use zeros for unprocessed generators
        cur = DGL(g, [v if v is not None else g.zero(g.degrees[j] - 1) for j, v in enumerate(D)])
        images = [v if v is not None else B.gens.zero(g.degrees[j]) for j, v in enumerate(psi)]

        def apply_psi(e):
            out = lie_morphism(e, images, B.gens)
            return LieElement(B.gens, e.degree, out.terms)

        u = d0[i]
        Du = extend_derivation(cur, u)
        psu = apply_psi(u)
        # unknown columns: y in B_deg, then c-monomials of filtration n-2, n-3, ..., 0
        Bbasis = B.gens.basis_words(deg)
        cwords = [w for w in g.basis_words(deg - 1) if wfilt(w) <= n - 2]
        cwords.sort(key=lambda w: (-wfilt(w),))
        Abasis2 = g.basis_words(deg - 2) if deg - 2 >= 1 else []
        Bbasis1 = B.gens.basis_words(deg - 1)
        posA = {w: j for j, w in enumerate(Abasis2)}
        posB = {w: len(Abasis2) + j for j, w in enumerate(Bbasis1)}
        rows = len(Abasis2) + len(Bbasis1)
        columns = []
        for w in Bbasis:
            dy = extend_derivation(B, LieElement(B.gens, deg, {w: 1}))
            col = [Fraction(0)] * rows
            for t, c in dy.terms.items():
                col[posB[t]] = -c
            columns.append(col)
        for w in cwords:
            e = LieElement(g, deg - 1, {w: 1})
            col = [Fraction(0)] * rows
            for t, c in extend_derivation(cur, e).terms.items():
                col[posA[t]] += c
            for t, c in apply_psi(e).terms.items():
                col[posB[t]] += c
            columns.append(col)
        rhs = [Fraction(0)] * rows
        for t, c in Du.terms.items():
            rhs[posA[t]] -= c
        for t, c in psu.terms.items():
            rhs[posB[t]] -= c
        sol = in_span(rhs, columns)
        if sol is None:
            raise ModelError(f"perturbation solve failed for generator {g.names[i]} in total degree {deg}")
        y = LieElement(B.gens, deg, {w: sol[j] for j, w in enumerate(Bbasis) if sol[j]})
        off = len(Bbasis)
        cterms = {w: sol[off + j] for j, w in enumerate(cwords) if sol[off + j]}
        D[i] = u + LieElement(g, deg - 1, cterms)
        psi[i] = y
        for w, c in cterms.items():
            r = n - 1 - wfilt(w)
            comps.setdefault(r, [g.zero(g.degrees[j] - 1) for j in range(len(g))])
            comps[r][i] = comps[r][i] + LieElement(g, deg - 1, {w: c})
    model = BigradedModel(
        g, tuple(filt), {r: tuple(v) for r, v in comps.items()}, H, through, filt_cutoff,
        list(bg.incomplete), tuple(psi),
    )
    model.base = B
    return model


def structure_morphism(model: BigradedModel) -> DGLMorphism:
    return DGLMorphism(associated_dgl(model), model.base, model.psi)


# ---------------------------------------------------------------------------
# minimal models


def minimal_model(B: DGL) -> Tuple[DGL, DGLMorphism]:
    """Free DGL with decomposable differential and a quasi-isomorphism to B
    through degree cutoff - 1, by generator adjunction one degree at a time."""
    if validate(B):
        raise ModelError("target does not satisfy d^2 = 0")
    if is_minimal(B):
        return B, identity_morphism(B)
    cutoff = B.cutoff
    gens = GeneratorSet([], cutoff)
    diff: List[LieElement] = []
    images: List[LieElement] = []
    taken: set = set()
    pending: List[Tuple[str, Dict, LieElement]] = []  # killers of the next degree

    def adjoin(k, named_values, imgs):
        nonlocal gens, diff, images
        gens = gens.extended([(name, k) for name, _ in named_values])
        diff = [LieElement(gens, v.degree, v.terms) for v in diff]
        diff += [LieElement(gens, k - 1, terms) for _, terms in named_values]
        images += imgs

    for k in range(1, cutoff):
        if pending:
            adjoin(k, [(name, terms) for name, terms, _ in pending], [y for _, _, y in pending])
            pending = []
        M = DGL(gens, diff)
        phi = DGLMorphism(M, B, tuple(images))
        # cokernel of H_k(M) -> H_k(B): new cycle generators
        hB = homology_degree(B, k)
        img_span = EchelonSpan(hB.betti)
        for r in homology_degree(M, k).representatives:
            img_span.add(homology_class(B, phi(r)))
        fresh = []
        for idx, rep in enumerate(hB.representatives):
            unit = [Fraction(int(j == idx)) for j in range(hB.betti)]
            if img_span.add(unit):
                fresh.append(rep)
        if fresh:
            named = []
            for idx, rep in enumerate(fresh, start=1):
                named.append((class_name(rep, f"m{k}" if len(fresh) == 1 else f"m{k}_{idx}", taken), {}))
            adjoin(k, named, fresh)
            M = DGL(gens, diff)
            phi = DGLMorphism(M, B, tuple(images))
        # kernel of H_k(M) -> H_k(B): killers in degree k + 1
        hM = homology_degree(M, k)
        if not hM.betti:
            continue
        cols = [homology_class(B, phi(r)) for r in hM.representatives]
        ker = kernel_basis(SparseMatrix.from_columns(cols, hB.betti))
        dB = boundary_matrix(B, k + 1)
        dB_cols = [dB.column(j) for j in range(dB.cols)]
        for idx, vec in enumerate(ker, start=1):
            kappa = gens.zero(k)
            for c, r in zip(vec, hM.representatives):
                kappa = kappa + c * r
            sol = in_span(decompose(phi(kappa), k), dB_cols)
            if sol is None:
                raise ModelError(f"kernel class in degree {k} does not map to a boundary")
            name = _fresh_name(f"m{k + 1}_k" if len(ker) == 1 else f"m{k + 1}_k{idx}", taken)
            taken.add(name)
            pending.append((name, dict(kappa.terms), from_coordinates(B.gens, k + 1, sol)))
    if pending:
        adjoin(cutoff, [(name, terms) for name, terms, _ in pending], [y for _, _, y in pending])
    M = DGL(gens, diff)
    return M, DGLMorphism(M, B, tuple(images))


# ---------------------------------------------------------------------------
# coformality


@dataclass
class ObstructionReport:
    coformal: bool
    n0: Optional[int]
    classes: List[Dict]
    convention: str = N0_CONVENTION
    incomplete: List[str] = field(default_factory=list)


def coformal_check(B: DGL, filt_cutoff: int) -> ObstructionReport:
    model = filtered_model(B, filt_cutoff)
    orders = model.perturbation_orders()
    if not orders:
        return ObstructionReport(True, None, [], incomplete=model.incomplete)
    r = orders[0]
    classes = []
    g = model.gens
    for i, v in enumerate(model.components[r]):
        if v.is_zero():
            continue
        entry = {
            "generator": g.names[i],
            "filtration": model.filtration[i],
            "internal_degree": model.internal_degree(i),
            "component": r,
            "value": format_element(v),
        }
        if model.filtration[i] - r - 1 == 0:
            img = lie_morphism(v, model.psi, B.gens)
            img = LieElement(B.gens, v.degree, img.terms)
            coords = homology_class(B, img) if not img.is_zero() else []
            entry["homology_class"] = {str(j): str(c) for j, c in enumerate(coords) if c}
        classes.append(entry)
    return ObstructionReport(False, r + 1, classes, incomplete=model.incomplete)
