"""Non-associative graded algebras, symmetrized products, and the lambda_3 / lambda_4 calculus.

Monomials are nested tuples:

* ``("g", i)``          generator i
* ``("*", a, b)``       the raw product a . b
* ``("L3", a, b, c)``   lambda_3(a, b, c), homological level 1
* ``("L4", a, b, c, d)`` lambda_4(a, b, c, d), homological level 2

All signs use the total degree (internal degree plus homological level).
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exact_linear import EchelonSpan, QuotientCoordinates, SparseMatrix, kernel_basis

Monomial = tuple
LAMBDA_SHIFT = {"L3": 1, "L4": 2}
LAMBDA4_VARIANTS = ("w", "z")


class JacobiError(ValueError):
    pass


class NASignature:
    """Generator names and degrees of a free non-associative algebra."""

    def __init__(self, generators: Sequence[Tuple[str, int]]):
        names = [n for n, _ in generators]
        if len(set(names)) != len(names):
            raise JacobiError("duplicate generator names")
        for n, d in generators:
            if d < 1:
                raise JacobiError(f"generator {n} has degree {d}; degrees must be at least 1")
        self.names = tuple(names)
        self.degrees = tuple(d for _, d in generators)
        self.index = {n: i for i, n in enumerate(names)}
        self._deg: Dict[Monomial, int] = {}
        self._key: Dict[Monomial, tuple] = {}

    def __len__(self):
        return len(self.names)

    def degree(self, m: Monomial) -> int:
        hit = self._deg.get(m)
        if hit is None:
            if m[0] == "g":
                hit = self.degrees[m[1]]
            else:
                hit = sum(self.degree(a) for a in m[1:]) + LAMBDA_SHIFT.get(m[0], 0)
            self._deg[m] = hit
        return hit

    def level(self, m: Monomial) -> int:
        if m[0] == "g":
            return 0
        return sum(self.level(a) for a in m[1:]) + LAMBDA_SHIFT.get(m[0], 0)

    def key(self, m: Monomial) -> tuple:
        """Total order: degree, then kind, then children."""
        hit = self._key.get(m)
        if hit is None:
            kind = {"g": 0, "*": 1, "L3": 2, "L4": 3}[m[0]]
            if m[0] == "g":
                hit = (self.degree(m), kind, m[1])
            else:
                hit = (self.degree(m), kind) + tuple(self.key(a) for a in m[1:])
            self._key[m] = hit
        return hit

    def gen(self, name_or_index) -> "NAElement":
        i = self.index[name_or_index] if isinstance(name_or_index, str) else name_or_index
        return NAElement(self, {("g", i): Fraction(1)})

    def format(self, m: Monomial) -> str:
        if m[0] == "g":
            return self.names[m[1]]
        if m[0] == "*":
            return f"({self.format(m[1])}.{self.format(m[2])})"
        return "λ" + m[0][1] + "(" + ",".join(self.format(a) for a in m[1:]) + ")"


class NAElement:
    __slots__ = ("sig", "terms")

    def __init__(self, sig: NASignature, terms: Mapping[Monomial, Fraction]):
        self.sig = sig
        self.terms = {m: Fraction(c) for m, c in terms.items() if c}

    @property
    def degree(self) -> Optional[int]:
        degs = {self.sig.degree(m) for m in self.terms}
        if len(degs) > 1:
            raise JacobiError("inhomogeneous element")
        return degs.pop() if degs else None

    def is_homogeneous(self) -> bool:
        return len({self.sig.degree(m) for m in self.terms}) <= 1

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "NAElement") -> "NAElement":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return NAElement(self.sig, out)

    def __neg__(self):
        return NAElement(self.sig, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        return NAElement(self.sig, {m: c * v for m, v in self.terms.items()})

    __mul__ = __rmul__

    def __eq__(self, other):
        return isinstance(other, NAElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=self.sig.key):
            c = self.terms[m]
            coef = "" if c == 1 else "-" if c == -1 else f"{c}*"
            parts.append(coef + self.sig.format(m))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def zero(sig: NASignature) -> NAElement:
    return NAElement(sig, {})


def _multilinear(node: str, args: Sequence[NAElement]) -> NAElement:
    sig = args[0].sig
    out: Dict[Monomial, Fraction] = {}
    for combo in itertools.product(*(a.terms.items() for a in args)):
        c = Fraction(1)
        ms = []
        for m, v in combo:
            c *= v
            ms.append(m)
        key = (node,) + tuple(ms)
        out[key] = out.get(key, 0) + c
    return NAElement(sig, out)


def product(x: NAElement, y: NAElement) -> NAElement:
    """The raw, unsymmetrized product x . y."""
    return _multilinear("*", [x, y])


def lam3(x, y, z) -> NAElement:
    return _multilinear("L3", [x, y, z])


def lam4(x, y, z, w) -> NAElement:
    return _multilinear("L4", [x, y, z, w])


def _pairs_by_degree(e: NAElement):
    out: Dict[int, Dict[Monomial, Fraction]] = {}
    for m, c in e.terms.items():
        out.setdefault(e.sig.degree(m), {})[m] = c
    return [(d, NAElement(e.sig, t)) for d, t in out.items()]


def symmetrized(x: NAElement, y: NAElement) -> NAElement:
    """[x,y] = 1/2 (x.y + (-1)^(|x||y|+1) y.x), extended bilinearly over homogeneous parts."""
    acc = zero(x.sig)
    for p, xp in _pairs_by_degree(x):
        for q, yq in _pairs_by_degree(y):
            sign = 1 if (p * q + 1) % 2 == 0 else -1
            acc = acc + Fraction(1, 2) * (product(xp, yq) + sign * product(yq, xp))
    return acc


# ---------------------------------------------------------------------------
# Koszul signs


def koszul_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign with lambda(args[perm[0]], args[perm[1]], ...) = sign * lambda(args).

    Each adjacent transposition of slots with degrees a, b contributes
    (-1)^(a b + 1).
    """
    if sorted(perm) != list(range(len(degrees))):
        raise JacobiError("not a permutation of the slots")
    current = list(range(len(degrees)))
    target = list(perm)
    sign = 1
    # bubble the target order into place, tracking the degrees that swap
    pos = current[:]
    for i in range(len(target)):
        j = pos.index(target[i], i)
        while j > i:
            a, b = degrees[pos[j - 1]], degrees[pos[j]]
            if (a * b + 1) % 2:
                sign = -sign
            pos[j - 1], pos[j] = pos[j], pos[j - 1]
            j -= 1
    return sign


# ---------------------------------------------------------------------------
# canonical forms in the graded-anticommutative quotient


def _canonical_monomial(sig: NASignature, m: Monomial) -> Tuple[int, Optional[Monomial]]:
    if m[0] == "g":
        return 1, m
    sign = 1
    kids = []
    for a in m[1:]:
        s, ca = _canonical_monomial(sig, a)
        if ca is None:
            return 0, None
        sign *= s
        kids.append(ca)
    degs = [sig.degree(a) for a in kids]
    order = sorted(range(len(kids)), key=lambda i: sig.key(kids[i]))
    sign *= koszul_sign(order, degs)
    ordered = [kids[i] for i in order]
    for a, b in zip(ordered, ordered[1:]):
        if a == b and (sig.degree(a) ** 2 + 1) % 2:
            return 0, None
    return sign, (m[0],) + tuple(ordered)


def canonical(e: NAElement) -> NAElement:
    """Project to the free graded-anticommutative algebra with Koszul-equivariant lambda nodes."""
    out: Dict[Monomial, Fraction] = {}
    for m, c in e.terms.items():
        s, cm = _canonical_monomial(e.sig, m)
        if cm is not None:
            out[cm] = out.get(cm, 0) + s * c
    return NAElement(e.sig, out)


# ---------------------------------------------------------------------------
# lambda boundaries


def jacobiator(x: NAElement, y: NAElement, z: NAElement) -> NAElement:
    """[x,[y,z]] - [[x,y],z] + (-1)^(qr) [[x,z],y]."""
    q, r = y.degree, z.degree
    sign = -1 if (q * r) % 2 else 1
    return (symmetrized(x, symmetrized(y, z)) - symmetrized(symmetrized(x, y), z)
            + sign * symmetrized(symmetrized(x, z), y))


lambda3_boundary = jacobiator


def lambda4_boundary(x, y, z, w, variant: str = "w", verbatim: bool = False) -> NAElement:
    """Boundary of lambda_4 in terms of lambda_3 nodes.

    ``variant`` chooses the first lambda_3 argument list of the third group:
    "w" reads lambda_3([x,z], y, w); "z" reads lambda_3([x,z], y, z).
    The term [x, lambda_3(y,z,w)] carries the Koszul factor (-1)^|x| picked up
    when the differential passes x; ``verbatim`` drops it.
    """
    if variant not in LAMBDA4_VARIANTS:
        raise JacobiError(f"unknown variant {variant!r}")
    p, q, r, s = x.degree, y.degree, z.degree, w.degree

    def sg(n):
        return -1 if n % 2 else 1

    S = symmetrized
    third = lam3(S(x, z), y, w if variant == "w" else z)
    first = 1 if verbatim else sg(p)
    return (first * S(x, lam3(y, z, w)) + S(lam3(x, y, z), w)
            - sg(r * s) * S(lam3(x, y, w), z)
            + sg(q * (r + s)) * S(lam3(x, z, w), y)
            - (lam3(S(x, y), z, w) + lam3(x, y, S(z, w)))
            + sg(q * r) * (third + lam3(x, z, S(y, w)))
            - sg(s * (q + r)) * (lam3(S(x, w), y, z) + lam3(x, w, S(y, z))))


# ---------------------------------------------------------------------------
# differentials


class NADifferential:
    """Derivation on the free algebra from generator values and the lambda boundary rules."""

    def __init__(self, sig: NASignature, on_generators: Sequence[NAElement], variant: str = "w",
                 verbatim: bool = False):
        if len(on_generators) != len(sig):
            raise JacobiError("one differential value per generator is required")
        for i, v in enumerate(on_generators):
            if v.terms and v.degree != sig.degrees[i] - 1:
                raise JacobiError(f"differential of {sig.names[i]} has the wrong degree")
        self.sig = sig
        self.values = list(on_generators)
        self.variant = variant
        self.verbatim = verbatim
        self._memo: Dict[Monomial, NAElement] = {}

    def monomial(self, m: Monomial) -> NAElement:
        hit = self._memo.get(m)
        if hit is not None:
            return hit
        sig = self.sig
        if m[0] == "g":
            out = self.values[m[1]]
        elif m[0] == "*":
            a, b = (NAElement(sig, {t: 1}) for t in m[1:])
            sign = -1 if sig.degree(m[1]) % 2 else 1
            out = product(self.monomial(m[1]), b) + sign * product(a, self.monomial(m[2]))
        else:
            args = [NAElement(sig, {t: 1}) for t in m[1:]]
            if m[0] == "L3":
                out = lambda3_boundary(*args)
                node, passing = lam3, -1
            else:
                out = lambda4_boundary(*args, variant=self.variant, verbatim=self.verbatim)
                node, passing = lam4, 1
            # Koszul terms from the argument differentials
            acc = 0
            for k, a in enumerate(m[1:]):
                da = self.monomial(a)
                if da.terms:
                    moved = args[:k] + [da] + args[k + 1:]
                    sign = passing * (-1 if acc % 2 else 1)
                    out = out + sign * node(*moved)
                acc += sig.degree(a)
        self._memo[m] = out
        return out

    def __call__(self, e: NAElement) -> NAElement:
        acc = zero(self.sig)
        for m, c in e.terms.items():
            acc = acc + c * self.monomial(m)
        return acc


def square_zero_on(d: NADifferential, e: NAElement, in_quotient: bool = False) -> bool:
    dd = d(d(e))
    if in_quotient:
        dd = canonical(dd)
    return dd.is_zero()


def lambda4_variant_check(degrees: Sequence[int], variant: str, verbatim: bool = False) -> bool:
    """d(d(lambda_4)) = 0 on four distinct cycle generators of the given degrees."""
    sig = NASignature([(f"x{i}", d) for i, d in enumerate(degrees)])
    d = NADifferential(sig, [zero(sig)] * 4, variant, verbatim)
    e = lam4(*(sig.gen(i) for i in range(4)))
    try:
        return square_zero_on(d, e)
    except JacobiError:
        return False


def resolve_lambda4_variant(degree_samples: Iterable[Sequence[int]], verbatim: bool = False) -> Dict[str, bool]:
    samples = [tuple(s) for s in degree_samples]
    return {v: all(lambda4_variant_check(s, v, verbatim) for s in samples) for v in LAMBDA4_VARIANTS}


# ---------------------------------------------------------------------------
# differential graded non-associative algebras


class DGNA:
    """Free graded-anticommutative algebra on atoms with a derivation, truncated at a degree cutoff.

    Atoms are generators and (for Jacobi levels) lambda nodes on level-0 monomials.
    """

    def __init__(self, sig: NASignature, atoms: Sequence[Monomial], differential: NADifferential, cutoff: int):
        self.sig = sig
        self.atoms = sorted(set(atoms), key=sig.key)
        self.d = differential
        self.cutoff = cutoff
        self._basis: Dict[int, List[Monomial]] = {}
        self._homology: Dict = {}

    def basis(self, n: int) -> List[Monomial]:
        hit = self._basis.get(n)
        if hit is None:
            sig = self.sig
            out = [a for a in self.atoms if sig.degree(a) == n]
            for a in range(1, n):
                for u in self.basis(a):
                    for v in self.basis(n - a):
                        ku, kv = sig.key(u), sig.key(v)
                        if ku < kv or (u == v and sig.degree(u) % 2 == 1):
                            out.append(("*", u, v))
            hit = self._basis[n] = sorted(out, key=sig.key)
        return hit

    def element(self, m: Monomial) -> NAElement:
        return NAElement(self.sig, {m: 1})

    def boundary_matrix(self, n: int) -> SparseMatrix:
        key = ("bd", n)
        hit = self._homology.get(key)
        if hit is None:
            src = self.basis(n)
            tgt = self.basis(n - 1) if n > 1 else []
            pos = {m: i for i, m in enumerate(tgt)}
            ent = {}
            for j, m in enumerate(src):
                img = canonical(self.d(self.element(m)))
                for t, c in img.terms.items():
                    if t not in pos:
                        raise JacobiError(f"boundary of {self.sig.format(m)} leaves the algebra")
                    ent[(pos[t], j)] = c
            hit = self._homology[key] = SparseMatrix(len(tgt), len(src), ent)
        return hit

    def square_zero(self) -> List[str]:
        bad = []
        for n in range(2, self.cutoff + 1):
            d1 = self.boundary_matrix(n)
            d0 = self.boundary_matrix(n - 1)
            if d0.cols and not d0.matmul(d1).is_zero():
                bad.append(f"degree {n}")
        return bad

    def homology(self, n: int):
        """(representatives as elements, class reader) in degree n < cutoff."""
        key = ("h", n)
        hit = self._homology.get(key)
        if hit is None:
            if n + 1 > self.cutoff:
                raise JacobiError(f"homology in degree {n} needs cutoff {n + 1}")
            dim = len(self.basis(n))
            out = self.boundary_matrix(n)
            inn = self.boundary_matrix(n + 1)
            bounds = inn.column_dicts()
            span = EchelonSpan(dim)
            for b in bounds:
                span.add(b)
            reps = [z for z in kernel_basis(out) if span.add(z)] if dim else []
            basis = self.basis(n)
            elems = [NAElement(self.sig, {basis[i]: c for i, c in enumerate(z) if c}) for z in reps]
            hit = self._homology[key] = (elems, QuotientCoordinates(dim, bounds, reps))
        return hit

    def is_boundary(self, e: NAElement) -> bool:
        e = canonical(e)
        if e.is_zero():
            return True
        n = e.degree
        basis = self.basis(n)
        pos = {m: i for i, m in enumerate(basis)}
        vec = {pos[m]: c for m, c in e.terms.items()}
        span = self._homology.get(("span", n))
        if span is None:
            span = self._homology[("span", n)] = EchelonSpan(len(basis))
            for b in self.boundary_matrix(n + 1).column_dicts():
                span.add(b)
        return span.contains(vec)


def free_na(sig: NASignature, cutoff: int, differential: Optional[Sequence[NAElement]] = None) -> DGNA:
    values = list(differential) if differential is not None else [zero(sig)] * len(sig)
    d = NADifferential(sig, values)
    return DGNA(sig, [("g", i) for i in range(len(sig))], d, cutoff)


def _lambda_atoms(level0: DGNA, arity: int, node: str, cutoff: int) -> List[Monomial]:
    sig = level0.sig
    budget = cutoff - LAMBDA_SHIFT[node]
    pool = sorted((m for n in range(1, budget - arity + 2) for m in level0.basis(n)), key=sig.key)
    out = []

    def extend(start, chosen, left):
        if len(chosen) == arity:
            s, cm = _canonical_monomial(sig, (node,) + tuple(chosen))
            if cm is not None:
                out.append(cm)
            return
        for i in range(start, len(pool)):
            d = sig.degree(pool[i])
            if d + (arity - len(chosen) - 1) <= left:
                extend(i, chosen + [pool[i]], left - d)

    extend(0, [], budget)
    return out


def free_jacobi_level(sig: NASignature, level: int, cutoff: int,
                      differential: Optional[Sequence[NAElement]] = None, variant: str = "w") -> DGNA:
    """Levels 0-2 of the free Jacobi algebra on a chain complex of generators."""
    if level not in (0, 1, 2):
        raise JacobiError("only levels 0, 1 and 2 are constructed")
    values = list(differential) if differential is not None else [zero(sig)] * len(sig)
    level0 = DGNA(sig, [("g", i) for i in range(len(sig))], NADifferential(sig, values, variant), cutoff)
    atoms = list(level0.atoms)
    if level >= 1:
        atoms += _lambda_atoms(level0, 3, "L3", cutoff)
    if level >= 2:
        atoms += _lambda_atoms(level0, 4, "L4", cutoff)
    return DGNA(sig, atoms, NADifferential(sig, values, variant), cutoff)


def is_jacobi(algebra, cutoff: Optional[int] = None) -> bool:
    """Antisymmetry and Jacobi on homology representatives, modulo boundaries."""
    from .dgl import DGL
    if isinstance(algebra, DGL):
        return True
    cutoff = algebra.cutoff if cutoff is None else min(cutoff, algebra.cutoff)
    reps = {n: algebra.homology(n)[0] for n in range(1, cutoff)}
    for a in range(1, cutoff):
        for b in range(1, cutoff - a):
            for x in reps[a]:
                for y in reps[b]:
                    lhs = symmetrized(x, y)
                    sign = 1 if (a * b + 1) % 2 == 0 else -1
                    if not algebra.is_boundary(canonical(lhs) - sign * canonical(symmetrized(y, x))):
                        return False
            for c in range(1, cutoff - a - b):
                for x in reps[a]:
                    for y in reps[b]:
                        for z in reps[c]:
                            if not algebra.is_boundary(canonical(jacobiator(x, y, z))):
                                return False
    return True
