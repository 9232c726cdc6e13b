"""Free graded Lie algebras over Q.

A graded Lie monomial is identified with a word in the generator indices:

* a Lyndon word ``w`` stands for its standard bracketing ``P(w)``;
* a word ``u + u`` with ``u`` Lyndon of odd degree stands for ``[P(u), P(u)]``.

Together these form a basis of the free graded Lie algebra in characteristic 0.
The embedding into the tensor algebra, ``[x, y] -> x*y - (-1)^{|x||y|} y*x``,
is injective and sends each basis monomial to its own word plus
lexicographically larger words, so any element of the tensor algebra that is
a Lie element decomposes by peeling off the smallest word.  Brackets are
computed this way and cached per monomial pair.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

Word = Tuple[int, ...]
Tensor = Dict[Word, Fraction]
Scalar = Union[int, Fraction]


class CutoffExceeded(ValueError):
    pass


class GeneratorError(ValueError):
    pass


class NotALieElement(ValueError):
    pass


# ---------------------------------------------------------------------------
# words


def is_lyndon(w: Word) -> bool:
    n = len(w)
    if n == 0:
        return False
    for i in range(1, n):
        if w[i:] + w[:i] <= w:
            return False
    return True


def standard_factorization(w: Word) -> Tuple[Word, Word]:
    # right factor: longest proper Lyndon suffix
    for i in range(1, len(w)):
        if is_lyndon(w[i:]):
            return w[:i], w[i:]
    raise ValueError(f"word {w} has no standard factorization")


class GeneratorSet:
    """Ordered graded generators with a mandatory degree cutoff.

    Also owns the basis and bracket caches for the free Lie algebra it spans.
    """

    def __init__(self, generators: Sequence[Tuple[str, int]], cutoff: int):
        names = [n for n, _ in generators]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise GeneratorError(f"duplicate generator names: {', '.join(dup)}")
        for n, d in generators:
            if not isinstance(d, int) or d < 1:
                raise GeneratorError(
                    f"generator {n!r} has degree {d}; generators must have degree >= 1 "
                    f"(connected graded Lie algebras only)"
                )
        self.names: Tuple[str, ...] = tuple(names)
        self.degrees: Tuple[int, ...] = tuple(d for _, d in generators)
        self.cutoff = int(cutoff)
        self.index: Dict[str, int] = {n: i for i, n in enumerate(names)}
        self._expansion: Dict[Word, Tensor] = {}
        self._bracket: Dict[Tuple[Word, Word], Dict[Word, Fraction]] = {}
        self._basis: Dict[int, List[Word]] = {}

    def __len__(self):
        return len(self.names)

    def __repr__(self):
        inner = ", ".join(f"{n}:{d}" for n, d in zip(self.names, self.degrees))
        return f"GeneratorSet([{inner}], cutoff={self.cutoff})"

    def extended(self, new: Sequence[Tuple[str, int]], cutoff: Optional[int] = None) -> "GeneratorSet":
        """Append generators; caches keyed by old words stay valid and are shared."""
        g = GeneratorSet(list(zip(self.names, self.degrees)) + list(new),
                         self.cutoff if cutoff is None else cutoff)
        g._expansion = self._expansion
        g._bracket = self._bracket
        return g

    def signature(self):
        return (self.names, self.degrees)

    def word_degree(self, w: Word) -> int:
        return sum(self.degrees[i] for i in w)

    def generator(self, name: str) -> "LieElement":
        i = self.index[name]
        return LieElement(self, self.degrees[i], {(i,): Fraction(1)})

    def gen(self, i: int) -> "LieElement":
        return LieElement(self, self.degrees[i], {(i,): Fraction(1)})

    def zero(self, degree: Optional[int] = None) -> "LieElement":
        return LieElement(self, degree, {})

    # -- basis -------------------------------------------------------------

    def is_basis_word(self, w: Word) -> bool:
        if is_lyndon(w):
            return True
        n = len(w)
        if n % 2 == 0:
            u = w[: n // 2]
            return u == w[n // 2:] and is_lyndon(u) and self.word_degree(u) % 2 == 1
        return False

    def _words_of_degree(self, n: int) -> List[Word]:
        out: List[Word] = []
        by_degree: Dict[int, List[int]] = {}
        for i, d in enumerate(self.degrees):
            if d <= n:
                by_degree.setdefault(d, []).append(i)
        ordered = sorted(by_degree.items())

        def rec(prefix: List[int], remaining: int):
            if remaining == 0:
                out.append(tuple(prefix))
                return
            for d, members in ordered:
                if d > remaining:
                    break
                for i in members:
                    prefix.append(i)
                    rec(prefix, remaining - d)
                    prefix.pop()

        rec([], n)
        return out

    def basis_words(self, degree: int) -> List[Word]:
        if degree > self.cutoff:
            raise CutoffExceeded(f"degree {degree} exceeds cutoff {self.cutoff}")
        cached = self._basis.get(degree)
        if cached is None:
            words = [w for w in self._words_of_degree(degree) if self.is_basis_word(w)]
            words.sort(key=lambda w: (self.monomial_string(w), w))
            cached = self._basis[degree] = words
        return cached

    # -- structure of a basis word -------------------------------------------

    def split(self, w: Word) -> Optional[Tuple[Word, Word]]:
        """Top-level bracket factors of a basis word, or None for a generator."""
        if len(w) == 1:
            return None
        if is_lyndon(w):
            return standard_factorization(w)
        h = len(w) // 2
        return w[:h], w[h:]

    def monomial_string(self, w: Word) -> str:
        parts = self.split(w)
        if parts is None:
            return self.names[w[0]]
        return f"[{self.monomial_string(parts[0])},{self.monomial_string(parts[1])}]"

    # -- tensor oracle ------------------------------------------------------

    def expansion(self, w: Word) -> Tensor:
        cached = self._expansion.get(w)
        if cached is not None:
            return cached
        parts = self.split(w)
        if parts is None:
            res = {w: Fraction(1)}
        else:
            u, v = parts
            res = tensor_commutator(self.expansion(u), self.expansion(v),
                                    self.word_degree(u), self.word_degree(v))
        self._expansion[w] = res
        return res

    def decompose_tensor(self, t: Mapping[Word, Fraction]) -> Dict[Word, Fraction]:
        """Write a tensor known to be a Lie element in the monomial basis."""
        cur = {w: Fraction(c) for w, c in t.items() if c}
        out: Dict[Word, Fraction] = {}
        while cur:
            m = min(cur)
            if not self.is_basis_word(m):
                raise NotALieElement(f"tensor with leading word {m} is not a Lie element")
            e = self.expansion(m)
            lead = e[m]
            f = cur[m] / lead
            out[m] = f
            for w, c in e.items():
                nv = cur.get(w, 0) - f * c
                if nv:
                    cur[w] = nv
                else:
                    cur.pop(w, None)
        return out

    def bracket_words(self, u: Word, v: Word) -> Dict[Word, Fraction]:
        key = (u, v)
        cached = self._bracket.get(key)
        if cached is None:
            du, dv = self.word_degree(u), self.word_degree(v)
            if u == v and du % 2 == 0:
                cached = {}
            elif u < v or (u == v):
                t = tensor_commutator(self.expansion(u), self.expansion(v), du, dv)
                cached = self.decompose_tensor(t)
            else:
                # graded antisymmetry: [u,v] = -(-1)^{|u||v|}[v,u]
                sign = -1 if (du * dv) % 2 == 0 else 1
                cached = {w: sign * c for w, c in self.bracket_words(v, u).items()}
            self._bracket[key] = cached
        return cached


def tensor_commutator(x: Mapping[Word, Fraction], y: Mapping[Word, Fraction],
                      dx: int, dy: int) -> Tensor:
    sign = -1 if (dx * dy) % 2 == 0 else 1
    out: Tensor = {}
    for a, ca in x.items():
        for b, cb in y.items():
            c = ca * cb
            w = a + b
            nv = out.get(w, 0) + c
            if nv:
                out[w] = nv
            else:
                out.pop(w, None)
            w = b + a
            nv = out.get(w, 0) + sign * c
            if nv:
                out[w] = nv
            else:
                out.pop(w, None)
    return out


# ---------------------------------------------------------------------------
# elements


class LieElement:
    """Homogeneous element: mapping basis word -> nonzero Fraction."""

    __slots__ = ("gens", "degree", "terms")

    def __init__(self, gens: GeneratorSet, degree: Optional[int], terms: Mapping[Word, Fraction]):
        self.gens = gens
        self.terms: Dict[Word, Fraction] = {w: c if type(c) is Fraction else Fraction(c)
                                            for w, c in terms.items() if c}
        if self.terms:
            d = gens.word_degree(next(iter(self.terms)))
            if degree is not None and degree != d:
                raise ValueError(f"declared degree {degree} but monomials have degree {d}")
            degree = d
        self.degree = degree

    # basic algebra
    def _check(self, other: "LieElement"):
        if other.gens is not self.gens and other.gens.signature() != self.gens.signature():
            raise GeneratorError("elements live over different generator sets")

    def _merge_degree(self, other: "LieElement") -> Optional[int]:
        if self.terms and other.terms and self.degree != other.degree:
            raise ValueError(f"cannot add elements of degrees {self.degree} and {other.degree}")
        if self.degree is None:
            return other.degree
        if other.degree is None:
            return self.degree
        if self.degree != other.degree:
            return self.degree if self.terms else other.degree
        return self.degree

    def __add__(self, other: "LieElement") -> "LieElement":
        self._check(other)
        deg = self._merge_degree(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            nv = out.get(w, 0) + c
            if nv:
                out[w] = nv
            else:
                out.pop(w, None)
        return LieElement(self.gens, deg, out)

    def __neg__(self) -> "LieElement":
        return LieElement(self.gens, self.degree, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + (-other)

    def __mul__(self, k: Scalar) -> "LieElement":
        k = Fraction(k)
        if not k:
            return LieElement(self.gens, self.degree, {})
        return LieElement(self.gens, self.degree, {w: c * k for w, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, LieElement):
            return NotImplemented
        return self.terms == other.terms and self.gens.signature() == other.gens.signature()

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        return f"LieElement({format_element(self)})"

    def __str__(self):
        return format_element(self)

    def min_bracket_length(self) -> Optional[int]:
        return min((len(w) for w in self.terms), default=None)


def bracket(a: LieElement, b: LieElement) -> LieElement:
    a._check(b)
    g = a.gens
    deg = None if a.degree is None or b.degree is None else a.degree + b.degree
    out: Dict[Word, Fraction] = {}
    for u, cu in a.terms.items():
        for v, cv in b.terms.items():
            for w, c in g.bracket_words(u, v).items():
                nv = out.get(w, 0) + cu * cv * c
                if nv:
                    out[w] = nv
                else:
                    out.pop(w, None)
    return LieElement(g, deg, out)


def monomial_basis(g: GeneratorSet, degree: int) -> List[Word]:
    return g.basis_words(degree)


def monomial_element(g: GeneratorSet, w: Word) -> LieElement:
    if not g.is_basis_word(w):
        raise ValueError(f"word {w} is not a basis monomial")
    return LieElement(g, g.word_degree(w), {w: Fraction(1)})


def oracle_embed(e: LieElement) -> Tensor:
    out: Tensor = {}
    for w, c in e.terms.items():
        for t, k in e.gens.expansion(w).items():
            nv = out.get(t, 0) + c * k
            if nv:
                out[t] = nv
            else:
                out.pop(t, None)
    return out


def decompose(e: LieElement, degree: Optional[int] = None) -> List[Fraction]:
    deg = e.degree if degree is None else degree
    if deg is None:
        return []
    basis = e.gens.basis_words(deg)
    pos = {w: i for i, w in enumerate(basis)}
    vec = [Fraction(0)] * len(basis)
    for w, c in e.terms.items():
        vec[pos[w]] = c
    return vec


def from_coordinates(g: GeneratorSet, degree: int, coords: Sequence) -> LieElement:
    basis = g.basis_words(degree)
    if len(coords) != len(basis):
        raise ValueError("coordinate vector length differs from basis size")
    return LieElement(g, degree, {w: Fraction(c) for w, c in zip(basis, coords) if c})


def from_tensor(g: GeneratorSet, t: Mapping[Word, Fraction], degree: Optional[int] = None) -> LieElement:
    return LieElement(g, degree, g.decompose_tensor(t))


# ---------------------------------------------------------------------------
# evaluation along bracketing trees


def map_monomials(e: LieElement, leaf, target_zero: LieElement, combine) -> LieElement:
    """Evaluate ``e`` recursively on its bracketing trees.

    ``leaf(i)`` gives the image of generator ``i``; ``combine(u, v, U, V)``
    gives the image of ``[u, v]`` from the factor words and their images.
    """
    g = e.gens
    memo: Dict[Word, LieElement] = {}

    def image(w: Word) -> LieElement:
        r = memo.get(w)
        if r is None:
            parts = g.split(w)
            if parts is None:
                r = leaf(w[0])
            else:
                u, v = parts
                r = combine(u, v, image(u), image(v))
            memo[w] = r
        return r

    acc = target_zero
    for w, c in e.terms.items():
        acc = acc + c * image(w)
    return acc


def lie_morphism(e: LieElement, images: Sequence[LieElement], target: GeneratorSet) -> LieElement:
    """Apply the Lie algebra map determined by generator images."""
    zero = target.zero()
    return map_monomials(e, lambda i: images[i], zero, lambda u, v, U, V: bracket(U, V))


def format_scalar(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_element(e: LieElement) -> str:
    if not e.terms:
        return "0"
    pieces = []
    for w in sorted(e.terms, key=lambda w: (e.gens.monomial_string(w), w)):
        c = e.terms[w]
        m = e.gens.monomial_string(w)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        body = m if a == 1 else f"{format_scalar(a)}*{m}"
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for s, b in pieces[1:]:
        out += f" {s} {b}"
    return out


# ---------------------------------------------------------------------------
# expression parsing

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([\[\],+\-*()])|([^\s\[\],+\-*/()=#0-9][^\s\[\],+\-*/()=#]*))")


class ParseError(ValueError):
    pass


def tokenize(text: str) -> List[Tuple[str, str]]:
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:].strip()[:1]!r} in {text!r}")
        if m.group(1):
            out.append(("num", m.group(1)))
        elif m.group(2):
            out.append(("sym", m.group(2)))
        elif m.group(3):
            out.append(("name", m.group(3)))
        pos = m.end()
    return out


def parse_expression(text: str, g: GeneratorSet) -> LieElement:
    """Parse ``expr := name | q "*" expr | expr "+" expr | expr "-" expr | "[" expr "," expr "]"``."""
    toks = tokenize(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None)

    def take(kind=None, val=None):
        nonlocal pos
        t = peek()
        if t[0] is None or (kind and t[0] != kind) or (val and t[1] != val):
            want = val or kind or "token"
            raise ParseError(f"expected {want!r} in {text!r}, got {t[1]!r}")
        pos += 1
        return t

    def expr() -> LieElement:
        sign = 1
        if peek() == ("sym", "-"):
            take()
            sign = -1
        acc = term() * sign
        while peek() in (("sym", "+"), ("sym", "-")):
            op = take()[1]
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term() -> LieElement:
        t = peek()
        if t[0] == "num":
            take()
            coeff = Fraction(t[1])
            take("sym", "*")
            return coeff * term()
        if t == ("sym", "-"):
            take()
            return -term()
        return factor()

    def factor() -> LieElement:
        t = peek()
        if t == ("sym", "["):
            take()
            a = expr()
            take("sym", ",")
            b = expr()
            take("sym", "]")
            return bracket(a, b)
        if t == ("sym", "("):
            take()
            a = expr()
            take("sym", ")")
            return a
        if t[0] == "name":
            take()
            if t[1] not in g.index:
                raise ParseError(f"unknown generator {t[1]!r}")
            return g.generator(t[1])
        raise ParseError(f"unexpected token {t[1]!r} in {text!r}")

    if text.strip() == "0":
        return g.zero()
    result = expr()
    if pos != len(toks):
        raise ParseError(f"trailing input {toks[pos][1]!r} in {text!r}")
    return result
