"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import itertools
import random
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

from dglkit.dgl import (
    coproduct,
    disk,
    free_dgl,
    half_smash,
    homology_class,
    homology_degree,
    simplicial_sphere,
    sphere,
    validate,
)
from dglkit.dgl_homology import (
    bigraded_homology,
    cohomology,
    cohomology_direct,
    compare_with_coformal,
)
from dglkit.exact_linear import SparseMatrix, kernel_basis, rank
from dglkit.free_lie import GeneratorSet, LieElement, bracket, oracle_embed, parse_expression
from dglkit.jacobi import (
    NASignature,
    canonical,
    jacobiator,
    koszul_sign,
    lam3,
    lam4,
    lambda4_boundary,
    resolve_lambda4_variant,
)
from dglkit.models import (
    GLPresentation,
    associated_dgl,
    bigraded_model,
    coformal_check,
    filtered_model,
    free_target,
    minimal_model,
    structure_morphism,
    verify_bigraded_model,
    verify_quasi_iso,
)
from dglkit.resolution import ThetaEmbedding, canonical_resolution
from dglkit.simplicial_lie import (
    BigradedChainComplex,
    gamma,
    last_face_rule,
    moore,
    moore_elements,
    normalize_N,
    shuffle_bracket,
    shuffle_inner_faces_vanish,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def secondary_fixture(cutoff=6):
    return free_dgl(
        [("a", 1), ("b", 1), ("c", 1), ("d", 1), ("x", 4), ("y", 4), ("z", 4), ("w", 4)], cutoff,
        {"x": "[[b,a],c]", "y": "[[b,a],d]", "z": "[[d,c],a]", "w": "[[d,c],b]"},
    )


def massey_fixture(cutoff=5):
    return free_dgl([("a", 1), ("b", 1), ("x", 3), ("y", 3)], cutoff, {"x": "[a,a]", "y": "[a,b]"})


def odd_abelian_presentation(cutoff=6):
    g = GeneratorSet([("a", 1)], cutoff)
    return GLPresentation(g, [parse_expression("[a,a]", g)])


# ---------------------------------------------------------------------------
# 1. normalization against an independent tensor-algebra oracle


def _tensor_add(acc, t, k=1):
    for w, c in t.items():
        v = acc.get(w, 0) + k * c
        if v:
            acc[w] = v
        else:
            acc.pop(w, None)
    return acc


def _commutator(x, dx, y, dy):
    # xy - (-1)^{|x||y|} yx in the tensor algebra
    out = {}
    sign = -1 if dx * dy % 2 == 0 else 1
    for a, ca in x.items():
        for b, cb in y.items():
            _tensor_add(out, {a + b: ca * cb})
            _tensor_add(out, {b + a: sign * ca * cb})
    return out


def _random_tree(rng, n_gens, depth):
    if depth == 0 or rng.random() < 0.3:
        return rng.randrange(n_gens)
    return (_random_tree(rng, n_gens, depth - 1), _random_tree(rng, n_gens, depth - 1))


def _tree_degree(tree, degrees):
    if isinstance(tree, int):
        return degrees[tree]
    return _tree_degree(tree[0], degrees) + _tree_degree(tree[1], degrees)


def _evaluate(tree, g):
    if isinstance(tree, int):
        return g.gen(tree), {(tree,): Fraction(1)}
    (xl, xt), (yl, yt) = _evaluate(tree[0], g), _evaluate(tree[1], g)
    return bracket(xl, yl), _commutator(xt, xl.degree, yt, yl.degree)


def _left_normed_span_rank(g, degree):
    """Rank of all left-normed brackets of generators in the given degree, inside the tensor algebra."""
    words = []

    def extend(prefix, left):
        if left == 0:
            words.append(prefix)
            return
        for i, d in enumerate(g.degrees):
            if d <= left:
                extend(prefix + (i,), left - d)

    extend((), degree)
    tensors = []
    for w in words:
        t, dt = {(w[-1],): Fraction(1)}, g.degrees[w[-1]]
        for i in reversed(w[:-1]):
            t = _commutator({(i,): Fraction(1)}, g.degrees[i], t, dt)
            dt += g.degrees[i]
        tensors.append(t)
    monos = sorted({m for t in tensors for m in t})
    cols = [[t.get(m, 0) for m in monos] for t in tensors]
    if not monos:
        return 0
    return rank(SparseMatrix.from_columns(cols, len(monos)))


def test_criterion_1_oracle_equivalence(criterion):
    rng = random.Random(20261018)
    with criterion(1, "free Lie normalization matches the tensor oracle", 10) as c:
        done = 0
        while done < 200:
            n = rng.randint(1, 3)
            degrees = [rng.randint(1, 3) for _ in range(n)]
            tree = _random_tree(rng, n, 4)
            if _tree_degree(tree, degrees) > 9:
                continue
            g = GeneratorSet([(f"g{i}", d) for i, d in enumerate(degrees)], 9)
            lie, tensor = _evaluate(tree, g)
            c.check("tensor image", oracle_embed(lie) == tensor)
            c.check("zero test", lie.is_zero() == (not tensor))
            done += 1
        for degrees in ([1], [2], [1, 1], [1, 2], [2, 3], [1, 2, 3], [1, 1, 2]):
            g = GeneratorSet([(f"g{i}", d) for i, d in enumerate(degrees)], 6)
            for k in range(1, 7):
                c.check(f"dimension {degrees} degree {k}", len(g.basis_words(k)) == _left_normed_span_rank(g, k))


# ---------------------------------------------------------------------------
# 2. structural identities


def _constructed_dgls():
    return {
        "secondary": secondary_fixture(),
        "massey": massey_fixture(6),
        "sphere": sphere(2, "x", cutoff=8),
        "disk": disk(3, "y", cutoff=8),
        "coproduct": coproduct([sphere(1, "s", cutoff=7), disk(2, "e", cutoff=7)]),
        "half_smash": half_smash(free_dgl([("a", 2)], 7), simplicial_sphere(1)),
    }


def _random_element(rng, g, degree):
    words = g.basis_words(degree)
    return LieElement(g, degree, {w: rng.randint(-3, 3) for w in rng.sample(words, min(3, len(words)))})


def test_criterion_2_structural_identities(criterion):
    rng = random.Random(2)
    dgls = _constructed_dgls()
    with criterion(2, "antisymmetry, Jacobi, Leibniz and d^2 = 0", 10) as c:
        c.check("validate", all(not validate(d) for d in dgls.values()))
        names = sorted(dgls)
        count = 0
        while count < 500:
            name = names[count % len(names)]
            d = dgls[name]
            g = d.gens
            degs = [k for k in range(1, d.cutoff + 1) if g.basis_words(k)]
            p, q, r = (rng.choice(degs) for _ in range(3))
            if p + q + r > d.cutoff:
                continue
            x, y, z = (_random_element(rng, g, k) for k in (p, q, r))
            sign = -1 if p * q % 2 == 0 else 1
            c.check(f"antisymmetry {name}", bracket(x, y) == sign * bracket(y, x))
            jac = ((-1) ** (p * r) * bracket(x, bracket(y, z)) + (-1) ** (q * p) * bracket(y, bracket(z, x))
                   + (-1) ** (r * q) * bracket(z, bracket(x, y)))
            c.check(f"Jacobi {name}", jac.is_zero())
            c.check(f"Leibniz {name}", d.d(bracket(x, y)) == bracket(d.d(x), y) + (-1) ** p * bracket(x, d.d(y)))
            c.check(f"square zero {name}", d.d(d.d(bracket(x, y))).is_zero())
            count += 1


# ---------------------------------------------------------------------------
# 3. the four-generator fixture


def test_criterion_3_secondary_fixture(criterion):
    with criterion(3, "fixture cycle, nonzero class, n0 = 2", 5) as c:
        B = secondary_fixture()
        cycle = parse_expression("[x,d]+[y,c]+[z,b]+[w,a]", B.gens)
        c.check("cycle", B.d(cycle).is_zero())
        c.check("betti rank", homology_degree(B, 5).betti > 0)
        c.check("class nonzero", any(homology_class(B, cycle)))
        report = coformal_check(B, 3)
        c.check("non-coformal", report.coformal is False)
        c.check("n0", report.n0 == 2)


# ---------------------------------------------------------------------------
# 4. lambda signs


def test_criterion_4_lambda_signs(criterion):
    rng = random.Random(4)
    with criterion(4, "lambda_4 square zero and Koszul equivariance", 30) as c:
        samples = [tuple(rng.randint(1, 4) for _ in range(4)) for _ in range(50)]
        c.check("mixed parities", any(len({d % 2 for d in s}) == 2 for s in samples))
        verdict = resolve_lambda4_variant(samples)
        c.check("exactly one variant", sum(verdict.values()) == 1)
        c.check("variant w passes", verdict["w"] is True)
        for _ in range(20):
            degs = [rng.randint(1, 4) for _ in range(4)]
            sig = NASignature([(f"x{i}", d) for i, d in enumerate(degs)])
            xs = [sig.gen(i) for i in range(4)]
            base3, base4 = canonical(lam3(*xs[:3])), canonical(lam4(*xs))
            jac = canonical(jacobiator(*xs[:3]))
            phi = canonical(lambda4_boundary(*xs))
            for p in itertools.permutations(range(3)):
                k = koszul_sign(p, degs[:3])
                c.check("lambda_3 node", canonical(lam3(*(xs[i] for i in p))) == k * base3)
                c.check("jacobiator", canonical(jacobiator(*(xs[i] for i in p))) == k * jac)
            for p in itertools.permutations(range(4)):
                k = koszul_sign(p, degs)
                c.check("lambda_4 node", canonical(lam4(*(xs[i] for i in p))) == k * base4)
                c.check("lambda_4 boundary", canonical(lambda4_boundary(*(xs[i] for i in p))) == k * phi)


# ---------------------------------------------------------------------------
# 5. shuffle machinery on a canonical resolution


def test_criterion_5_shuffle_machinery(criterion):
    rng = random.Random(5)
    with criterion(5, "shuffle faces, Moore closure and bigraded identities", 60) as c:
        R = canonical_resolution(free_dgl([("a", 1)], 6), 3)
        mc = moore(R)
        cands = [(p, s) for (p, s), v in sorted(mc.basis.items()) if v]

        def rand_moore(p, s):
            acc = R.levels[p].zero(s)
            for e in moore_elements(R, mc, p, s):
                acc = acc + rng.randint(-2, 2) * e
            return acc

        def boundary(z, s):
            n = R.level_of(z)
            return (-1) ** s * R.face(0, z, n)

        pairs = 0
        while pairs < 100:
            (p, s), (q, t) = rng.choice(cands), rng.choice(cands)
            if p + q > 3 or s + t > 6:
                continue
            x, y = rand_moore(p, s), rand_moore(q, t)
            z = shuffle_bracket(R, x, y)
            c.check("inner faces", shuffle_inner_faces_vanish(R, x, y))
            c.check("Moore closure", all(R.face(k, z, p + q).is_zero() for k in range(1, p + q + 1)))
            c.check("antisymmetry", z == (-1) ** ((p + s) * (q + t) + 1) * shuffle_bracket(R, y, x))
            if p + q > 0:
                rhs = R.levels[p + q - 1].zero(s + t)
                if p > 0:
                    rhs = rhs + shuffle_bracket(R, boundary(x, s), y)
                if q > 0:
                    rhs = rhs + (-1) ** (p + s) * shuffle_bracket(R, x, boundary(y, t))
                c.check("Leibniz", boundary(z, s + t) == rhs)
            c.check("last face", last_face_rule(R, x, y, exact_signs=True))
            pairs += 1
        triples = 0
        while triples < 60:
            (p, s), (q, t), (r, u) = rng.choice(cands), rng.choice(cands), rng.choice(cands)
            if p + q + r > 3 or s + t + u > 6:
                continue
            x, y, z = rand_moore(p, s), rand_moore(q, t), rand_moore(r, u)
            P, Q, S = p + s, q + t, r + u

            def br(a, b):
                return shuffle_bracket(R, a, b)

            jac = ((-1) ** (P * S) * br(br(x, y), z) + (-1) ** (P * Q) * br(br(y, z), x)
                   + (-1) ** (Q * S) * br(br(z, x), y))
            c.check("Jacobi", jac.is_zero())
            triples += 1


# ---------------------------------------------------------------------------
# 6. Dold-Kan


def _random_complex(rng, top):
    dims = {(p, s): rng.randint(0, 2) for p in range(top + 1) for s in (1, 2)}
    bounds = {}
    for s in (1, 2):
        prev = None
        for p in range(1, top + 1):
            rows, cols = dims[(p - 1, s)], dims[(p, s)]
            if prev is None:
                m = SparseMatrix.from_dense([[rng.randint(-2, 2) for _ in range(cols)] for _ in range(rows)]) \
                    if rows and cols else SparseMatrix.zero(rows, cols)
            else:
                ker = kernel_basis(prev) if prev.cols else []
                columns = []
                for _ in range(cols):
                    v = [Fraction(0)] * rows
                    for k in ker:
                        coef = rng.randint(-2, 2)
                        v = [a + coef * b for a, b in zip(v, k)]
                    columns.append(v)
                m = SparseMatrix.from_columns(columns, rows) if cols else SparseMatrix.zero(rows, 0)
            bounds[(p, s)] = m
            prev = m
    return BigradedChainComplex(dims, bounds)


def test_criterion_6_dold_kan(criterion):
    rng = random.Random(6)
    with criterion(6, "Dold-Kan round trip", 10) as c:
        for _ in range(50):
            top = rng.randint(1, 3)
            C = _random_complex(rng, top)
            c.check("input square zero", C.square_zero())
            G = gamma(C, top)
            c.check("simplicial identities", G.check_identities())
            c.check("Moore square zero", moore(G, degrees=G.degrees).square_zero())
            N = normalize_N(G)
            c.check("dims", all(N.dims.get(k, 0) == v for k, v in C.dims.items()))
            c.check("boundaries", all(N.d(p, s).entries == C.d(p, s).entries
                                      for (p, s) in C.dims if p >= 1))


# ---------------------------------------------------------------------------
# 7. models


def test_criterion_7_models(criterion):
    with criterion(7, "bigraded, filtered and minimal models verify", 60) as c:
        g = GeneratorSet([("a", 1), ("b", 2)], 6)
        free_model = bigraded_model(free_target(g), 5, 3)
        c.check("free in filtration 0", set(free_model.filtration) == {0})
        odd = bigraded_model(odd_abelian_presentation(), 4, 3)
        at_one = [i for i, f in enumerate(odd.filtration) if f == 1]
        c.check("one filtration-1 generator", len(at_one) == 1)
        value = odd.components[0][at_one[0]]
        c.check("d b = [a,a]", value == parse_expression("[a,a]", odd.gens))
        models = [free_model, odd]
        for B in (massey_fixture(5), secondary_fixture(), sphere(2, "x", cutoff=6)):
            fm = filtered_model(B, 3)
            models.append(fm)
            c.check("filtered model quasi-iso", verify_quasi_iso(structure_morphism(fm), B.cutoff - 1))
        for m in models:
            checks = verify_bigraded_model(m)
            c.check("decomposable", checks["decomposable"])
            c.check("square zero", checks["square_zero"])
            c.check("quasi-iso", checks["quasi_isomorphism"])
        for B in (disk(3, "y", cutoff=6), coproduct([sphere(2, "x", cutoff=6), disk(3, "y", cutoff=6)]),
                  massey_fixture(5)):
            M, phi = minimal_model(B)
            c.check("minimal model quasi-iso", verify_quasi_iso(phi, B.cutoff - 1))
            c.check("minimal model decomposable",
                    all(v.is_zero() or v.min_bracket_length() >= 2 for v in M.differential))


# ---------------------------------------------------------------------------
# 8. ladders


def test_criterion_8_ladders(criterion):
    with criterion(8, "ladder face conditions on theta embeddings", 120) as c:
        g = GeneratorSet([("a", 1), ("b", 1)], 5)
        models = {
            "odd abelian": bigraded_model(odd_abelian_presentation(6), 3, 2),
            "free": bigraded_model(free_target(g), 4, 2),
            "massey": filtered_model(massey_fixture(5), 2),
            "secondary": filtered_model(secondary_fixture(), 2),
        }
        for name, model in models.items():
            emb = ThetaEmbedding(model, verify=True)
            ladders = emb.all_ladders()
            expected = {(model.gens.names[i], s) for i in range(len(model.gens))
                        for s in range(model.filtration[i] + 1)}
            c.check(f"{name} every ladder", set(emb.checked) >= expected and len(ladders) == len(model.gens))
            W = emb.W
            for i in range(len(model.gens)):
                n = model.filtration[i]
                for s in range(n):
                    x_s = emb.ladder(i, s)
                    level = n - s
                    c.check(f"{name} inner faces",
                            all(W.face(j, x_s, level).is_zero() for j in range(1, level)))
                    c.check(f"{name} last face", W.face(level, x_s, level) == W.differential(emb.ladder(i, s + 1)))


# ---------------------------------------------------------------------------
# 9. homology layer


def test_criterion_9_homology_layer(criterion):
    with criterion(9, "bigraded homology, comparison and universal coefficients", 120) as c:
        free = free_dgl([("a", 1), ("b", 2)], 5)
        h = bigraded_homology(free, 2, 4)
        c.check("free concentrated in s = 0", all(s == 0 for (s, _) in h.nonzero()))
        c.check("free H_0", h.nonzero() == {(0, 1): 1, (0, 2): 1})
        odd = associated_dgl(bigraded_model(odd_abelian_presentation(7), 4, 3))
        fixtures = {
            "free": free,
            "disk": disk(3, "y", cutoff=5),
            "sphere": sphere(2, "x", cutoff=5),
            "odd abelian": odd,
            "massey": massey_fixture(5),
        }
        for name, d in fixtures.items():
            for S, D in ((1, 3), (2, 3)):
                minimal = bigraded_homology(d, S, D, "minimal", certify=True)
                canonical_ = bigraded_homology(d, S, D, "canonical")
                c.check(f"{name} canonical = minimal", minimal.nonzero() == canonical_.nonzero())
        secondary = secondary_fixture()
        # the large fixture only at small ranges; its canonical resolution grows fast
        for S, D in ((1, 3), (1, 4)):
            minimal = bigraded_homology(secondary, S, D, "minimal", certify=True)
            canonical_ = bigraded_homology(secondary, S, D, "canonical")
            c.check("secondary canonical = minimal", minimal.nonzero() == canonical_.nonzero())
        for name, d in {**fixtures, "secondary": secondary}.items():
            c.check(f"{name} comparison", compare_with_coformal(d, 2, d.cutoff - 1).holds)
        coeffs = {1: 1, 2: 2, 3: 1}
        for name in ("free", "sphere", "massey"):
            d = fixtures[name]
            t_range = range(-2, 3)
            uct = cohomology(bigraded_homology(d, 1, 3), coeffs, t_range).dims
            direct = cohomology_direct(d, coeffs, 1, 3, t_range).dims
            c.check(f"{name} universal coefficients", uct == direct)


# ---------------------------------------------------------------------------
# 10. determinism


COMMANDS = ("validate", "homology", "minimal-model", "bigraded-model", "filtered-model", "coformal",
            "resolution", "dgl-homology", "cohomology", "jacobi-check")


def _run_twice(*args):
    """Launch two independent runs side by side; return their (exit code, stdout) pairs."""
    procs = [subprocess.Popen([sys.executable, "-m", "dglkit", *args], stdout=subprocess.PIPE,
                              stderr=subprocess.DEVNULL) for _ in range(2)]
    return [(p.communicate(timeout=600)[0], p.returncode) for p in procs]


def test_criterion_10_determinism(criterion):
    with criterion(10, "CLI output byte-identical across runs", 600) as c:
        files = sorted(FIXTURES.iterdir())
        c.check("corpus present", len(files) >= 6)
        for path in files:
            for command in COMMANDS:
                first, second = _run_twice(command, str(path))
                c.check(f"{command} {path.name}", first == second and first[0] != b"")
