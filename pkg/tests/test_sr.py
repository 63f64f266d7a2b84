import numpy as np
import pytest
import sympy

from distill_stab.data import Dataset, FeatureSchema
from distill_stab.students.sr import (
    ExprTree,
    GpConfig,
    canonicalize,
    eval_tree,
    evolve,
    random_tree,
    sr_predict,
    tree_depth,
)


def test_depth_examples():
    assert tree_depth(("x", 0)) == 0
    assert tree_depth(("c", 1.0)) == 0
    assert tree_depth(("+", ("x", 0), ("x", 1))) == 1
    assert tree_depth(("*", ("+", ("x", 0), ("c", 1.0)), ("x", 1))) == 2


def test_canonical_commutativity_pair():
    a = ExprTree(("+", ("x", 0), ("x", 1)))
    b = ExprTree(("+", ("x", 1), ("x", 0)))
    assert canonicalize(a) == canonicalize(b) == "X0 + X1"


def test_canonical_constant_folding_pair():
    a = ExprTree(("+", ("x", 0), ("c", 1.0)))
    b = ExprTree(("+", ("+", ("x", 0), ("c", 2.0)), ("c", -1.0)))
    assert canonicalize(a) == canonicalize(b) == "X0 + 1"


def test_canonical_cancellation_and_powers():
    zero = ExprTree(("+", ("c", 1.0), ("c", -1.0)))
    assert canonicalize(zero) == "0"
    sq = ExprTree(("*", ("x", 1), ("x", 1)))
    assert canonicalize(sq) == "X1*X1"
    mixed = ExprTree(("+", ("x", 3), ("+", ("*", ("x", 4), ("x", 4)), ("c", 1.0))))
    assert canonicalize(mixed) == "X3 + X4*X4 + 1"


def _to_sympy(node, symbols):
    op = node[0]
    if op == "x":
        return symbols[node[1]]
    if op == "c":
        return sympy.Rational(node[1]).limit_denominator(10**6)
    a = _to_sympy(node[1], symbols)
    b = _to_sympy(node[2], symbols)
    return a + b if op == "+" else a * b


def _sympy_monomials(node, d):
    symbols = sympy.symbols(f"x0:{d}")
    poly = sympy.Poly(sympy.expand(_to_sympy(node, symbols)), *symbols)
    monos = set()
    has_const = False
    for exps, coef in poly.terms():
        if abs(float(coef)) <= 1e-12:
            continue
        mono = tuple(sorted(sum(([i] * e for i, e in enumerate(exps)), [])))
        if mono:
            monos.add("*".join(f"X{i}" for i in mono))
        else:
            has_const = True
    return monos, has_const


def test_canonicalize_against_sympy_expansion():
    rng = np.random.default_rng(0)
    d = 3
    for _ in range(60):
        # rational-friendly constants so the sympy polynomial is exact
        node = random_tree(rng, d, max_depth=3)

        def quantize(nd):
            if nd[0] == "c":
                return ("c", round(nd[1] * 8) / 8)
            if nd[0] == "x":
                return nd
            return (nd[0], quantize(nd[1]), quantize(nd[2]))

        node = quantize(node)
        key = canonicalize(ExprTree(node))
        monos, has_const = _sympy_monomials(node, d)
        parts = [] if key == "0" else key.split(" + ")
        got_const = "1" in parts
        got_monos = {p for p in parts if p != "1"}
        assert got_monos == monos
        assert got_const == has_const


def _swap_rewrite(rng, node):
    if node[0] in ("x", "c"):
        return node
    a = _swap_rewrite(rng, node[1])
    b = _swap_rewrite(rng, node[2])
    return (node[0], b, a) if rng.random() < 0.5 else (node[0], a, b)


def test_operand_swaps_preserve_key():
    rng = np.random.default_rng(1)
    for _ in range(100):
        node = random_tree(rng, 4, max_depth=3)
        rewritten = _swap_rewrite(rng, node)
        assert canonicalize(ExprTree(node)) == canonicalize(ExprTree(rewritten))
        X = rng.normal(size=(20, 4))
        assert np.allclose(eval_tree(node, X), eval_tree(rewritten, X))


def test_sr_predict_values_and_clamp():
    X = np.zeros((1, 1))
    assert sr_predict(ExprTree(("c", 0.0)), X)[0] == 0.5
    assert sr_predict(ExprTree(("c", 100.0)), X)[0] == 1 - 1e-6
    assert sr_predict(ExprTree(("c", -100.0)), X)[0] == 1e-6


def _corpus(seed=0, n=150):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 2))
    y = (X[:, 0] + X[:, 1] > 0).astype(int)
    schema = FeatureSchema(columns=(("a", "continuous"), ("b", "continuous")))
    return Dataset(X=X, y=y, schema=schema)


def _min_loss(predictors, corpus):
    best = np.inf
    for pred in predictors:
        p = pred(corpus.X)
        loss = float(-np.mean(corpus.y * np.log(p) + (1 - corpus.y) * np.log(1 - p)))
        best = min(best, loss)
    return best


def test_evolution_never_loses_the_best():
    corpus = _corpus()
    cfg = GpConfig(population=60, generations=8, max_depth=3, seed=4)
    final = evolve(corpus, cfg)
    # reconstruct the seed population evolve starts from
    rng = np.random.default_rng(cfg.seed)
    init = [random_tree(rng, 2, cfg.max_depth) for _ in range(cfg.population)]
    init_best = _min_loss([lambda X, _t=ExprTree(t): sr_predict(_t, X) for t in init], corpus)
    final_best = _min_loss([c.predictor for c in final], corpus)
    assert final_best <= init_best + 1e-12


def test_evolution_respects_depth_cap_and_determinism():
    corpus = _corpus(seed=1)
    cfg = GpConfig(population=40, generations=5, max_depth=2, seed=9)
    a = evolve(corpus, cfg)
    b = evolve(corpus, cfg)
    assert [c.structure_key for c in a] == [c.structure_key for c in b]
    assert all(c.complexity <= 2 for c in a)
    assert all(c.family == "SR" for c in a)


def test_config_validation():
    with pytest.raises(ValueError):
        GpConfig(p_crossover=0.8, p_mutation=0.3)
    with pytest.raises(ValueError):
        evolve(_corpus(), GpConfig(population=1))
