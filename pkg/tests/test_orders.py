from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from dilators.codes import EQUAL, GREATER, LESS, Cnf, Exps, In, Node, Pair, TOP, ZERO
from dilators.finite import (EmbeddingError, FiniteEmbedding, FiniteOrder, collapse,
                             enumerate_embeddings, increasing_enumeration)
from dilators.orders import (EPS0, TWO_POWER_EPS0, KB, Nat, OrderError, build_order,
                             embed_two_power_eps0, enumerate_prefix, kb_compare)

EXPRS = [
    {"op": "nat", "k": 4},
    {"op": "omega"},
    {"op": "rev-omega"},
    {"op": "sum", "left": {"op": "nat", "k": 2}, "right": {"op": "omega"}},
    {"op": "prod", "minor": {"op": "nat", "k": 3}, "major": {"op": "omega"}},
    {"op": "omega-times", "inner": {"op": "nat", "k": 2}},
    {"op": "one-plus", "inner": {"op": "omega"}},
    {"op": "plus-one", "inner": {"op": "rev-omega"}},
    {"op": "two-power", "exp": {"op": "omega"}},
    {"op": "base-power", "base": {"op": "nat", "k": 2}, "exp": {"op": "omega"}},
    {"op": "z-power", "r": 2},
    {"op": "eps0"},
    {"op": "kb", "tree": [[], [0], [0, 0], [1]]},
    {"op": "thread", "L": {"builtin": "zigzag"}},
]


def test_increasing_enumeration():
    assert increasing_enumeration(FiniteOrder((3, 7, 9))) == {0: 3, 1: 7, 2: 9}
    assert increasing_enumeration(FiniteOrder(())) == {}
    assert increasing_enumeration(FiniteOrder((5,))) == {0: 5}


def test_finite_order_rejects_unsorted():
    with pytest.raises(EmbeddingError):
        FiniteOrder((3, 1))


def test_collapse_examples():
    f = FiniteEmbedding(FiniteOrder((3, 7)), FiniteOrder((1, 4, 6)), (4, 6))
    assert collapse(f).graph == (1, 2)
    ident = FiniteEmbedding.identity(FiniteOrder((2, 5)))
    assert collapse(ident).graph == (0, 1)
    empty = FiniteEmbedding(FiniteOrder(()), FiniteOrder((1,)), ())
    assert collapse(empty).graph == () and collapse(empty).target_size == 1


def test_embedding_validation():
    with pytest.raises(EmbeddingError):
        FiniteEmbedding(FiniteOrder((1, 2)), FiniteOrder((0, 5)), (5, 0))
    with pytest.raises(EmbeddingError):
        FiniteEmbedding(FiniteOrder((1,)), FiniteOrder((0, 5)), (3,))


def test_enumerate_embeddings_examples():
    assert [f.graph for f in enumerate_embeddings(2, 3)] == [(0, 1), (0, 2), (1, 2)]
    assert [f.graph for f in enumerate_embeddings(0, 4)] == [()]
    assert enumerate_embeddings(3, 2) == []


@pytest.mark.parametrize("n", range(9))
def test_enumerate_embeddings_counts(n):
    for m in range(n + 1):
        maps = [f.graph for f in enumerate_embeddings(m, n)]
        assert len(maps) == comb(n, m) == len(set(maps))
        assert maps == sorted(maps)


@given(st.lists(st.integers(0, 30), unique=True, max_size=5),
       st.lists(st.integers(0, 30), unique=True, max_size=8),
       st.data())
@settings(max_examples=60)
def test_collapse_respects_composition(a, extra, data):
    a = sorted(a)
    b = sorted(set(a) | set(extra))
    c = sorted(set(b) | set(data.draw(st.lists(st.integers(31, 60), unique=True, max_size=4))))
    fa, fb, fc = FiniteOrder(tuple(a)), FiniteOrder(tuple(b)), FiniteOrder(tuple(c))
    f = FiniteEmbedding(fa, fb, tuple(a))
    g = FiniteEmbedding(fb, fc, tuple(b))
    assert collapse(f.then(g)).graph == tuple(collapse(g).graph[i] for i in collapse(f).graph)


def test_build_order_examples():
    tp = build_order({"op": "two-power", "exp": {"op": "omega"}})
    assert tp.compare(Exps((2, 0)), Exps((2, 1))) is LESS
    wt = build_order({"op": "omega-times", "inner": {"op": "nat", "k": 2}})
    assert wt.compare(Pair(0, 7), Pair(1, 0)) is LESS
    omega_ = Cnf((Cnf(),))
    assert EPS0.compare(Cnf((omega_,)), Cnf((omega_, Cnf()))) is LESS


def test_prod_compares_major_first():
    p = build_order({"op": "prod", "minor": {"op": "omega"}, "major": {"op": "nat", "k": 3}})
    assert p.compare(Pair(0, 100), Pair(1, 0)) is LESS
    assert p.compare(Pair(1, 2), Pair(1, 3)) is LESS


def test_plus_one_and_one_plus():
    po = build_order({"op": "plus-one", "inner": {"op": "omega"}})
    assert po.compare(In(10 ** 6), TOP) is LESS
    op = build_order({"op": "one-plus", "inner": {"op": "omega"}})
    assert op.compare(ZERO, In(0)) is LESS


def test_two_power_prefix_is_smaller():
    tp = build_order({"op": "two-power", "exp": {"op": "omega"}})
    assert tp.compare(Exps((3,)), Exps((3, 1))) is LESS


def test_two_power_ascending_input_normalised():
    tp = build_order({"op": "two-power", "exp": {"op": "omega"}})
    assert tp.decode({"exps": [0, 2]}) == Exps((2, 0))


def test_base_power_canonical():
    bp = build_order({"op": "base-power", "base": {"op": "omega"}, "exp": {"op": "nat", "k": 3}})
    assert bp.decode({"terms": [[1, 5], [0, 7]]}).terms == ((1, 5), (0, 7))
    with pytest.raises(OrderError):
        bp.decode({"terms": [[0, 5], [1, 7]]})


def test_eps0_rejects_non_descending():
    assert not EPS0.valid(Cnf((Cnf(), Cnf((Cnf(),)))))


@pytest.mark.parametrize("bad", [{"op": "nope"}, {"op": "nat"}, {"op": "nat", "k": -1}, [1, 2],
                                 {"op": "prod", "minor": {"op": "omega"}}, "not json"])
def test_malformed_expressions(bad):
    with pytest.raises(OrderError):
        build_order(bad)


def test_enumerate_prefix_examples():
    assert enumerate_prefix(build_order({"op": "nat", "k": 3}), 5) == [0, 1, 2]
    assert enumerate_prefix(build_order({"op": "omega"}), 3) == [0, 1, 2]
    tp = build_order({"op": "two-power", "exp": {"op": "omega"}})
    codes = enumerate_prefix(tp, 3)
    assert len(set(codes)) == 3 and all(tp.valid(c) for c in codes)


@pytest.mark.parametrize("expr", EXPRS, ids=lambda e: e["op"])
def test_order_axioms_on_prefix(expr):
    o = build_order(expr)
    xs = o.prefix(50 if expr["op"] not in ("eps0", "base-power") else 30)
    assert len(xs) == len(set(xs))
    assert all(o.valid(x) for x in xs)
    for x in xs:
        assert o.compare(x, x) is EQUAL
        for y in xs:
            c = o.compare(x, y)
            assert o.compare(y, x) is c.flip()
            if x != y:
                assert c is not EQUAL
    s = o.sorted(xs)
    for x, y, z in zip(s, s[1:], s[2:]):
        assert o.compare(x, z) is LESS


@pytest.mark.parametrize("expr", EXPRS, ids=lambda e: e["op"])
def test_json_round_trip(expr):
    o = build_order(expr)
    for x in o.prefix(20):
        assert o.decode(o.to_json(x)) == x
    assert build_order(o.expr) == o


def test_finite_sizes():
    assert build_order({"op": "two-power", "exp": {"op": "nat", "k": 3}}).size == 8
    assert len(build_order({"op": "z-power", "r": 0}).prefix(5)) == 1
    assert build_order({"op": "omega"}).size is None


def test_embed_two_power_eps0_examples():
    assert embed_two_power_eps0(Exps(())) == Cnf(())
    zero = Cnf(())
    assert embed_two_power_eps0(Exps((zero,))) == Cnf((zero,))
    one = Cnf((zero,))
    assert embed_two_power_eps0(Exps((one, zero))) == Cnf((one, zero))
    with pytest.raises(OrderError):
        embed_two_power_eps0(Exps((zero, one)))


eps0_pool = EPS0.prefix(40)


@given(st.lists(st.sets(st.integers(0, 39), max_size=4), min_size=2, max_size=6))
@settings(max_examples=80)
def test_eps0_embedding_monotone(index_sets):
    terms = [Exps(tuple(EPS0.sorted([eps0_pool[i] for i in s])[::-1])) for s in index_sets]
    for x, y in combinations(terms, 2):
        assert TWO_POWER_EPS0.compare(x, y) is EPS0.compare(embed_two_power_eps0(x), embed_two_power_eps0(y))


def _random_tree(data):
    nodes = {()}
    for _ in range(data.draw(st.integers(0, 49))):
        parent = data.draw(st.sampled_from(sorted(nodes)))
        nodes.add(parent + (data.draw(st.integers(0, 3)),))
    return nodes


@given(st.data())
@settings(max_examples=50)
def test_kb_extension_below_prefix(data):
    nodes = _random_tree(data)
    kb = KB([list(s) for s in nodes])
    for s in nodes:
        for k in range(len(s)):
            assert kb.compare(Node(s), Node(s[:k])) is LESS


def test_kb_example_and_rootless():
    kb = build_order({"op": "kb", "tree": [[], [0], [0, 0], [1]]})
    order = [n.seq for n in kb.sorted(list(kb))]
    assert order == [(0, 0), (0,), (1,), ()]
    assert kb_compare((0, 5), (1,)) is LESS
    rootless = KB([[0], [1]], root=False)
    assert rootless.size == 2
    with pytest.raises(OrderError):
        KB([[0, 1]])


def test_nat_is_finite_order():
    assert Nat(3).prefix(10) == [0, 1, 2]
    assert Nat(0).prefix(3) == []
