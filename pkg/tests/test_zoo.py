import pytest

from dilators.codes import EQUAL, LESS, In, Pair, ZERO
from dilators.finite import FiniteEmbedding
from dilators.orders import OrderError
from dilators.predilator import compose_with_E, trace_elements, validate
from dilators.zoo import (BUILTIN_THREADS, PerturbedThread, TableThread, binary_to_sequence,
                          dl_priority, get_predilator, make_DL, sequence_to_binary, thread_from_json)


def test_dl_priority_examples():
    assert dl_priority(BUILTIN_THREADS["rev-omega"], 3) == (2, 1, 0)
    assert dl_priority(BUILTIN_THREADS["omega"], 5) == (0, 1, 2, 3, 4)
    assert dl_priority(BUILTIN_THREADS["zigzag"], 0) == ()


@pytest.mark.parametrize("name", sorted(BUILTIN_THREADS))
def test_dl_priority_invariant(name):
    L = BUILTIN_THREADS[name]
    for n in range(8):
        pi = dl_priority(L, n)
        assert sorted(pi) == list(range(n))
        for i in range(n):
            for j in range(n):
                assert (pi[i] <= pi[j]) == L.le(i, j)


def test_zigzag_shape():
    z = BUILTIN_THREADS["zigzag"]
    chain = [0, 2, 4, 6, 5, 3, 1]
    assert all(z.compare(a, b) is LESS for a, b in zip(chain, chain[1:]))


def test_thread_json():
    assert thread_from_json({"builtin": "omega"}) is BUILTIN_THREADS["omega"]
    p = thread_from_json({"perturb": {"base": {"builtin": "omega"}, "swaps": [[0, 1]]}})
    assert isinstance(p, PerturbedThread)
    assert p.compare(1, 0) is LESS and p.compare(0, 2) is LESS
    assert thread_from_json(p.to_json()) == p
    t = thread_from_json({"table": [2, 0, 1]})
    assert isinstance(t, TableThread) and t.compare(2, 0) is LESS and t.compare(1, 3) is LESS
    for bad in [{"builtin": "nope"}, {"perturb": {"base": {"builtin": "omega"}, "swaps": [[0]]}}, 5,
                {"table": [0, 0]}]:
        with pytest.raises(OrderError):
            thread_from_json(bad)


def test_dl_level_two(dl_omega):
    lv = dl_omega.level(2)
    assert set(lv) == {(), (0,), (1,), (0, 1)}
    assert lv.compare((0,), (0, 1)) is LESS


def test_dl_rev_omega_is_binary():
    D = make_DL(BUILTIN_THREADS["rev-omega"])
    lv = D.level(3)
    assert [sequence_to_binary(s) for s in lv.sorted(list(lv))] == list(range(8))
    assert binary_to_sequence(5) == (0, 2)


@pytest.mark.parametrize("name", sorted(BUILTIN_THREADS))
def test_dl_validates_to_level_5(name):
    assert validate(make_DL(BUILTIN_THREADS[name]), 5, 100).passed


def test_perturbed_dl_validates():
    L = PerturbedThread(BUILTIN_THREADS["zigzag"], [[0, 5], [2, 3]])
    assert validate(make_DL(L), 4, 100).passed


@pytest.mark.parametrize("name", sorted(BUILTIN_THREADS))
def test_unique_trace_element(name):
    D = make_DL(BUILTIN_THREADS[name])
    for n in range(6):
        assert [t.sigma for t in trace_elements(D, n, 1 << n)] == [tuple(range(n))]


def test_two_power_examples(T):
    assert T.level(3).size == 8
    f = FiniteEmbedding.nat((0, 2), 3)
    assert T.act(f, 3) == 5
    assert T.supp(3, 5) == (0, 2)


def test_E_examples(E):
    assert E.supp(1, Pair(ZERO, 7)) == ()
    assert E.supp(3, Pair(In(2), 4)) == (2,)
    f = FiniteEmbedding.nat((3,), 4)
    assert E.act(f, Pair(In(0), 1)) == Pair(In(3), 1)


def test_registry():
    assert get_predilator("two-power").name == "two-power"
    assert get_predilator("dl:rev-omega") is make_DL(BUILTIN_THREADS["rev-omega"])
    assert get_predilator("compose-E:two-power") is compose_with_E(get_predilator("two-power"))
    assert get_predilator('dl:{"builtin":"zigzag"}').L is BUILTIN_THREADS["zigzag"]
    with pytest.raises(KeyError):
        get_predilator("bogus")
