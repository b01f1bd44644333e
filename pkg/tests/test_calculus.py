from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from dilators.calculus import (CalculusError, agreement_bound, compare, compare_cross, compare_same,
                               doubling_embedding, priority_permutation, secure_indices,
                               security_profile, triangle_check)
from dilators.codes import EQUAL, GREATER, LESS
from dilators.orders import Nat, Omega
from dilators.predilator import Term, TraceElement, compare_direct, make_term, trace_elements
from dilators.zoo import (BUILTIN_THREADS, PerturbedThread, dl_priority, get_predilator, make_DL,
                          make_E, two_power)

TE = TraceElement


def test_doubling_embedding():
    assert doubling_embedding(1, 3) == (0, 3, 4)
    assert doubling_embedding(0, 1) == (1,)


def test_priority_permutation_examples(T, E):
    assert priority_permutation(T, TE(3, 2)).perm == (1, 0)
    assert priority_permutation(T, TE(1, 1)).perm == (0,)
    assert priority_permutation(T, TE(0, 0)).perm == ()
    assert priority_permutation(E, TE(E.level(1).nth(1), 1)).perm == (0,)
    with pytest.raises(CalculusError):
        priority_permutation(T, TE(1, 2))


def test_profile_examples(T, dl_omega):
    prof = security_profile(T, TE(1, 1), TE(3, 2))
    assert (prof.P, prof.p, prof.eps) == (1, 1, 1)
    assert prof.pairs == 9
    back = security_profile(T, TE(3, 2), TE(1, 1))
    assert (back.p, back.eps) == (1, -1)
    assert back.to_json() == {"P": 1, "p": 1, "eps": -1, "piLeft": [1, 0], "piRight": [0]}
    dl = security_profile(dl_omega, TE((0,), 1), TE((0, 1), 2))
    assert (dl.p, dl.eps) == (1, 1)
    with pytest.raises(CalculusError):
        security_profile(T, TE(3, 2), TE(3, 2))


def test_agreement_bound():
    assert agreement_bound((0, 1, 2), (0, 1)) == 2
    assert agreement_bound((1, 0), (0, 1)) == 1
    assert agreement_bound((), (0,)) == 0


def test_compare_same_examples(T, omega):
    mk = lambda s, a: make_term(T, s, a, omega)
    assert compare_same(T, mk(3, [0, 2]), mk(3, [1, 2])) is LESS
    assert compare_same(T, mk(3, [0, 2]), mk(3, [0, 2])) is EQUAL
    assert compare_same(T, mk(3, [2, 3]), mk(3, [0, 4])) is LESS
    with pytest.raises(CalculusError):
        compare_same(T, mk(1, [0]), mk(3, [0, 1]))


def test_compare_cross_examples(T, omega):
    mk = lambda s, a: make_term(T, s, a, omega)
    assert compare_cross(T, mk(1, [5]), mk(3, [2, 5])) is LESS
    assert compare_cross(T, mk(1, [5]), mk(3, [2, 4])) is GREATER
    assert compare_cross(T, mk(1, [3]), mk(3, [1, 2])) is GREATER
    with pytest.raises(CalculusError):
        compare_cross(T, mk(1, [3]), mk(1, [4]))


def test_compare_dispatch_matches_direct(T, omega):
    mk = lambda s, a: make_term(T, s, a, omega)
    pairs = [(mk(3, [0, 2]), mk(3, [1, 2])), (mk(1, [5]), mk(3, [2, 5])), (mk(1, [3]), mk(3, [1, 2])),
             (mk(0, []), mk(0, []))]
    for s, t in pairs:
        assert compare(T, s, t) is compare_direct(T, s, t)


def test_triangle_examples(T, dl_omega):
    assert triangle_check(T, TE(1, 1), TE(3, 2), TE(7, 3))[3]
    tr = [TE(tuple(range(n)), n) for n in (1, 2, 3)]
    assert triangle_check(dl_omega, *tr)[3]
    with pytest.raises(CalculusError):
        triangle_check(T, TE(1, 1), TE(1, 1), TE(3, 2))


SCRAMBLED = PerturbedThread(BUILTIN_THREADS["omega"], [[0, 2], [1, 4]])
FAMILY = [two_power(), make_DL(BUILTIN_THREADS["omega"]), make_DL(BUILTIN_THREADS["rev-omega"]),
          make_DL(SCRAMBLED), make_E()]


@pytest.mark.parametrize("D", FAMILY, ids=lambda d: d.name)
@pytest.mark.parametrize("k", [3, 5])
def test_oracle_equivalence_small_carriers(D, k):
    carrier = Nat(k)
    bound = 3 if D.name == "E" else 100
    terms = [Term(tr.sigma, a, carrier) for size in range(min(k, 4) + 1)
             for a in combinations(range(k), size) for tr in trace_elements(D, size, bound)]
    for s in terms:
        for t in terms:
            assert compare(D, s, t) is compare_direct(D, s, t)


@pytest.mark.parametrize("D", FAMILY[:4], ids=lambda d: d.name)
def test_symmetry_and_upward_security(D):
    traces = [tr for n in range(6) for tr in trace_elements(D, n, 100)]
    for s in traces:
        for t in traces:
            if s == t or s.level + t.level > 7:
                continue
            a, b = security_profile(D, s, t), security_profile(D, t, s)
            assert a.p == b.p and a.eps == -b.eps and a.P == b.P
            assert secure_indices(D, s, t) == list(range(a.p, a.P + 1))


@pytest.mark.parametrize("n", range(1, 6))
def test_priority_images_distinct(T, n):
    pp = priority_permutation(T, TE((1 << n) - 1, n))
    assert len(set(pp.images)) == n
    assert sorted(pp.perm) == list(range(n))


@pytest.mark.parametrize("name", sorted(BUILTIN_THREADS))
def test_dl_priority_matches_calculus(name):
    L = BUILTIN_THREADS[name]
    D = make_DL(L)
    for n in range(6):
        assert priority_permutation(D, TE(tuple(range(n)), n)).perm == dl_priority(L, n)


@given(st.lists(st.integers(0, 30), unique=True, max_size=3),
       st.lists(st.integers(0, 30), unique=True, max_size=3),
       st.sampled_from(sorted(BUILTIN_THREADS)))
@settings(max_examples=150)
def test_fast_compare_agrees_on_omega(a, b, name):
    D = make_DL(BUILTIN_THREADS[name])
    omega = Omega()
    s = make_term(D, tuple(range(len(a))), a, omega)
    t = make_term(D, tuple(range(len(b))), b, omega)
    assert compare(D, s, t) is compare_direct(D, s, t)
