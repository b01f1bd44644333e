"""Finite comparison calculus for the extension of a predilator.

Each trace element gets a priority permutation; pairs of distinct trace
elements get an agreement bound ``P``, a minimal secure index ``p`` and a sign
``eps``.  Together these decide every comparison in the extension without
forming the union of supports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cmp_to_key, lru_cache

from .codes import EQUAL, GREATER, LESS, Ordering
from .finite import embedding_images
from .predilator import Predilator, PredilatorError, Term, TraceElement


class CalculusError(ValueError):
    pass


@dataclass(frozen=True)
class PriorityPermutation:
    trace: TraceElement
    perm: tuple
    images: tuple = field(repr=False, default=())

    def __len__(self):
        return len(self.perm)

    def __getitem__(self, i):
        return self.perm[i]


def doubling_embedding(i: int, n: int) -> tuple:
    """e_i : n -> 2n with e_i(i) = 2i+1 and e_i(j) = 2j otherwise."""
    return tuple(2 * j + 1 if j == i else 2 * j for j in range(n))


def priority_permutation(D: Predilator, t: TraceElement) -> PriorityPermutation:
    return _priority(D, t.sigma, t.level)


@lru_cache(maxsize=None)
def _priority(D: Predilator, sigma, n: int) -> PriorityPermutation:
    if not D.is_trace(n, sigma):
        raise CalculusError(f"{sigma!r} is not a trace element at level {n}")
    lv = D.level(2 * n)
    vals = [D._act(doubling_embedding(i, n), 2 * n, sigma) for i in range(n)]
    order = _sort_desc(lv, vals)
    for a, b in zip(order, order[1:]):
        if lv.compare(vals[a], vals[b]) is not GREATER:
            raise CalculusError("doubled embeddings do not separate argument positions")
    return PriorityPermutation(TraceElement(sigma, n), tuple(order), tuple(vals[i] for i in order))


def _sort_desc(lv, vals) -> list:
    return sorted(range(len(vals)), key=cmp_to_key(lambda a, b: int(lv.compare(vals[b], vals[a]))))


# -- security --------------------------------------------------------------------------

@dataclass(frozen=True)
class SecurityProfile:
    left: TraceElement
    right: TraceElement
    P: int
    p: int
    eps: int
    pi_left: tuple
    pi_right: tuple
    pairs: int = 0
    # two embedding pairs pinned at p-1 with opposite outcomes (p > 0 only)
    witness: tuple | None = None

    def to_json(self) -> dict:
        return {"P": self.P, "p": self.p, "eps": self.eps,
                "piLeft": list(self.pi_left), "piRight": list(self.pi_right)}


def agreement_bound(pi_s: tuple, pi_t: tuple) -> int:
    """Largest P <= min(m, n) such that the first P priorities are ordered alike."""
    P = 0
    for k in range(min(len(pi_s), len(pi_t))):
        if any((pi_s[i] < pi_s[k]) != (pi_t[i] < pi_t[k]) for i in range(k)):
            break
        P = k + 1
    return P


def security_profile(D: Predilator, s: TraceElement, t: TraceElement) -> SecurityProfile:
    if s == t:
        raise CalculusError("security profile needs two distinct trace elements")
    return _profile(D, s.sigma, s.level, t.sigma, t.level)


@lru_cache(maxsize=None)
def _profile(D: Predilator, sigma, m: int, tau, n: int) -> SecurityProfile:
    ps, pt = _priority(D, sigma, m).perm, _priority(D, tau, n).perm
    P = agreement_bound(ps, pt)
    N = m + n
    lv = D.level(N)
    fs, gs = embedding_images(m, N), embedding_images(n, N)
    xs = [D._act(f, N, sigma) for f in fs]
    ys = [D._act(g, N, tau) for g in gs]
    # rank all images once so the exhaustive loop compares integers
    tagged = sorted([(0, i) for i in range(len(xs))] + [(1, j) for j in range(len(ys))],
                    key=cmp_to_key(lambda u, v: int(lv.compare((xs, ys)[u[0]][u[1]], (xs, ys)[v[0]][v[1]]))))
    rx, ry = [0] * len(xs), [0] * len(ys)
    prev = None
    for r, (side, i) in enumerate(tagged):
        val = (xs, ys)[side][i]
        if prev is not None and side != prev[0] and lv.compare(val, (xs, ys)[prev[0]][prev[1]]) is EQUAL:
            raise CalculusError("distinct trace elements produced equal images")
        (rx, ry)[side][i] = r
        prev = (side, i)
    fpin = [tuple(f[ps[i]] for i in range(P)) for f in fs]
    gpin = [tuple(g[pt[i]] for i in range(P)) for g in gs]
    outcomes = []  # (depth, outcome, f index, g index)
    for i, fp in enumerate(fpin):
        ri = rx[i]
        for j, gp in enumerate(gpin):
            depth = 0
            while depth < P and fp[depth] == gp[depth]:
                depth += 1
            outcomes.append((depth, LESS if ri < ry[j] else GREATER, i, j))
    p = None
    for q in range(P, -1, -1):
        seen = {c for d, c, _, _ in outcomes if d >= q}
        if len(seen) > 1:
            break
        if seen:
            p = q
    if p is None:
        raise CalculusError("agreement bound is not secure; the input is not a predilator")
    outcome = next(c for d, c, _, _ in outcomes if d >= p)
    witness = None
    if p > 0:
        lo = next(o for o in outcomes if o[0] >= p - 1 and o[1] is LESS)
        hi = next(o for o in outcomes if o[0] >= p - 1 and o[1] is GREATER)
        witness = ((fs[lo[2]], gs[lo[3]], int(lo[1])), (fs[hi[2]], gs[hi[3]], int(hi[1])))
    return SecurityProfile(TraceElement(sigma, m), TraceElement(tau, n), P, p,
                           1 if outcome is LESS else -1, ps, pt, len(outcomes), witness)


def secure_indices(D: Predilator, s: TraceElement, t: TraceElement) -> list:
    """All q <= P at which the pinned comparison is constant (exhaustive)."""
    ps = priority_permutation(D, s).perm
    pt = priority_permutation(D, t).perm
    P = agreement_bound(ps, pt)
    m, n = s.level, t.level
    N = m + n
    lv = D.level(N)
    out = []
    for q in range(P + 1):
        seen = set()
        for f in embedding_images(m, N):
            for g in embedding_images(n, N):
                if all(f[ps[i]] == g[pt[i]] for i in range(q)):
                    seen.add(lv.compare(D._act(f, N, s.sigma), D._act(g, N, t.sigma)))
        if len(seen) == 1:
            out.append(q)
    return out


# -- fast comparison -------------------------------------------------------------------

def _carrier(s: Term, t: Term):
    c = s.carrier if s.carrier is not None else t.carrier
    if c is None:
        raise PredilatorError("terms carry no carrier order")
    return c


def _check_term(D: Predilator, t: Term):
    if not D.is_trace(t.level, t.sigma):
        raise PredilatorError(f"invalid term {t!r}")


def compare_same(D: Predilator, s: Term, t: Term) -> Ordering:
    if s.sigma != t.sigma or s.level != t.level:
        raise CalculusError("compare_same needs terms with the same constructor")
    carrier = _carrier(s, t)
    perm = _priority(D, s.sigma, s.level).perm
    for i in perm:
        c = carrier.compare(s.support[i], t.support[i])
        if c is not EQUAL:
            return c
    return EQUAL


def compare_cross(D: Predilator, s: Term, t: Term) -> Ordering:
    if s.trace == t.trace:
        raise CalculusError("compare_cross needs distinct trace elements")
    carrier = _carrier(s, t)
    prof = _profile(D, s.sigma, s.level, t.sigma, t.level)
    for i in range(prof.p):
        c = carrier.compare(s.support[prof.pi_left[i]], t.support[prof.pi_right[i]])
        if c is not EQUAL:
            return c
    return LESS if prof.eps > 0 else GREATER


def compare(D: Predilator, s: Term, t: Term) -> Ordering:
    _check_term(D, s)
    _check_term(D, t)
    if s.trace == t.trace:
        return compare_same(D, s, t)
    return compare_cross(D, s, t)


def triangle_check(D: Predilator, r: TraceElement, s: TraceElement, t: TraceElement):
    if r == s or s == t or r == t:
        raise CalculusError("triangle check needs pairwise distinct trace elements")
    p_rs = security_profile(D, r, s).p
    p_st = security_profile(D, s, t).p
    p_rt = security_profile(D, r, t).p
    return p_rs, p_st, p_rt, p_rt >= min(p_rs, p_st)
