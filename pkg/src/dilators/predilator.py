"""Coded predilators, their extension to arbitrary carriers, and validation.

A predilator assigns to every level ``n`` an order ``D(n)`` and acts on Nat
morphisms ``m -> n``.  Elements of the extension over a carrier are
:class:`Term` values ``(sigma, support)`` where ``sigma`` has full support.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import count
from typing import Any, Callable

from .codes import EQUAL, GREATER, LESS, Ordering
from .finite import (FiniteEmbedding, FiniteOrder, collapse, embedding_images,
                     nat_embedding_from)
from .orders import CountableOrder, OrderError

PULLBACK_SEARCH = 1000


class PredilatorError(ValueError):
    pass


@dataclass(frozen=True)
class TraceElement:
    sigma: Any
    level: int


@dataclass(frozen=True)
class Term:
    """An element (sigma, a) of the extension; ``support`` is ascending in ``carrier``."""

    sigma: Any
    support: tuple
    carrier: Any = field(default=None, compare=False, hash=False, repr=False)

    @property
    def level(self) -> int:
        return len(self.support)

    @property
    def trace(self) -> TraceElement:
        return TraceElement(self.sigma, len(self.support))


class Predilator:
    """Subclasses provide ``_make_level``, ``_act`` and ``supp``.

    ``_act(images, n, sigma)`` is the action of the Nat morphism with the given
    image tuple into ``n``; ``act`` wraps it for :class:`FiniteEmbedding` input.
    """

    name = "predilator"

    def __init__(self):
        self._levels: dict[int, CountableOrder] = {}

    def level(self, n: int) -> CountableOrder:
        lv = self._levels.get(n)
        if lv is None:
            lv = self._levels.setdefault(n, self._make_level(n))
        return lv

    def _make_level(self, n: int) -> CountableOrder:
        raise NotImplementedError

    def _act(self, images: tuple, n: int, sigma):
        raise NotImplementedError

    def act(self, f: FiniteEmbedding, sigma):
        return self._act(f.graph, f.target_size, sigma)

    def supp(self, n: int, sigma) -> tuple:
        raise NotImplementedError

    def pullback(self, f: FiniteEmbedding, tau):
        """Some sigma in D(m) with act(f, sigma) == tau, or None (bounded search)."""
        m = f.source_size
        lv = self.level(m)
        for i, sigma in enumerate(lv):
            if i >= PULLBACK_SEARCH:
                break
            if self._act(f.graph, f.target_size, sigma) == tau:
                return sigma
        return None

    def is_trace(self, n: int, sigma) -> bool:
        return self.level(n).valid(sigma) and tuple(self.supp(n, sigma)) == tuple(range(n))

    def code_to_json(self, n: int, sigma):
        return self.level(n).to_json(sigma)

    def code_from_json(self, n: int, obj):
        return self.level(n).decode(obj)

    def __repr__(self):
        return f"<predilator {self.name}>"


# -- terms ---------------------------------------------------------------------------

def _sorted_support(a, carrier: CountableOrder) -> tuple:
    codes = list(a.codes if isinstance(a, FiniteOrder) else a)
    for x in codes:
        if not carrier.valid(x):
            raise PredilatorError(f"support code {x!r} is not valid in {carrier!r}")
    codes = carrier.sorted(codes)
    for x, y in zip(codes, codes[1:]):
        if carrier.compare(x, y) is EQUAL:
            raise PredilatorError(f"duplicate support code {x!r}")
    return tuple(codes)


def make_term(D: Predilator, sigma, a, carrier: CountableOrder) -> Term:
    support = _sorted_support(a, carrier)
    n = len(support)
    if not D.level(n).valid(sigma):
        raise PredilatorError(f"{sigma!r} is not an element of D({n})")
    supp = tuple(D.supp(n, sigma))
    if supp != tuple(range(n)):
        raise PredilatorError(f"{sigma!r} does not have full support at level {n} (supp={list(supp)})")
    return Term(sigma, support, carrier)


def extend_act(D: Predilator, f, t: Term, target: CountableOrder | None = None) -> Term:
    """Apply a carrier embedding ``f`` (callable or mapping) to a term."""
    target = target or t.carrier
    images = []
    for x in t.support:
        try:
            images.append(f[x] if isinstance(f, Mapping) else f(x))
        except (KeyError, IndexError):
            raise PredilatorError(f"embedding undefined on support code {x!r}") from None
    for y, z in zip(images, images[1:]):
        if target.compare(y, z) is not LESS:
            raise PredilatorError("carrier map is not strictly increasing on the support")
    return Term(t.sigma, tuple(images), target)


def _merge(carrier: CountableOrder, a: tuple, b: tuple):
    """Union of two ascending tuples plus the index of each element in the union."""
    u, ia, ib = [], [], []
    i = j = 0
    cmp = carrier.compare
    while i < len(a) or j < len(b):
        if j >= len(b):
            c = LESS
        elif i >= len(a):
            c = GREATER
        else:
            c = cmp(a[i], b[j])
        if c is LESS:
            ia.append(len(u)); u.append(a[i]); i += 1
        elif c is GREATER:
            ib.append(len(u)); u.append(b[j]); j += 1
        else:
            ia.append(len(u)); ib.append(len(u)); u.append(a[i]); i += 1; j += 1
    return tuple(u), tuple(ia), tuple(ib)


def _check_pair(s: Term, t: Term):
    if s.carrier is not None and t.carrier is not None and s.carrier != t.carrier:
        raise PredilatorError("terms live over different carriers")


def compare_direct(D: Predilator, s: Term, t: Term) -> Ordering:
    """Compare via the collapsed inclusions into a u b, evaluated in D(|a u b|)."""
    _check_pair(s, t)
    carrier = s.carrier if s.carrier is not None else t.carrier
    u, _, _ = _merge(carrier, s.support, t.support)
    union = FiniteOrder(u, carrier)
    iota_a = collapse(FiniteEmbedding(FiniteOrder(s.support, carrier), union, s.support))
    iota_b = collapse(FiniteEmbedding(FiniteOrder(t.support, carrier), union, t.support))
    return D.level(len(u)).compare(D.act(iota_a, s.sigma), D.act(iota_b, t.sigma))


def _compare_direct_fast(D: Predilator, s: Term, t: Term) -> Ordering:
    # same semantics as compare_direct without building embedding objects
    u, ia, ib = _merge(s.carrier, s.support, t.support)
    n = len(u)
    return D.level(n).compare(D._act(ia, n, s.sigma), D._act(ib, n, t.sigma))


def trace_elements(D: Predilator, n: int, bound: int) -> list:
    out = []
    for i, sigma in enumerate(D.level(n)):
        if i >= bound:
            break
        if tuple(D.supp(n, sigma)) == tuple(range(n)):
            out.append(TraceElement(sigma, n))
    return out


# -- D-bar(n) vs D(n) ----------------------------------------------------------------

def to_level(D: Predilator, t: Term, n: int):
    """(sigma, a) in D-bar(n)  |->  D(en_a^n)(sigma) in D(n); a must be a subset of n."""
    f = nat_embedding_from(FiniteOrder(t.support), FiniteOrder.nat(n))
    return D.act(f, t.sigma)


def from_level(D: Predilator, n: int, tau) -> Term:
    from .orders import Nat
    a = tuple(D.supp(n, tau))
    f = FiniteEmbedding.nat(a, n)
    sigma = D.pullback(f, tau)
    if sigma is None:
        raise PredilatorError(f"no preimage for {tau!r} under en_a^n")
    return Term(sigma, a, Nat(n))


# -- extension as an order -----------------------------------------------------------

class ExtensionOrder(CountableOrder):
    """D-bar(carrier) as a countable order whose codes are :class:`Term` values."""

    def __init__(self, D: Predilator, carrier: CountableOrder):
        super().__init__()
        self.D, self.carrier = D, carrier
        if carrier.expr is not None:
            self.expr = {"op": "extension", "predilator": D.name, "carrier": carrier.expr}
        if carrier.size is not None and all(D.level(k).size is not None for k in range(carrier.size + 1)):
            self.size = sum(1 for _ in self._generate())

    def valid(self, x):
        if not isinstance(x, Term):
            return False
        try:
            make_term(self.D, x.sigma, x.support, self.carrier)
        except (PredilatorError, OrderError, TypeError):
            return False
        return tuple(x.support) == _sorted_support(x.support, self.carrier)

    def compare(self, x, y):
        return _compare_direct_fast(self.D, _bind(x, self.carrier), _bind(y, self.carrier))

    def _generate(self):
        # weight of (subset, code index c) = sum of (index + 1) over the subset, plus c
        D, carrier = self.D, self.carrier
        cap = carrier.size
        top = None
        if self.size is not None or (cap is not None and all(D.level(k).size is not None
                                                              for k in range(cap + 1))):
            top = cap * (cap + 1) // 2 + max(D.level(k).size for k in range(cap + 1))
        for w in count():
            if top is not None and w > top:
                return
            for c in range(w + 1):
                for idx in distinct_parts(w - c, cap):
                    a = tuple(carrier.sorted(carrier.nth(i) for i in idx))
                    lv = D.level(len(a))
                    if lv.size is not None and c >= lv.size:
                        continue
                    sigma = lv.nth(c)
                    if D.is_trace(len(a), sigma):
                        yield Term(sigma, a, carrier)

    def to_json(self, x):
        return term_to_json(self.D, x, with_carrier=False)

    def from_json(self, obj):
        return term_from_json(self.D, obj, self.carrier)


@lru_cache(maxsize=4096)
def _distinct_parts(w: int, largest: int) -> tuple:
    if w == 0:
        return ((),)
    out = []
    for p in range(min(w, largest), 0, -1):
        for rest in _distinct_parts(w - p, p - 1):
            out.append(rest + (p - 1,))
    return tuple(out)


def distinct_parts(w: int, cap: int | None) -> tuple:
    """Index sets {i_1 < ... < i_k} (all i < cap) with sum of (i + 1) equal to w."""
    return _distinct_parts(w, w if cap is None else min(w, cap))


def _bind(t: Term, carrier) -> Term:
    return t if t.carrier is not None else Term(t.sigma, t.support, carrier)


def term_to_json(D: Predilator, t: Term, with_carrier: bool = True) -> dict:
    out = {"sigma": D.code_to_json(t.level, t.sigma),
           "support": [t.carrier.to_json(x) for x in t.support]}
    if with_carrier and t.carrier is not None and t.carrier.expr is not None:
        out["carrier"] = t.carrier.expr
    return out


def term_from_json(D: Predilator, obj, carrier: CountableOrder | None = None) -> Term:
    from .orders import build_order
    if not isinstance(obj, dict) or "sigma" not in obj or "support" not in obj:
        raise PredilatorError("term JSON needs 'sigma' and 'support'")
    if carrier is None:
        if "carrier" not in obj:
            raise PredilatorError("term JSON has no carrier")
        carrier = build_order(obj["carrier"])
    support = [carrier.decode(x) for x in obj["support"]]
    sigma = D.code_from_json(len(support), obj["sigma"])
    return make_term(D, sigma, support, carrier)


# -- validation ----------------------------------------------------------------------

@dataclass
class ValidationReport:
    name: str
    level_bound: int
    sample_bound: int
    checks: int = 0
    violations: list = field(default_factory=list)
    bounded: bool = False

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, kind: str, **witness):
        if sum(1 for v in self.violations if v["kind"] == kind) < 20:
            self.violations.append({"kind": kind, **witness})

    def to_json(self) -> dict:
        return {"predilator": self.name, "levels": self.level_bound, "sample": self.sample_bound,
                "checks": self.checks, "bounded": self.bounded, "passed": self.passed,
                "violations": [{k: _jsonable(v) for k, v in w.items()} for w in self.violations]}


def _jsonable(v):
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return repr(v)


def validate(D: Predilator, level_bound: int = 4, sample_bound: int = 100) -> ValidationReport:
    """Bounded check of the functor, monotonicity and support laws."""
    rep = ValidationReport(D.name, level_bound, sample_bound)
    levels = [D.level(n) for n in range(level_bound + 1)]
    samples = [lv.prefix(sample_bound) for lv in levels]
    rep.bounded = any(lv.size is None or lv.size > sample_bound for lv in levels)
    ordered = [lv.sorted(s) for lv, s in zip(levels, samples)]

    for m in range(level_bound + 1):
        ident = tuple(range(m))
        for sigma in samples[m]:
            rep.checks += 1
            if D._act(ident, m, sigma) != sigma:
                rep.add("identity", level=m, sigma=sigma)
            if not set(D.supp(m, sigma)) <= set(range(m)):
                rep.add("support-range", level=m, sigma=sigma)
        for n in range(m, level_bound + 1):
            maps = embedding_images(m, n)
            for f in maps:
                rng = set(f)
                imgs = [D._act(f, n, s) for s in ordered[m]]
                for s, y in zip(ordered[m], imgs):
                    rep.checks += 1
                    if not levels[n].valid(y):
                        rep.add("invalid-image", f=f, n=n, sigma=s, image=y)
                        continue
                    want = tuple(sorted(f[i] for i in D.supp(m, s)))
                    if tuple(sorted(D.supp(n, y))) != want:
                        rep.add("support-naturality", f=f, n=n, sigma=s)
                for (s1, y1), (s2, y2) in zip(zip(ordered[m], imgs), zip(ordered[m][1:], imgs[1:])):
                    rep.checks += 1
                    if levels[n].valid(y1) and levels[n].valid(y2) and levels[n].compare(y1, y2) is not LESS:
                        rep.add("order-preservation", f=f, n=n, lower=s1, upper=s2)
                # composition with every h: l -> m
                for l in range(m + 1):
                    for h in embedding_images(l, m):
                        fh = tuple(f[i] for i in h)
                        for s in samples[l]:
                            rep.checks += 1
                            if D._act(fh, n, s) != D._act(f, n, D._act(h, m, s)):
                                rep.add("composition", f=f, h=h, n=n, sigma=s)
                # support condition
                fe = FiniteEmbedding.nat(f, n)
                for tau in samples[n]:
                    if not set(D.supp(n, tau)) <= rng:
                        continue
                    rep.checks += 1
                    pre = D.pullback(fe, tau)
                    if pre is None or not levels[m].valid(pre) or D._act(f, n, pre) != tau:
                        rep.add("support-condition", f=f, n=n, tau=tau)
            # monotonicity: f <= g pointwise
            for i, f in enumerate(maps):
                for g in maps:
                    if f == g or not all(x <= y for x, y in zip(f, g)):
                        continue
                    for s in samples[m]:
                        rep.checks += 1
                        if levels[n].compare(D._act(f, n, s), D._act(g, n, s)) is GREATER:
                            rep.add("monotonicity", f=f, g=g, n=n, sigma=s)
    return rep


# -- natural transformations ---------------------------------------------------------

@dataclass(frozen=True)
class NaturalTransformation:
    source: Predilator
    target: Predilator
    component: Callable[[int, Any], Any]
    name: str = "mu"

    def __call__(self, n: int, sigma):
        return self.component(n, sigma)


def check_natural(mu: NaturalTransformation, level_bound: int = 3, sample_bound: int = 100) -> ValidationReport:
    """Order preservation per component, commuting squares, trace to trace."""
    D, E = mu.source, mu.target
    rep = ValidationReport(mu.name, level_bound, sample_bound)
    for n in range(level_bound + 1):
        sample = D.level(n).sorted(D.level(n).prefix(sample_bound))
        imgs = [mu(n, s) for s in sample]
        for s, y in zip(sample, imgs):
            rep.checks += 1
            if not E.level(n).valid(y):
                rep.add("invalid-image", level=n, sigma=s)
            elif D.is_trace(n, s) and not E.is_trace(n, y):
                rep.add("trace", level=n, sigma=s)
        for (s1, y1), (s2, y2) in zip(zip(sample, imgs), zip(sample[1:], imgs[1:])):
            rep.checks += 1
            if E.level(n).compare(y1, y2) is not LESS:
                rep.add("order-preservation", level=n, lower=s1, upper=s2)
        for m in range(n + 1):
            for f in embedding_images(m, n):
                for s in D.level(m).prefix(sample_bound):
                    rep.checks += 1
                    if mu(n, D._act(f, n, s)) != E._act(f, n, mu(m, s)):
                        rep.add("naturality", f=f, n=n, sigma=s)
    return rep


def nat_extend(mu: NaturalTransformation, t: Term) -> Term:
    n = t.level
    try:
        sigma = mu(n, t.sigma)
    except (KeyError, IndexError, ValueError) as exc:
        raise PredilatorError(f"component undefined at level {n}: {exc}") from None
    if not mu.target.is_trace(n, sigma):
        raise PredilatorError("image constructor lacks full support in the target")
    return Term(sigma, t.support, t.carrier)


# -- composition with E(alpha) = omega * (1 + alpha) -------------------------------

class ComposedE(Predilator):
    """D o E, level n represented as D-bar over omega*(1+n)."""

    def __init__(self, D: Predilator):
        super().__init__()
        self.D = D
        self.name = f"compose-E:{D.name}"

    def _make_level(self, n):
        from .zoo import e_carrier
        return ExtensionOrder(self.D, e_carrier(n))

    def _act(self, images, n, t: Term):
        from .zoo import e_carrier, e_point_act
        return Term(t.sigma, tuple(e_point_act(images, x) for x in t.support), e_carrier(n))

    def supp(self, n, t: Term):
        from .zoo import e_point_supp
        out = set()
        for x in t.support:
            out.update(e_point_supp(x))
        return tuple(sorted(out))

    def pullback(self, f, t: Term):
        from .codes import In, Pair
        from .zoo import e_carrier
        inv = {y: i for i, y in enumerate(f.graph)}
        support = []
        for x in t.support:
            if isinstance(x.hi, In):
                if x.hi.x not in inv:
                    return None
                support.append(Pair(In(inv[x.hi.x]), x.lo))
            else:
                support.append(x)
        return Term(t.sigma, tuple(support), e_carrier(f.source_size))


@lru_cache(maxsize=None)
def compose_with_E(D: Predilator) -> ComposedE:
    return ComposedE(D)
