"""Countable linear orders built from a small constructor language.

Every order exposes a validity predicate, a total comparison returning an
:class:`~dilators.codes.Ordering`, and a fair, repetition-free enumeration of
its element codes.  Orders are described by JSON-shaped expressions::

    build_order({"op": "two-power", "exp": {"op": "omega"}})
"""

from __future__ import annotations

import json
import threading
from functools import cmp_to_key, lru_cache
from itertools import count, product

from .codes import (EQUAL, GREATER, LESS, TOP, ZERO, Cnf, Exps, In, Left, Node,
                    Pair, Right, Terms, TopCode, ZeroCode, cmp_int)


class OrderError(ValueError):
    """Malformed order expression or element code."""


def _is_nat(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool) and x >= 0


class CountableOrder:
    """Base class.  Subclasses implement ``valid``, ``compare`` and ``_generate``."""

    size: int | None = None
    expr: dict | None = None

    def __init__(self):
        self._cache: list = []
        self._gen = None
        self._done = False
        self._lock = threading.Lock()

    def valid(self, x) -> bool:
        raise NotImplementedError

    def compare(self, x, y):
        raise NotImplementedError

    def _generate(self):
        raise NotImplementedError

    def to_json(self, x):
        return x

    def from_json(self, obj):
        return obj

    def decode(self, obj):
        """``from_json`` followed by a validity check."""
        try:
            x = self.from_json(obj)
        except (TypeError, KeyError, AttributeError) as exc:
            raise OrderError(f"cannot decode {obj!r}: {exc}") from None
        if not self.valid(x):
            raise OrderError(f"not a valid element code: {obj!r}")
        return x

    def lt(self, x, y) -> bool:
        return self.compare(x, y) is LESS

    def sort_key(self):
        return cmp_to_key(self.compare)

    def sorted(self, xs) -> list:
        return sorted(xs, key=self.sort_key())

    def nth(self, i: int):
        """The i-th code of the enumeration; IndexError past the end of a finite order."""
        cache = self._cache
        if i < len(cache):
            return cache[i]
        with self._lock:
            if self._gen is None and not self._done:
                self._gen = self._generate()
            while len(cache) <= i and not self._done:
                try:
                    cache.append(next(self._gen))
                except StopIteration:
                    self._done = True
                    self._gen = None
        if i < len(cache):
            return cache[i]
        raise IndexError(i)

    def __iter__(self):
        for i in count():
            try:
                yield self.nth(i)
            except IndexError:
                return

    def prefix(self, k: int) -> list:
        out = []
        for x in self:
            if len(out) >= k:
                break
            out.append(x)
        return out

    def is_finite(self) -> bool:
        return self.size is not None

    def _key(self):
        return json.dumps(self.expr, sort_keys=True) if self.expr is not None else id(self)

    def __eq__(self, other):
        return isinstance(other, CountableOrder) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.expr is not None:
            return f"<order {json.dumps(self.expr, sort_keys=True)}>"
        return f"<{type(self).__name__}>"


def enumerate_prefix(o: CountableOrder, k: int) -> list:
    return o.prefix(k)


# -- helpers for fair enumeration -------------------------------------------------

def _index_or_none(o: CountableOrder, i: int):
    if o.size is not None and i >= o.size:
        return None
    try:
        return o.nth(i)
    except IndexError:
        return None


def subset_by_index(o: CountableOrder, k: int):
    """The finite subset of ``o`` whose enumeration indices are the set bits of k."""
    out = []
    i = 0
    while k:
        if k & 1:
            x = _index_or_none(o, i)
            if x is None:
                return None
            out.append(x)
        k >>= 1
        i += 1
    return out


def finite_subsets(o: CountableOrder):
    """Every finite subset exactly once (unsorted lists)."""
    limit = None if o.size is None else 1 << o.size
    for k in count():
        if limit is not None and k >= limit:
            return
        s = subset_by_index(o, k)
        if s is not None:
            yield s


def _diagonal_pairs(major: CountableOrder, minor: CountableOrder):
    """Pairs (major code, minor code) along anti-diagonals, minor index ascending."""
    if major.size == 0 or minor.size == 0:
        return
    for d in count():
        if major.size is not None and minor.size is not None and d > major.size + minor.size - 2:
            return
        for j in range(d + 1):
            i = d - j
            x = _index_or_none(major, i)
            if x is None:
                continue
            y = _index_or_none(minor, j)
            if y is None:
                continue
            yield x, y


def _lex(cmp, xs, ys):
    for x, y in zip(xs, ys):
        c = cmp(x, y)
        if c is not EQUAL:
            return c
    return cmp_int(len(xs), len(ys))


# -- constructors ------------------------------------------------------------------

class Nat(CountableOrder):
    def __init__(self, k: int):
        super().__init__()
        self.k = k
        self.size = k
        self.expr = {"op": "nat", "k": k}

    def valid(self, x):
        return _is_nat(x) and x < self.k

    def compare(self, x, y):
        return cmp_int(x, y)

    def _generate(self):
        return iter(range(self.k))


class Omega(CountableOrder):
    expr = {"op": "omega"}

    def valid(self, x):
        return _is_nat(x)

    def compare(self, x, y):
        return cmp_int(x, y)

    def _generate(self):
        return count()


class RevOmega(Omega):
    expr = {"op": "rev-omega"}

    def compare(self, x, y):
        return cmp_int(y, x)


class ThreadCarrier(Omega):
    """The naturals ordered by a thread order L."""

    def __init__(self, L):
        super().__init__()
        self.L = L
        self.expr = {"op": "thread", "L": L.to_json()}

    def compare(self, x, y):
        return self.L.compare(x, y)


class Sum(CountableOrder):
    def __init__(self, left: CountableOrder, right: CountableOrder):
        super().__init__()
        self.left, self.right = left, right
        if left.size is not None and right.size is not None:
            self.size = left.size + right.size
        self.expr = {"op": "sum", "left": left.expr, "right": right.expr}

    def valid(self, x):
        if isinstance(x, Left):
            return self.left.valid(x.x)
        return isinstance(x, Right) and self.right.valid(x.x)

    def compare(self, x, y):
        if isinstance(x, Left):
            return self.left.compare(x.x, y.x) if isinstance(y, Left) else LESS
        return self.right.compare(x.x, y.x) if isinstance(y, Right) else GREATER

    def _generate(self):
        for i in count():
            a = _index_or_none(self.left, i)
            b = _index_or_none(self.right, i)
            if a is None and b is None:
                return
            if a is not None:
                yield Left(a)
            if b is not None:
                yield Right(b)

    def to_json(self, x):
        if isinstance(x, Left):
            return {"left": self.left.to_json(x.x)}
        return {"right": self.right.to_json(x.x)}

    def from_json(self, obj):
        if "left" in obj:
            return Left(self.left.from_json(obj["left"]))
        return Right(self.right.from_json(obj["right"]))


class Prod(CountableOrder):
    """``major`` copies of ``minor``; codes Pair(hi in major, lo in minor)."""

    def __init__(self, minor: CountableOrder, major: CountableOrder, expr=None):
        super().__init__()
        self.minor, self.major = minor, major
        if minor.size is not None and major.size is not None:
            self.size = minor.size * major.size
        elif minor.size == 0 or major.size == 0:
            self.size = 0
        self.expr = expr or {"op": "prod", "minor": minor.expr, "major": major.expr}

    def valid(self, x):
        return isinstance(x, Pair) and self.major.valid(x.hi) and self.minor.valid(x.lo)

    def compare(self, x, y):
        c = self.major.compare(x.hi, y.hi)
        if c is not EQUAL:
            return c
        return self.minor.compare(x.lo, y.lo)

    def _generate(self):
        for hi, lo in _diagonal_pairs(self.major, self.minor):
            yield Pair(hi, lo)

    def to_json(self, x):
        return {"hi": self.major.to_json(x.hi), "lo": self.minor.to_json(x.lo)}

    def from_json(self, obj):
        return Pair(self.major.from_json(obj["hi"]), self.minor.from_json(obj["lo"]))


def omega_times(inner: CountableOrder) -> Prod:
    """omega . inner, elements omega*x + n as Pair(x, n)."""
    return Prod(Omega(), inner, expr={"op": "omega-times", "inner": inner.expr})


class OnePlus(CountableOrder):
    def __init__(self, inner: CountableOrder):
        super().__init__()
        self.inner = inner
        self.size = None if inner.size is None else inner.size + 1
        self.expr = {"op": "one-plus", "inner": inner.expr}

    def valid(self, x):
        return isinstance(x, ZeroCode) or (isinstance(x, In) and self.inner.valid(x.x))

    def compare(self, x, y):
        if isinstance(x, ZeroCode):
            return EQUAL if isinstance(y, ZeroCode) else LESS
        if isinstance(y, ZeroCode):
            return GREATER
        return self.inner.compare(x.x, y.x)

    def _generate(self):
        yield ZERO
        for x in self.inner:
            yield In(x)

    def to_json(self, x):
        return {"zero": True} if isinstance(x, ZeroCode) else {"in": self.inner.to_json(x.x)}

    def from_json(self, obj):
        if obj.get("zero") is True:
            return ZERO
        return In(self.inner.from_json(obj["in"]))


class PlusOne(CountableOrder):
    def __init__(self, inner: CountableOrder):
        super().__init__()
        self.inner = inner
        self.size = None if inner.size is None else inner.size + 1
        self.expr = {"op": "plus-one", "inner": inner.expr}

    def valid(self, x):
        return isinstance(x, TopCode) or (isinstance(x, In) and self.inner.valid(x.x))

    def compare(self, x, y):
        if isinstance(x, TopCode):
            return EQUAL if isinstance(y, TopCode) else GREATER
        if isinstance(y, TopCode):
            return LESS
        return self.inner.compare(x.x, y.x)

    def _generate(self):
        yield TOP
        for x in self.inner:
            yield In(x)

    def to_json(self, x):
        return {"top": True} if isinstance(x, TopCode) else {"in": self.inner.to_json(x.x)}

    def from_json(self, obj):
        if obj.get("top") is True:
            return TOP
        return In(self.inner.from_json(obj["in"]))


class TwoPower(CountableOrder):
    """2^gamma: finite sets of exponents, most significant (largest) first."""

    def __init__(self, exp: CountableOrder):
        super().__init__()
        self.exp = exp
        self.size = None if exp.size is None else 1 << exp.size
        self.expr = {"op": "two-power", "exp": exp.expr}

    def valid(self, x):
        if not isinstance(x, Exps) or not isinstance(x.exps, tuple):
            return False
        e = x.exps
        if not all(self.exp.valid(a) for a in e):
            return False
        return all(self.exp.compare(a, b) is GREATER for a, b in zip(e, e[1:]))

    def compare(self, x, y):
        return _lex(self.exp.compare, x.exps, y.exps)

    def _generate(self):
        desc = cmp_to_key(lambda a, b: self.exp.compare(b, a))
        for s in finite_subsets(self.exp):
            yield Exps(tuple(sorted(s, key=desc)))

    def to_json(self, x):
        return {"exps": [self.exp.to_json(a) for a in x.exps]}

    def from_json(self, obj):
        # ascending input is accepted and normalised to descending
        exps = [self.exp.from_json(a) for a in obj["exps"]]
        return Exps(tuple(sorted(exps, key=cmp_to_key(lambda a, b: self.exp.compare(b, a)))))


class BasePower(CountableOrder):
    """(1+alpha)^gamma with codes Terms(((x0, y0), ...)), x strictly descending in gamma."""

    def __init__(self, base: CountableOrder, exp: CountableOrder):
        super().__init__()
        self.base, self.exp = base, exp
        if base.size is not None and exp.size is not None:
            self.size = sum(_binom(exp.size, s) * base.size ** s for s in range(exp.size + 1))
        self.expr = {"op": "base-power", "base": base.expr, "exp": exp.expr}

    def valid(self, x):
        if not isinstance(x, Terms) or not isinstance(x.terms, tuple):
            return False
        for t in x.terms:
            if not (isinstance(t, tuple) and len(t) == 2):
                return False
            if not (self.exp.valid(t[0]) and self.base.valid(t[1])):
                return False
        xs = [t[0] for t in x.terms]
        return all(self.exp.compare(a, b) is GREATER for a, b in zip(xs, xs[1:]))

    def _cmp_pair(self, s, t):
        c = self.exp.compare(s[0], t[0])
        if c is not EQUAL:
            return c
        return self.base.compare(s[1], t[1])

    def compare(self, x, y):
        return _lex(self._cmp_pair, x.terms, y.terms)

    def _generate(self):
        if self.base.size == 0:
            yield Terms(())
            return
        desc = cmp_to_key(lambda a, b: self.exp.compare(b, a))
        sub_limit = None if self.exp.size is None else 1 << self.exp.size
        for b in count():
            if (sub_limit is not None and self.base.size is not None
                    and b >= max(sub_limit, self.base.size)):
                return
            for k in range(b + 1):
                if sub_limit is not None and k >= sub_limit:
                    break
                s = subset_by_index(self.exp, k)
                if s is None:
                    continue
                s = sorted(s, key=desc)
                top = b + 1
                if self.base.size is not None:
                    top = min(top, self.base.size)
                for ys in product(range(top), repeat=len(s)):
                    if max((k,) + ys) != b:
                        continue
                    yield Terms(tuple((x, self.base.nth(j)) for x, j in zip(s, ys)))

    def to_json(self, x):
        return {"terms": [[self.exp.to_json(a), self.base.to_json(b)] for a, b in x.terms]}

    def from_json(self, obj):
        return Terms(tuple((self.exp.from_json(a), self.base.from_json(b)) for a, b in obj["terms"]))


def _binom(n, k):
    from math import comb
    return comb(n, k)


class ZPower(CountableOrder):
    """Z^r, lexicographic with coordinate 0 most significant; codes are int tuples."""

    def __init__(self, r: int):
        super().__init__()
        self.r = r
        self.size = 1 if r == 0 else None
        self.expr = {"op": "z-power", "r": r}

    def valid(self, x):
        return (isinstance(x, tuple) and len(x) == self.r
                and all(isinstance(v, int) and not isinstance(v, bool) for v in x))

    def compare(self, x, y):
        return cmp_int(x, y)

    def _generate(self):
        if self.r == 0:
            yield ()
            return
        for b in count():
            for v in product(range(-b, b + 1), repeat=self.r):
                if max(abs(c) for c in v) == b:
                    yield v

    def to_json(self, x):
        return list(x)

    def from_json(self, obj):
        return tuple(obj)


class Eps0(CountableOrder):
    """Hereditary Cantor normal forms below epsilon_0."""

    expr = {"op": "eps0"}

    def valid(self, x):
        if not isinstance(x, Cnf) or not isinstance(x.terms, tuple):
            return False
        t = x.terms
        if not all(self.valid(e) for e in t):
            return False
        return all(cnf_compare(a, b) is not LESS for a, b in zip(t, t[1:]))

    def compare(self, x, y):
        return cnf_compare(x, y)

    def _generate(self):
        for s in count():
            yield from _cnf_of_size(s)

    def to_json(self, x):
        return {"cnf": [self.to_json(e) for e in x.terms]}

    def from_json(self, obj):
        if isinstance(obj, list):
            return Cnf(tuple(self.from_json(e) for e in obj))
        return Cnf(tuple(self.from_json(e) for e in obj["cnf"]))


def cnf_compare(x: Cnf, y: Cnf):
    return _lex(cnf_compare, x.terms, y.terms)


def cnf_size(x: Cnf) -> int:
    return sum(1 + cnf_size(e) for e in x.terms)


@lru_cache(maxsize=None)
def _cnf_of_size(s: int) -> tuple:
    return tuple(Cnf(seq) for seq in _desc_seqs(s, None))


@lru_cache(maxsize=None)
def _desc_seqs(s: int, bound) -> tuple:
    """Weakly descending exponent sequences of total size s, entries <= bound."""
    if s == 0:
        return ((),)
    out = []
    for t in range(s):
        for e in _cnf_of_size(t):
            if bound is not None and cnf_compare(e, bound) is GREATER:
                continue
            for rest in _desc_seqs(s - 1 - t, e):
                out.append((e,) + rest)
    return tuple(out)


class KB(CountableOrder):
    """Kleene-Brouwer order on a finite prefix-closed tree of natural sequences."""

    def __init__(self, tree, root: bool = True):
        super().__init__()
        nodes = {tuple(s) for s in tree}
        nodes.add(())
        for s in nodes:
            if not all(_is_nat(v) for v in s):
                raise OrderError(f"tree node {list(s)} has non-natural entries")
            if s and s[:-1] not in nodes:
                raise OrderError(f"tree not prefix-closed at {list(s)}")
        self.root = root
        if not root:
            nodes.discard(())
        self.nodes = frozenset(nodes)
        self.size = len(nodes)
        self.expr = {"op": "kb", "tree": [list(s) for s in sorted(nodes, key=lambda s: (len(s), s))],
                     "root": root}

    def valid(self, x):
        return isinstance(x, Node) and x.seq in self.nodes

    def compare(self, x, y):
        return kb_compare(x.seq, y.seq)

    def _generate(self):
        for s in sorted(self.nodes, key=lambda s: (len(s), s)):
            yield Node(s)

    def to_json(self, x):
        return {"node": list(x.seq)}

    def from_json(self, obj):
        return Node(tuple(obj["node"]))


def kb_compare(s: tuple, t: tuple):
    """s < t iff s properly extends t, or s is left of t at the first difference."""
    for a, b in zip(s, t):
        if a != b:
            return LESS if a < b else GREATER
    if len(s) == len(t):
        return EQUAL
    return LESS if len(s) > len(t) else GREATER


class ListOrder(CountableOrder):
    """A finite order given by its ascending list of (hashable) codes."""

    def __init__(self, ascending, name: str = "list", encode=None, decode=None):
        super().__init__()
        self.codes = tuple(ascending)
        self.rank = {c: i for i, c in enumerate(self.codes)}
        if len(self.rank) != len(self.codes):
            raise OrderError("duplicate codes")
        self.size = len(self.codes)
        self.name = name
        self._encode = encode
        self._decode = decode

    def valid(self, x):
        try:
            return x in self.rank
        except TypeError:
            return False

    def compare(self, x, y):
        return cmp_int(self.rank[x], self.rank[y])

    def _generate(self):
        return iter(self.codes)

    def to_json(self, x):
        return self._encode(x) if self._encode else x

    def from_json(self, obj):
        return self._decode(obj) if self._decode else obj

    def __repr__(self):
        return f"<ListOrder {self.name} size={self.size}>"


# -- expression parsing -------------------------------------------------------------

def build_order(expr) -> CountableOrder:
    """Build the order denoted by a JSON-shaped expression (dict or JSON string)."""
    if isinstance(expr, str):
        try:
            expr = json.loads(expr)
        except json.JSONDecodeError as exc:
            raise OrderError(f"order expression is not JSON: {exc}") from None
    return _build_cached(json.dumps(expr, sort_keys=True))


@lru_cache(maxsize=512)
def _build_cached(key: str) -> CountableOrder:
    return _build(json.loads(key))


def _child(expr, name):
    if not isinstance(expr, dict) or name not in expr:
        raise OrderError(f"{expr.get('op')!r} needs field {name!r}")
    return build_order(expr[name])


def _build(expr) -> CountableOrder:
    if not isinstance(expr, dict) or "op" not in expr:
        raise OrderError(f"malformed order expression: {expr!r}")
    op = expr["op"]
    if op == "nat":
        k = expr.get("k")
        if not _is_nat(k):
            raise OrderError("nat needs a natural k")
        return Nat(k)
    if op == "omega":
        return Omega()
    if op == "rev-omega":
        return RevOmega()
    if op == "sum":
        return Sum(_child(expr, "left"), _child(expr, "right"))
    if op == "prod":
        return Prod(_child(expr, "minor"), _child(expr, "major"))
    if op == "omega-times":
        return omega_times(_child(expr, "inner"))
    if op == "one-plus":
        return OnePlus(_child(expr, "inner"))
    if op == "plus-one":
        return PlusOne(_child(expr, "inner"))
    if op == "two-power":
        return TwoPower(_child(expr, "exp"))
    if op == "base-power":
        return BasePower(_child(expr, "base"), _child(expr, "exp"))
    if op == "z-power":
        r = expr.get("r")
        if not _is_nat(r):
            raise OrderError("z-power needs a natural r")
        return ZPower(r)
    if op == "eps0":
        return Eps0()
    if op == "kb":
        tree = expr.get("tree")
        if not isinstance(tree, list) or not all(isinstance(s, list) for s in tree):
            raise OrderError("kb needs a list of sequences")
        return KB(tree, root=bool(expr.get("root", True)))
    if op == "thread":
        from .zoo import thread_from_json
        return ThreadCarrier(thread_from_json(expr.get("L")))
    raise OrderError(f"unknown order constructor {op!r}")


def r_fold_product(x: CountableOrder, r: int) -> CountableOrder:
    """x^r as right-nested products: (c0, c1, ..., c_{r-1}) -> Pair(c0, Pair(c1, ...))."""
    if r < 1:
        raise OrderError("r-fold product needs r >= 1")
    if r == 1:
        return x
    return Prod(r_fold_product(x, r - 1), x)


def nest_tuple(cs):
    cs = list(cs)
    if len(cs) == 1:
        return cs[0]
    return Pair(cs[0], nest_tuple(cs[1:]))


# -- the 2^{eps_0} -> eps_0 embedding -----------------------------------------------

EPS0 = Eps0()
TWO_POWER_EPS0 = TwoPower(EPS0)


def embed_two_power_eps0(t: Exps) -> Cnf:
    """2^{t_0}+...+2^{t_{n-1}}  |->  omega^{t_0}+...+omega^{t_{n-1}}."""
    if not TWO_POWER_EPS0.valid(t):
        raise OrderError(f"not a canonical 2^eps0 term: {t!r}")
    return Cnf(tuple(t.exps))
