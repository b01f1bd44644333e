"""Concrete predilators: 2^alpha, the permuted-lexicographic family D_L, and E."""

from __future__ import annotations

import json
from functools import lru_cache

from .codes import ZERO, In, Pair, ZeroCode, cmp_int
from .orders import CountableOrder, Nat, OnePlus, OrderError, omega_times
from .predilator import NaturalTransformation, Predilator, compose_with_E


# -- thread orders: linear orders on the naturals -----------------------------------

class ThreadOrder:
    """A linear order L = (N, <=_L), given by a sort key on the naturals."""

    name = "thread"

    def key(self, i: int):
        raise NotImplementedError

    def compare(self, i: int, j: int):
        return cmp_int(self.key(i), self.key(j))

    def le(self, i: int, j: int) -> bool:
        return self.key(i) <= self.key(j)

    def to_json(self) -> dict:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, ThreadOrder) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(json.dumps(self.to_json(), sort_keys=True))

    def __repr__(self):
        return f"<thread {self.name}>"


class _Builtin(ThreadOrder):
    def to_json(self):
        return {"builtin": self.name}


class OmegaThread(_Builtin):
    name = "omega"

    def key(self, i):
        return i


class RevOmegaThread(_Builtin):
    name = "rev-omega"

    def key(self, i):
        return -i


class ZigzagThread(_Builtin):
    """0 < 2 < 4 < ... < 5 < 3 < 1."""

    name = "zigzag"

    def key(self, i):
        return (0, i) if i % 2 == 0 else (1, -i)


class PerturbedThread(ThreadOrder):
    """A built-in order with finitely many points relabelled by transpositions."""

    def __init__(self, base: ThreadOrder, swaps):
        self.base = base
        self.swaps = [tuple(s) for s in swaps]
        perm: dict[int, int] = {}
        for i, j in self.swaps:
            pi, pj = perm.get(i, i), perm.get(j, j)
            perm[i], perm[j] = pj, pi
        self.perm = perm
        self.name = f"perturb({base.name})"

    def key(self, i):
        return self.base.key(self.perm.get(i, i))

    def to_json(self):
        return {"perturb": {"base": self.base.to_json(), "swaps": [list(s) for s in self.swaps]}}


class TableThread(ThreadOrder):
    """Points ``ascending`` (a permutation of 0..k-1) in the given order, then k < k+1 < ..."""

    def __init__(self, ascending):
        self.ascending = tuple(ascending)
        if sorted(self.ascending) != list(range(len(self.ascending))):
            raise OrderError("table thread must list each of 0..k-1 once")
        self.rank = {x: r for r, x in enumerate(self.ascending)}
        self.name = "table"

    def key(self, i):
        return self.rank.get(i, i)

    def to_json(self):
        return {"table": list(self.ascending)}


BUILTIN_THREADS = {"omega": OmegaThread(), "rev-omega": RevOmegaThread(), "zigzag": ZigzagThread()}


def thread_from_json(obj) -> ThreadOrder:
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError:
            obj = {"builtin": obj}
    if not isinstance(obj, dict):
        raise OrderError(f"malformed thread order: {obj!r}")
    if "builtin" in obj:
        try:
            return BUILTIN_THREADS[obj["builtin"]]
        except KeyError:
            raise OrderError(f"unknown built-in thread {obj['builtin']!r}") from None
    if "perturb" in obj:
        spec = obj["perturb"]
        swaps = spec.get("swaps", [])
        if not all(isinstance(s, list) and len(s) == 2 and all(isinstance(v, int) and v >= 0 for v in s)
                   for s in swaps):
            raise OrderError("swaps must be pairs of naturals")
        return PerturbedThread(thread_from_json(spec.get("base")), swaps)
    if "table" in obj:
        return TableThread(obj["table"])
    raise OrderError(f"malformed thread order: {obj!r}")


def dl_priority(L: ThreadOrder, n: int) -> tuple:
    """pi^L_n: pi(i) <= pi(j) iff i <=_L j, i.e. pi(i) is the L-rank of i within n."""
    ranked = sorted(range(n), key=L.key)
    perm = [0] * n
    for r, i in enumerate(ranked):
        perm[i] = r
    return tuple(perm)


# -- D_L -----------------------------------------------------------------------------

class DL(Predilator):
    """Strictly increasing sequences, compared lexicographically in L-priority order."""

    def __init__(self, L: ThreadOrder):
        super().__init__()
        self.L = L
        self.name = f"dl:{L.name}" if not isinstance(L, (PerturbedThread, TableThread)) \
            else "dl:" + json.dumps(L.to_json(), sort_keys=True)
        self._perm_cache: dict[int, tuple] = {}

    def perm(self, n):
        p = self._perm_cache.get(n)
        if p is None:
            p = self._perm_cache.setdefault(n, dl_priority(self.L, n))
        return p

    def priority_key(self, seq):
        p = self.perm(len(seq))
        return tuple(seq[p[i]] for i in range(len(seq)))

    def _make_level(self, n):
        return DLLevel(self, n)

    def _act(self, images, n, sigma):
        return tuple(images[x] for x in sigma)

    def supp(self, n, sigma):
        return tuple(sigma)

    def pullback(self, f, tau):
        inv = {y: i for i, y in enumerate(f.graph)}
        try:
            return tuple(inv[y] for y in tau)
        except KeyError:
            return None


class DLLevel(CountableOrder):
    """D_L(n): codes are increasing tuples over range(n), enumerated by bitmask."""

    def __init__(self, D: DL, n: int):
        super().__init__()
        self.D, self.n = D, n
        self.size = 1 << n

    def valid(self, x):
        return (isinstance(x, tuple) and all(isinstance(v, int) and 0 <= v < self.n for v in x)
                and all(a < b for a, b in zip(x, x[1:])))

    def compare(self, x, y):
        return cmp_int(self.D.priority_key(x), self.D.priority_key(y))

    def _generate(self):
        for k in range(self.size):
            yield tuple(i for i in range(self.n) if k >> i & 1)

    def to_json(self, x):
        return list(x)

    def from_json(self, obj):
        if not isinstance(obj, list):
            raise TypeError("D_L codes are integer arrays")
        return tuple(obj)

    def __repr__(self):
        return f"<{self.D.name}({self.n})>"


def make_DL(L: ThreadOrder) -> DL:
    return _dl_cached(L)


@lru_cache(maxsize=None)
def _dl_cached(L):
    return DL(L)


# -- 2^alpha -------------------------------------------------------------------------

class TwoPowerPredilator(Predilator):
    """D(n) = 2^n with codes the binary values 0 .. 2^n - 1."""

    name = "two-power"

    def _make_level(self, n):
        return Nat(1 << n)

    def _act(self, images, n, sigma):
        out = 0
        i = 0
        while sigma:
            if sigma & 1:
                out |= 1 << images[i]
            sigma >>= 1
            i += 1
        return out

    def supp(self, n, sigma):
        return tuple(i for i in range(n) if sigma >> i & 1)

    def pullback(self, f, tau):
        inv = {y: i for i, y in enumerate(f.graph)}
        out = 0
        for y in self.supp(f.target_size, tau):
            if y not in inv:
                return None
            out |= 1 << inv[y]
        return out


# -- E(alpha) = omega * (1 + alpha) ------------------------------------------------

@lru_cache(maxsize=None)
def e_carrier(n: int):
    return omega_times(OnePlus(Nat(n)))


def e_point_act(images, x: Pair) -> Pair:
    if isinstance(x.hi, ZeroCode):
        return x
    return Pair(In(images[x.hi.x]), x.lo)


def e_point_supp(x: Pair) -> tuple:
    return () if isinstance(x.hi, ZeroCode) else (x.hi.x,)


def e_point(x, n: int) -> Pair:
    """omega*(1+x)+n; pass x=None for omega*0+n."""
    return Pair(ZERO if x is None else In(x), n)


class EPredilator(Predilator):
    name = "E"

    def _make_level(self, n):
        return e_carrier(n)

    def _act(self, images, n, sigma):
        return e_point_act(images, sigma)

    def supp(self, n, sigma):
        return e_point_supp(sigma)

    def pullback(self, f, tau):
        if isinstance(tau.hi, ZeroCode):
            return tau
        inv = {y: i for i, y in enumerate(f.graph)}
        if tau.hi.x not in inv:
            return None
        return Pair(In(inv[tau.hi.x]), tau.lo)


# -- test fixtures -------------------------------------------------------------------

class IdentityPredilator(Predilator):
    name = "identity"

    def _make_level(self, n):
        return Nat(n)

    def _act(self, images, n, sigma):
        return images[sigma]

    def supp(self, n, sigma):
        return (sigma,)


class ConstantPredilator(Predilator):
    """D(alpha) = 1."""

    name = "constant"

    def _make_level(self, n):
        return Nat(1)

    def _act(self, images, n, sigma):
        return 0

    def supp(self, n, sigma):
        return ()


_TWO_POWER = TwoPowerPredilator()
_E = EPredilator()
_IDENTITY = IdentityPredilator()
_CONSTANT = ConstantPredilator()


def two_power() -> TwoPowerPredilator:
    return _TWO_POWER


def make_E() -> EPredilator:
    return _E


def identity() -> IdentityPredilator:
    return _IDENTITY


def constant() -> ConstantPredilator:
    return _CONSTANT


def get_predilator(name: str) -> Predilator:
    """Registry: two-power, dl:<L>, E, compose-E:<name>, identity, constant."""
    if name == "two-power":
        return _TWO_POWER
    if name == "E":
        return _E
    if name == "identity":
        return _IDENTITY
    if name == "constant":
        return _CONSTANT
    if name.startswith("compose-E:"):
        return compose_with_E(get_predilator(name[len("compose-E:"):]))
    if name.startswith("dl:"):
        return make_DL(thread_from_json(name[3:]))
    raise KeyError(f"unknown predilator {name!r}")


def binary_to_sequence(code: int) -> tuple:
    """Bijection 2^n -> D_{rev-omega}(n): the set bits in increasing order."""
    out = []
    i = 0
    while code:
        if code & 1:
            out.append(i)
        code >>= 1
        i += 1
    return tuple(out)


def binary_iso() -> NaturalTransformation:
    """Components 2^n -> D_{rev-omega}(n) sending a binary code to its set bits."""
    return NaturalTransformation(_TWO_POWER, make_DL(BUILTIN_THREADS["rev-omega"]),
                                 lambda n, code: binary_to_sequence(code), "binary-to-sequence")


def sequence_to_binary(seq) -> int:
    return sum(1 << i for i in seq)
