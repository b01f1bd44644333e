"""Executable constructions around D_L: descending sequences, thread extraction,
the two eta embeddings, bounded well-foundedness probes and the limit-lemma tree."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable

from .calculus import _priority, _profile
from .codes import EQUAL, GREATER, LESS, TOP, ZERO, Exps, In, Pair, Terms
from .finite import embedding_images
from .orders import (BasePower, CountableOrder, KB, OrderError, PlusOne, Prod, TwoPower,
                     build_order, kb_compare, nest_tuple, omega_times, r_fold_product)
from .predilator import (Predilator, PredilatorError, Term, ValidationReport,
                         _compare_direct_fast, compare_direct, compose_with_E, term_from_json,
                         term_to_json)
from .zoo import (DL, TableThread, ThreadOrder, dl_priority, e_carrier, get_predilator, make_DL)


class LabError(ValueError):
    pass


# -- descending sequences -------------------------------------------------------------

@dataclass
class DescentCertificate:
    """A finite strictly descending sequence in the extension of ``predilator``."""

    predilator: Predilator
    carrier: CountableOrder
    terms: list

    def failures(self) -> list:
        """Indices i with terms[i] <= terms[i+1] under compare_direct."""
        D = self.predilator
        return [i for i, (s, t) in enumerate(zip(self.terms, self.terms[1:]))
                if compare_direct(D, s, t) is not GREATER]

    @property
    def valid(self) -> bool:
        return not self.failures()

    def __len__(self):
        return len(self.terms)

    def to_json(self) -> dict:
        return {"predilator": self.predilator.name, "carrier": self.carrier.expr,
                "terms": [term_to_json(self.predilator, t, with_carrier=False) for t in self.terms]}

    @classmethod
    def from_json(cls, obj) -> "DescentCertificate":
        try:
            D = get_predilator(obj["predilator"])
            carrier = build_order(obj["carrier"])
            terms = [term_from_json(D, t, carrier) for t in obj["terms"]]
        except (KeyError, TypeError) as exc:
            raise LabError(f"malformed certificate: {exc}") from None
        return cls(D, carrier, terms)


def _dl_term(L: ThreadOrder, values: list, carrier: CountableOrder) -> Term:
    """The full-support D_L term whose priority-i support value is values[i]."""
    k = len(values)
    pi = dl_priority(L, k)
    support = [None] * k
    for i, v in enumerate(values):
        support[pi[i]] = v
    for x, y in zip(support, support[1:]):
        if carrier.compare(x, y) is not LESS:
            raise LabError("priority values are not compatible with the carrier order")
    return Term(tuple(range(k)), tuple(support), carrier)


def thread_carrier(L: ThreadOrder) -> CountableOrder:
    return build_order({"op": "omega-times", "inner": {"op": "thread", "L": L.to_json()}})


def dl_descent(L: ThreadOrder, k: int) -> DescentCertificate:
    """sigma_0 > ... > sigma_k in D_L(omega*L); sigma_n has priority values w*i+0 (i<n), w*n+1."""
    carrier = thread_carrier(L)
    terms = [_dl_term(L, [Pair(i, 0) for i in range(n)] + [Pair(n, 1)], carrier)
             for n in range(k + 1)]
    return DescentCertificate(make_DL(L), carrier, terms)


def priority_values(L: ThreadOrder, t: Term) -> tuple:
    pi = dl_priority(L, t.level)
    return tuple(t.support[pi[i]] for i in range(t.level))


@dataclass
class EmbeddingResult:
    mapping: dict
    witnesses: dict
    status: str
    order_preserving: bool
    carrier: CountableOrder | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        enc = self.carrier.to_json if self.carrier is not None else (lambda x: x)
        return {"map": [[j, enc(v)] for j, v in sorted(self.mapping.items())],
                "witnesses": {str(j): w for j, w in sorted(self.witnesses.items())},
                "status": self.status, "orderPreserving": self.order_preserving}


def embedding_from_descent(L: ThreadOrder, alpha: CountableOrder, cert: DescentCertificate) -> EmbeddingResult:
    """Read off j -> sigma^L_{I(j+1), j} where priority-j values have stabilised."""
    if not isinstance(cert.predilator, DL) or cert.predilator.L != L:
        raise LabError("certificate does not live in D_L for the given L")
    if cert.failures():
        raise LabError("certificate is not strictly descending")
    terms = cert.terms
    N = len(terms)
    vals = [priority_values(L, t) for t in terms]
    mapping, witnesses = {}, {}
    start = 0
    j = 0
    while N and len(vals[-1]) > j + 1:
        n0 = None
        # priority 0 needs two witnesses; later priorities extend an already witnessed chain
        last = N - 1 if j else N - 2
        for cand in range(start + 1, last + 1):
            tail = vals[cand:]
            if all(len(v) > j for v in tail) and all(alpha.compare(v[j], tail[0][j]) is EQUAL for v in tail):
                n0 = cand
                break
        if n0 is None:
            break
        mapping[j] = vals[n0][j]
        witnesses[j] = list(range(n0, N))
        start = n0
        j += 1
    keys = sorted(mapping)
    preserving = all(alpha.compare(mapping[a], mapping[b]) is L.compare(a, b)
                     for a in keys for b in keys if a != b)
    conclusive = bool(mapping) and all(len(w) >= 2 for w in witnesses.values())
    return EmbeddingResult(mapping, witnesses, "conclusive" if conclusive else "inconclusive",
                           preserving, alpha)


# -- eta embeddings -------------------------------------------------------------------

def power_carrier(gamma: CountableOrder, alpha: CountableOrder) -> CountableOrder:
    """alpha * 2^gamma, written as prod(minor alpha, major 2^gamma)."""
    return Prod(alpha, TwoPower(gamma))


def eta_power(gamma: CountableOrder, L: ThreadOrder, alpha: CountableOrder, x: Terms) -> Term:
    """Send (1+alpha)^gamma into D_L(alpha * 2^gamma)."""
    if not BasePower(alpha, gamma).valid(x):
        raise LabError(f"not a canonical (1+alpha)^gamma code: {x!r}")
    carrier = power_carrier(gamma, alpha)
    k = len(x.terms)
    pi = dl_priority(L, k)
    placed: dict[int, Pair] = {}
    sigmas: list[Exps] = []
    for i, (g, a) in enumerate(x.terms):
        if i == 0:
            cands = [Exps((g,))]
        else:
            cands = [Exps((g,))] + [Exps(s.exps + (g,)) for s in sigmas]
        fits = [c for c in cands if _fits(carrier, placed, pi[i], Pair(c, a))]
        if len(fits) != 1:
            raise LabError(f"placement of priority {i} is not unique ({len(fits)} candidates)")
        sigmas.append(fits[0])
        placed[pi[i]] = Pair(fits[0], a)
    support = tuple(placed[p] for p in range(k))
    for u, v in zip(support, support[1:]):
        if carrier.compare(u, v) is not LESS:
            raise LabError("eta_power produced a non-increasing support")
    return Term(tuple(range(k)), support, carrier)


def _fits(carrier, placed: dict, pos: int, value) -> bool:
    for q, v in placed.items():
        c = carrier.compare(v, value)
        if c is EQUAL or (q < pos) != (c is LESS):
            return False
    return True


@dataclass(frozen=True)
class ScatteredData:
    """h : j -> Z^r strictly increasing along L, with bounds N_j >= j and h(j) >= -N_j."""

    r: int
    h: tuple
    N: tuple

    def __post_init__(self):
        if self.r < 1:
            raise LabError("rank r must be at least 1")
        if len(self.h) != len(self.N):
            raise LabError("h and N must cover the same indices")
        for j, (hj, nj) in enumerate(zip(self.h, self.N)):
            if len(hj) != self.r:
                raise LabError(f"h({j}) must have {self.r} coordinates")
            if nj < j:
                raise LabError(f"N_{j} = {nj} is below {j}")
            if any(c < -nj for c in hj):
                raise LabError(f"h({j}) has a coordinate below -N_{j}")

    @classmethod
    def from_functions(cls, r: int, h: Callable, N: Callable, size: int) -> "ScatteredData":
        def tup(v):
            return tuple(v) if isinstance(v, (list, tuple)) else (v,)
        return cls(r, tuple(tup(h(j)) for j in range(size)), tuple(N(j) for j in range(size)))

    @classmethod
    def from_json(cls, obj) -> "ScatteredData":
        try:
            r = int(obj.get("r", 1))
            h = tuple(tuple(v) if isinstance(v, list) else (v,) for v in obj["h"])
            return cls(r, h, tuple(obj["N"]))
        except (KeyError, TypeError, AttributeError) as exc:
            raise LabError(f"malformed scattered data: {exc}") from None

    def to_json(self) -> dict:
        return {"r": self.r, "h": [list(v) for v in self.h], "N": list(self.N)}

    def check_monotone(self, L: ThreadOrder) -> bool:
        idx = range(len(self.h))
        return all(self.h[i] < self.h[j] for i in idx for j in idx if L.compare(i, j) is LESS)


def scattered_carrier(alpha: CountableOrder, r: int) -> CountableOrder:
    return Prod(alpha, r_fold_product(omega_times(PlusOne(alpha)), r))


def eta_scattered(data: ScatteredData, L: ThreadOrder, alpha: CountableOrder, t: Exps) -> Term:
    """Send 2^alpha into D_L(alpha * (omega*(alpha+1))^r) using a scattered-rank witness."""
    if not TwoPower(alpha).valid(t):
        raise LabError(f"not a canonical 2^alpha code: {t!r}")
    exps = t.exps
    n = len(exps)
    if n > len(data.h):
        raise LabError(f"scattered data covers {len(data.h)} indices, term needs {n}")
    if not all(data.h[i] < data.h[j] for i in range(n) for j in range(n) if L.compare(i, j) is LESS):
        raise LabError("h is not increasing along L")

    def jq(q: int) -> int:
        for j in range(n):
            if q >= -data.N[j]:
                return j
        raise LabError(f"no index j < {n} with {q} >= -N_j")

    def qbar(q: int) -> Pair:
        j = jq(q)
        return Pair(TOP if j == 0 else In(exps[j - 1]), data.N[j] + q)

    carrier = scattered_carrier(alpha, data.r)
    pi = dl_priority(L, n)
    support = [None] * n
    for j in range(n):
        hbar = nest_tuple([qbar(q) for q in data.h[j]])
        support[pi[j]] = Pair(hbar, exps[j])
    for u, v in zip(support, support[1:]):
        if carrier.compare(u, v) is not LESS:
            raise LabError("eta_scattered produced a non-increasing support")
    return Term(tuple(range(n)), tuple(support), carrier)


# -- thread extraction ----------------------------------------------------------------

@dataclass
class ThreadExtraction:
    cert: DescentCertificate = field(repr=False)
    p_matrix: list
    eps_matrix: list
    repeated: list
    selected: list
    relation: dict           # (k, l) with k < l  ->  LESS / GREATER, from the witnesses
    witness_counts: dict
    conflicts: list
    conclusive_through: int  # -1 when no point is settled
    level_budget: int

    @property
    def points(self) -> int:
        return self.conclusive_through + 1

    @property
    def status(self) -> str:
        return "conclusive" if self.conclusive_through >= 1 and not self.conflicts else "inconclusive"

    def stabilized_pairs(self) -> list:
        """Pairs [k, l] with k <_L l among the settled points."""
        out = []
        t = self.conclusive_through
        for (k, l), c in sorted(self.relation.items()):
            if l <= t:
                out.append([k, l] if c is LESS else [l, k])
        return sorted(out)

    def thread_order(self) -> TableThread:
        """The settled relation as an order on 0..t, continued by omega above."""
        t = self.conclusive_through
        pts = list(range(t + 1))
        from functools import cmp_to_key

        def cmp(a, b):
            if a == b:
                return 0
            c = self.relation[(min(a, b), max(a, b))]
            return int(c) if a < b else -int(c)
        return TableThread(sorted(pts, key=cmp_to_key(cmp)))

    def to_json(self) -> dict:
        enc = lambda m: [[None if v is None else int(v) for v in row] for row in m]
        return {"status": self.status, "pMatrix": enc(self.p_matrix), "epsMatrix": enc(self.eps_matrix),
                "repeated": self.repeated, "iIndices": {str(j): i for j, i in enumerate(self.selected)},
                "stabilizedPrefix": self.stabilized_pairs(), "points": self.points,
                "conflicts": self.conflicts, "levelBudget": self.level_budget}


def extract_thread(D: Predilator, cert: DescentCertificate, level_budget: int = 12) -> ThreadExtraction:
    """Bounded version of the subsequence selection behind a thread.

    Security profiles are computed only for pairs whose levels sum to at most
    ``level_budget``; other entries stay ``None`` and block selection.
    """
    if cert.predilator is not D and cert.predilator != D:
        raise LabError("certificate belongs to a different predilator")
    if cert.failures():
        raise LabError("certificate is not strictly descending")
    terms = cert.terms
    K = len(terms)
    P = [[None] * K for _ in range(K)]
    E = [[None] * K for _ in range(K)]
    for i in range(K):
        for j in range(K):
            s, t = terms[i], terms[j]
            if s.trace == t.trace or s.level + t.level > level_budget:
                continue
            prof = _profile(D, s.sigma, s.level, t.sigma, t.level)
            P[i][j], E[i][j] = prof.p, prof.eps

    repeated, first = [], {}
    for i, t in enumerate(terms):
        if t.trace in first:
            repeated.append([first[t.trace], i])
        else:
            first[t.trace] = i
    pool = sorted(first.values())

    carrier = cert.carrier

    def a(i, u):
        t = terms[i]
        return t.support[_priority(D, t.sigma, t.level).perm[u]]

    selected: list[int] = []
    for j in pool:
        ok = True
        for k, s in enumerate(selected):
            pk = P[s][j]
            if pk is None or pk < k or terms[j].level < k:
                ok = False
                break
            if any(carrier.compare(a(s, u), a(j, u)) is not EQUAL for u in range(k)):
                ok = False
                break
        if ok:
            selected.append(j)

    relation, counts, conflicts = {}, {}, []
    for i, s in enumerate(selected):
        t = terms[s]
        perm = _priority(D, t.sigma, t.level).perm
        top = min(i, t.level)
        for k in range(top):
            for l in range(k + 1, top):
                c = LESS if perm[k] < perm[l] else GREATER
                if (k, l) in relation and relation[(k, l)] is not c:
                    conflicts.append([k, l, i])
                    continue
                relation.setdefault((k, l), c)
                counts[(k, l)] = counts.get((k, l), 0) + 1
    bad = {(k, l) for k, l, _ in conflicts}
    t = -1
    while True:
        nxt = t + 1
        if not all(counts.get((k, nxt), 0) >= 2 and (k, nxt) not in bad for k in range(nxt)):
            break
        # a lone point needs at least one selected term that can see it
        if nxt == 0 and not any(terms[s].level > 0 for s in selected[1:]):
            break
        t = nxt
    return ThreadExtraction(cert, P, E, repeated, selected, relation, counts, conflicts, t, level_budget)


def _gap_positions(level: int, pins: list) -> dict:
    """Place the positions of a level into omega*(1+i): the l-th pin at omega*(1+l)+0,
    other positions in the gaps (omega*0+c below all pins, omega*(1+l)+c after pin l)."""
    rank = {p: l for l, p in enumerate(sorted(pins))}
    out, seg, cnt = {}, None, 0
    for pos in range(level):
        if pos in rank:
            seg, cnt = rank[pos], 1
            out[pos] = Pair(In(seg), 0)
        else:
            out[pos] = Pair(ZERO if seg is None else In(seg), cnt)
            cnt += 1
    return out


def thread_family(D: Predilator, extraction: ThreadExtraction, n: int) -> dict:
    """Map D_L(n) into (D o E)(n), L the extracted thread, using the selected terms."""
    if extraction.conclusive_through < n + 1 or len(extraction.selected) < n + 2:
        raise LabError(f"extraction settles {extraction.points} points; level {n} needs {n + 2}")
    L = extraction.thread_order()
    DL_ = make_DL(L)
    terms = extraction.cert.terms
    out = {}
    for rho in DL_.level(n):
        i = len(rho)
        t = terms[extraction.selected[i + 1]]
        perm = _priority(D, t.sigma, t.level).perm
        pins = [perm[k] for k in range(i)]
        g = _gap_positions(t.level, pins)
        support = []
        for pos in range(t.level):
            x = g[pos]
            if isinstance(x.hi, In):
                x = Pair(In(rho[x.hi.x]), x.lo)
            support.append(x)
        out[rho] = Term(t.sigma, tuple(support), e_carrier(n))
    return out


def identity_family(L: ThreadOrder) -> Callable:
    """The family D_L(n) -> D_L(omega*(1+n)) induced by x |-> omega*(1+x)+0."""
    def fam(n, rho):
        return Term(tuple(range(len(rho))), tuple(Pair(In(x), 0) for x in rho), e_carrier(n))
    return fam


def verify_thread(D: Predilator, L: ThreadOrder, family, n_max: int) -> ValidationReport:
    """Injectivity, order preservation and naturality of D_L(n) -> (D o E)(n), n <= n_max."""
    fam = _as_family(family)
    DL_ = make_DL(L)
    CE = compose_with_E(D)
    rep = ValidationReport(f"thread {L.name} -> {D.name}", n_max, 0)
    images: dict[int, dict] = {}
    for n in range(n_max + 1):
        lv = DL_.level(n)
        src = lv.sorted(list(lv))
        try:
            imgs = {rho: fam(n, rho) for rho in src}
        except (KeyError, LabError) as exc:
            rep.add("undefined", level=n, detail=str(exc))
            continue
        images[n] = imgs
        seen = {}
        level_n = CE.level(n)
        for rho, y in imgs.items():
            rep.checks += 1
            if not level_n.valid(y):
                rep.add("invalid-image", level=n, rho=list(rho))
            key = (y.sigma, y.support)
            if key in seen:
                rep.add("injectivity", level=n, first=list(seen[key]), second=list(rho))
            else:
                seen[key] = rho
        for r1, r2 in zip(src, src[1:]):
            rep.checks += 1
            y1, y2 = imgs[r1], imgs[r2]
            if (y1.sigma, y1.support) == (y2.sigma, y2.support):
                continue
            if not (level_n.valid(y1) and level_n.valid(y2)):
                continue
            if compare_direct(D, y1, y2) is not LESS:
                rep.add("order-preservation", level=n, lower=list(r1), upper=list(r2))
    for n in images:
        for m in images:
            if m > n:
                continue
            for f in embedding_images(m, n):
                for rho, y in images[m].items():
                    rep.checks += 1
                    lhs = images[n][DL_._act(f, n, rho)]
                    rhs = CE._act(f, n, y)
                    if (lhs.sigma, lhs.support) != (rhs.sigma, rhs.support):
                        rep.add("naturality", f=list(f), n=n, rho=list(rho))
    return rep


def _as_family(family) -> Callable:
    if callable(family):
        return family
    if isinstance(family, dict):
        return lambda n, rho: family[n][rho]
    raise LabError("family must be callable or a per-level mapping")


# -- well-foundedness probe -----------------------------------------------------------

@dataclass
class ProbeResult:
    status: str                       # "certificate" | "exhausted"
    certificate: DescentCertificate | None
    bounds: dict
    reason: str = ""

    def to_json(self) -> dict:
        out = {"status": self.status, "bounds": self.bounds}
        if self.reason:
            out["reason"] = self.reason
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def _extension_is_finite(D: Predilator, alpha: CountableOrder) -> bool:
    if alpha.size is None:
        return False
    return all(D.level(k).size is not None for k in range(alpha.size + 1))


def descend_probe(D: Predilator, alpha: CountableOrder, depth: int = 16, width: int = 32,
                  max_support: int = 3) -> ProbeResult:
    """Search for a descending chain of length ``depth`` among bounded candidate terms.

    Candidates: supports of size <= max_support among the first ``width`` carrier
    codes, constructors among the first ``width`` level codes.  The returned chain
    is the first one in candidate order (size, enumeration indices of the
    support, constructor rank).
    """
    bounds = {"depth": depth, "width": width, "maxSupport": max_support}
    if _extension_is_finite(D, alpha):
        return ProbeResult("exhausted", None, bounds, "finite extension")
    codes = alpha.prefix(width)
    cands: list[Term] = []
    for size in range(min(max_support, len(codes)) + 1):
        lv = D.level(size)
        sigmas = [s for s in lv.prefix(width) if D.is_trace(size, s)]
        if not sigmas:
            continue
        for idx in combinations(range(len(codes)), size):
            a = tuple(alpha.sorted(codes[i] for i in idx))
            for s in sigmas:
                cands.append(Term(s, a, alpha))
    if depth <= 0:
        return ProbeResult("certificate", DescentCertificate(D, alpha, []), bounds)
    from functools import cmp_to_key
    order = sorted(range(len(cands)), key=cmp_to_key(
        lambda i, j: int(_compare_direct_fast(D, cands[i], cands[j]))))
    rank = [0] * len(cands)
    for r, i in enumerate(order):
        rank[i] = r
    # longest strictly descending chain starting at i, capped at depth
    n = len(cands)
    tree = [0] * (n + 1)

    def query(r):  # max over ranks < r
        best = 0
        while r > 0:
            best = max(best, tree[r])
            r -= r & -r
        return best

    def update(r, v):
        r += 1
        while r <= n:
            tree[r] = max(tree[r], v)
            r += r & -r

    f = [0] * n
    for i in range(n - 1, -1, -1):
        f[i] = min(depth, 1 + query(rank[i]))
        update(rank[i], f[i])
    start = next((i for i in range(n) if f[i] >= depth), None)
    if start is None:
        return ProbeResult("exhausted", None, bounds, "no chain within bounds")
    chain = [start]
    for need in range(depth - 1, 0, -1):
        cur = chain[-1]
        chain.append(next(j for j in range(cur + 1, n) if rank[j] < rank[cur] and f[j] >= need))
    cert = DescentCertificate(D, alpha, [cands[i] for i in chain])
    if cert.failures():
        raise LabError("probe produced a chain that fails re-verification")
    return ProbeResult("certificate", cert, bounds)


# -- limit-lemma tree -----------------------------------------------------------------

@dataclass
class LimitTree:
    l: int
    d: tuple
    nodes: list
    branch: tuple
    order: KB

    def to_json(self) -> dict:
        return {"l": self.l, "nodes": [list(s) for s in self.nodes], "branch": list(self.branch),
                "order": self.order.expr}


def _table(obj) -> tuple[int, tuple]:
    try:
        l = obj["l"]
        d = tuple(tuple(int(v) for v in row) for row in obj["d"])
    except (KeyError, TypeError, ValueError) as exc:
        raise LabError(f"malformed limit table: {exc}") from None
    if not isinstance(l, int) or l < 0:
        raise LabError("table length must be a natural number")
    if len(d) < l or any(len(d[k]) < l for k in range(l)):
        raise LabError(f"table too small: need d(k, n) for all k, n < {l}")
    return l, d


def limit_node_ok(d, seq) -> bool:
    """Clauses (i) and (ii) for a sequence <k(0), ..., k(len-1)>."""
    l = len(seq)
    for n, kn in enumerate(seq):
        if kn > 0 and d[kn - 1][n] == d[kn][n]:
            return False
        if any(d[kn][n] != d[k][n] for k in range(kn + 1, l)):
            return False
    return True


def limit_tree(table) -> LimitTree:
    l, d = _table(table)
    nodes = [()]
    frontier = [()]
    for _ in range(l):
        nxt = []
        for s in frontier:
            for k in range(l):
                c = s + (k,)
                if limit_node_ok(d, c):
                    nxt.append(c)
        nodes.extend(nxt)
        frontier = nxt
    branch = []
    for n in range(l):
        K = l - 1
        while K > 0 and d[K - 1][n] == d[l - 1][n]:
            K -= 1
        branch.append(K)
    order = KB(nodes, root=False)
    return LimitTree(l, d, nodes, tuple(branch), order)


def check_limit_tree(tree: LimitTree) -> ValidationReport:
    rep = ValidationReport("limit-tree", tree.l, len(tree.nodes))
    for s in tree.nodes:
        rep.checks += 1
        if not limit_node_ok(tree.d, s):
            rep.add("clause", node=list(s))
    node_set = set(tree.nodes)
    for length in range(1, tree.l + 1):
        b = tree.branch[:length]
        rep.checks += 1
        if b not in node_set:
            rep.add("branch-missing", node=list(b))
            continue
        for s in tree.nodes:
            if len(s) == length and s != b:
                rep.checks += 1
                if kb_compare(s, b) is not LESS:
                    rep.add("branch-not-maximal", node=list(s), branch=list(b))
    return rep
