"""The acceptance suite, shared by ``dilators selftest`` and the test-suite."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from itertools import combinations

from .calculus import (agreement_bound, compare, priority_permutation, secure_indices,
                       security_profile, triangle_check)
from .codes import EQUAL, LESS, Exps, Pair, Terms
from .lab import (ScatteredData, descend_probe, dl_descent, embedding_from_descent, eta_power,
                  eta_scattered, extract_thread, limit_tree, check_limit_tree, thread_family,
                  verify_thread)
from .orders import (EPS0, TWO_POWER_EPS0, BasePower, Nat, Omega, RevOmega, TwoPower,
                     embed_two_power_eps0)
from .predilator import compare_direct, extend_act, make_term, trace_elements
from .zoo import (BUILTIN_THREADS, binary_to_sequence, get_predilator, make_DL, two_power)

CORE_NAMES = ("two-power", "dl:omega", "dl:rev-omega", "dl:zigzag", "E")
# E has infinitely many trace elements at levels 0 and 1; scans use omega*x+k with k below this
E_TRACE_BOUND = 4


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    limit: float | None = None

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        budget = f" (limit {self.limit:g}s)" if self.limit else ""
        return f"[{mark}] {self.number:2d} {self.name}: {self.detail} [{self.seconds:.2f}s{budget}]"


def core_traces(D, max_level: int) -> list:
    bound = E_TRACE_BOUND if D.name == "E" else 1 << 12
    out = []
    for n in range(max_level + 1):
        out.extend(trace_elements(D, n, bound))
    return out


def terms_over(D, carrier, max_support: int) -> list:
    out = []
    codes = list(carrier)
    bound = E_TRACE_BOUND if D.name == "E" else 1 << 12
    for size in range(max_support + 1):
        traces = trace_elements(D, size, bound)
        for a in combinations(codes, size):
            for tr in traces:
                out.append(make_term(D, tr.sigma, a, carrier))
    return out


# -- the criteria ---------------------------------------------------------------------

def oracle_equivalence(names=CORE_NAMES, k: int = 6, max_support: int = 4):
    carrier = Nat(k)
    checked = bad = 0
    for name in names:
        D = get_predilator(name)
        ts = terms_over(D, carrier, max_support)
        for s in ts:
            for t in ts:
                checked += 1
                if compare(D, s, t) is not compare_direct(D, s, t):
                    bad += 1
    return bad == 0, f"{checked} pairs, {bad} disagreements"


def security_brute_force(names=CORE_NAMES, max_sum: int = 8):
    pairs = problems = 0
    for name in names:
        D = get_predilator(name)
        traces = core_traces(D, max_sum)
        for s in traces:
            for t in traces:
                if s == t or s.level + t.level > max_sum:
                    continue
                pairs += 1
                prof = security_profile(D, s, t)
                back = security_profile(D, t, s)
                if back.p != prof.p or back.eps != -prof.eps:
                    problems += 1
                    continue
                ps = priority_permutation(D, s).perm
                pt = priority_permutation(D, t).perm
                P = agreement_bound(ps, pt)
                if P != prof.P:
                    problems += 1
                    continue
                secure = secure_indices(D, s, t)
                if secure != list(range(prof.p, P + 1)):
                    problems += 1
                    continue
                if prof.p > 0 and not _witness_ok(D, s, t, prof, ps, pt):
                    problems += 1
    return problems == 0, f"{pairs} ordered trace pairs, {problems} problems"


def _witness_ok(D, s, t, prof, ps, pt) -> bool:
    N = s.level + t.level
    lv = D.level(N)
    outcomes = set()
    for f, g, claimed in prof.witness:
        if not all(f[ps[i]] == g[pt[i]] for i in range(prof.p - 1)):
            return False
        c = lv.compare(D._act(f, N, s.sigma), D._act(g, N, t.sigma))
        if int(c) != claimed:
            return False
        outcomes.add(c)
    return len(outcomes) == 2


def triangle_lemma(names=("two-power", "dl:omega"), max_level: int = 4):
    triples = violations = 0
    for name in names:
        D = get_predilator(name)
        traces = core_traces(D, max_level)
        for r in traces:
            for s in traces:
                for t in traces:
                    if len({r, s, t}) < 3:
                        continue
                    triples += 1
                    if not triangle_check(D, r, s, t)[3]:
                        violations += 1
    return violations == 0, f"{triples} triples, {violations} violations"


def binary_identification(max_level: int = 6):
    T = two_power()
    DL = make_DL(BUILTIN_THREADS["rev-omega"])
    bad = checked = 0
    for n in range(max_level + 1):
        codes = list(T.level(n))
        images = [binary_to_sequence(c) for c in codes]
        if len(set(images)) != len(codes) or not all(DL.level(n).valid(x) for x in images):
            bad += 1
        for i, x in enumerate(codes):
            for j, y in enumerate(codes):
                checked += 1
                if T.level(n).compare(x, y) is not DL.level(n).compare(images[i], images[j]):
                    bad += 1
    return bad == 0, f"{checked} comparisons through level {max_level}, {bad} mismatches"


def descent_and_embedding(k: int = 20, need: int = 18):
    notes = []
    ok = True
    for name, L in BUILTIN_THREADS.items():
        cert = dl_descent(L, k)
        fails = cert.failures()
        if len(cert) != k + 1 or fails:
            ok = False
        notes.append(f"{name}:{len(cert)} terms")
    L = BUILTIN_THREADS["omega"]
    cert = dl_descent(L, k)
    emb = embedding_from_descent(L, cert.carrier, cert)
    covered = all(j in emb.mapping for j in range(need))
    ok = ok and covered and emb.order_preserving
    notes.append(f"embedding domain 0..{max(emb.mapping, default=-1)}, "
                 f"order-preserving={emb.order_preserving}")
    return ok, "; ".join(notes)


def _random_power_code(rng, gamma_size: int, coeff: int) -> Terms:
    exps = sorted(rng.sample(range(gamma_size), rng.randint(0, gamma_size)), reverse=True)
    return Terms(tuple((e, rng.randrange(coeff)) for e in exps))


def eta_checks(seed: int = 7, pairs: int = 200, squares: int = 20):
    rng = random.Random(seed)
    gamma, alpha = Nat(3), Omega()
    bp = BasePower(alpha, gamma)
    mono_bad = nat_bad = checked_pairs = 0
    for Lname in ("omega", "rev-omega"):
        L = BUILTIN_THREADS[Lname]
        D = make_DL(L)
        done = 0
        while done < pairs:
            x, y = _random_power_code(rng, 3, 12), _random_power_code(rng, 3, 12)
            c = bp.compare(x, y)
            if c is EQUAL:
                continue
            if c is not LESS:
                x, y = y, x
            done += 1
            checked_pairs += 1
            ex, ey = eta_power(gamma, L, alpha, x), eta_power(gamma, L, alpha, y)
            if compare(D, ex, ey) is not LESS or compare_direct(D, ex, ey) is not LESS:
                mono_bad += 1
        for _ in range(squares):
            x = _random_power_code(rng, 3, 12)
            scale, shift = rng.randint(1, 4), rng.randint(0, 9)
            h = lambda v: scale * v + shift
            hx = Terms(tuple((e, h(a)) for e, a in x.terms))
            lhs = eta_power(gamma, L, alpha, hx)
            base = eta_power(gamma, L, alpha, x)
            rhs = extend_act(D, lambda p: Pair(p.hi, h(p.lo)), base)
            if (lhs.sigma, lhs.support) != (rhs.sigma, rhs.support):
                nat_bad += 1
    scat_bad = scat_pairs = 0
    alpha3 = Nat(3)
    instances = [
        (ScatteredData.from_functions(1, lambda j: -j, lambda j: j, 3), BUILTIN_THREADS["rev-omega"]),
        (ScatteredData.from_functions(1, lambda j: j, lambda j: j, 3), BUILTIN_THREADS["omega"]),
    ]
    tp = TwoPower(alpha3)
    for data, L in instances:
        D = make_DL(L)
        codes = list(tp)
        imgs = {c: eta_scattered(data, L, alpha3, c) for c in codes}
        for x, y in combinations(codes, 2):
            scat_pairs += 1
            want = tp.compare(x, y)
            if compare(D, imgs[x], imgs[y]) is not want or compare_direct(D, imgs[x], imgs[y]) is not want:
                scat_bad += 1
    ok = mono_bad == 0 and nat_bad == 0 and scat_bad == 0
    return ok, (f"eta_power {checked_pairs} pairs/{mono_bad} bad, {2 * squares} squares/{nat_bad} bad; "
                f"eta_scattered {scat_pairs} pairs/{scat_bad} bad")


def thread_round_trip(k: int = 30, n: int = 2):
    M = BUILTIN_THREADS["omega"]
    cert = dl_descent(M, k)
    D = cert.predilator
    ex = extract_thread(D, cert)
    consistent = all(M.compare(a, b) is LESS for a, b in ex.stabilized_pairs())
    fam = {m: thread_family(D, ex, m) for m in range(n + 1)}
    rep = verify_thread(D, ex.thread_order(), fam, n)
    ok = consistent and rep.passed and ex.status == "conclusive"
    return ok, (f"status={ex.status}, settled points={ex.points}, consistent={consistent}, "
                f"verify_thread checks={rep.checks} violations={len(rep.violations)}")


def probe_soundness():
    T = two_power()
    notes, ok = [], True
    for k in range(5):
        res = descend_probe(T, Nat(k), depth=3, width=32)
        if res.status != "exhausted":
            ok = False
    notes.append("two-power over nat(0..4) exhausted" if ok else "finite carrier not exhausted")
    res = descend_probe(T, RevOmega(), depth=3, width=32)
    if res.status != "certificate" or res.certificate.failures():
        ok = False
    else:
        notes.append("rev-omega certificate " + str([list(t.support) for t in res.certificate.terms]))
    from .orders import build_order
    extra = descend_probe(make_DL(BUILTIN_THREADS["omega"]),
                          build_order({"op": "omega-times", "inner": {"op": "omega"}}), depth=3, width=8)
    if extra.status == "certificate" and extra.certificate.failures():
        ok = False
    return ok, "; ".join(notes)


def _random_eps0(rng, pool) -> Exps:
    chosen = rng.sample(range(len(pool)), rng.randint(0, 5))
    return Exps(tuple(EPS0.sorted([pool[i] for i in chosen])[::-1]))


def eps0_embedding(seed: int = 11, count: int = 200):
    rng = random.Random(seed)
    pool = EPS0.prefix(60)
    sample = []
    seen = set()
    while len(sample) < count:
        t = _random_eps0(rng, pool)
        if t not in seen:
            seen.add(t)
            sample.append(t)
    bad = checked = 0
    for x, y in combinations(sample, 2):
        checked += 1
        if TWO_POWER_EPS0.compare(x, y) is not EPS0.compare(embed_two_power_eps0(x), embed_two_power_eps0(y)):
            bad += 1
    return bad == 0, f"{checked} pairs, {bad} order violations"


LIMIT_TABLES = {
    "zero": lambda l: {"l": l, "d": [[0] * l for _ in range(l)]},
    "step": lambda l: {"l": l, "d": [[1 if k >= n else 0 for n in range(l)] for k in range(l)]},
}


def limit_tree_checks(l: int = 6):
    notes, ok = [], True
    expected = {"zero": tuple([0] * l), "step": tuple(range(l))}
    for name, make in LIMIT_TABLES.items():
        tree = limit_tree(make(l))
        rep = check_limit_tree(tree)
        good = rep.passed and tree.branch == expected[name]
        ok = ok and good
        notes.append(f"{name}: {len(tree.nodes)} nodes, branch {list(tree.branch)}, "
                     f"{len(rep.violations)} violations")
    return ok, "; ".join(notes)


CRITERIA = [
    (1, "oracle equivalence", oracle_equivalence, 60.0),
    (2, "security brute force", security_brute_force, 120.0),
    (3, "triangle lemma", triangle_lemma, None),
    (4, "binary identification", binary_identification, None),
    (5, "descent and embedding", descent_and_embedding, None),
    (6, "eta order preservation", eta_checks, None),
    (7, "thread round trip", thread_round_trip, None),
    (8, "probe soundness", probe_soundness, 30.0),
    (9, "eps0 embedding", eps0_embedding, None),
    (10, "limit tree", limit_tree_checks, None),
]


def run_criterion(number: int) -> CriterionResult:
    num, name, fn, limit = next(c for c in CRITERIA if c[0] == number)
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure, reported like one
        ok, detail = False, f"error: {type(exc).__name__}: {exc}"
    secs = time.perf_counter() - start
    if limit is not None and secs > limit:
        ok, detail = False, detail + f"; exceeded {limit:g}s"
    return CriterionResult(num, name, ok, detail, secs, limit)


def run_all(numbers=None) -> list:
    return [run_criterion(c[0]) for c in CRITERIA if numbers is None or c[0] in numbers]
