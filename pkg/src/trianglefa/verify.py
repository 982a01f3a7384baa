"""Certify the triangle criterion for Aut(F_n) and SL(n,Z), rank by rank.

Generation is reduced to Nielsen's theorem: Aut(F_n) is generated by the
rho_ij and eps_i, so it suffices to write each of those as a word in
A1 ∪ A2 ∪ A3. That theorem itself is assumed, not re-proved.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Any

from . import tree as T
from .closure import (
    DEFAULT_CAP,
    IncompleteClosureError,
    check_containment,
    check_dihedral,
    check_direct_product,
    closure_to_json,
    enumerate_closure,
    witness_evaluate,
)
from .config import MAX_HEAVY_RANK
from .freegroup import FreeAut, abelianize, alpha, aut_order, eps, eta, rho, tau, theta, transposition
from .intmat import IntMatrix, det_twist, elementary, is_monomial, mat_det, mat_inverse_unimodular

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"

ASSUMPTIONS = [
    "Nielsen: Aut(F_n) is generated by the rho_ij and eps_i (assumed, not re-proved)",
    "SL(n,Z) is generated by the elementary matrices E_ij(1)",
    "composition is right-to-left: (f∘g)(x) = f(g(x))",
]


def combine(*verdicts: str) -> str:
    if FAIL in verdicts:
        return FAIL
    if INCONCLUSIVE in verdicts:
        return INCONCLUSIVE
    return PASS


def perm_label(i: int, j: int) -> str:
    return f"perm({min(i, j)} {max(i, j)})"


@dataclass
class GeneratorSets:
    n: int
    A1: dict[str, FreeAut]
    A2: dict[str, FreeAut]
    A3: dict[str, FreeAut]

    def table(self) -> dict[str, FreeAut]:
        return {**self.A1, **self.A2, **self.A3}

    def parts(self) -> list[dict[str, FreeAut]]:
        return [self.A1, self.A2, self.A3]


def build_generator_sets(n: int) -> GeneratorSets:
    """A1 = {eps_n, eta} ∪ Sigma_{n-2}, A2 = {theta}, A3 = {tau}.

    Sigma_{n-2} acts on a_3..a_n and is given by adjacent transpositions.
    """
    if n < 3:
        raise ValueError(f"rank must be >= 3, got {n}")
    A1 = {f"eps{n}": eps(n, n), "eta": eta(n)}
    for k in range(3, n):
        A1[perm_label(k, k + 1)] = transposition(n, k, k + 1)
    return GeneratorSets(n, A1, {"theta": theta(n)}, {"tau": tau(n)})


# Witness words -----------------------------------------------------------

Word = list[str]


def _conj(s: Word, w: Word) -> Word:
    # every generator in the generator sets is an involution, so s^-1 is s reversed
    return s + w + s[::-1]


@dataclass
class WitnessTable:
    n: int
    words: dict[str, Word]
    targets: dict[str, FreeAut]
    anchors: dict[str, tuple[str, FreeAut]] = field(default_factory=dict)
    anchor_table: dict[str, FreeAut] = field(default_factory=dict)


def _sigma_word(trans: dict[tuple[int, int], Word], i: int, j: int) -> Word:
    """Word for a permutation sigma with sigma(1) = i, sigma(2) = j."""
    word: Word = []
    x = 2
    if i != 1:
        word = trans[(1, i)]
        x = 1 if i == 2 else 2
    if x != j:
        word = trans[(min(x, j), max(x, j))] + word
    return word


def build_witness_table(n: int) -> WitnessTable:
    """Words over A1 ∪ A2 ∪ A3 for every rho_ij, eps_i and transposition.

    Follows the conjugation chain: tau conjugates (a_n a_3) to (a_n a_2),
    which carries eps_n to eps_2 and (a_n a_3) to (a_2 a_3); then
    eps_1 = (a_2 a_3)∘tau and (a_1 a_2) = eta∘eps_1∘eps_2. For n = 3 the
    transposition (a_n a_3) is trivial and eps_2 = tau∘eps_3∘tau,
    eps_1 = eta∘eps_2∘eta are used instead.
    """
    sets = build_generator_sets(n)
    trans: dict[tuple[int, int], Word] = {}
    E: dict[int, Word] = {n: [f"eps{n}"]}
    for k in range(3, n):
        trans[(k, k + 1)] = [perm_label(k, k + 1)]
    for gap in range(2, n - 2):
        for k in range(3, n - gap + 1):
            l = k + gap
            trans[(k, l)] = _conj(trans[(l - 1, l)], trans[(k, l - 1)])
    if n >= 4:
        trans[(2, n)] = _conj(["tau"], trans[(3, n)])
        E[2] = _conj(trans[(2, n)], E[n])
        trans[(2, 3)] = _conj(trans[(2, n)], trans[(3, n)])
        E[1] = trans[(2, 3)] + ["tau"]
    else:
        E[2] = _conj(["tau"], E[3])
        E[1] = _conj(["eta"], E[2])
        trans[(2, 3)] = ["tau"] + E[1]
    trans[(1, 2)] = ["eta"] + E[1] + E[2]
    for k in range(4, n + 1):
        trans.setdefault((2, k), _conj(["tau"], trans[(3, k)]))
    for k in range(3, n + 1):
        trans[(1, k)] = _conj(trans[(2, k)], trans[(1, 2)])
    for k in range(3, n):
        E[k] = _conj(trans[(k, n)], E[n])
    rho12 = ["theta"] + E[2]

    words: dict[str, Word] = {}
    targets: dict[str, FreeAut] = {}
    for (i, j), w in trans.items():
        words[perm_label(i, j)] = w
        targets[perm_label(i, j)] = transposition(n, i, j)
    for i, w in E.items():
        words[f"eps{i}"] = w
        targets[f"eps{i}"] = eps(n, i)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                s = _sigma_word(trans, i, j)
                words[f"rho({i},{j})"] = _conj(s, rho12)
                targets[f"rho({i},{j})"] = rho(n, i, j)

    table = sets.table()
    derived = {
        **table,
        "eps1": eps(n, 1),
        "eps2": eps(n, 2),
        "perm(2 3)": transposition(n, 2, 3),
    }
    anchors = {
        "eps1 = (a2 a3)∘tau": ("perm(2 3) ∘ tau", eps(n, 1)),
        "(a1 a2) = eta∘eps1∘eps2": ("eta ∘ eps1 ∘ eps2", transposition(n, 1, 2)),
        "rho12 = theta∘eps2": ("theta ∘ eps2", rho(n, 1, 2)),
    }
    if n >= 4:
        derived[perm_label(3, n)] = transposition(n, 3, n)
        anchors["(a_n a_2) = tau∘(a_n a_3)∘tau"] = (
            f"tau ∘ {perm_label(3, n)} ∘ tau",
            transposition(n, 2, n),
        )
    wt = WitnessTable(n, dict(sorted(words.items())), targets, anchors, derived)
    for name, w in wt.words.items():
        if witness_evaluate(w, table) != targets[name]:
            raise AssertionError(f"witness for {name} does not evaluate to its target")
    return wt


def check_witnesses(wt: WitnessTable, sets: GeneratorSets) -> dict[str, Any]:
    table = sets.table()
    failures = []
    abel_failures = []
    for name, w in wt.words.items():
        value = witness_evaluate(w, table)
        if value != wt.targets[name]:
            failures.append(name)
        if abelianize(value) != abelianize(wt.targets[name]):
            abel_failures.append(name)
    anchors = {}
    for name, (word, target) in wt.anchors.items():
        anchors[name] = witness_evaluate(word, wt.anchor_table) == target
    ok = not failures and not abel_failures and all(anchors.values())
    return {
        "entries": len(wt.words),
        "failures": failures,
        "abelianization_failures": abel_failures,
        "anchors": anchors,
        "max_word_length": max(len(w) for w in wt.words.values()),
        "verdict": PASS if ok else FAIL,
    }


# Aut(F_n) ----------------------------------------------------------------


def _items(*parts: dict[str, Any]) -> list[tuple[str, Any]]:
    out = []
    for p in parts:
        out.extend(p.items())
    return out


def verify_aut(n: int, cap: int = DEFAULT_CAP) -> dict[str, Any]:
    sets = build_generator_sets(n)
    th, ta, et = sets.A2["theta"], sets.A3["tau"], sets.A1["eta"]
    out: dict[str, Any] = {"n": n}
    orders = {"theta∘eta": aut_order(th @ et, 12), "theta∘tau": aut_order(th @ ta, 12)}
    out["orders"] = orders
    verdicts = [PASS if orders == {"theta∘eta": 3, "theta∘tau": 4} else FAIL]

    try:
        h23 = enumerate_closure(_items(sets.A2, sets.A3), cap)
        d8 = check_dihedral(th, ta, 4, cap)
        d6 = check_dihedral(th, et, 3, cap)
        out["H23"] = closure_to_json(h23, [d8])
        out["theta_eta_dihedral"] = d6.to_json()
        verdicts.append(PASS if d8 and d6 and h23.order == 8 else FAIL)

        if n <= MAX_HEAVY_RANK:
            h12 = enumerate_closure(_items(sets.A1, sets.A2), cap)
            u = {k: v for k, v in sets.A1.items() if k != "eta"}
            v = {"theta": th, "eta": et}
            dp = check_direct_product(u, v, cap)
            expected = 6 * 2 ** (n - 2) * math.factorial(n - 2)
            out["H12"] = closure_to_json(h12, [dp])
            out["H12"]["expected_order"] = expected
            verdicts.append(PASS if dp and h12.complete and h12.order == expected else FAIL)

            h13 = enumerate_closure(_items(sets.A1, sets.A3), cap)
            mono, bad = check_containment(h13, lambda g: is_monomial(abelianize(g)))
            out["H13"] = closure_to_json(h13)
            out["H13"]["monomial"] = mono
            out["H13"]["counterexample"] = None if bad is None else str(bad)
            w_order = 2**n * math.factorial(n)
            out["H13"]["divides_order_of_W_n"] = w_order % h13.order == 0
            verdicts.append(PASS if mono and w_order % h13.order == 0 else FAIL)
        else:
            out["note"] = f"H12/H13 closures skipped above rank {MAX_HEAVY_RANK}"
    except IncompleteClosureError as exc:
        out["error"] = str(exc)
        verdicts.append(FAIL)

    try:
        wt = build_witness_table(n)
        out["witnesses"] = check_witnesses(wt, sets)
        verdicts.append(out["witnesses"]["verdict"])
    except AssertionError as exc:
        out["witnesses"] = {"verdict": FAIL, "error": str(exc)}
        verdicts.append(FAIL)
    out["verdict"] = combine(*verdicts)
    return out


# SL(n,Z) -----------------------------------------------------------------


def twisted_sets(n: int, dim: int | None = None) -> list[dict[str, IntMatrix]]:
    """A_i^+(n): abelianised, det-twisted, optionally embedded in dim."""
    dim = n if dim is None else dim
    return [
        {k: det_twist(abelianize(g)).embed(dim) for k, g in part.items()}
        for part in build_generator_sets(n).parts()
    ]


def _closure_section(gens: list[tuple[str, IntMatrix]], cap: int) -> tuple[dict[str, Any], bool]:
    r = enumerate_closure(gens, cap)
    dets = {mat_det(g) for g in r.elements}
    sec = closure_to_json(r)
    sec["determinants"] = sorted(dets)
    return sec, r.complete and dets == {1}


def verify_sl(n: int, cap: int = DEFAULT_CAP, bfs_depth: int = 14) -> dict[str, Any]:
    if n < 3:
        raise ValueError(f"rank must be >= 3, got {n}")
    out: dict[str, Any] = {"n": n, "parity": "odd" if n % 2 else "even"}
    verdicts = []
    if n % 2:
        A = twisted_sets(n)
        dets = {k: mat_det(g) for part in A for k, g in part.items()}
        out["generator_determinants"] = dets
        verdicts.append(PASS if set(dets.values()) == {1} else FAIL)
        for key, (i, j) in (("H12", (0, 1)), ("H13", (0, 2)), ("H23", (1, 2))):
            sec, ok = _closure_section(_items(A[i], A[j]), cap)
            out[key] = sec
            verdicts.append(PASS if ok else FAIL)
        out["generation"] = transfer_witnesses(n, A)
        verdicts.append(out["generation"]["verdict"])
    else:
        m = n - 1
        A = twisted_sets(m, n)
        a_bar = abelianize(alpha(n))
        A1 = {**A[0], "alpha": a_bar}
        dets = {k: mat_det(g) for part in (A1, A[1], A[2]) for k, g in part.items()}
        out["generator_determinants"] = dets
        verdicts.append(PASS if set(dets.values()) == {1} else FAIL)
        for key, parts in (("H12", (A1, A[1])), ("H13", (A1, A[2])), ("H23", (A[1], A[2]))):
            sec, ok = _closure_section(_items(*parts), cap)
            out[key] = sec
            verdicts.append(PASS if ok else FAIL)
        gens = _items(A1, A[1], A[2])
        gens.append(("alpha^-1", mat_inverse_unimodular(a_bar)))
        out["generation"] = bfs_elementary(n, gens, bfs_depth)
        verdicts.append(out["generation"]["verdict"])
    out["verdict"] = combine(*verdicts)
    return out


def transfer_witnesses(n: int, A: list[dict[str, IntMatrix]]) -> dict[str, Any]:
    """Push each rho_ij witness through abelianise + twist; expect E_ji(1).

    For odd n the twisted product equals (prod of dets)·(untwisted product),
    and that sign is det(rho_ij image) = 1.
    """
    wt = build_witness_table(n)
    sets = build_generator_sets(n)
    plain = {k: abelianize(g) for k, g in sets.table().items()}
    twisted = {k: g for part in A for k, g in part.items()}
    hits, misses, law_failures = [], [], []
    for name, word in wt.words.items():
        if not name.startswith("rho"):
            continue
        i, j = (int(x) for x in name[4:-1].split(","))
        value = witness_evaluate(word, twisted)
        sign = math.prod(mat_det(plain[k]) for k in word)
        if value != witness_evaluate(word, plain).scale(sign):
            law_failures.append(name)
        target = f"E({j},{i})"
        (hits if value == elementary(n, j, i, 1) else misses).append(target)
    ok = not misses and not law_failures and len(hits) == n * (n - 1)
    return {
        "method": "witness transfer",
        "targets_hit": len(hits),
        "targets": n * (n - 1),
        "missed": sorted(misses),
        "twist_law_failures": law_failures,
        "verdict": PASS if ok else FAIL,
    }


def bfs_elementary(n: int, gens: list[tuple[str, IntMatrix]], depth: int) -> dict[str, Any]:
    """Meet-in-the-middle search for every E_ij(1) as a word in gens.

    A ball of radius ceil(depth/2) is grown once; a target E is found when
    E·z lands in the ball for some z of length <= floor(depth/2), giving
    E = x·z^-1 of total length <= depth.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    labels = [lab for lab, _ in gens]
    inv_label = {}
    for lab, g in gens:
        gi = mat_inverse_unimodular(g)
        inv_label[lab] = next((l2 for l2, h in gens if h == gi), None)
        if inv_label[lab] is None:
            raise ValueError(f"generator {lab} has no inverse in the set")
    outer, inner = (depth + 1) // 2, depth // 2
    one = IntMatrix.identity(n)
    ball: dict[IntMatrix, tuple[IntMatrix | None, int, int]] = {one: (None, -1, 0)}
    frontier = [one]
    for d in range(1, outer + 1):
        nxt = []
        for x in frontier:
            for k, (_, g) in enumerate(gens):
                y = x * g
                if y not in ball:
                    ball[y] = (x, k, d)
                    nxt.append(y)
        frontier = nxt

    def word(x: IntMatrix) -> list[str]:
        w = []
        while ball[x][0] is not None:
            parent, k, _ = ball[x]
            w.append(labels[k])
            x = parent
        return w[::-1]

    table = dict(gens)
    found: dict[str, list[str]] = {}
    missing = []
    shorts = sorted((x for x, v in ball.items() if v[2] <= inner), key=lambda x: ball[x][2])
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            E = elementary(n, i, j, 1)
            best = None
            for z in shorts:
                x = E * z
                if x in ball:
                    best = word(x) + [inv_label[lab] for lab in reversed(word(z))]
                    break
            name = f"E({i},{j})"
            if best is None:
                missing.append(name)
                continue
            value = witness_evaluate(best, table, identity=one)
            if value != E:
                raise AssertionError(f"BFS word for {name} does not evaluate correctly")
            found[name] = best
    return {
        "method": "meet-in-the-middle BFS",
        "depth": depth,
        "ball_size": len(ball),
        "targets": n * (n - 1),
        "targets_hit": len(found),
        "word_lengths": {k: len(v) for k, v in sorted(found.items())},
        "missing": missing,
        "verdict": PASS if not missing else INCONCLUSIVE,
    }


# Tree suite --------------------------------------------------------------


def _sub_rng(seed: int, name: str) -> random.Random:
    return random.Random(f"{seed}:{name}")


def _tree_text(t: T.Tree) -> str:
    return " ".join(f"{u}-{v}" for u, v in t.edges)


def helly_suite(seed: int, count: int, max_vertices: int = 50) -> dict[str, Any]:
    rng = _sub_rng(seed, "helly")
    nonempty = violations = 0
    examples = []
    for _ in range(count):
        t = T.random_tree(rng.randint(2, max_vertices), rng)
        fam = T.random_pairwise_family(t, rng, rng.randint(2, 5))
        try:
            v = T.helly_check(fam)
        except T.HellyViolation as exc:
            violations += 1
            examples.append({"tree": _tree_text(t), "sets": [sorted(s.points) for s in fam], "error": str(exc)})
            continue
        nonempty += v.total_nonempty
    return {"families": count, "total_nonempty": nonempty, "violations": violations, "counterexamples": examples[:5]}


def _random_action(rng: random.Random) -> tuple[T.Tree, list[list[T.TreeIsom]]]:
    t = T.symmetric_tree(rng)
    parts = [T.random_isometries(t, rng, rng.randint(0, 2)) for _ in range(3)]
    return t, parts


def fixed_set_suite(seed: int, count: int, cap: int = 20000) -> dict[str, Any]:
    rng = _sub_rng(seed, "fixed")
    identity_ok = conclusion_ok = single_ok = resampled = 0
    examples = []
    done = 0
    while done < count:
        t, parts = _random_action(rng)
        try:
            rep = T.triangle_criterion_check(t, *parts, cap=cap)
        except RuntimeError:
            resampled += 1
            continue
        done += 1
        same = rep.total == rep.total_group and rep.pairwise_identity
        identity_ok += same
        conclusion_ok += rep.ok
        singles = [T.fixed_set(t, g) for part in parts for g in part]
        single_ok += all(s is not None for s in singles)
        if not (same and rep.ok):
            examples.append({"tree": _tree_text(t), "isometries": [[list(g.perm) for g in p] for p in parts]})
    return {
        "instances": count,
        "set_identity_ok": identity_ok,
        "criterion_ok": conclusion_ok,
        "single_fixed_sets_nonempty": single_ok,
        "resampled_over_cap": resampled,
        "violations": count - min(identity_ok, conclusion_ok),
        "counterexamples": examples[:5],
    }


def circumcentre_suite(seed: int, count: int) -> dict[str, Any]:
    rng = _sub_rng(seed, "circumcentre")
    ok = fixed = 0
    examples = []
    for _ in range(count):
        t = T.symmetric_tree(rng)
        (g,) = T.random_isometries(t, rng, 1)
        use_vertices = rng.random() < 0.6 or t.n == 1
        pool = range(t.n) if use_vertices else range(t.n, t.num_points)
        seeds = rng.sample(list(pool), rng.randint(1, min(3, len(pool))))
        orbit = set()
        for p in seeds:
            x = p
            while x not in orbit:
                orbit.add(x)
                x = g(x)
        c = T.circumcentre(t, orbit)
        c2 = T.circumcentre(t, [g(p) for p in orbit])
        ok += c == c2
        fixed += g(c) == c
        if c != c2 or g(c) != c:
            examples.append({"tree": _tree_text(t), "isometry": list(g.perm), "orbit": sorted(orbit)})
    return {"instances": count, "invariant": ok, "centre_fixed": fixed, "violations": count - min(ok, fixed), "counterexamples": examples[:5]}


def product_suite(seed: int, count: int) -> dict[str, Any]:
    rng = _sub_rng(seed, "product")
    ok = hyp = 0
    examples = []
    for _ in range(count):
        t = T.symmetric_tree(rng)
        A1 = T.random_isometries(t, rng, rng.randint(1, 3))
        A2 = T.random_isometries(t, rng, rng.randint(1, 3))
        rep = T.product_criterion_check(t, A1, A2)
        ok += rep.ok
        hyp += rep.products_have_fixed_points
        if not rep.ok:
            examples.append({"tree": _tree_text(t)})
    return {"instances": count, "hypothesis_held": hyp, "implication_ok": ok, "violations": count - ok, "counterexamples": examples[:5]}


def bass_serre_section(radius: int = 8, inner: int = 4) -> dict[str, Any]:
    ball = T.bass_serre_ball(2, 3, radius)
    disp = {w: T.min_displacement(ball, w, inner) for w in ("a", "b", "ab")}
    fa = T.ball_fixed_vertices(ball, "a", inner)
    fb = T.ball_fixed_vertices(ball, "b", inner)
    wit = T.separation_witness(ball.tree, fa, fb, [("ab", lambda p: ball.act("ab", p))])
    ok = disp == {"a": 0, "b": 0, "ab": 2} and wit is not None
    return {
        "group": "Z2*Z3",
        "radius": radius,
        "inner_radius": inner,
        "ball_vertices": ball.tree.n,
        "min_displacement": disp,
        "fix_a": sorted(ball.label(v) for v in fa),
        "fix_b": sorted(ball.label(v) for v in fb),
        "separation_witness": None if wit is None else {
            "closest_point": ball.label(wit.point), "moved_by": wit.product,
        },
        "verdict": PASS if ok else FAIL,
    }


def run_tree_suite(seed: int, iterations: int) -> dict[str, Any]:
    """Randomised fixed-point checks; Helly uses ``iterations``, the rest half."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    half = max(1, iterations // 2)
    out = {
        "seed": seed,
        "helly": helly_suite(seed, iterations),
        "fixed_set_identity": fixed_set_suite(seed, half),
        "circumcentre": circumcentre_suite(seed, half),
        "product_criterion": product_suite(seed, half),
        "bass_serre": bass_serre_section(),
    }
    bad = any(out[k]["violations"] for k in ("helly", "fixed_set_identity", "circumcentre", "product_criterion"))
    out["verdict"] = combine(FAIL if bad else PASS, out["bass_serre"]["verdict"])
    return out
