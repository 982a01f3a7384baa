import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trianglefa import tree as T
from trianglefa.tree import Subtree, Tree, TreeError, TreeIsom


def star(k: int) -> Tree:
    return Tree(k + 1, [(0, i) for i in range(1, k + 1)])


def spider(legs: int, length: int) -> Tree:
    edges, nxt = [], 1
    for _ in range(legs):
        prev = 0
        for _ in range(length):
            edges.append((prev, nxt))
            prev, nxt = nxt, nxt + 1
    return Tree(nxt, edges)


def subdivision_graph(t: Tree) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(t.points())
    for k, (u, v) in enumerate(t.edges):
        g.add_edge(u, t.n + k)
        g.add_edge(v, t.n + k)
    return g


def brute_centre(t: Tree, pts) -> list[int]:
    g = subdivision_graph(t)
    dist = dict(nx.all_pairs_shortest_path_length(g))
    radius = {x: max(dist[x][p] for p in pts) for x in t.points()}
    best = min(radius.values())
    return [x for x, r in radius.items() if r == best]


random_trees = st.integers(2, 30).flatmap(
    lambda n: st.lists(st.integers(0, n - 1), min_size=n - 2, max_size=n - 2)
).map(Tree.from_prufer)


def test_tree_validation():
    with pytest.raises(TreeError):
        Tree(3, [(0, 1)])
    with pytest.raises(TreeError):
        Tree(4, [(0, 1), (1, 0), (2, 3)])
    with pytest.raises(TreeError):
        Tree(4, [(0, 1), (2, 3), (1, 0)])
    assert Tree.from_edge_text("0 1\n1 2").n == 3


def test_distance_examples():
    t = Tree(2, [(0, 1)])
    assert t.distance(0, 0) == 0
    assert t.distance(0, 1) == 2
    assert t.distance(0, t.midpoint(0, 1)) == 1
    with pytest.raises(TreeError):
        t.distance(0, 7)


@given(random_trees)
@settings(max_examples=40)
def test_distance_matches_networkx(t):
    ref = dict(nx.all_pairs_shortest_path_length(subdivision_graph(t)))
    assert all(t.distance(p, q) == ref[p][q] for p in t.points() for q in t.points())


@given(random_trees, st.data())
def test_four_point_condition(t, data):
    p, q, r, s = (data.draw(st.integers(0, t.num_points - 1)) for _ in range(4))
    d = t.distance
    sums = sorted([d(p, q) + d(r, s), d(p, r) + d(q, s), d(p, s) + d(q, r)])
    assert sums[1] == sums[2]


def test_isometry_validation():
    t = Tree(3, [(0, 1), (1, 2)])
    TreeIsom(t, (2, 1, 0))
    with pytest.raises(TreeError):
        TreeIsom(t, (1, 0, 2))
    with pytest.raises(TreeError):
        TreeIsom(t, (0, 0, 2))


def test_fixed_set_examples():
    t = Tree(2, [(0, 1)])
    assert T.fixed_set(t, TreeIsom.identity(t)).points == frozenset(t.points())
    swap = TreeIsom(t, (1, 0))
    assert T.fixed_set(t, swap).points == {t.midpoint(0, 1)}
    s = star(3)
    rot = TreeIsom(s, (0, 2, 3, 1))
    brute = {p for p in s.points() if rot(p) == p}
    assert brute == {0}
    assert T.fixed_set(s, rot).points == brute


def test_fixed_set_group_examples():
    s = star(4)
    assert T.fixed_set_group(s, [TreeIsom.identity(s)]).points == frozenset(s.points())
    g1, g2 = TreeIsom(s, (0, 2, 1, 3, 4)), TreeIsom(s, (0, 1, 2, 4, 3))
    brute = {p for p in s.points() if g1(p) == p and g2(p) == p}
    fix = T.fixed_set_group(s, [g1, g2]).points
    assert fix == brute
    assert 0 in fix and 1 not in fix
    # rotation plus reflection of a 3-leaf spider fix only the hub
    sp = spider(3, 2)
    rot = TreeIsom(sp, (0, 3, 4, 5, 6, 1, 2))
    ref = TreeIsom(sp, (0, 1, 2, 5, 6, 3, 4))
    assert T.fixed_set_group(sp, [rot, ref]).points == {0}
    assert T.tree_centre(sp) == 0


def test_fixed_set_group_matches_closure():
    rng = random.Random(3)
    for _ in range(30):
        t = T.symmetric_tree(rng)
        gens = T.random_isometries(t, rng, 3)
        assert T.fixed_set_group(t, gens).points == T.group_fixed_points(t, gens)


def test_fixed_sets_nonempty_and_connected():
    rng = random.Random(11)
    for _ in range(100):
        t = T.symmetric_tree(rng)
        for g in T.random_isometries(t, rng, 3):
            s = T.fixed_set(t, g)
            assert s is not None
            assert t.is_connected_set(s.points)


def test_subtree_must_be_connected():
    t = Tree(3, [(0, 1), (1, 2)])
    with pytest.raises(TreeError):
        Subtree(t, frozenset({0, 2}))
    with pytest.raises(TreeError):
        Subtree(t, frozenset())


def test_helly_examples():
    path = Tree(6, [(i, i + 1) for i in range(5)])
    nested = [Subtree(path, path.span([0, 5])), Subtree(path, path.span([1, 4])), Subtree(path, path.span([2, 3]))]
    v = T.helly_check(nested)
    assert v.pairwise_ok and v.total_nonempty and v.common_point in nested[2].points
    s = star(3)
    arms = [Subtree(s, s.span([a, b])) for a, b in ((1, 2), (2, 3), (1, 3))]
    v = T.helly_check(arms)
    assert v.pairwise_ok and v.common_point == 0
    far = [Subtree(path, frozenset({0})), Subtree(path, frozenset({5}))]
    v = T.helly_check(far)
    assert not v.pairwise_ok and not v.total_nonempty


def test_helly_randomised():
    rng = random.Random(42)
    for _ in range(1000):
        t = T.random_tree(rng.randint(2, 50), rng)
        fam = T.random_pairwise_family(t, rng, 3)
        v = T.helly_check(fam)
        assert v.pairwise_ok and v.total_nonempty
        brute = set(t.points())
        for s in fam:
            brute &= s.points
        assert v.common_point in brute


def test_helly_on_random_families_any_size():
    rng = random.Random(5)
    seen_pairwise = 0
    for _ in range(500):
        t = T.random_tree(rng.randint(2, 15), rng)
        fam = [T.random_subtree(t, rng, grow=rng.randrange(6)) for _ in range(rng.randint(2, 6))]
        v = T.helly_check(fam)
        seen_pairwise += v.pairwise_ok
        if v.pairwise_ok:
            assert v.total_nonempty
    assert seen_pairwise > 20


def test_circumcentre_examples():
    path = Tree(5, [(i, i + 1) for i in range(4)])
    assert T.circumcentre(path, [3]) == 3
    assert T.circumcentre(path, [0, 2]) == 1
    assert T.circumcentre(path, [0, 4]) == 2
    sp = spider(3, 2)
    leaves = [v for v in range(sp.n) if sp.degree(v) == 1]
    assert brute_centre(sp, leaves) == [0]
    assert T.circumcentre(sp, leaves) == 0
    with pytest.raises(ValueError):
        T.circumcentre(path, [])
    with pytest.raises(ValueError):
        T.circumcentre(path, [0, path.midpoint(0, 1)])


def test_circumcentre_of_edge_ends_is_midpoint():
    t = Tree(2, [(0, 1)])
    assert T.circumcentre(t, [0, 1]) == t.midpoint(0, 1)


@given(random_trees, st.data())
@settings(max_examples=60)
def test_circumcentre_matches_brute_force(t, data):
    vertices = data.draw(st.lists(st.integers(0, t.n - 1), min_size=1, max_size=6))
    assert [T.circumcentre(t, vertices)] == brute_centre(t, vertices)


def test_circumcentre_invariance():
    rng = random.Random(8)
    for _ in range(200):
        t = T.symmetric_tree(rng)
        (g,) = T.random_isometries(t, rng, 1)
        p = rng.randrange(t.n)
        orbit = {p}
        x = g(p)
        while x != p:
            orbit.add(x)
            x = g(x)
        c = T.circumcentre(t, orbit)
        assert T.circumcentre(t, [g(q) for q in orbit]) == c
        assert g(c) == c


def test_automorphism_generators_are_complete_on_small_trees():
    # brute force over all vertex permutations of small trees
    rng = random.Random(2)
    for _ in range(25):
        t = T.random_tree(rng.randint(2, 7), rng)
        brute = set()
        for p in itertools.permutations(range(t.n)):
            try:
                brute.add(TreeIsom(t, p))
            except TreeError:
                pass
        gens = T.automorphism_generators(t)
        r = T.enumerate_closure([(str(i), g) for i, g in enumerate(gens)], identity=TreeIsom.identity(t))
        assert r.element_set() == brute


def test_triangle_examples():
    t = star(3)
    ident = [TreeIsom.identity(t)]
    rep = T.triangle_criterion_check(t, ident, ident, ident)
    assert rep.ok and rep.total == frozenset(t.points())
    sp = spider(4, 2)
    swaps = [
        TreeIsom(sp, (0, 3, 4, 1, 2, 5, 6, 7, 8)),
        TreeIsom(sp, (0, 1, 2, 3, 4, 7, 8, 5, 6)),
        TreeIsom(sp, (0, 5, 6, 7, 8, 1, 2, 3, 4)),
    ]
    rep = T.triangle_criterion_check(sp, [swaps[0]], [swaps[1]], [swaps[2]])
    assert rep.ok
    brute = {p for p in sp.points() if all(g(p) == p for g in swaps)}
    assert rep.total == rep.total_group == brute
    assert 0 in brute


def test_triangle_randomised():
    rng = random.Random(99)
    for _ in range(150):
        t = T.symmetric_tree(rng)
        parts = [T.random_isometries(t, rng, rng.randint(0, 2)) for _ in range(3)]
        rep = T.triangle_criterion_check(t, *parts)
        assert rep.ok


def test_product_criterion_examples():
    t = Tree(5, [(i, i + 1) for i in range(4)])
    ident = [TreeIsom.identity(t)]
    rep = T.product_criterion_check(t, ident, ident)
    assert rep.ok and rep.intersection
    flip = TreeIsom(t, (4, 3, 2, 1, 0))
    rep = T.product_criterion_check(t, [flip], ident)
    assert rep.ok and rep.intersection == {2}


def test_product_criterion_randomised():
    rng = random.Random(12)
    for _ in range(150):
        t = T.symmetric_tree(rng)
        rep = T.product_criterion_check(t, T.random_isometries(t, rng, 2), T.random_isometries(t, rng, 2))
        assert rep.products_have_fixed_points and rep.intersection and rep.ok


# Bass–Serre balls ---------------------------------------------------------


def test_bass_serre_dihedral_is_a_line():
    ball = T.bass_serre_ball(2, 2, 5)
    assert max(ball.tree.degree(v) for v in range(ball.tree.n)) == 2
    assert ball.tree.n == 11


def test_bass_serre_degrees_alternate():
    ball = T.bass_serre_ball(2, 3, 6)
    for v in range(ball.tree.n):
        if ball.depth[v] < 6:
            kind = ball.cosets[v][0]
            assert ball.tree.degree(v) == (2 if kind == "A" else 3)
            for u in ball.tree.adj[v]:
                assert ball.cosets[u][0] != kind


def _count_cosets(m, k, radius):
    """Vertices at each depth: A has m neighbours, every other vertex branches m-1 or k-1."""
    counts = [1]
    kind_counts = {"A": 1, "B": 0}
    for d in range(1, radius + 1):
        a, b = kind_counts["A"], kind_counts["B"]
        # from A-vertices come B-vertices and vice versa
        first = d == 1
        new_b = a * (m if first else m - 1)
        new_a = b * (k - 1)
        kind_counts = {"A": new_a, "B": new_b}
        counts.append(new_a + new_b)
    return sum(counts)


@pytest.mark.parametrize("m, k, radius", [(2, 3, 6), (3, 3, 4), (2, 5, 5), (4, 2, 3)])
def test_bass_serre_ball_size(m, k, radius):
    assert T.bass_serre_ball(m, k, radius).tree.n == _count_cosets(m, k, radius)


def test_bass_serre_base_action():
    ball = T.bass_serre_ball(2, 3, 4)
    assert ball.action["a"][ball.base] == ball.base
    assert ball.action["b"][ball.base] != ball.base


def test_bass_serre_action_is_isometric():
    ball = T.bass_serre_ball(2, 3, 8)
    t = ball.tree
    inner = [v for v in range(t.n) if ball.depth[v] <= 3]
    for g in ("a", "b", "ab", "b^2 a"):
        for u in inner:
            for v in inner:
                gu, gv = ball.act(g, u), ball.act(g, v)
                assert t.distance(gu, gv) == t.distance(u, v)


def test_min_displacement_examples():
    ball = T.bass_serre_ball(2, 3, 8)
    assert T.min_displacement(ball, "a", 4) == 0
    assert T.min_displacement(ball, "b", 4) == 0
    assert T.min_displacement(ball, "", 4) == 0
    # brute force via networkx distances over the inner ball
    g = nx.Graph(ball.tree.edges)
    dist = dict(nx.all_pairs_shortest_path_length(g))
    inner = [v for v in range(ball.tree.n) if ball.depth[v] <= 4]
    assert min(dist[v][ball.act("ab", v)] for v in inner) == 2
    assert T.min_displacement(ball, "ab", 4) == 2
    with pytest.raises(ValueError):
        T.min_displacement(ball, "ab", 8)


@pytest.mark.parametrize("conj", ["a", "b", "ba", "b^2 a b"])
@pytest.mark.parametrize("elem", ["ab", "a", "ab^2", "abab^2"])
def test_min_displacement_conjugation_invariant(conj, elem):
    ball = T.bass_serre_ball(2, 3, 14)
    orders = ball.orders
    x = T.parse_free_product_word(conj, orders)
    x_inv = tuple((f, -e) for f, e in reversed(x))
    g = T.parse_free_product_word(elem, orders)
    conjugated = T._nf_mul(T._nf_mul(x, g, orders), x_inv, orders)
    assert T.min_displacement(ball, conjugated, 4) == T.min_displacement(ball, g, 4)


def test_separation_witness_on_ball():
    ball = T.bass_serre_ball(2, 3, 8)
    fa = T.ball_fixed_vertices(ball, "a", 4)
    fb = T.ball_fixed_vertices(ball, "b", 4)
    assert fa == {ball.base} and len(fb) == 1 and not fa & fb
    wit = T.separation_witness(ball.tree, fa, fb, [("ab", lambda p: ball.act("ab", p))])
    assert wit.point == ball.base and wit.product == "ab"


def test_parse_free_product_word():
    orders = {"a": 2, "b": 3}
    assert T.parse_free_product_word("a a", orders) == ()
    assert T.parse_free_product_word("b^-1", orders) == (("b", 2),)
    with pytest.raises(ValueError):
        T.parse_free_product_word("ac", orders)
