"""Finite simplicial trees, their isometries, and fixed-point combinatorics.

Everything happens in the barycentric subdivision so that edge inversions
have honest fixed points. Points are integer ids: ``0..n-1`` are the
original vertices and ``n + k`` is the midpoint of the k-th edge (edges
sorted as ``(min, max)`` pairs). Distances are in half-edge units.
"""

from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

from .closure import enumerate_closure

Point = int


class TreeError(ValueError):
    pass


class HellyViolation(AssertionError):
    """Pairwise-meeting subtrees with empty total intersection. Never expected."""


class Tree:
    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 1:
            raise TreeError("a tree needs at least one vertex")
        norm = sorted({(min(u, v), max(u, v)) for u, v in edges})
        for u, v in norm:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise TreeError(f"bad edge ({u}, {v})")
        if len(norm) != n - 1:
            raise TreeError(f"{n} vertices need {n - 1} edges, got {len(norm)}")
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(norm)
        self.adj: tuple[tuple[int, ...], ...] = _adjacency(n, norm)
        self._edge_index = {e: k for k, e in enumerate(norm)}
        seen = _bfs_order(self.adj, 0)
        if len(seen) != n:
            raise TreeError("edge list is not connected")
        sub = [[] for _ in range(self.num_points)]
        for k, (u, v) in enumerate(norm):
            m = n + k
            sub[u].append(m)
            sub[v].append(m)
            sub[m] = [u, v]
        self.sub_adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in sub)

    @classmethod
    def from_edge_text(cls, text: str) -> Tree:
        """Parse whitespace/comma separated vertex pairs, e.g. ``"0 1\\n1 2"``."""
        nums = [int(x) for x in re.findall(r"-?\d+", text)]
        if len(nums) % 2:
            raise TreeError("edge list has an odd number of endpoints")
        edges = list(zip(nums[::2], nums[1::2]))
        n = max(nums) + 1 if nums else 1
        return cls(n, edges)

    @classmethod
    def from_prufer(cls, seq: Sequence[int]) -> Tree:
        n = len(seq) + 2
        degree = [1] * n
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = min(i for i in range(n) if degree[i] == 1)
            edges.append((leaf, x))
            degree[leaf] -= 1
            degree[x] -= 1
        u, v = (i for i in range(n) if degree[i] == 1)
        edges.append((u, v))
        return cls(n, edges)

    @property
    def num_points(self) -> int:
        return 2 * self.n - 1

    def points(self) -> range:
        return range(self.num_points)

    def vertex(self, v: int) -> Point:
        if not 0 <= v < self.n:
            raise TreeError(f"vertex {v} not in tree")
        return v

    def midpoint(self, u: int, v: int) -> Point:
        try:
            return self.n + self._edge_index[(min(u, v), max(u, v))]
        except KeyError:
            raise TreeError(f"({u}, {v}) is not an edge") from None

    def is_vertex(self, p: Point) -> bool:
        return p < self.n

    def describe(self, p: Point) -> str:
        self._check(p)
        if p < self.n:
            return f"v{p}"
        u, v = self.edges[p - self.n]
        return f"m{u}-{v}"

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def _check(self, p: Point) -> None:
        if not 0 <= p < self.num_points:
            raise TreeError(f"point {p} not in tree")

    @cached_property
    def _dist(self) -> list[list[int]]:
        out = []
        for s in range(self.num_points):
            d = [-1] * self.num_points
            d[s] = 0
            q = deque([s])
            while q:
                x = q.popleft()
                for y in self.sub_adj[x]:
                    if d[y] < 0:
                        d[y] = d[x] + 1
                        q.append(y)
            out.append(d)
        return out

    def distance(self, p: Point, q: Point) -> int:
        self._check(p)
        self._check(q)
        return self._dist[p][q]

    def path(self, p: Point, q: Point) -> list[Point]:
        self._check(p)
        self._check(q)
        d = self._dist
        out = [p]
        while out[-1] != q:
            x = out[-1]
            out.append(next(y for y in self.sub_adj[x] if d[y][q] == d[x][q] - 1))
        return out

    def span(self, pts: Iterable[Point]) -> frozenset[Point]:
        """Smallest subtree containing pts."""
        pts = list(pts)
        if not pts:
            return frozenset()
        out = {pts[0]}
        for q in pts[1:]:
            out.update(self.path(pts[0], q))
        return frozenset(out)

    def is_connected_set(self, pts: Iterable[Point]) -> bool:
        pts = set(pts)
        if not pts:
            return False
        start = next(iter(pts))
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in self.sub_adj[x]:
                if y in pts and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(pts)

    def __repr__(self) -> str:
        return f"Tree(n={self.n}, edges={list(self.edges)})"


def _adjacency(n: int, edges: Sequence[tuple[int, int]]) -> tuple[tuple[int, ...], ...]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return tuple(tuple(sorted(a)) for a in adj)


def _bfs_order(adj, root: int) -> list[int]:
    seen = {root}
    order = [root]
    q = deque([root])
    while q:
        x = q.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                order.append(y)
                q.append(y)
    return order


def distance(t: Tree, p: Point, q: Point) -> int:
    return t.distance(p, q)


@dataclass(frozen=True, eq=False)
class TreeIsom:
    """Adjacency-preserving vertex bijection, acting on all subdivision points."""

    tree: Tree
    perm: tuple[int, ...]
    point_map: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        t, p = self.tree, tuple(self.perm)
        if sorted(p) != list(range(t.n)):
            raise TreeError("isometry must be a bijection of the vertices")
        for u, v in t.edges:
            if (min(p[u], p[v]), max(p[u], p[v])) not in t._edge_index:
                raise TreeError(f"edge ({u}, {v}) is not mapped to an edge")
        mids = [t.midpoint(p[u], p[v]) for u, v in t.edges]
        object.__setattr__(self, "perm", p)
        object.__setattr__(self, "point_map", p + tuple(mids))

    @classmethod
    def identity(cls, t: Tree) -> TreeIsom:
        return cls(t, tuple(range(t.n)))

    @classmethod
    def from_text(cls, t: Tree, line: str) -> TreeIsom:
        return cls(t, tuple(int(x) for x in re.findall(r"\d+", line)))

    @classmethod
    def _from_point_map(cls, t: Tree, pm: tuple[int, ...]) -> TreeIsom:
        g = object.__new__(cls)
        object.__setattr__(g, "tree", t)
        object.__setattr__(g, "perm", pm[: t.n])
        object.__setattr__(g, "point_map", pm)
        return g

    def one(self) -> TreeIsom:
        return TreeIsom._from_point_map(self.tree, tuple(range(self.tree.num_points)))

    def __call__(self, p: Point) -> Point:
        return self.point_map[p]

    def __mul__(self, other: TreeIsom) -> TreeIsom:
        """(self * other)(p) == self(other(p))."""
        pm = self.point_map
        return TreeIsom._from_point_map(self.tree, tuple(pm[x] for x in other.point_map))

    def inverse(self) -> TreeIsom:
        inv = [0] * len(self.point_map)
        for i, x in enumerate(self.point_map):
            inv[x] = i
        return TreeIsom._from_point_map(self.tree, tuple(inv))

    def fixed_points(self) -> frozenset[Point]:
        return frozenset(i for i, x in enumerate(self.point_map) if i == x)

    def __eq__(self, other) -> bool:
        return isinstance(other, TreeIsom) and self.tree is other.tree and self.point_map == other.point_map

    def __hash__(self) -> int:
        return hash(self.point_map)


@dataclass(frozen=True)
class Subtree:
    tree: Tree = field(repr=False, compare=False)
    points: frozenset[Point]

    def __post_init__(self):
        if not self.points:
            raise TreeError("a subtree is nonempty")
        if not self.tree.is_connected_set(self.points):
            raise TreeError("point set is not connected")

    def __contains__(self, p: Point) -> bool:
        return p in self.points

    def __len__(self) -> int:
        return len(self.points)


def fixed_set(t: Tree, g: TreeIsom) -> Subtree | None:
    pts = g.fixed_points()
    # a fixed set in a tree is convex; Subtree() rechecks connectivity
    return Subtree(t, pts) if pts else None


def fixed_set_group(t: Tree, gens: Sequence[TreeIsom]) -> Subtree | None:
    pts = frozenset(t.points())
    for g in gens:
        pts &= g.fixed_points()
    return Subtree(t, pts) if pts else None


def _points(s: Subtree | None) -> frozenset[Point]:
    return frozenset() if s is None else s.points


@dataclass
class HellyVerdict:
    pairwise_ok: bool
    total_nonempty: bool
    common_point: Point | None


def helly_check(subtrees: Sequence[Subtree]) -> HellyVerdict:
    if not subtrees:
        raise ValueError("need at least one subtree")
    sets = [s.points for s in subtrees]
    pairwise = all(a & b for i, a in enumerate(sets) for b in sets[i + 1:])
    total = frozenset.intersection(*sets)
    if pairwise and not total:
        raise HellyViolation(f"pairwise-meeting family of {len(sets)} subtrees has empty intersection")
    return HellyVerdict(pairwise, bool(total), min(total) if total else None)


def circumcentre(t: Tree, pts: Iterable[Point], check: bool = True) -> Point:
    """Unique minimiser of the max distance to pts.

    Found as the midpoint of a diametral pair. The result must be a
    subdivision point, so pts with odd diameter (mixing vertices and edge
    midpoints) are rejected.
    """
    pts = sorted(set(pts))
    if not pts:
        raise ValueError("circumcentre of an empty set")
    for p in pts:
        t._check(p)
    d = t._dist
    q = max(pts, key=lambda x: (d[pts[0]][x], -x))
    r = max(pts, key=lambda x: (d[q][x], -x))
    diam = d[q][r]
    if diam % 2:
        raise ValueError("diameter is odd; circumcentre is not a subdivision point")
    c = t.path(q, r)[diam // 2]
    if check:
        radius = diam // 2
        best = [x for x in t.points() if max(d[x][p] for p in pts) == radius]
        if best != [c] or min(max(d[x][p] for p in pts) for x in t.points()) != radius:
            raise AssertionError(f"circumcentre not unique or not minimal: {best} vs {c}")
    return c


# Criterion checks -------------------------------------------------------


def group_fixed_points(t: Tree, gens: Sequence[TreeIsom], cap: int = 20000) -> frozenset[Point] | None:
    """Points fixed by every element of <gens>, found by enumerating the group.

    Returns None if the group exceeds cap.
    """
    ident = TreeIsom.identity(t)
    r = enumerate_closure([(str(i), g) for i, g in enumerate(gens)], cap, identity=ident)
    if not r.complete:
        return None
    pts = frozenset(t.points())
    for g in r.elements:
        pts &= g.fixed_points()
    return pts


@dataclass
class TriangleReport:
    fix: list[frozenset[Point]]
    pairwise: dict[str, frozenset[Point]]
    pairwise_group: dict[str, frozenset[Point]]
    total: frozenset[Point]
    total_group: frozenset[Point]

    @property
    def pairwise_identity(self) -> bool:
        return all(self.pairwise[k] == self.pairwise_group[k] for k in self.pairwise)

    @property
    def pairwise_nonempty(self) -> bool:
        return all(self.pairwise.values())

    @property
    def ok(self) -> bool:
        return (
            self.pairwise_identity
            and self.pairwise_nonempty
            and self.total == self.total_group
            and bool(self.total)
        )


def triangle_criterion_check(
    t: Tree,
    A1: Sequence[TreeIsom],
    A2: Sequence[TreeIsom],
    A3: Sequence[TreeIsom],
    cap: int = 20000,
) -> TriangleReport:
    """Fix(A_i) ∩ Fix(A_j) against Fix(<A_i ∪ A_j>), and the triple version.

    Group fixed sets come from enumerating the generated groups, not from
    intersecting generator fixed sets.
    """
    parts = [list(A1), list(A2), list(A3)]
    fix = [_points(fixed_set_group(t, A)) for A in parts]
    pairwise, pairwise_group = {}, {}
    for i, j in ((0, 1), (0, 2), (1, 2)):
        key = f"{i + 1}{j + 1}"
        pairwise[key] = fix[i] & fix[j]
        grp = group_fixed_points(t, parts[i] + parts[j], cap)
        if grp is None:
            raise RuntimeError(f"H{key} exceeds cap {cap}")
        pairwise_group[key] = grp
    total_group = group_fixed_points(t, parts[0] + parts[1] + parts[2], cap)
    if total_group is None:
        raise RuntimeError(f"generated group exceeds cap {cap}")
    return TriangleReport(fix, pairwise, pairwise_group, fix[0] & fix[1] & fix[2], total_group)


@dataclass
class SeparationWitness:
    point: Point
    target: Point
    product: str


def separation_witness(
    t: Tree,
    fix1: Iterable[Point],
    fix2: Iterable[Point],
    products: Sequence[tuple[str, Callable[[Point], Point | None]]],
) -> SeparationWitness | None:
    """For disjoint fixed sets, the point of fix1 closest to fix2 and a product moving it.

    ``products`` maps labels to point maps (None meaning "undefined here").
    Returns None if no listed product moves the closest point.
    """
    fix1, fix2 = sorted(fix1), sorted(fix2)
    if set(fix1) & set(fix2):
        raise ValueError("fixed sets intersect")
    d = t._dist
    p, q = min(((x, y) for x in fix1 for y in fix2), key=lambda xy: (d[xy[0]][xy[1]], xy))
    for label, f in products:
        image = f(p)
        if image is not None and image != p:
            return SeparationWitness(p, q, label)
    return None


@dataclass
class ProductReport:
    products_have_fixed_points: bool
    intersection: frozenset[Point]
    witness: SeparationWitness | None

    @property
    def ok(self) -> bool:
        # all products fix something => Fix(A1) ∩ Fix(A2) nonempty;
        # an empty intersection must come with a separating product
        if self.products_have_fixed_points and not self.intersection:
            return False
        return bool(self.intersection) or self.witness is not None


def product_criterion_check(t: Tree, A1: Sequence[TreeIsom], A2: Sequence[TreeIsom]) -> ProductReport:
    f1, f2 = fixed_set_group(t, A1), fixed_set_group(t, A2)
    if f1 is None or f2 is None:
        raise ValueError("product criterion needs Fix(A1) and Fix(A2) nonempty")
    products = [(f"{i}*{j}", a * b) for i, a in enumerate(A1) for j, b in enumerate(A2)]
    hyp = all(g.fixed_points() for _, g in products)
    meet = f1.points & f2.points
    witness = None
    if not meet:
        witness = separation_witness(t, f1.points, f2.points, [(lab, g) for lab, g in products])
    return ProductReport(hyp, meet, witness)


# Random instances --------------------------------------------------------


def random_tree(n: int, rng: random.Random) -> Tree:
    if n == 1:
        return Tree(1, [])
    if n == 2:
        return Tree(2, [(0, 1)])
    return Tree.from_prufer([rng.randrange(n) for _ in range(n - 2)])


def random_subtree(t: Tree, rng: random.Random, seeds: Iterable[Point] = (), grow: int = 0) -> Subtree:
    """Span of the seed points (or one random point), grown by random neighbours."""
    seeds = list(seeds) or [rng.randrange(t.num_points)]
    pts = set(t.span(seeds))
    for _ in range(grow):
        border = sorted({y for x in pts for y in t.sub_adj[x]} - pts)
        if not border:
            break
        pts.add(rng.choice(border))
    return Subtree(t, frozenset(pts))


def random_pairwise_family(t: Tree, rng: random.Random, size: int) -> list[Subtree]:
    """Subtrees C_1..C_size with C_i ∩ C_j nonempty by construction."""
    shared = {(i, j): rng.randrange(t.num_points) for i in range(size) for j in range(i + 1, size)}
    fam = []
    for i in range(size):
        seeds = [p for (a, b), p in shared.items() if i in (a, b)]
        fam.append(random_subtree(t, rng, seeds, grow=rng.randrange(4)))
    return fam


def symmetric_tree(rng: random.Random, max_vertices: int = 50) -> Tree:
    """Random tree with planted symmetry: copies of a random tree on a hub or a central edge."""
    while True:
        s = rng.randint(1, 7)
        base = random_tree(s, rng)
        root = rng.randrange(s)
        k = rng.randint(2, 4)
        mode = rng.choice(["hub", "hub", "edge"])
        if mode == "edge":
            k = 2
        tail = rng.randint(0, 3) if mode == "hub" else 0
        total = s * k + (1 if mode == "hub" else 0) + tail
        if total <= max_vertices:
            break
    edges = []
    for c in range(k):
        off = c * s
        edges += [(u + off, v + off) for u, v in base.edges]
    if mode == "edge":
        edges.append((root, root + s))
        n = 2 * s
    else:
        hub = s * k
        edges += [(hub, root + c * s) for c in range(k)]
        n = hub + 1
        prev = hub
        for _ in range(tail):
            edges.append((prev, n))
            prev = n
            n += 1
    # shuffle labels so vertex ids carry no structure
    relabel = list(range(n))
    rng.shuffle(relabel)
    return Tree(n, [(relabel[u], relabel[v]) for u, v in edges])


def tree_centre(t: Tree) -> Point:
    return circumcentre(t, range(t.n), check=False) if t.n > 1 else 0


def automorphism_generators(t: Tree) -> list[TreeIsom]:
    """Generators of Aut(t): swaps of isomorphic sibling branches about the centre."""
    c = tree_centre(t)
    parent = {c: None}
    order = [c]
    q = deque([c])
    while q:
        x = q.popleft()
        for y in t.sub_adj[x]:
            if y not in parent:
                parent[y] = x
                order.append(y)
                q.append(y)
    children = {x: [y for y in t.sub_adj[x] if parent.get(y) == x] for x in order}
    code: dict[int, str] = {}
    for x in reversed(order):
        code[x] = "(" + "".join(sorted(code[y] for y in children[x])) + ")"

    def match(x: int, y: int, out: dict[int, int]) -> None:
        out[x] = y
        cx = sorted(children[x], key=lambda z: (code[z], z))
        cy = sorted(children[y], key=lambda z: (code[z], z))
        for a, b in zip(cx, cy):
            match(a, b, out)

    gens = []
    for x in order:
        by_code: dict[str, list[int]] = {}
        for y in children[x]:
            by_code.setdefault(code[y], []).append(y)
        for group in by_code.values():
            for a, b in zip(group, group[1:]):
                m: dict[int, int] = {}
                match(a, b, m)
                match(b, a, m)
                pm = [m.get(p, p) for p in t.points()]
                gens.append(TreeIsom(t, tuple(pm[: t.n])))
    return gens


def random_isometries(t: Tree, rng: random.Random, count: int) -> list[TreeIsom]:
    gens = automorphism_generators(t)
    ident = TreeIsom.identity(t)
    if not gens:
        return [ident] * count
    out = []
    for _ in range(count):
        g = ident
        for _ in range(rng.randint(1, 3)):
            g = g * rng.choice(gens)
        out.append(g)
    return out


# Bass–Serre tree of Z_m * Z_k ---------------------------------------------

Syllable = tuple[str, int]
NormalForm = tuple[Syllable, ...]


def _nf_mul(x: NormalForm, y: NormalForm, orders: dict[str, int]) -> NormalForm:
    out = list(x)
    for f, e in y:
        if out and out[-1][0] == f:
            e = (out[-1][1] + e) % orders[f]
            out.pop()
            if e:
                out.append((f, e))
        else:
            e %= orders[f]
            if e:
                out.append((f, e))
    return tuple(out)


def _coset(kind: str, w: NormalForm) -> tuple[str, NormalForm]:
    """Canonical representative of wA (kind 'A') or wB (kind 'B')."""
    factor = kind.lower()
    if w and w[-1][0] == factor:
        w = w[:-1]
    return kind, w


def parse_free_product_word(text: str, orders: dict[str, int]) -> NormalForm:
    """``"ab"``, ``"a b^2"``, ``"b^-1 a"`` -> normal form."""
    compact = text.replace(" ", "")
    toks = re.findall(r"([ab])(?:\^(-?\d+))?", compact)
    if "".join(f + (f"^{e}" if e else "") for f, e in toks) != compact:
        raise ValueError(f"cannot parse free product word {text!r}")
    return _nf_mul((), tuple((f, int(e) if e else 1) for f, e in toks), orders)


@dataclass
class BassSerreBall:
    m: int
    k: int
    radius: int
    tree: Tree
    cosets: list[tuple[str, NormalForm]]
    depth: list[int]
    action: dict[str, list[int | None]]
    base: int = 0
    index: dict[tuple[str, NormalForm], int] = field(default_factory=dict, repr=False)

    @property
    def orders(self) -> dict[str, int]:
        return {"a": self.m, "b": self.k}

    def act(self, word: str | NormalForm, v: int) -> int | None:
        """Image of ball vertex v under the element; None if it leaves the ball."""
        x = parse_free_product_word(word, self.orders) if isinstance(word, str) else word
        kind, w = self.cosets[v]
        return self.index.get(_coset(kind, _nf_mul(x, w, self.orders)))

    def label(self, v: int) -> str:
        kind, w = self.cosets[v]
        return "".join(f if e == 1 else f"{f}^{e}" for f, e in w) + kind


def bass_serre_ball(m: int, k: int, radius: int, vertex_cap: int = 200000) -> BassSerreBall:
    """Radius ball about the vertex A in the Bass–Serre tree of Z_m * Z_k.

    Vertices are cosets wA, wB; wA is joined to wa^iB and wB to wb^jA.
    """
    if m < 2 or k < 2:
        raise ValueError("factor orders must be >= 2")
    if radius < 1:
        raise ValueError("radius must be >= 1")
    orders = {"a": m, "b": k}
    start = _coset("A", ())
    index = {start: 0}
    cosets = [start]
    depth = [0]
    edges = []
    q = deque([start])
    while q:
        c = q.popleft()
        i = index[c]
        if depth[i] == radius:
            continue
        kind, w = c
        if kind == "A":
            nbrs = [_coset("B", _nf_mul(w, (("a", e),), orders)) for e in range(m)]
        else:
            nbrs = [_coset("A", _nf_mul(w, (("b", e),), orders)) for e in range(k)]
        for nb in sorted(set(nbrs)):
            if nb not in index:
                if len(cosets) >= vertex_cap:
                    raise ValueError(f"ball of radius {radius} exceeds vertex cap {vertex_cap}")
                index[nb] = len(cosets)
                cosets.append(nb)
                depth.append(depth[i] + 1)
                edges.append((i, index[nb]))
                q.append(nb)
    tree = Tree(len(cosets), edges)
    action = {}
    for g in ("a", "b"):
        x = ((g, 1),)
        action[g] = [index.get(_coset(kind, _nf_mul(x, w, orders))) for kind, w in cosets]
    return BassSerreBall(m, k, radius, tree, cosets, depth, action, 0, index)


def min_displacement(ball: BassSerreBall, word: str | NormalForm, inner_radius: int) -> int:
    """min over ball vertices within inner_radius of d(v, x·v), in edges."""
    best = None
    for v, dv in enumerate(ball.depth):
        if dv > inner_radius:
            continue
        u = ball.act(word, v)
        if u is None:
            raise ValueError(f"image of {ball.label(v)} leaves the ball; shrink the inner radius")
        d = ball.tree.distance(v, u) // 2
        best = d if best is None else min(best, d)
    assert best is not None
    return best


def ball_fixed_vertices(ball: BassSerreBall, word: str | NormalForm, inner_radius: int) -> frozenset[int]:
    return frozenset(
        v for v, dv in enumerate(ball.depth) if dv <= inner_radius and ball.act(word, v) == v
    )
