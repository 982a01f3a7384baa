"""Finite closure enumeration and structure certificates.

Any hashable value with ``__mul__`` and ``one()`` works as a group element;
in this package that is :class:`FreeAut`, :class:`IntMatrix` and
:class:`~trianglefa.tree.TreeIsom`. Generators must have finite order, so
closing under right multiplication alone already yields a subgroup.

Dihedral groups are named by their order: ``dihedral of order 2m``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, Protocol, Sequence, TypeVar

DEFAULT_CAP = 10**6


class GroupElement(Protocol, Hashable):
    def __mul__(self, other: Any) -> Any: ...

    def one(self) -> Any: ...


G = TypeVar("G", bound=GroupElement)


class IncompleteClosureError(RuntimeError):
    """Raised when a structural claim is requested from a partial closure."""


@dataclass
class ClosureResult:
    labels: list[str]
    generators: list[Any]
    elements: list[Any]
    complete: bool
    parents: dict[Any, tuple[Any, int]] = field(repr=False, default_factory=dict)
    cayley_edges: list[tuple[int, int, int]] | None = field(repr=False, default=None)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Any:
        return self.elements[0]

    def element_set(self) -> frozenset:
        return frozenset(self.elements)

    def __contains__(self, g: Any) -> bool:
        return g in self.parents

    def word_of(self, g: Any) -> list[str]:
        """Shortest generator word for g (right-to-left product of the labels)."""
        if g not in self.parents:
            raise KeyError("element not in closure")
        word = []
        while True:
            parent, gen = self.parents[g]
            if parent is None:
                break
            word.append(self.labels[gen])
            g = parent
        return word[::-1]

    def require_complete(self) -> None:
        if not self.complete:
            raise IncompleteClosureError(f"closure hit the cap at {self.order} elements")


def _as_items(gens: Mapping[str, G] | Sequence[tuple[str, G]]) -> list[tuple[str, G]]:
    if isinstance(gens, Mapping):
        return list(gens.items())
    return list(gens)


def enumerate_closure(
    gens: Mapping[str, G] | Sequence[tuple[str, G]],
    cap: int = DEFAULT_CAP,
    identity: G | None = None,
    record_edges: bool = False,
) -> ClosureResult:
    """Breadth-first closure of labelled finite-order generators.

    Elements are discovered as ``x * g`` for x on the frontier and g a
    generator. Stops with ``complete=False`` once ``cap`` elements exist.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    items = _as_items(gens)
    labels = [lab for lab, _ in items]
    values = [g for _, g in items]
    if identity is None:
        if not values:
            raise ValueError("need a generator or an explicit identity")
        identity = values[0].one()
    parents: dict[Any, tuple[Any, int]] = {identity: (None, -1)}
    elements = [identity]
    index = {identity: 0} if record_edges else None
    edges: list[tuple[int, int, int]] | None = [] if record_edges else None
    frontier = [identity]
    complete = True
    while frontier and complete:
        nxt = []
        for x in frontier:
            for k, g in enumerate(values):
                y = x * g
                if y not in parents:
                    if len(elements) >= cap:
                        complete = False
                        break
                    parents[y] = (x, k)
                    elements.append(y)
                    nxt.append(y)
                    if index is not None:
                        index[y] = len(elements) - 1
                if edges is not None and y in index:
                    edges.append((index[x], k, index[y]))
            if not complete:
                break
        frontier = nxt
    return ClosureResult(labels, values, elements, complete, parents, edges)


def element_order(g: G, cap: int = 10**4) -> int | None:
    one = g.one()
    x = g
    for k in range(1, cap + 1):
        if x == one:
            return k
        x = x * g
    return None


def order_multiset(r: ClosureResult, order_cap: int = 10**4) -> dict[int, int]:
    """Multiset {order(g)} over a complete closure, as a sorted dict."""
    r.require_complete()
    counts: Counter[int] = Counter()
    known: dict[Any, int] = {}
    for g in r.elements:
        if g in known:
            counts[known[g]] += 1
            continue
        k = element_order(g, order_cap)
        if k is None:
            raise ValueError(f"element order exceeds {order_cap}")
        counts[k] += 1
        known[g] = k
        # powers g^j with gcd(j, k) = 1 share the order
        x = g
        for j in range(2, k):
            x = x * g
            if _gcd(j, k) == 1:
                known[x] = k
    return dict(sorted(counts.items()))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


@dataclass
class Certificate:
    kind: str
    ok: bool
    claim: str
    details: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "ok": self.ok, "claim": self.claim, "details": self.details}


def check_dihedral(s: G, t: G, m: int, cap: int = DEFAULT_CAP) -> Certificate:
    """Certify <s, t> is dihedral of order 2m.

    s, t involutions with st of exact order m give a quotient of the
    dihedral group of order 2m; an enumerated closure of exactly 2m
    elements rules out a proper quotient.
    """
    claim = f"dihedral of order {2 * m}"
    one = s.one()
    st = s * t
    details: dict[str, Any] = {
        "s_squared_trivial": s * s == one and s != one,
        "t_squared_trivial": t * t == one and t != one,
        "st_order": element_order(st, max(2 * m, 1)),
    }
    r = enumerate_closure([("s", s), ("t", t)], cap)
    if not r.complete:
        raise IncompleteClosureError(f"<s, t> exceeds cap {cap}")
    details["closure_order"] = r.order
    ok = (
        details["s_squared_trivial"]
        and details["t_squared_trivial"]
        and details["st_order"] == m
        and r.order == 2 * m
    )
    return Certificate("dihedral", bool(ok), claim, details)


def check_direct_product(
    u_gens: Mapping[str, G] | Sequence[tuple[str, G]],
    v_gens: Mapping[str, G] | Sequence[tuple[str, G]],
    cap: int = DEFAULT_CAP,
) -> Certificate:
    """Certify <U ∪ V> = <U> × <V> for finite <U>, <V>.

    Commuting generators make every element of <U> commute with every
    element of <V>; with trivial intersection the join is the internal
    direct product. The join is enumerated separately and its order compared.
    """
    u_items, v_items = _as_items(u_gens), _as_items(v_gens)
    both = u_items + v_items
    U = enumerate_closure(u_items, cap)
    V = enumerate_closure(v_items, cap)
    UV = enumerate_closure(both, cap)
    for r, name in ((U, "U"), (V, "V"), (UV, "U∪V")):
        if not r.complete:
            raise IncompleteClosureError(f"<{name}> exceeds cap {cap}")
    noncommuting = [
        (a, b) for a, x in u_items for b, y in v_items if x * y != y * x
    ]
    meet = U.element_set() & V.element_set()
    details = {
        "order_u": U.order,
        "order_v": V.order,
        "order_join": UV.order,
        "commuting": not noncommuting,
        "noncommuting_pairs": [list(p) for p in noncommuting],
        "intersection_order": len(meet),
    }
    ok = not noncommuting and len(meet) == 1 and UV.order == U.order * V.order
    claim = f"direct product of orders {U.order} x {V.order}"
    return Certificate("direct_product", ok, claim, details)


def check_containment(r: ClosureResult, predicate: Callable[[Any], bool]) -> tuple[bool, Any]:
    """(True, None) if every element satisfies predicate, else (False, first failure)."""
    r.require_complete()
    for g in r.elements:
        if not predicate(g):
            return False, g
    return True, None


def parse_witness_word(word: str | Iterable[str]) -> list[str]:
    if isinstance(word, str):
        return [tok.strip() for tok in word.replace("*", "∘").split("∘") if tok.strip()]
    return list(word)


def witness_evaluate(word: str | Iterable[str], table: Mapping[str, G], identity: G | None = None) -> G:
    """Right-to-left product of table[label] over the labels of word."""
    labels = parse_witness_word(word)
    for lab in labels:
        if lab not in table:
            raise KeyError(f"unknown label {lab!r}")
    if identity is None:
        if not labels:
            raise ValueError("empty word needs an explicit identity")
        identity = table[labels[0]].one()
    result = identity
    for lab in labels:
        result = result * table[lab]
    return result


def closure_to_json(r: ClosureResult, certificates: Sequence[Certificate] = (), with_multiset: bool = True) -> dict[str, Any]:
    out: dict[str, Any] = {
        "labels": list(r.labels),
        "order": r.order,
        "complete": r.complete,
        "certificates": [c.to_json() for c in certificates],
    }
    if with_multiset and r.complete:
        out["order_multiset"] = {str(k): v for k, v in order_multiset(r).items()}
    return out
