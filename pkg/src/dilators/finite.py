"""Finite linear orders and the strictly increasing maps between them."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Any

from .codes import LESS


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteOrder:
    """A finite suborder of a carrier, as an ascending tuple of codes.

    ``carrier`` is any object with a ``compare`` method; ``None`` means the
    naturals in their usual order.
    """

    codes: tuple
    carrier: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        codes = tuple(self.codes)
        object.__setattr__(self, "codes", codes)
        for x, y in zip(codes, codes[1:]):
            if not self._lt(x, y):
                raise EmbeddingError(f"codes not strictly ascending: {x!r}, {y!r}")

    def _lt(self, x, y) -> bool:
        if self.carrier is None:
            return x < y
        return self.carrier.compare(x, y) is LESS

    def __len__(self) -> int:
        return len(self.codes)

    def __iter__(self):
        return iter(self.codes)

    def __contains__(self, x) -> bool:
        return x in self.codes

    def index(self, x) -> int:
        return self.codes.index(x)

    @staticmethod
    def nat(n: int) -> "FiniteOrder":
        return _nat_order(n)


@lru_cache(maxsize=None)
def _nat_order(n: int) -> FiniteOrder:
    return FiniteOrder(tuple(range(n)))


@dataclass(frozen=True)
class FiniteEmbedding:
    """Strictly increasing map; ``graph[i]`` is the image of ``domain.codes[i]``."""

    domain: FiniteOrder
    codomain: FiniteOrder
    graph: tuple

    def __post_init__(self):
        graph = tuple(self.graph)
        object.__setattr__(self, "graph", graph)
        if len(graph) != len(self.domain):
            raise EmbeddingError("graph length differs from domain size")
        for y in graph:
            if y not in self.codomain:
                raise EmbeddingError(f"image {y!r} outside codomain")
        for y, z in zip(graph, graph[1:]):
            if not self.codomain._lt(y, z):
                raise EmbeddingError("map is not strictly increasing")

    @classmethod
    def nat(cls, images, n: int) -> "FiniteEmbedding":
        """The morphism ``len(images) -> n`` of Nat with the given images."""
        images = tuple(images)
        return _nat_embedding(images, n)

    @classmethod
    def identity(cls, a: FiniteOrder) -> "FiniteEmbedding":
        return cls(a, a, a.codes)

    @property
    def source_size(self) -> int:
        return len(self.domain)

    @property
    def target_size(self) -> int:
        return len(self.codomain)

    def __call__(self, x):
        return self.graph[self.domain.index(x)]

    def range(self) -> frozenset:
        return frozenset(self.graph)

    def then(self, g: "FiniteEmbedding") -> "FiniteEmbedding":
        """``g o self``."""
        if g.domain != self.codomain:
            raise EmbeddingError("maps are not composable")
        return FiniteEmbedding(self.domain, g.codomain, tuple(g(y) for y in self.graph))

    def __le__(self, other: "FiniteEmbedding") -> bool:
        lt = self.codomain._lt
        return all(x == y or lt(x, y) for x, y in zip(self.graph, other.graph))


@lru_cache(maxsize=200_000)
def _nat_embedding(images: tuple, n: int) -> FiniteEmbedding:
    return FiniteEmbedding(_nat_order(len(images)), _nat_order(n), images)


def increasing_enumeration(a: FiniteOrder) -> dict:
    return dict(enumerate(a.codes))


def collapse(f: FiniteEmbedding) -> FiniteEmbedding:
    """The unique Nat morphism |f| with en_b o |f| = f o en_a."""
    pos = {y: i for i, y in enumerate(f.codomain.codes)}
    return FiniteEmbedding.nat([pos[y] for y in f.graph], len(f.codomain))


@lru_cache(maxsize=None)
def _embedding_tuples(m: int, n: int) -> tuple:
    return tuple(combinations(range(n), m))


def enumerate_embeddings(m: int, n: int) -> list:
    """All strictly increasing maps m -> n, lexicographic on image tuples."""
    return [FiniteEmbedding.nat(c, n) for c in _embedding_tuples(m, n)]


def embedding_images(m: int, n: int) -> tuple:
    """Image tuples of all embeddings m -> n (cheap form of enumerate_embeddings)."""
    return _embedding_tuples(m, n)


def nat_embedding_from(a: FiniteOrder, b: FiniteOrder) -> FiniteEmbedding:
    """en_b^{-1} restricted to a, for a a subset of b: the collapsed inclusion."""
    pos = {y: i for i, y in enumerate(b.codes)}
    try:
        return FiniteEmbedding.nat([pos[x] for x in a.codes], len(b))
    except KeyError as exc:
        raise EmbeddingError(f"{exc.args[0]!r} not in target") from None
