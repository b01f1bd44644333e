"""Element codes for the order constructors and the three-way comparison result."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Any


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1

    def __str__(self) -> str:
        return _NAMES[self]

    def flip(self) -> "Ordering":
        return Ordering(-int(self))


_NAMES = {Ordering.LESS: "Less", Ordering.EQUAL: "Equal", Ordering.GREATER: "Greater"}

LESS, EQUAL, GREATER = Ordering.LESS, Ordering.EQUAL, Ordering.GREATER


def cmp_int(a, b) -> Ordering:
    if a < b:
        return LESS
    if a > b:
        return GREATER
    return EQUAL


@dataclass(frozen=True, slots=True)
class Pair:
    """``hi`` is the major (more significant) component, ``lo`` the minor one."""

    hi: Any
    lo: Any


@dataclass(frozen=True, slots=True)
class Exps:
    """A term of 2^gamma: exponents stored strictly descending."""

    exps: tuple


@dataclass(frozen=True, slots=True)
class Terms:
    """A term of (1+alpha)^gamma: pairs (x, y), first components strictly descending."""

    terms: tuple


@dataclass(frozen=True, slots=True)
class Cnf:
    """Cantor normal form below epsilon_0; exponents weakly descending."""

    terms: tuple = ()

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return "+".join(f"w^{t!r}" for t in self.terms)


@dataclass(frozen=True, slots=True)
class Node:
    seq: tuple


@dataclass(frozen=True, slots=True)
class In:
    x: Any


@dataclass(frozen=True, slots=True)
class Left:
    x: Any


@dataclass(frozen=True, slots=True)
class Right:
    x: Any


class _Marker:
    __slots__ = ()
    _name = "?"

    def __repr__(self) -> str:
        return self._name

    def __reduce__(self):
        return type(self), ()


class TopCode(_Marker):
    _name = "Top"

    def __eq__(self, other):
        return isinstance(other, TopCode)

    def __hash__(self):
        return hash("Top")


class ZeroCode(_Marker):
    _name = "Zero"

    def __eq__(self, other):
        return isinstance(other, ZeroCode)

    def __hash__(self):
        return hash("Zero")


TOP = TopCode()
ZERO = ZeroCode()
