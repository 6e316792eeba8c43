"""Misc types used in code."""
from enum import Enum
from typing import Union

Element = int
ClassId = int
Stage = int


class Infinity(Enum):
    """Marker for an infinite count or an unbounded character."""

    INFINITE = "inf"

    def __str__(self):
        return self.value


INFINITE = Infinity.INFINITE
UNBOUNDED = Infinity.INFINITE

Count = Union[int, Infinity]
