"""Cantor pairing, fixed for every element id and file format."""
from math import isqrt
from typing import Tuple

from .error import EvaluationError


def pair(x: int, y: int) -> int:
    """<x,y> = (x+y)(x+y+1)/2 + y."""
    if x < 0 or y < 0:
        raise EvaluationError(f"Cannot pair negative numbers ({x}, {y})")
    return (x + y) * (x + y + 1) // 2 + y


def unpair(z: int) -> Tuple[int, int]:
    if z < 0:
        raise EvaluationError(f"Cannot unpair negative number {z}")
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def triple(x: int, y: int, z: int) -> int:
    return pair(x, pair(y, z))


def untriple(n: int) -> Tuple[int, int, int]:
    x, rest = unpair(n)
    y, z = unpair(rest)
    return x, y, z


def quadruple(x: int, y: int, u: int, v: int) -> int:
    return pair(x, pair(y, pair(u, v)))


def unquadruple(n: int) -> Tuple[int, int, int, int]:
    x, rest = unpair(n)
    y, u, v = untriple(rest)
    return x, y, u, v
