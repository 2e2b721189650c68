"""Points on the projective line over Q(i): finite values plus infinity."""

from __future__ import annotations

from .qi import GaussianRational, format_qi


class _Infinity:
    __slots__ = ()

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "inf"


INFINITY = _Infinity()


class PointOnLine:
    """Either a finite Gaussian rational or the point at infinity."""

    __slots__ = ("value",)

    def __init__(self, value):
        if value is INFINITY or isinstance(value, _Infinity):
            self.value = INFINITY
        elif isinstance(value, GaussianRational):
            self.value = value
        elif isinstance(value, int):
            self.value = GaussianRational(value)
        else:
            raise TypeError(f"not a point on the line: {value!r}")

    @classmethod
    def infinity(cls):
        return cls(INFINITY)

    @property
    def is_infinite(self) -> bool:
        return self.value is INFINITY

    @property
    def finite(self) -> GaussianRational:
        if self.is_infinite:
            raise ValueError("the point at infinity has no finite value")
        return self.value

    def __eq__(self, other):
        if not isinstance(other, PointOnLine):
            if isinstance(other, (GaussianRational, int)):
                other = PointOnLine(other)
            else:
                return NotImplemented
        if self.is_infinite or other.is_infinite:
            return self.is_infinite and other.is_infinite
        return self.value == other.value

    def __hash__(self):
        return hash("inf") if self.is_infinite else hash(self.value)

    def __repr__(self):
        return f"PointOnLine({self})"

    def __str__(self):
        return "inf" if self.is_infinite else format_qi(self.value)
