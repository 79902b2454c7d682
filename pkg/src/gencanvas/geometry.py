"""Axis-aligned rectangles in canvas units (origin top-left, y grows down)."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidRectError

Number = float | int


@dataclass(frozen=True)
class Rect:
    x: Number
    y: Number
    w: Number
    h: Number

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise InvalidRectError(f"rect needs positive size, got w={self.w} h={self.h}")

    @property
    def x2(self) -> Number:
        return self.x + self.w

    @property
    def y2(self) -> Number:
        return self.y + self.h

    def area(self) -> Number:
        return self.w * self.h

    def contains_point(self, px: Number, py: Number) -> bool:
        return self.x <= px < self.x2 and self.y <= py < self.y2

    def intersects(self, other: "Rect") -> bool:
        return self.intersection_area(other) > 0

    def intersection(self, other: "Rect") -> "Rect | None":
        """Overlap rect, or None when the overlap has zero area."""
        x1 = max(self.x, other.x)
        y1 = max(self.y, other.y)
        x2 = min(self.x2, other.x2)
        y2 = min(self.y2, other.y2)
        if x2 <= x1 or y2 <= y1:
            return None
        return Rect(x1, y1, x2 - x1, y2 - y1)

    def intersection_area(self, other: "Rect") -> Number:
        w = min(self.x2, other.x2) - max(self.x, other.x)
        h = min(self.y2, other.y2) - max(self.y, other.y)
        if w <= 0 or h <= 0:
            return 0
        return w * h

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @classmethod
    def from_dict(cls, d: dict) -> "Rect":
        try:
            return cls(d["x"], d["y"], d["w"], d["h"])
        except (KeyError, TypeError) as exc:
            raise InvalidRectError(f"bad rect payload: {d!r}") from exc
