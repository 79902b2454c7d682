"""Binary pixel masks; 1 marks the editable region."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedPayloadError


@dataclass(frozen=True)
class Mask:
    width: int
    height: int
    bits: bytes  # one byte per pixel, 0 or 1, row-major

    def __post_init__(self):
        if len(self.bits) != self.width * self.height:
            raise MalformedPayloadError(
                f"mask bits length {len(self.bits)} != {self.width}x{self.height}"
            )

    @classmethod
    def empty(cls, width: int, height: int) -> "Mask":
        return cls(width, height, bytes(width * height))

    @classmethod
    def from_pixel_rects(cls, width: int, height: int, rects: list[tuple[int, int, int, int]]) -> "Mask":
        """Union of half-open pixel rects (x0, y0, x1, y1), clamped to bounds."""
        bits = bytearray(width * height)
        for x0, y0, x1, y1 in rects:
            x0, y0 = max(0, x0), max(0, y0)
            x1, y1 = min(width, x1), min(height, y1)
            if x1 <= x0 or y1 <= y0:
                continue
            row = b"\x01" * (x1 - x0)
            for y in range(y0, y1):
                start = y * width + x0
                bits[start : start + (x1 - x0)] = row
        return cls(width, height, bytes(bits))

    def get(self, x: int, y: int) -> int:
        return self.bits[y * self.width + x]

    def count(self) -> int:
        return self.bits.count(1)

    def complement(self) -> "Mask":
        return Mask(self.width, self.height, bytes(1 - b for b in self.bits))

    def overlap_fraction(self, rect: tuple[int, int, int, int]) -> float:
        """Fraction of the pixel rect's area covered by set mask bits."""
        x0, y0, x1, y1 = rect
        x0c, y0c = max(0, x0), max(0, y0)
        x1c, y1c = min(self.width, x1), min(self.height, y1)
        area = max(0, x1 - x0) * max(0, y1 - y0)
        if area == 0:
            return 0.0
        covered = 0
        for y in range(y0c, y1c):
            start = y * self.width + x0c
            covered += self.bits.count(1, start, start + (x1c - x0c))
        return covered / area

    def to_dict(self) -> dict:
        import base64

        return {
            "width": self.width,
            "height": self.height,
            "bits": base64.b64encode(self.bits).decode("ascii"),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Mask":
        import base64

        return cls(d["width"], d["height"], base64.b64decode(d["bits"]))
