"""Coordinate changes: substitutions old variable -> polynomial in new variables."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import Poly, Ring
from .algebra.linalg import inverse


@dataclass(frozen=True)
class Substitution:
    ring: Ring
    images: tuple  # images[i] is what the old variable i becomes
    kind: str = "change"
    info: dict = field(default_factory=dict, compare=False)

    @staticmethod
    def identity(ring: Ring) -> "Substitution":
        return Substitution(ring, tuple(ring.gens()), "identity")

    @staticmethod
    def single(ring: Ring, var: int, image: Poly, kind: str = "change", **info) -> "Substitution":
        imgs = list(ring.gens())
        imgs[var] = image
        return Substitution(ring, tuple(imgs), kind, dict(info))

    def is_identity(self) -> bool:
        return all(img == self.ring.var(i) for i, img in enumerate(self.images))

    def apply(self, f: Poly) -> Poly:
        if self.is_identity():
            return f
        return f.subs(list(self.images))

    def apply_all(self, gens: Sequence[Poly]) -> list[Poly]:
        return [self.apply(g) for g in gens]

    def then(self, other: "Substitution") -> "Substitution":
        """First self, then other (the images of self are rewritten in other's new variables)."""
        return Substitution(self.ring, tuple(other.apply(img) for img in self.images), "composite")

    def to_text(self) -> dict[str, str]:
        return {n: img.to_str() for n, img in zip(self.ring.names, self.images)}

    @staticmethod
    def from_text(ring: Ring, text: dict[str, str], kind: str = "change") -> "Substitution":
        return Substitution(ring, tuple(ring.parse(text[n]) if n in text else ring.var(i)
                                        for i, n in enumerate(ring.names)), kind)

    def changed(self) -> str:
        return ", ".join(f"{n} = {img.to_str()}" for n, img in zip(self.ring.names, self.images)
                         if img != self.ring.var(n))


def linear_substitution(ring: Ring, new_in_old: Sequence[Sequence]) -> Substitution:
    """Given new coordinates as rows of linear forms in the old ones, the substitution old -> new."""
    inv = inverse(new_in_old, ring.field)
    gens = ring.gens()
    images = []
    for row in inv:
        acc = ring.zero()
        for c, g in zip(row, gens):
            if not ring.field.is_zero(c):
                acc = acc + g.scale(c)
        images.append(acc)
    return Substitution(ring, tuple(images), "linear", {"matrix": [list(r) for r in new_in_old]})
