"""Subgrupos de (Z/p²)^n con una forma de enlace diagonal."""
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from floerd.core.config import settings
from floerd.core.exceptions import PreconditionError

Vector = Tuple[int, ...]


class TorsionGroup:
    """El grupo (Z/p²Z)^n."""

    __slots__ = ("p", "n")

    def __init__(self, p: int, n: int):
        if p < 3 or p % 2 == 0:
            raise PreconditionError(f"p must be an odd prime, got {p}", p=p)
        if n < 1:
            raise PreconditionError(f"Rank must be positive, got {n}", n=n)
        self.p = p
        self.n = n

    @property
    def modulus(self) -> int:
        return self.p * self.p

    @property
    def order(self) -> int:
        return self.modulus ** self.n

    @property
    def metabolizer_order(self) -> int:
        return self.p ** self.n

    def reduce(self, v: Iterable[int]) -> Vector:
        vec = tuple(int(x) % self.modulus for x in v)
        if len(vec) != self.n:
            raise PreconditionError(f"Expected a vector of length {self.n}, got {len(vec)}", length=len(vec))
        return vec

    def __repr__(self) -> str:
        return f"TorsionGroup(p={self.p}, n={self.n})"


class LinkingForm:
    """λ(a, b) = Σ ε_i a_i b_i / p² en Q/Z, con ε_i = ±1."""

    __slots__ = ("group", "signs")

    def __init__(self, group: TorsionGroup, signs: Optional[Sequence[int]] = None):
        signs = tuple(signs) if signs is not None else (1,) * group.n
        if len(signs) != group.n or any(s not in (1, -1) for s in signs):
            raise PreconditionError(f"Form needs {group.n} signs in {{+1, -1}}, got {signs}", signs=list(signs))
        self.group = group
        self.signs = signs

    @classmethod
    def parse(cls, group: TorsionGroup, form: Optional[str]) -> "LinkingForm":
        """Cadenas de signos como ``"++-"``; None equivale a todos +."""
        if form is None:
            return cls(group)
        if len(form) != group.n or set(form) - {"+", "-"}:
            raise PreconditionError(f"Form must be {group.n} characters from '+-', got {form!r}", form=form)
        return cls(group, [1 if c == "+" else -1 for c in form])

    @property
    def label(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)

    def pairing(self, a: Sequence[int], b: Sequence[int]) -> int:
        """Numerador de λ(a, b) módulo p²."""
        return sum(s * x * y for s, x, y in zip(self.signs, a, b)) % self.group.modulus

    def vanishes_on(self, generators: Sequence[Sequence[int]]) -> bool:
        return all(
            self.pairing(a, b) == 0
            for k, a in enumerate(generators)
            for b in generators[k:]
        )


class Metabolizer:
    """Subgrupo M de (Z/p²)^n dado por generadores.

    ``hnf`` es la base de Hermite triangular superior del retículo
    ``M + p²Z^n`` cuando el subgrupo sale de la enumeración. El conjunto de
    elementos se calcula bajo demanda y se guarda si tiene como mucho
    ``settings.ELEMENT_CACHE_LIMIT`` elementos.
    """

    __slots__ = ("group", "generators", "hnf", "_elements")

    def __init__(self, group: TorsionGroup, generators: Iterable[Iterable[int]], hnf: Optional[Sequence[Vector]] = None):
        self.group = group
        gens = [group.reduce(g) for g in generators]
        self.generators: Tuple[Vector, ...] = tuple(g for g in gens if any(g))
        self.hnf = tuple(tuple(row) for row in hnf) if hnf is not None else None
        self._elements: Optional[FrozenSet[Vector]] = None

    @property
    def p(self) -> int:
        return self.group.p

    @property
    def n(self) -> int:
        return self.group.n

    def element_array(self) -> np.ndarray:
        """Todos los elementos como filas de un array entero, en orden lexicográfico."""
        modulus = self.group.modulus
        elements = np.zeros((1, self.n), dtype=np.int64)
        for g in self.generators:
            multiples = (np.arange(modulus)[:, None] * np.array(g, dtype=np.int64)) % modulus
            elements = np.unique(((elements[:, None, :] + multiples[None, :, :]) % modulus).reshape(-1, self.n), axis=0)
        return elements

    def elements(self) -> FrozenSet[Vector]:
        if self._elements is not None:
            return self._elements
        found = frozenset(tuple(int(x) for x in row) for row in self.element_array())
        if len(found) <= settings.ELEMENT_CACHE_LIMIT:
            self._elements = found
        return found

    @property
    def order(self) -> int:
        if self.hnf is not None:
            size = 1
            for k, row in enumerate(self.hnf):
                size *= self.group.modulus // row[k]
            return size
        return len(self.elements())

    def contains(self, v: Iterable[int]) -> bool:
        vec = self.group.reduce(v)
        if self.hnf is None:
            return vec in self.elements()
        # Sustitución regresiva contra la base triangular de M + p²Z^n
        x: List[int] = []
        for j in range(self.n):
            rest = vec[j] - sum(x[i] * self.hnf[i][j] for i in range(j))
            if rest % self.hnf[j][j]:
                return False
            x.append(rest // self.hnf[j][j])
        return True

    def p_torsion(self) -> List[Vector]:
        """M_p = {m ∈ M : p·m = 0}, ordenado."""
        p = self.p
        return sorted(v for v in self.elements() if all(x % p == 0 for x in v))

    def sort_key(self) -> Tuple[Vector, ...]:
        return self.hnf if self.hnf is not None else self.generators

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Metabolizer):
            return NotImplemented
        return self.group.p == other.group.p and self.group.n == other.group.n and self.elements() == other.elements()

    __hash__ = None

    def __repr__(self) -> str:
        return f"Metabolizer(p={self.p}, n={self.n}, generators={list(self.generators)})"
