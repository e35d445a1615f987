"""Álgebra lineal pequeña sobre GF(2) con enteros como conjuntos de bits.

Un vector sobre GF(2) es un int de Python cuyo bit ``k`` es el coeficiente
del vector ``k`` de la base. Las filas escalonadas se indexan por su bit más
bajo, así que reducir un vector solo suma filas con los demás bits más altos
y el bucle termina en cuanto el bit más bajo no es pivote.
"""
from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Tuple


def lowest_bit(vec: int) -> int:
    return (vec & -vec).bit_length() - 1


def bits(vec: int) -> List[int]:
    """Índices de los bits activos de ``vec``, crecientes."""
    out = []
    while vec:
        low = vec & -vec
        out.append(low.bit_length() - 1)
        vec ^= low
    return out


class EchelonBasis:
    """Base escalonada incremental de un subespacio de GF(2)^N.

    Cada fila lleva una ``tag`` de bits que se suma con ella, para saber qué
    combinación de los vectores insertados dio cada fila reducida (vectores
    del núcleo, coordenadas de clases).
    """

    __slots__ = ("_rows",)

    def __init__(self) -> None:
        self._rows: Dict[int, Tuple[int, int]] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def untagged(self) -> "EchelonBasis":
        """Las mismas filas con todas las etiquetas a cero."""
        other = EchelonBasis()
        other._rows = {pivot: (row, 0) for pivot, (row, _) in self._rows.items()}
        return other

    def reduce(self, vec: int, tag: int = 0) -> Tuple[int, int]:
        rows = self._rows
        while vec:
            pivot = lowest_bit(vec)
            row = rows.get(pivot)
            if row is None:
                break
            vec ^= row[0]
            tag ^= row[1]
        return vec, tag

    def insert(self, reduced: int, tag: int = 0) -> None:
        """Inserta un vector ya reducido y no nulo."""
        self._rows[lowest_bit(reduced)] = (reduced, tag)

    def add(self, vec: int, tag: int = 0) -> bool:
        """Reduce e inserta ``vec``; devuelve False si era dependiente."""
        vec, tag = self.reduce(vec, tag)
        if not vec:
            return False
        self.insert(vec, tag)
        return True

    def contains(self, vec: int) -> bool:
        return self.reduce(vec)[0] == 0


def gf2_rank(rows: Iterable[int]) -> int:
    """Rango sobre GF(2) por eliminación gaussiana."""
    basis = EchelonBasis()
    for row in rows:
        basis.add(row)
    return len(basis)


def gf2_kernel(columns: List[int]) -> Tuple[List[int], EchelonBasis]:
    """Núcleo de la aplicación que lleva el vector ``k`` a ``columns[k]``.

    Devuelve la base del núcleo (bits sobre el dominio) y la base escalonada
    de la imagen, cuyas etiquetas son combinaciones del dominio.
    """
    image = EchelonBasis()
    kernel: List[int] = []
    for k, col in enumerate(columns):
        reduced, tag = image.reduce(col, 1 << k)
        if reduced:
            image.insert(reduced, tag)
        else:
            kernel.append(tag)
    return kernel, image


class QuotientBasis:
    """Base de ``ciclos / bordes`` con coordenadas para cada ciclo.

    Los bordes entran con etiqueta 0; cada ciclo independiente módulo ellos
    pasa a ser una clase con su propio bit de etiqueta.
    """

    def __init__(self, boundaries: EchelonBasis, cycles: Iterable[int]):
        self._echelon = boundaries.untagged()
        self.representatives: List[int] = []
        for z in cycles:
            reduced, tag = self._echelon.reduce(z)
            if reduced:
                self._echelon.insert(reduced, tag ^ (1 << len(self.representatives)))
                self.representatives.append(z)

    @property
    def dimension(self) -> int:
        return len(self.representatives)

    def coordinates(self, cycle: int) -> Optional[int]:
        """Coordenadas de clase de ``cycle`` en bits; None si no es un ciclo del espacio."""
        reduced, tag = self._echelon.reduce(cycle)
        return None if reduced else tag


__all__ = [
    "EchelonBasis",
    "QuotientBasis",
    "bits",
    "gf2_kernel",
    "gf2_rank",
    "lowest_bit",
]
