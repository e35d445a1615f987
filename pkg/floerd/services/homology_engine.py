"""Eliminación sobre GF(2) por grados en los cocientes truncados.

El cociente se separa por las componentes conexas del grafo del diferencial,
y el diferencial es homogéneo de grado -1, así que la homología se calcula
estrato a estrato (componente, grado) con bases escalonadas pequeñas de bits.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from floerd.core.exceptions import PreconditionError, WindowTooSmallError
from floerd.models.complex import Translate
from floerd.models.quotient import Tower, TruncatedHomology, TruncatedQuotientComplex
from floerd.services.gf2 import QuotientBasis, bits, gf2_kernel

logger = logging.getLogger(__name__)


class ComponentWindow:
    """Ventana de una componente conexa, indexada por índices locales de generador."""

    def __init__(self, quotient: TruncatedQuotientComplex, members: Sequence[int]):
        complex = quotient.complex
        self.members = [int(g) for g in members]
        local = {g: k for k, g in enumerate(self.members)}
        self.gr = complex.gr[self.members].tolist()
        self.t0 = quotient.offsets[self.members].tolist()
        self.out = [[(local[y], u) for y, u in complex.outgoing(g)] for g in self.members]
        self._local = local

        window = quotient.window
        self.slices: Dict[int, List[Translate]] = {}
        self.position: Dict[int, Dict[Translate, int]] = {}
        for x, (g, t0) in enumerate(zip(self.gr, self.t0)):
            for t in range(t0, t0 + window):
                h = g + 2 * t
                stratum = self.slices.setdefault(h, [])
                self.position.setdefault(h, {})[(x, t)] = len(stratum)
                stratum.append((x, t))

        entry = [g + 2 * t0 for g, t0 in zip(self.gr, self.t0)]
        self.bottom = min(entry)
        self.entry_top = max(entry)
        # H_h es exacta para h <= bottom + 2N - 3
        self.top = self.bottom + 2 * window - 3
        self._homology: Dict[int, QuotientBasis] = {}

    def boundary(self, x: int, t: int) -> int:
        """Bits de ``∂(U^{-t}x)`` sobre el estrato de un grado menos."""
        position = self.position.get(self.gr[x] + 2 * t - 1, {})
        vec = 0
        for y, u in self.out[x]:
            s = t - u
            if s >= self.t0[y]:
                vec ^= 1 << position[(y, s)]
        return vec

    def homology(self, h: int) -> QuotientBasis:
        cached = self._homology.get(h)
        if cached is None:
            _, boundaries = gf2_kernel([self.boundary(x, t) for x, t in self.slices.get(h + 1, [])])
            cycles, _ = gf2_kernel([self.boundary(x, t) for x, t in self.slices.get(h, [])])
            cached = QuotientBasis(boundaries, cycles)
            self._homology[h] = cached
        return cached

    def multiply_by_u(self, h: int, cycle: int) -> int:
        stratum = self.slices.get(h, [])
        position = self.position.get(h - 2, {})
        vec = 0
        for k in bits(cycle):
            x, t = stratum[k]
            if t - 1 >= self.t0[x]:
                vec ^= 1 << position[(x, t - 1)]
        return vec

    def u_matrix(self, h: int) -> List[Tuple[int, int]]:
        """Posiciones no nulas ``(fila, columna)`` de ``U: H_h -> H_{h-2}``."""
        source = self.homology(h)
        target = self.homology(h - 2)
        entries = []
        for col, z in enumerate(source.representatives):
            coords = target.coordinates(self.multiply_by_u(h, z)) or 0
            entries.extend((row, col) for row in bits(coords))
        return entries

    def vector(self, chain: Sequence[Translate]) -> Tuple[Optional[int], int]:
        """Bits locales de una cadena homogénea de trasladados globales, con su grado."""
        vec, grading = 0, None
        for g, t in chain:
            x = self._local.get(int(g))
            if x is None:
                return None, 0
            h = self.gr[x] + 2 * t
            if grading is None:
                grading = h
            elif h != grading:
                return None, 0
            position = self.position.get(h, {}).get((x, t))
            if position is None:
                return None, 0
            vec ^= 1 << position
        return vec, grading if grading is not None else 0

    def tower(self) -> Optional[Tower]:
        """Baja la clase superior con U hasta que se anula.

        Devuelve None en las componentes cuya homología se anula en el extremo
        superior del rango fiable (los sumandos acíclicos).
        """
        if self.top - 1 < self.entry_top + 1:
            raise WindowTooSmallError(
                f"Reliable range ends at {self.top}, below the stable range starting at {self.entry_top + 1}",
                reliable_top=self.top, stable_from=self.entry_top + 1,
            )
        candidates = [h for h in (self.top, self.top - 1) if self.homology(h).dimension]
        if not candidates:
            return None
        if len(candidates) > 1 or self.homology(candidates[0]).dimension != 1:
            raise PreconditionError(
                "A component carries more than one U-tower; the complex does not have rank-one homology"
            )
        top = h = candidates[0]
        z = self.homology(h).representatives[0]
        while h - 2 >= self.bottom:
            pushed = self.multiply_by_u(h, z)
            if not self.homology(h - 2).coordinates(pushed):
                break
            z, h = pushed, h - 2
        stratum = self.slices[h]
        representative = tuple((self.members[stratum[k][0]], stratum[k][1]) for k in bits(z))
        return Tower(top, h, representative)


def compute_truncated_homology(
    quotient: TruncatedQuotientComplex,
    components: Sequence[Sequence[int]],
    carries_homology: Optional[Sequence[bool]] = None,
) -> TruncatedHomology:
    """Dimensiones, acción de U y torres sobre las componentes dadas.

    Las componentes marcadas False en ``carries_homology`` (homología nula con
    U = 1) son acíclicas y no se buscan torres en ellas.
    """
    windows = [ComponentWindow(quotient, members) for members in components]
    if not windows:
        return TruncatedHomology(quotient, (0, -1), {}, {}, [])

    low = min(w.bottom for w in windows)
    high = min(w.top for w in windows)
    dimensions: Dict[int, int] = {}
    offsets: Dict[int, List[int]] = {}
    for h in range(low, high + 1):
        dims = [w.homology(h).dimension if h >= w.bottom else 0 for w in windows]
        dimensions[h] = sum(dims)
        offsets[h] = np.concatenate(([0], np.cumsum(dims))).tolist()

    u_action: Dict[int, sparse.csr_matrix] = {}
    for h in range(low + 2, high + 1):
        rows, cols = [], []
        for k, w in enumerate(windows):
            if h - 2 < w.bottom:
                continue
            for r, c in w.u_matrix(h):
                rows.append(offsets[h - 2][k] + r)
                cols.append(offsets[h][k] + c)
        u_action[h] = sparse.csr_matrix(
            (np.ones(len(rows), dtype=np.int8), (rows, cols)),
            shape=(dimensions[h - 2], dimensions[h]),
        )

    towers: List[Tower] = []
    tower_windows: List[ComponentWindow] = []
    flags = list(carries_homology) if carries_homology is not None else [True] * len(windows)
    for w, flag in zip(windows, flags):
        if not flag:
            continue
        tower = w.tower()
        if tower is not None:
            towers.append(tower)
            tower_windows.append(w)

    def represents_bottom(chain: Sequence[Translate]) -> bool:
        if len(towers) != 1:
            return False
        w, tower = tower_windows[0], towers[0]
        vec, grading = w.vector(chain)
        if vec is None or grading != tower.bottom_grading:
            return False
        bottom, _ = w.vector(tower.representative)
        basis = w.homology(grading)
        mine = basis.coordinates(vec)
        return mine is not None and mine != 0 and mine == basis.coordinates(bottom)

    logger.debug(
        f"Homología truncada m={quotient.m} N={quotient.window}: rango [{low}, {high}], "
        f"torres en {[t.bottom_grading for t in towers]}"
    )
    return TruncatedHomology(
        quotient, (low, high), dimensions, u_action, towers,
        class_lookup=represents_bottom,
    )
