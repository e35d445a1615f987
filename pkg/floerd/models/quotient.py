"""Cocientes truncados C{max(i, j - m) >= 0} y su homología."""
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy import sparse

from floerd.core.exceptions import PreconditionError
from floerd.models.complex import BifilteredComplex, Translate, translate_label


class TruncatedQuotientComplex:
    """Ventana de ``N`` trasladados por generador dentro de ``max(i, j - m) >= 0``.

    Para un generador ``x`` el trasladado ``U^{-t}·x`` está en la región si y
    solo si ``t >= t0(x) = min(-i_x, m - j_x)``. La ventana conserva
    ``t0(x) <= t < t0(x) + N``. Como el diferencial nunca sube la filtración,
    la ventana es cerrada para el diferencial inducido; las entradas que caen
    por debajo del ``t0`` de su destino salen de la región y se descartan.
    """

    __slots__ = ("complex", "m", "window", "offsets")

    def __init__(self, complex: BifilteredComplex, m: int, window: int):
        if window < 1:
            raise PreconditionError(f"Window must be positive, got {window}", window=window)
        minimum = complex.filtration_width + 2
        if window < minimum:
            raise PreconditionError(
                f"Window {window} is below filtration width + 2 = {minimum} for {complex.name!r}",
                window=window, minimum=minimum,
            )
        self.complex = complex
        self.m = int(m)
        self.window = int(window)
        self.offsets = np.minimum(-complex.i, self.m - complex.j)
        self.offsets.setflags(write=False)

    @staticmethod
    def default_window(complex: BifilteredComplex, m: int) -> int:
        """``max(ancho + 2, cobertura)``.

        La cobertura deja el extremo superior del rango fiable al menos dos
        grados por encima del grado de entrada de cada generador, que es donde
        la homología del cociente coincide con la de C.
        """
        if complex.size == 0:
            return 2
        entry = complex.gr + 2 * np.minimum(-complex.i, m - complex.j)
        spread = int(entry.max() - entry.min())
        coverage = -(-(spread + 5) // 2)
        return max(complex.filtration_width + 2, coverage)

    @classmethod
    def build(cls, complex: BifilteredComplex, m: int, window: Optional[int] = None) -> "TruncatedQuotientComplex":
        return cls(complex, m, window if window is not None else cls.default_window(complex, m))

    def contains(self, x: int, t: int) -> bool:
        t0 = int(self.offsets[x])
        return t0 <= t < t0 + self.window

    def grading(self, x: int, t: int) -> int:
        return int(self.complex.gr[x]) + 2 * t

    @property
    def size(self) -> int:
        return self.complex.size * self.window

    def with_window(self, window: int) -> "TruncatedQuotientComplex":
        return TruncatedQuotientComplex(self.complex, self.m, window)


class Tower(NamedTuple):
    """Línea sin torsión de U en la homología del cociente."""

    top_grading: int
    bottom_grading: int
    representative: Tuple[Translate, ...]  # trasladados del ciclo del fondo, índices globales


class TruncatedHomology:
    """Homología de un cociente truncado en su rango fiable de grados.

    ``dimensions[h]`` es ``dim H_h``; ``u_action[h]`` es la matriz de
    ``U: H_h -> H_{h-2}`` en las bases de clases (filas indexadas por ``H_{h-2}``).
    """

    def __init__(
        self,
        quotient: TruncatedQuotientComplex,
        reliable: Tuple[int, int],
        dimensions: Dict[int, int],
        u_action: Dict[int, sparse.csr_matrix],
        towers: List[Tower],
        class_lookup=None,
    ):
        self.quotient = quotient
        self.reliable = reliable
        self.dimensions = dimensions
        self.u_action = u_action
        self.towers = towers
        self.stable: Optional[bool] = None
        self._class_lookup = class_lookup

    @property
    def window(self) -> int:
        return self.quotient.window

    @property
    def tower(self) -> Tower:
        if len(self.towers) != 1:
            raise PreconditionError(
                f"Expected exactly one tower, found {len(self.towers)}",
                towers=len(self.towers),
            )
        return self.towers[0]

    @property
    def tower_bottom(self) -> int:
        return self.tower.bottom_grading

    def representative_labels(self) -> List[str]:
        ids = self.quotient.complex.ids
        return [translate_label(ids[x], t) for x, t in self.tower.representative]

    def represents_bottom(self, chain: List[Translate]) -> bool:
        """Si ``chain`` es un ciclo homólogo a la clase del fondo de la torre."""
        if self._class_lookup is None:
            return False
        return self._class_lookup(chain)

    def __repr__(self) -> str:
        return (
            f"TruncatedHomology(m={self.quotient.m}, window={self.window}, "
            f"reliable={self.reliable}, towers={[t.bottom_grading for t in self.towers]})"
        )
