"""Complejos de cadenas bifiltrados reducidos sobre F2[U, U^-1].

Un complejo se guarda en arrays planos de numpy: una fila por elemento de la
base (``ids``, ``gr``, ``i``, ``j``) y una fila por entrada del diferencial
(``src``, ``dst``, ``upower``), donde la entrada ``(s, t, k)`` significa que
``∂(x_s)`` contiene ``U^k · x_t``. Las entradas se mantienen ordenadas por
``(src, dst, upower)``, que es también el orden canónico de serialización.

Un trasladado ``U^{-t} · x`` se identifica con el par ``(índice de x, t)``;
está en grado ``gr + 2t`` y filtración ``(i + t, j + t)``.
"""
from types import MappingProxyType
from typing import Any, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from floerd.core.exceptions import ComplexValidationError

# (índice en la base, t) del trasladado U^{-t}·x
Translate = Tuple[int, int]


class BasisElement(NamedTuple):
    id: str
    gr: int
    i: int
    j: int


class DifferentialEntry(NamedTuple):
    source: str
    target: str
    upower: int


def _frozen(values: Iterable[int]) -> np.ndarray:
    arr = np.array(list(values) if not isinstance(values, np.ndarray) else values, dtype=np.int64).reshape(-1)
    arr.setflags(write=False)
    return arr


def translate_label(ident: str, t: int) -> str:
    """Nombre legible de ``U^{-t}·ident``."""
    return ident if t == 0 else f"U^{-t}*{ident}"


class BifilteredComplex:
    """Modelo reducido y finitamente generado de CFK^∞ sobre F2[U, U^-1].

    Las instancias son inmutables: los arrays son de solo lectura y toda
    operación que cambia el complejo devuelve uno nuevo.
    """

    __slots__ = (
        "name", "ids", "gr", "i", "j", "src", "dst", "upower",
        "metadata", "_index", "_offsets", "_cache",
    )

    def __init__(
        self,
        name: str,
        ids: Sequence[str],
        gr: Iterable[int],
        i: Iterable[int],
        j: Iterable[int],
        src: Iterable[int] = (),
        dst: Iterable[int] = (),
        upower: Iterable[int] = (),
        metadata: Optional[Mapping[str, Any]] = None,
    ):
        ids = tuple(str(x) for x in ids)
        n = len(ids)
        gr, i, j = _frozen(gr), _frozen(i), _frozen(j)
        if not (len(gr) == len(i) == len(j) == n):
            raise ComplexValidationError(
                f"Basis arrays of {name!r} have different lengths", complex=name
            )

        index: Dict[str, int] = {}
        for k, ident in enumerate(ids):
            if ident in index:
                raise ComplexValidationError(f"Duplicate basis id {ident!r}", complex=name, id=ident)
            index[ident] = k

        src, dst, upower = (np.asarray(list(a) if not isinstance(a, np.ndarray) else a, dtype=np.int64).reshape(-1)
                            for a in (src, dst, upower))
        if not (len(src) == len(dst) == len(upower)):
            raise ComplexValidationError(
                f"Differential arrays of {name!r} have different lengths", complex=name
            )
        if len(src):
            if src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n:
                raise ComplexValidationError(
                    f"Differential of {name!r} references an unknown generator", complex=name
                )
            if upower.min() < 0:
                bad = int(np.argmax(upower < 0))
                raise ComplexValidationError(
                    f"Negative U power in entry {ids[src[bad]]} -> {ids[dst[bad]]}",
                    complex=name, source=ids[src[bad]], target=ids[dst[bad]],
                )
            order = np.lexsort((upower, dst, src))
            src, dst, upower = src[order], dst[order], upower[order]

        self.name = name
        self.ids = ids
        self.gr, self.i, self.j = gr, i, j
        self.src, self.dst, self.upower = _frozen(src), _frozen(dst), _frozen(upower)
        self.metadata = MappingProxyType(dict(metadata or {}))
        self._index = index
        self._offsets = np.searchsorted(self.src, np.arange(n + 1))
        self._cache: Dict[str, Any] = {}

    # ==============================================
    # CONSTRUCCIÓN
    # ==============================================
    @classmethod
    def from_elements(
        cls,
        name: str,
        basis: Iterable[BasisElement],
        diff: Iterable[DifferentialEntry] = (),
        metadata: Optional[Mapping[str, Any]] = None,
    ) -> "BifilteredComplex":
        basis = [BasisElement(*b) for b in basis]
        index = {b.id: k for k, b in enumerate(basis)}
        src, dst, upower = [], [], []
        for entry in diff:
            entry = DifferentialEntry(*entry)
            for ident in (entry.source, entry.target):
                if ident not in index:
                    raise ComplexValidationError(
                        f"Entry {entry.source} -> {entry.target} references unknown id {ident!r}",
                        complex=name, source=entry.source, target=entry.target,
                    )
            src.append(index[entry.source])
            dst.append(index[entry.target])
            upower.append(int(entry.upower))
        return cls(
            name,
            [b.id for b in basis],
            [b.gr for b in basis],
            [b.i for b in basis],
            [b.j for b in basis],
            src, dst, upower,
            metadata=metadata,
        )

    def with_name(self, name: str, metadata: Optional[Mapping[str, Any]] = None) -> "BifilteredComplex":
        return BifilteredComplex(
            name, self.ids, self.gr, self.i, self.j, self.src, self.dst, self.upower,
            metadata=self.metadata if metadata is None else metadata,
        )

    # ==============================================
    # ACCESORES
    # ==============================================
    @property
    def size(self) -> int:
        return len(self.ids)

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def n_entries(self) -> int:
        return len(self.src)

    @property
    def basis(self) -> List[BasisElement]:
        return [
            BasisElement(ident, int(g), int(a), int(b))
            for ident, g, a, b in zip(self.ids, self.gr, self.i, self.j)
        ]

    @property
    def diff(self) -> List[DifferentialEntry]:
        return [
            DifferentialEntry(self.ids[s], self.ids[t], int(k))
            for s, t, k in zip(self.src, self.dst, self.upower)
        ]

    def index_of(self, ident: str) -> int:
        try:
            return self._index[ident]
        except KeyError:
            raise ComplexValidationError(f"Unknown basis id {ident!r} in {self.name!r}", id=ident) from None

    def outgoing(self, x: int) -> List[Tuple[int, int]]:
        """Entradas ``(destino, upower)`` de ``∂(x)``."""
        lo, hi = self._offsets[x], self._offsets[x + 1]
        return list(zip(self.dst[lo:hi].tolist(), self.upower[lo:hi].tolist()))

    @property
    def genus(self) -> int:
        """Mayor grado de Alexander entre los trasladados de la recta i = 0."""
        if "genus" in self.metadata:
            return int(self.metadata["genus"])
        return int((self.j - self.i).max()) if self.size else 0

    @property
    def filtration_width(self) -> int:
        if not self.size:
            return 0
        level = self.i + self.j
        return int(level.max() - level.min())

    # ==============================================
    # ESTRUCTURA DE GRAFO
    # ==============================================
    def adjacency(self) -> sparse.csr_matrix:
        """Matriz de entradas con U = 1, ``A[t, s]`` = número de entradas s -> t."""
        n = self.size
        data = np.ones(len(self.src), dtype=np.int64)
        return sparse.csr_matrix((data, (self.dst, self.src)), shape=(n, n))

    def cached(self, key: str, factory):
        """Datos derivados, calculados una vez por complejo."""
        if key not in self._cache:
            self._cache[key] = factory()
        return self._cache[key]

    def _split(self) -> Tuple[np.ndarray, List[np.ndarray]]:
        if self.size == 0:
            return np.zeros(0, dtype=np.int64), []
        count, labels = csgraph.connected_components(
            self.adjacency(), directed=True, connection="weak"
        )
        order = np.argsort(labels, kind="stable")
        bounds = np.searchsorted(labels[order], np.arange(count + 1))
        return labels, [order[bounds[c]:bounds[c + 1]] for c in range(count)]

    def components(self) -> List[np.ndarray]:
        """Componentes conexas del grafo del diferencial, como arrays de índices ordenados.

        Cada componente genera un sumando directo del complejo.
        """
        return self.cached("split", self._split)[1]

    def component_labels(self) -> np.ndarray:
        return self.cached("split", self._split)[0]

    def restrict(self, indices: Sequence[int], name: Optional[str] = None) -> "BifilteredComplex":
        """Subcomplejo generado por ``indices`` (se descartan las entradas que salen de él)."""
        keep = np.asarray(sorted(int(k) for k in indices), dtype=np.int64)
        local = np.full(self.size, -1, dtype=np.int64)
        local[keep] = np.arange(len(keep))
        mask = (local[self.src] >= 0) & (local[self.dst] >= 0)
        return BifilteredComplex(
            name or self.name,
            [self.ids[k] for k in keep],
            self.gr[keep], self.i[keep], self.j[keep],
            local[self.src[mask]], local[self.dst[mask]], self.upower[mask],
            metadata=self.metadata,
        )

    # ==============================================
    # SEMÁNTICA DE VALOR
    # ==============================================
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BifilteredComplex):
            return NotImplemented
        return (
            self.ids == other.ids
            and all(np.array_equal(getattr(self, a), getattr(other, a))
                    for a in ("gr", "i", "j", "src", "dst", "upower"))
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"BifilteredComplex(name={self.name!r}, generators={self.size}, entries={self.n_entries})"
