"""
Polytopes Module

LHV-политоп (64 детерминированные локальные конфигурации) и политоп
Клиффорда (24 таблицы Чоя элементов группы Клиффорда), перечисление их граней
и классификация граней по структурной сигнатуре.

Грань хранится как примитивная целая 4x4 матрица F в раскладке CG-таблицы;
F·T = Σ F[r][c]·T[r][c] ≥ 0 на всех вершинах своего политопа.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .clifford import (CGTable, CliffordElement, all_relabelings, cg_table, enumerate_clifford_group,
                       output_relabeling, input_relabeling, phi_state, relabel_matrix)
from .errors import CacheError, ClassificationError
from .geometry import (HalfSpace, HPolytope, PolytopeCache, RationalVector, VPolytope,
                       facet_enumeration)
from .logger import logger

Matrix = Tuple[Tuple[int, ...], ...]


class PolytopeKind(Enum):
    LHV = "LHV"
    CLIFFORD = "CLIFFORD"


class FacetClass(Enum):
    TRIV = "TRIV"
    I2222 = "I2222"
    I3322 = "I3322"
    ALPHA = "ALPHA"
    BETA = "BETA"


EXPECTED_CENSUS: Dict[PolytopeKind, Dict[FacetClass, int]] = {
    PolytopeKind.LHV: {FacetClass.TRIV: 36, FacetClass.I2222: 72, FacetClass.I3322: 576},
    PolytopeKind.CLIFFORD: {FacetClass.ALPHA: 48, FacetClass.BETA: 72},
}

# Канонические представители классов
CANONICAL_TRIV: Matrix = ((1, -1, 0, 0), (-1, 1, 0, 0), (0, 0, 0, 0), (0, 0, 0, 0))
CANONICAL_I2222: Matrix = ((2, 0, 0, 0), (0, -1, -1, 0), (0, -1, 1, 0), (0, 0, 0, 0))
CANONICAL_I3322: Matrix = ((4, -1, -1, 0), (-1, 1, 1, -1), (-1, 1, 1, 1), (0, -1, 1, 0))
CANONICAL_ALPHA: Matrix = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 1, 0, 0), (0, 1, 0, 0))
CANONICAL_BETA: Matrix = ((1, 0, 0, 0), (0, -1, -1, 0), (0, -1, 1, 0), (0, 0, 0, 1))

_INDEX_NAMES = ('I', 'X', 'Y', 'Z')


def _as_matrix(coeffs: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(int(v) for v in row) for row in coeffs)


@dataclass(frozen=True)
class Facet:
    coeffs: Matrix
    klass: FacetClass
    polytope: PolytopeKind

    def __post_init__(self):
        coeffs = _as_matrix(self.coeffs)
        if len(coeffs) != 4 or any(len(row) != 4 for row in coeffs):
            raise ClassificationError("Матрица грани должна быть 4x4")
        if coeffs[0][0] <= 0:
            raise ClassificationError(f"Коэффициент II грани должен быть > 0: {coeffs[0][0]}")
        object.__setattr__(self, 'coeffs', coeffs)

    def __lt__(self, other):
        return self.coeffs < other.coeffs

    def value(self, table: CGTable):
        """Скалярное произведение Фробениуса F·T"""
        return sum(self.coeffs[r][c] * table.entries[r][c] for r in range(4) for c in range(4))

    def nonzero_positions(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((r, c) for r in range(4) for c in range(4) if (r, c) != (0, 0) and self.coeffs[r][c])

    def describe(self) -> str:
        """Запись вида '1 - XX - XY - YX + YY + ZZ'"""
        terms = [str(self.coeffs[0][0])]
        for r, c in self.nonzero_positions():
            value = self.coeffs[r][c]
            name = _INDEX_NAMES[c] + _INDEX_NAMES[r]
            magnitude = '' if abs(value) == 1 else str(abs(value))
            terms.append(f"{'+' if value > 0 else '-'} {magnitude}{name}")
        return ' '.join(terms)


@dataclass(frozen=True)
class LocalConfigBits:
    """a, b, c - первый кубит (X, Y, Z); d, e, f - второй"""
    a: int = 0
    b: int = 0
    c: int = 0
    d: int = 0
    e: int = 0
    f: int = 0

    def __post_init__(self):
        if any(bit not in (0, 1) for bit in self.as_tuple()):
            raise ValueError("Биты локальной конфигурации должны быть 0 или 1")

    def as_tuple(self) -> Tuple[int, ...]:
        return (self.a, self.b, self.c, self.d, self.e, self.f)


def lhv_vertex(bits: LocalConfigBits) -> CGTable:
    """Детерминированная локальная конфигурация: entries[r][c] = locals(c)·locals(r)"""
    first = (1,) + tuple((-1) ** v for v in (bits.a, bits.b, bits.c))
    second = (1,) + tuple((-1) ** v for v in (bits.d, bits.e, bits.f))
    return CGTable(tuple(tuple(second[r] * first[c] for c in range(4)) for r in range(4)))


def lhv_vertices() -> Tuple[CGTable, ...]:
    return tuple(lhv_vertex(LocalConfigBits(*bits)) for bits in itertools.product((0, 1), repeat=6))


def clifford_vertex(c: CliffordElement) -> CGTable:
    """Таблица Чоя унитарного C: блок корреляций R_C·diag(1,-1,1), локальные нули"""
    identity_table = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, -1, 0), (0, 0, 0, 1))
    right = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    return CGTable(relabel_matrix(identity_table, output_relabeling(c), right))


def clifford_vertices() -> Tuple[CGTable, ...]:
    return tuple(clifford_vertex(c) for c in enumerate_clifford_group())


def phi_table() -> CGTable:
    return cg_table(phi_state())


# Классификация

def _block_positions(coeffs: Matrix) -> List[Tuple[int, int]]:
    return [(r, c) for r in range(1, 4) for c in range(1, 4) if coeffs[r][c]]


def _local_positions(coeffs: Matrix) -> List[Tuple[int, int]]:
    return [(0, c) for c in range(1, 4) if coeffs[0][c]] + [(r, 0) for r in range(1, 4) if coeffs[r][0]]


def _is_chsh_block(positions: Iterable[Tuple[int, int]]) -> bool:
    positions = set(positions)
    rows = {r for r, _ in positions}
    cols = {c for _, c in positions}
    return len(positions) == 4 and len(rows) == 2 and len(cols) == 2


def chsh_block_of(coeffs: Sequence[Sequence]) -> Optional[Tuple[Tuple[int, int], ...]]:
    """Позиции 2x2 подблока корреляций, если среди ненулевых позиций он единственный"""
    coeffs = _as_matrix(coeffs)
    block = _block_positions(coeffs)
    candidates = []
    for rows in itertools.combinations(sorted({r for r, _ in block}), 2):
        for cols in itertools.combinations(sorted({c for _, c in block}), 2):
            square = [(r, c) for r in rows for c in cols]
            if all(coeffs[r][c] for r, c in square):
                candidates.append(tuple(square))
    return candidates[0] if len(candidates) == 1 else None


def classify_facet(coeffs: Sequence[Sequence], polytope: PolytopeKind) -> FacetClass:
    """Класс грани по коэффициенту II и расположению ненулевых коэффициентов"""
    coeffs = _as_matrix(coeffs)
    identity = coeffs[0][0]
    block = _block_positions(coeffs)
    local = _local_positions(coeffs)
    unit = all(abs(coeffs[r][c]) == 1 for r, c in block + local)

    if polytope is PolytopeKind.LHV:
        if identity == 1 and unit and len(local) == 2 and len(block) == 1:
            (r, c), = block
            if {(0, c), (r, 0)} == set(local):
                return FacetClass.TRIV
        if identity == 2 and unit and not local and _is_chsh_block(block):
            return FacetClass.I2222
        if identity == 4 and unit and len(local) == 4 and len(block) == 8:
            return FacetClass.I3322
    else:
        if identity == 1 and unit and not local:
            rows = {r for r, _ in block}
            cols = {c for _, c in block}
            if len(block) == 3 and (len(rows) == 1 or len(cols) == 1):
                return FacetClass.ALPHA
            if len(block) == 5 and chsh_block_of(coeffs) is not None:
                square = set(chsh_block_of(coeffs))
                (r, c), = set(block) - square
                if r not in {q for q, _ in square} and c not in {q for _, q in square}:
                    return FacetClass.BETA
    raise ClassificationError(f"Неизвестная сигнатура грани {polytope.value}: {coeffs}")


def make_facet(coeffs: Sequence[Sequence], polytope: PolytopeKind) -> Facet:
    coeffs = _as_matrix(coeffs)
    return Facet(coeffs, classify_facet(coeffs, polytope), polytope)


def transform_facet(facet: Facet, left: CliffordElement, right: CliffordElement) -> Facet:
    """Грань для канала left∘𝓔∘right: значение на новой таблице равно значению на старой"""
    coeffs = relabel_matrix(facet.coeffs, output_relabeling(left), input_relabeling(right))
    return make_facet(coeffs, facet.polytope)


def facet_orbit(coeffs: Sequence[Sequence]) -> Set[Matrix]:
    """Орбита матрицы под всеми 24x24 перемаркировками Клиффорда"""
    coeffs = _as_matrix(coeffs)
    return {_as_matrix(relabel_matrix(coeffs, left, right)) for left, right in all_relabelings()}


def facet_to_json(facet: Facet) -> Dict:
    return {'class': facet.klass.value, 'polytope': facet.polytope.value,
            'coeffs': [list(row) for row in facet.coeffs]}


def facet_from_json(data: Dict) -> Facet:
    polytope = PolytopeKind(data['polytope'])
    facet = make_facet(data['coeffs'], polytope)
    if facet.klass.value != data.get('class', facet.klass.value):
        raise ClassificationError(f"Класс грани в JSON {data['class']} != {facet.klass.value}")
    return facet


# Построение политопов

def table_point(table: CGTable) -> Tuple:
    """15 координат таблицы (построчно, без II)"""
    return table.coords()


def _facet_from_halfspace(halfspace: HalfSpace) -> Matrix:
    flat = (halfspace.offset,) + tuple(halfspace.normal)
    return tuple(flat[4 * r:4 * r + 4] for r in range(4))


def halfspace_from_facet(coeffs: Sequence[Sequence]) -> HalfSpace:
    flat = [v for row in _as_matrix(coeffs) for v in row]
    return HalfSpace(tuple(flat[1:]), flat[0])


@dataclass(frozen=True)
class PolytopeData:
    """Вершины, H-представление и классифицированные грани"""
    kind: PolytopeKind
    vertices: Tuple[CGTable, ...]
    vpoly: VPolytope
    hpoly: HPolytope
    facets: Tuple[Facet, ...]
    polytope_hash: str
    from_cache: bool = False

    def census(self) -> Dict[FacetClass, int]:
        counts = {klass: 0 for klass in EXPECTED_CENSUS[self.kind]}
        for facet in self.facets:
            counts[facet.klass] = counts.get(facet.klass, 0) + 1
        return counts

    def census_matches(self) -> bool:
        return self.census() == EXPECTED_CENSUS[self.kind]

    def census_string(self) -> str:
        counts = self.census()
        parts = '/'.join(str(counts[k]) for k in EXPECTED_CENSUS[self.kind])
        label = 'LHV' if self.kind is PolytopeKind.LHV else 'Clifford'
        return f"{label}: {len(self.facets)} ({parts})"

    def facets_of(self, klass: FacetClass) -> Tuple[Facet, ...]:
        return tuple(f for f in self.facets if f.klass is klass)


def _vpolytope(tables: Sequence[CGTable]) -> VPolytope:
    return VPolytope(tuple(RationalVector(table_point(t)) for t in tables))


def _build(kind: PolytopeKind, tables: Tuple[CGTable, ...], cache: Optional[PolytopeCache],
           refresh: bool = False) -> PolytopeData:
    vpoly = _vpolytope(tables)
    prefix = kind.value.lower()
    hpoly = cache.load(vpoly, prefix) if cache is not None and not refresh else None
    from_cache = hpoly is not None
    if hpoly is None:
        hpoly = facet_enumeration(vpoly)

    try:
        facets = tuple(sorted(make_facet(_facet_from_halfspace(h), kind) for h in hpoly.facets))
    except ClassificationError as e:
        if from_cache:
            raise CacheError(f"Кэш {kind.value} содержит неклассифицируемую грань: {e}") from e
        raise

    data = PolytopeData(kind, tables, vpoly, hpoly, facets, facet_set_hash(facets), from_cache)
    if cache is not None and not from_cache:
        extra = {
            'polytope': kind.value,
            'facet_classes': [f.klass.value for f in sorted(facets, key=halfspace_key)],
            'census': {k.value: v for k, v in data.census().items()},
        }
        cache.store(vpoly, hpoly, prefix, extra)
    logger.info(data.census_string())
    return data


def facet_set_hash(facets: Sequence[Facet]) -> str:
    """sha256 канонического списка граней: позволяет заметить изменение набора"""
    payload = json.dumps(sorted(facet_to_json(f)['coeffs'] for f in facets), separators=(',', ':'))
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


def halfspace_key(facet: Facet) -> HalfSpace:
    return halfspace_from_facet(facet.coeffs)


def build_lhv_polytope(cache: Optional[PolytopeCache] = None, refresh: bool = False) -> PolytopeData:
    """684 грани: 36 TRIV, 72 I2222, 576 I3322"""
    return _build(PolytopeKind.LHV, lhv_vertices(), cache, refresh)


def build_clifford_polytope(cache: Optional[PolytopeCache] = None, refresh: bool = False) -> PolytopeData:
    """120 граней в 9-мерной аффинной оболочке: 48 ALPHA, 72 BETA"""
    return _build(PolytopeKind.CLIFFORD, clifford_vertices(), cache, refresh)


def cache_for(cache_dir: Optional[Path | str]) -> Optional[PolytopeCache]:
    return PolytopeCache(cache_dir) if cache_dir is not None else None


def check_vertex_validity(data: PolytopeData) -> bool:
    """Все вершины удовлетворяют всем граням (точно)"""
    return all(f.value(t) >= 0 for f in data.facets for t in data.vertices)

