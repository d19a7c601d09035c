"""
Exact Convex Geometry Module

Точная рациональная геометрия для небольших политопов (до ~64 вершин,
размерность до ~15):

- affine_hull: размерность и рациональный базис аффинной оболочки
- facet_enumeration: переход V → H через cdd в режиме 'fraction'
  после проекции на аффинную оболочку
- lp_membership: LP cdd над Q с сертификатом принадлежности (веса) или
  разделяющей гранью; nearest_member - ближайшая точка политопа
- PolytopeCache: JSON-кэш H-представлений по хешу набора вершин

Числа cdd возвращаются как Fraction, все сертификаты проверяются точно.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import cdd

from .errors import CacheError, GeometryError
from .logger import logger

CACHE_FORMAT_VERSION = 1
NUMBER_TYPE = 'fraction'


def to_fraction(value) -> Fraction:
    """int/Fraction/str как есть, float - точное двоичное значение"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise GeometryError(f"Нечисловая координата: {value}")
        return Fraction(value)
    return Fraction(value)


def rationalize(x, tol: float = 1e-12) -> Fraction:
    """Первая подходящая дробь цепной дроби x, отличающаяся от x не более чем на tol"""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    target = to_fraction(x)
    bound = to_fraction(tol)
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    remainder = target
    while True:
        a = math.floor(remainder)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        convergent = Fraction(h, k)
        if abs(convergent - target) <= bound or remainder == a:
            return convergent
        remainder = 1 / (remainder - a)


def primitive(values: Sequence) -> Tuple[int, ...]:
    """Умножение на НОК знаменателей и деление на НОД: примитивный целый вектор"""
    fractions = [to_fraction(v) for v in values]
    lcm = 1
    for v in fractions:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in fractions]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if g == 0:
        return tuple(ints)
    return tuple(v // g for v in ints)


def _dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class RationalVector:
    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coords', tuple(to_fraction(v) for v in self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    @classmethod
    def of(cls, values: Iterable, tol: Optional[float] = None) -> 'RationalVector':
        """С tol: float-координаты рационализуются цепными дробями"""
        if tol is None:
            return cls(tuple(values))
        return cls(tuple(rationalize(v, tol) for v in values))

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, index):
        return self.coords[index]


@dataclass(frozen=True)
class VPolytope:
    vertices: Tuple[RationalVector, ...]

    def __post_init__(self):
        vertices = tuple(v if isinstance(v, RationalVector) else RationalVector(tuple(v))
                         for v in self.vertices)
        if not vertices:
            raise GeometryError("Пустой набор вершин")
        dims = {v.dim for v in vertices}
        if len(dims) != 1:
            raise GeometryError(f"Вершины разной размерности: {sorted(dims)}")
        if len(set(vertices)) != len(vertices):
            raise GeometryError("Повторяющиеся вершины")
        object.__setattr__(self, 'vertices', vertices)

    @property
    def dim(self) -> int:
        return self.vertices[0].dim

    def content_hash(self) -> str:
        """sha256 канонического (отсортированного) списка вершин"""
        rows = sorted([str(c) for c in v.coords] for v in self.vertices)
        payload = json.dumps(rows, separators=(',', ':'))
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()


@dataclass(frozen=True, order=True)
class HalfSpace:
    """normal·x + offset ≥ 0 (для равенств: = 0)"""
    normal: Tuple[int, ...]
    offset: int

    def value(self, point: Sequence) -> Fraction:
        return _dot(self.normal, point) + self.offset

    def as_list(self) -> List[int]:
        return list(self.normal) + [self.offset]


@dataclass(frozen=True)
class HPolytope:
    facets: Tuple[HalfSpace, ...]
    affine_dim: int
    ambient_dim: int
    equalities: Tuple[HalfSpace, ...] = ()

    def contains(self, point: Sequence) -> bool:
        point = [to_fraction(v) for v in point]
        return (all(e.value(point) == 0 for e in self.equalities)
                and all(f.value(point) >= 0 for f in self.facets))

    def tight_facets(self, point: Sequence) -> Tuple[HalfSpace, ...]:
        point = [to_fraction(v) for v in point]
        return tuple(f for f in self.facets if f.value(point) == 0)


@dataclass(frozen=True)
class AffineHull:
    dimension: int
    basis: Tuple[RationalVector, ...]
    origin: RationalVector
    pivots: Tuple[int, ...]
    equalities: Tuple[HalfSpace, ...]


@dataclass(frozen=True)
class SeparationCertificate:
    """
    inside + выпуклые веса, либо outside + разделяющее неравенство.

    distance > 0 у inside-сертификата: веса дают точку политопа на расстоянии
    не больше distance (норма max) от проверяемой.
    """
    inside: bool
    weights: Optional[Tuple[Fraction, ...]] = None
    separator: Optional[HalfSpace] = None
    depth: Fraction = field(default=Fraction(0))
    distance: Fraction = field(default=Fraction(0))

    def verify(self, point: Sequence, vp: VPolytope) -> bool:
        """Проверка сертификата в точной арифметике"""
        point = [to_fraction(v) for v in point]
        if self.inside:
            if self.weights is None or any(w < 0 for w in self.weights) or sum(self.weights) != 1:
                return False
            combination = [sum(w * v[i] for w, v in zip(self.weights, vp.vertices)) for i in range(vp.dim)]
            return all(abs(a - b) <= self.distance for a, b in zip(combination, point))
        if self.separator is None:
            return False
        return (all(self.separator.value(v) >= 0 for v in vp.vertices)
                and self.separator.value(point) < 0)


# Линейная алгебра над Q

def _rref(rows: List[List[Fraction]]) -> Tuple[List[List[Fraction]], List[int]]:
    """Приведенная ступенчатая форма и столбцы ведущих элементов"""
    matrix = [list(row) for row in rows]
    pivots: List[int] = []
    if not matrix:
        return matrix, pivots
    width = len(matrix[0])
    r = 0
    for c in range(width):
        pivot = next((i for i in range(r, len(matrix)) if matrix[i][c] != 0), None)
        if pivot is None:
            continue
        matrix[r], matrix[pivot] = matrix[pivot], matrix[r]
        lead = matrix[r][c]
        matrix[r] = [v / lead for v in matrix[r]]
        for i in range(len(matrix)):
            if i != r and matrix[i][c] != 0:
                factor = matrix[i][c]
                matrix[i] = [a - factor * b for a, b in zip(matrix[i], matrix[r])]
        pivots.append(c)
        r += 1
        if r == len(matrix):
            break
    return matrix[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(_rref([[to_fraction(v) for v in row] for row in rows])[1])


def _nullspace(rref_rows: List[List[Fraction]], pivots: List[int], width: int) -> List[List[Fraction]]:
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for f in free:
        vector = [Fraction(0)] * width
        vector[f] = Fraction(1)
        for row, p in zip(rref_rows, pivots):
            vector[p] = -row[f]
        basis.append(vector)
    return basis


def affine_hull(vp: VPolytope) -> AffineHull:
    """Размерность, базис (строки RREF разностей) и уравнения аффинной оболочки"""
    origin = vp.vertices[0]
    differences = [[a - b for a, b in zip(v.coords, origin.coords)] for v in vp.vertices[1:]]
    reduced, pivots = _rref(differences)
    equalities = []
    for n in _nullspace(reduced, pivots, vp.dim):
        scaled = primitive(n + [-_dot(n, origin.coords)])
        equalities.append(HalfSpace(scaled[:-1], scaled[-1]))
    return AffineHull(
        dimension=len(pivots),
        basis=tuple(RationalVector(tuple(row)) for row in reduced),
        origin=origin,
        pivots=tuple(pivots),
        equalities=tuple(sorted(equalities)),
    )


# Перечисление граней (cdd)

def _fraction_matrix(rows: Sequence[Sequence], linear: bool = False) -> cdd.Matrix:
    return cdd.Matrix([[to_fraction(v) for v in row] for row in rows], linear=linear, number_type=NUMBER_TYPE)


def facet_enumeration(vp: VPolytope) -> HPolytope:
    """H-представление политопа: проекция на аффинную оболочку, cdd, подъем нормалей"""
    hull = affine_hull(vp)
    if hull.dimension == 0:
        raise GeometryError("Все вершины совпадают: грани не определены")

    projected = sorted(tuple(v.coords[p] for p in hull.pivots) for v in vp.vertices)
    logger.info(f"Перечисление граней: {len(projected)} вершин, размерность {hull.dimension}")

    generators = _fraction_matrix([(1,) + point for point in projected])
    generators.rep_type = cdd.RepType.GENERATOR
    inequalities = cdd.Polyhedron(generators).get_inequalities()
    inequalities.canonicalize()
    if inequalities.lin_set:
        raise GeometryError("Проекция на аффинную оболочку не полномерна")

    facets = set()
    for i in range(inequalities.row_size):
        # строка cdd: b + a·x ≥ 0
        row = primitive(inequalities[i])
        offset, projected_normal = row[0], row[1:]
        if not any(projected_normal):
            continue
        normal = [0] * vp.dim
        for coefficient, p in zip(projected_normal, hull.pivots):
            normal[p] = coefficient
        facets.add(HalfSpace(tuple(normal), offset))

    result = HPolytope(tuple(sorted(facets)), hull.dimension, vp.dim, hull.equalities)
    logger.info(f"Найдено граней: {len(result.facets)}")
    return result


def is_extreme_point(point: Sequence, hpoly: HPolytope) -> bool:
    """Точка политопа, в которой активные грани и уравнения имеют полный ранг"""
    point = [to_fraction(v) for v in point]
    if not hpoly.contains(point):
        return False
    normals = [f.normal for f in hpoly.tight_facets(point)] + [e.normal for e in hpoly.equalities]
    return bool(normals) and rank(normals) == hpoly.ambient_dim


def vertices_from_facets(hpoly: HPolytope, candidates: Iterable[Sequence]) -> Tuple[RationalVector, ...]:
    """Кандидаты, являющиеся вершинами политопа (анализ активных граней)"""
    return tuple(RationalVector(tuple(c)) for c in candidates if is_extreme_point(c, hpoly))



# Линейное программирование (cdd)

def _solve(rows: Sequence[Sequence], equalities: Sequence[Sequence], objective: Sequence,
           maximize: bool = True) -> cdd.LinProg:
    """LP над Q: строки b + a·x ≥ 0, равенства b + a·x = 0"""
    matrix = _fraction_matrix(rows)
    if equalities:
        matrix.extend([[to_fraction(v) for v in row] for row in equalities], linear=True)
    matrix.obj_type = cdd.LPObjType.MAX if maximize else cdd.LPObjType.MIN
    matrix.obj_func = tuple(to_fraction(v) for v in objective)
    lp = cdd.LinProg(matrix)
    lp.solve()
    return lp


def _weight_rows(m: int, extra: int = 0) -> List[List[int]]:
    """λ_i ≥ 0 для первых m переменных"""
    return [[0] + [int(i == j) for j in range(m)] + [0] * extra for i in range(m)]


def _check_point(point: Sequence, vp: VPolytope) -> List[Fraction]:
    point = [to_fraction(v) for v in point]
    if len(point) != vp.dim:
        raise GeometryError(f"Размерность точки {len(point)} != размерности вершин {vp.dim}")
    return point


def _separate(point: List[Fraction], vp: VPolytope) -> SeparationCertificate:
    """
    Разделяющее неравенство a·x + b ≥ 0: max -(a·p + b) при a·v + b ≥ 0 на
    вершинах и a·p + b ≥ -1. Оптимум (глубина разделения) лежит в (0, 1].
    """
    rows = [[0] + list(v.coords) + [1] for v in vp.vertices]
    rows.append([1] + point + [1])
    lp = _solve(rows, (), [0] + [-c for c in point] + [-1])
    if lp.status != cdd.LPStatusType.OPTIMAL or lp.obj_value <= 0:
        raise GeometryError(f"LP разделения не нашел неравенство (статус {lp.status})")
    scaled = primitive(lp.primal_solution)
    return SeparationCertificate(inside=False, separator=HalfSpace(scaled[:-1], scaled[-1]),
                                 depth=Fraction(lp.obj_value))


def lp_membership(point: Sequence, vp: VPolytope) -> SeparationCertificate:
    """
    Σλ_i v_i = x, Σλ_i = 1, λ ≥ 0 в рациональной арифметике.

    Допустимая задача: точка внутри, λ - веса. Недопустимая: второе LP
    строит неравенство, выполненное на всех вершинах и нарушенное в точке.
    """
    point = _check_point(point, vp)
    m = len(vp.vertices)
    equalities = [[-point[k]] + [v.coords[k] for v in vp.vertices] for k in range(vp.dim)]
    equalities.append([-1] + [1] * m)
    lp = _solve(_weight_rows(m), equalities, [0] * (m + 1))

    if lp.status == cdd.LPStatusType.OPTIMAL:
        certificate = SeparationCertificate(inside=True, weights=tuple(Fraction(w) for w in lp.primal_solution))
    elif lp.status in (cdd.LPStatusType.INCONSISTENT, cdd.LPStatusType.STRUC_INCONSISTENT):
        certificate = _separate(point, vp)
    else:
        raise GeometryError(f"LP принадлежности завершилось со статусом {lp.status}")

    if not certificate.verify(point, vp):
        raise GeometryError("Сертификат LP не прошел точную проверку")
    return certificate


def nearest_member(point: Sequence, vp: VPolytope) -> SeparationCertificate:
    """Ближайшая выпуклая комбинация вершин в норме max: min e при |Σλv - x|_∞ ≤ e"""
    point = _check_point(point, vp)
    m = len(vp.vertices)
    rows = _weight_rows(m, extra=1)
    for k in range(vp.dim):
        column = [v.coords[k] for v in vp.vertices]
        rows.append([point[k]] + [-c for c in column] + [1])
        rows.append([-point[k]] + column + [1])
    lp = _solve(rows, [[-1] + [1] * m + [0]], [0] * (m + 1) + [1], maximize=False)
    if lp.status != cdd.LPStatusType.OPTIMAL:
        raise GeometryError(f"LP ближайшей точки завершилось со статусом {lp.status}")

    solution = [Fraction(v) for v in lp.primal_solution]
    certificate = SeparationCertificate(inside=True, weights=tuple(solution[:m]), distance=solution[m])
    if not certificate.verify(point, vp):
        raise GeometryError("Сертификат ближайшей точки не прошел точную проверку")
    return certificate


# Кэш H-представлений

def _halfspace_from_list(raw) -> HalfSpace:
    values = [int(v) for v in raw]
    return HalfSpace(tuple(values[:-1]), values[-1])


class PolytopeCache:
    """Канонический JSON: <cache_dir>/<prefix>_<sha256 вершин>.json"""

    def __init__(self, cache_dir: Path | str):
        self.cache_dir = Path(cache_dir)

    def path_for(self, vp: VPolytope, prefix: str = 'hpoly') -> Path:
        return self.cache_dir / f"{prefix}_{vp.content_hash()[:16]}.json"

    def load(self, vp: VPolytope, prefix: str = 'hpoly') -> Optional[HPolytope]:
        path = self.path_for(vp, prefix)
        if not path.exists():
            return None
        try:
            return self._read(path, vp)
        except CacheError as e:
            logger.warning(f"Кэш {path} поврежден, будет пересчитан: {e}")
            return None

    def _read(self, path: Path, vp: VPolytope) -> HPolytope:
        try:
            data = json.loads(path.read_text(encoding='utf-8'))
            if data.get('vertex_hash') != vp.content_hash():
                raise CacheError("хеш вершин не совпадает")
            if data.get('version') != CACHE_FORMAT_VERSION:
                raise CacheError(f"версия формата {data.get('version')}")
            return HPolytope(
                facets=tuple(_halfspace_from_list(f) for f in data['facets']),
                affine_dim=int(data['affine_dim']),
                ambient_dim=int(data['ambient_dim']),
                equalities=tuple(_halfspace_from_list(e) for e in data.get('equalities', [])),
            )
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise CacheError(str(e)) from e

    def store(self, vp: VPolytope, hpoly: HPolytope, prefix: str = 'hpoly', extra: Optional[dict] = None) -> Path:
        path = self.path_for(vp, prefix)
        document = {
            'version': CACHE_FORMAT_VERSION,
            'vertex_hash': vp.content_hash(),
            'ambient_dim': hpoly.ambient_dim,
            'affine_dim': hpoly.affine_dim,
            'facets': [f.as_list() for f in sorted(hpoly.facets)],
            'equalities': [e.as_list() for e in sorted(hpoly.equalities)],
        }
        if extra:
            document.update(extra)
        try:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(document, indent=1, sort_keys=True), encoding='utf-8')
        except OSError as e:
            raise CacheError(f"Не удалось записать кэш {path}: {e}") from e
        logger.debug(f"Кэш записан: {path}")
        return path


def cached_facet_enumeration(vp: VPolytope, cache: Optional[PolytopeCache] = None,
                             prefix: str = 'hpoly') -> HPolytope:
    """facet_enumeration с чтением/записью кэша"""
    if cache is not None:
        cached = cache.load(vp, prefix)
        if cached is not None:
            logger.info(f"H-представление взято из кэша ({len(cached.facets)} граней)")
            return cached
    hpoly = facet_enumeration(vp)
    if cache is not None:
        try:
            cache.store(vp, hpoly, prefix)
        except CacheError as e:
            logger.error(f"Ошибка записи кэша: {e}")
    return hpoly
