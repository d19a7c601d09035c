"""
Bell Witness Module

Слой решений: нарушения граней (CHSH и грани политопа Клиффорда), парное
соответствие I2222 ↔ β, избыточность I3322 для унитальных каналов,
принадлежность политопу Клиффорда с сертификатом, пороговые сканы для
зашумленного фазового гейта и рекомендация измерения Π.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .channels import (Channel, DephasedPhaseGate, DepolarizedPhaseGate, channel_table,
                       make_dephased_phase_gate, make_depolarized_phase_gate, total_depolarizing,
                       uniform_clifford_mixture)
from .clifford import CGTable, PauliLabel, enumerate_clifford_group
from .config_manager import Tolerances
from .distill import ParityMeasurement
from .errors import ClassificationError, ThresholdError
from .geometry import (HalfSpace, PolytopeCache, RationalVector, SeparationCertificate, lp_membership,
                       nearest_member)
from .logger import logger
from .polytopes import (Facet, FacetClass, PolytopeData, build_clifford_polytope, build_lhv_polytope,
                        chsh_block_of, table_point)

_LABELS = (PauliLabel.I, PauliLabel.X, PauliLabel.Y, PauliLabel.Z)


class Criterion(Enum):
    CHSH = "CHSH"
    BETA = "BETA"
    MEMBERSHIP = "MEMBERSHIP"


class Family(Enum):
    DEPHASED = "dephased_phase"
    DEPOLARIZED = "depolarized_phase"

    @property
    def parameter(self) -> str:
        return 's' if self is Family.DEPHASED else 'p'

    @property
    def default_range(self) -> Tuple[float, float]:
        return (0.0, 3.0) if self is Family.DEPHASED else (0.0, 1.0)

    def channel(self, theta: float, value: float) -> Channel:
        if self is Family.DEPHASED:
            return make_dephased_phase_gate(DephasedPhaseGate(theta, value))
        return make_depolarized_phase_gate(DepolarizedPhaseGate(theta, value))


class VerdictKind(Enum):
    CLIFFORD_MIXTURE = "CLIFFORD_MIXTURE"
    BETA_VIOLATION = "BETA_VIOLATION"
    ALPHA_VIOLATION = "ALPHA_VIOLATION"
    OUTSIDE_UNDETECTED = "OUTSIDE_UNDETECTED"


@dataclass(frozen=True)
class ViolationReport:
    facet: Facet
    value: float
    violated: bool
    margin: float

    @classmethod
    def of(cls, facet: Facet, table: CGTable, tol: float = 1e-12) -> 'ViolationReport':
        value = float(evaluate_facet(facet, table))
        violated = value < -tol
        return cls(facet, value, violated, -value if violated else 0.0)


@dataclass(frozen=True)
class UQCVerdict:
    kind: VerdictKind
    certificate: SeparationCertificate
    weights: Optional[Dict[str, Fraction]] = None
    violation: Optional[ViolationReport] = None
    measurement: Optional[ParityMeasurement] = None

    def __post_init__(self):
        if (self.kind is VerdictKind.CLIFFORD_MIXTURE) != self.certificate.inside:
            raise ClassificationError(f"Вердикт {self.kind.value} противоречит сертификату LP")
        if self.kind in (VerdictKind.BETA_VIOLATION, VerdictKind.ALPHA_VIOLATION):
            if self.violation is None or not self.violation.violated:
                raise ClassificationError(f"Вердикт {self.kind.value} без нарушенной грани")

    @property
    def separator(self) -> Optional[HalfSpace]:
        return self.certificate.separator


@dataclass(frozen=True)
class ThresholdResult:
    family: Family
    criterion: Criterion
    theta: float
    parameter: str
    critical: float
    bracket: Tuple[float, float]
    iterations: int
    equivalent_p: Optional[float] = None

    @property
    def bracket_width(self) -> float:
        return self.bracket[1] - self.bracket[0]


@dataclass(frozen=True)
class Theorem1Result:
    holds: bool
    violated_chsh: Tuple[ViolationReport, ...]
    pairs: Tuple[Tuple[ViolationReport, ViolationReport], ...]
    witness: Optional[ViolationReport]


@dataclass(frozen=True)
class SweepRow:
    parameter: float
    chsh_margin: float
    beta_margin: float
    inside: bool


@dataclass(frozen=True)
class FacetLibrary:
    """Перечисленные грани обоих политопов и таблица пар I2222 ↔ β"""
    lhv: PolytopeData
    clifford: PolytopeData
    tolerances: Tolerances = field(default_factory=Tolerances)

    @classmethod
    def build(cls, cache: Optional[PolytopeCache] = None,
              tolerances: Optional[Tolerances] = None) -> 'FacetLibrary':
        return cls(build_lhv_polytope(cache), build_clifford_polytope(cache), tolerances or Tolerances())

    @cached_property
    def chsh(self) -> Tuple[Facet, ...]:
        return self.lhv.facets_of(FacetClass.I2222)

    @cached_property
    def i3322(self) -> Tuple[Facet, ...]:
        return self.lhv.facets_of(FacetClass.I3322)

    @cached_property
    def betas(self) -> Tuple[Facet, ...]:
        return self.clifford.facets_of(FacetClass.BETA)

    @cached_property
    def alphas(self) -> Tuple[Facet, ...]:
        return self.clifford.facets_of(FacetClass.ALPHA)

    @cached_property
    def pairing(self) -> Dict[Facet, Facet]:
        """Биекция I2222 → β; ClassificationError, если это не биекция"""
        pairs = {f: theorem1_pair(f, self.betas) for f in self.chsh}
        if len(set(pairs.values())) != len(pairs) or len(pairs) != len(self.betas):
            raise ClassificationError("Соответствие I2222 ↔ β не является биекцией")
        return pairs


def evaluate_facet(f: Facet, t: CGTable):
    """Σ f[i][j]·t[i][j]"""
    return f.value(t)


def scan_facets(facets: Sequence[Facet], table: CGTable, tol: float) -> Tuple[ViolationReport, ...]:
    return tuple(ViolationReport.of(f, table, tol) for f in facets)


def most_violated(reports: Sequence[ViolationReport]) -> Optional[ViolationReport]:
    violated = [r for r in reports if r.violated]
    return min(violated, key=lambda r: (r.value, r.facet.coeffs)) if violated else None


def chsh_scan(channel: Channel, library: FacetLibrary) -> Tuple[ViolationReport, ...]:
    """Отчет по каждой из 72 граней I2222 (в каноническом порядке)"""
    return scan_facets(library.chsh, channel_table(channel), library.tolerances.violation_tol)


def pairing_difference(f2222: Facet, beta: Facet) -> Tuple[Tuple[int, ...], ...]:
    """β - I2222: -1 на II и единственный ±1; value(β) - value(I2222) = -1 ± JK ≤ 0"""
    return tuple(tuple(b - a for a, b in zip(row_a, row_b)) for row_a, row_b in zip(f2222.coeffs, beta.coeffs))


def _differs_in_one_position(f2222: Facet, beta: Facet) -> bool:
    difference = pairing_difference(f2222, beta)
    if difference[0][0] != -1:
        return False
    others = [(r, c) for r in range(4) for c in range(4) if (r, c) != (0, 0) and difference[r][c]]
    if len(others) != 1:
        return False
    r, c = others[0]
    return f2222.coeffs[r][c] == 0 and abs(beta.coeffs[r][c]) == 1


def theorem1_pair(f2222: Facet, betas: Sequence[Facet]) -> Facet:
    """Единственная β-грань, отличающаяся от f2222 в одной неединичной позиции"""
    if f2222.klass is not FacetClass.I2222:
        raise ClassificationError(f"Ожидалась грань I2222, получено {f2222.klass.value}")
    matches = [beta for beta in betas if _differs_in_one_position(f2222, beta)]
    if len(matches) != 1:
        raise ClassificationError(f"Для {f2222.describe()} найдено {len(matches)} парных β-граней")
    return matches[0]


def verify_theorem1(channel: Channel, library: FacetLibrary) -> Theorem1Result:
    """Для каждой нарушенной I2222: value(β) ≤ value(I2222)"""
    table = channel_table(channel)
    tol = library.tolerances.violation_tol
    pairs = []
    for chsh_report in scan_facets(library.chsh, table, tol):
        if chsh_report.violated:
            beta_report = ViolationReport.of(library.pairing[chsh_report.facet], table, tol)
            pairs.append((chsh_report, beta_report))
    holds = all(beta.value <= chsh.value + 1e-9 for chsh, beta in pairs)
    witness = most_violated([beta for _, beta in pairs])
    return Theorem1Result(holds, tuple(chsh for chsh, _ in pairs), tuple(pairs), witness)


def recommend_measurement(beta: Facet) -> ParityMeasurement:
    """Π = ½(𝕀 ± σ_j⊗σ_k) по одиночному коэффициенту вне CHSH-блока β-грани"""
    if beta.klass is not FacetClass.BETA:
        raise ClassificationError(f"Рекомендация измерения определена только для β: {beta.klass.value}")
    square = chsh_block_of(beta.coeffs)
    if square is None:
        raise ClassificationError(f"β-грань без CHSH-блока: {beta.coeffs}")
    singles = [(r, c) for r, c in beta.nonzero_positions() if (r, c) not in square]
    if len(singles) != 1:
        raise ClassificationError(f"β-грань должна иметь один коэффициент вне блока: {beta.coeffs}")
    r, c = singles[0]
    return ParityMeasurement(_LABELS[c], _LABELS[r], 1 if beta.coeffs[r][c] > 0 else -1)


def rational_point(table: CGTable, tol: float) -> RationalVector:
    if table.is_exact():
        return RationalVector(table_point(table))
    return RationalVector.of(table_point(table), tol=tol)


def clifford_membership(table: CGTable, library: FacetLibrary) -> SeparationCertificate:
    """
    Точный LP по 15 координатам против 24 вершин Клиффорда.

    Рационализация float-таблицы может вынести точку с границы политопа
    наружу. Если ни одна грань Клиффорда не нарушена ниже -violation_tol,
    а ближайшая точка политопа не дальше membership_tol, возвращается
    inside-сертификат ближайшей точки.
    """
    tolerances = library.tolerances
    point = rational_point(table, tolerances.rational_tol)
    certificate = lp_membership(point.coords, library.clifford.vpoly)
    if certificate.inside or table.is_exact():
        return certificate
    if any(r.violated for r in scan_facets(library.clifford.facets, table, tolerances.violation_tol)):
        return certificate

    nearest = nearest_member(point.coords, library.clifford.vpoly)
    if nearest.distance > tolerances.membership_tol:
        return certificate
    logger.debug(f"Точка на границе политопа Клиффорда: расстояние {float(nearest.distance):.3g}")
    return nearest


def _exact_value(facet: Facet, point: RationalVector) -> Fraction:
    flat = (1,) + point.coords
    return sum(facet.coeffs[i // 4][i % 4] * flat[i] for i in range(16))


def _worst_violation(facets: Sequence[Facet], table: CGTable, point: RationalVector,
                     tol: float) -> Optional[ViolationReport]:
    """Грань со значением ниже -tol; ничьи - по точному значению, затем по коэффициентам"""
    violated = [r for r in scan_facets(facets, table, tol) if r.violated]
    if not violated:
        return None
    return min(violated, key=lambda r: (_exact_value(r.facet, point), r.facet.coeffs))


def uqc_witness(channel: Channel, library: FacetLibrary) -> UQCVerdict:
    """Вердикт о пригодности канала для универсальных вычислений"""
    table = channel_table(channel)
    certificate = clifford_membership(table, library)
    if certificate.inside:
        names = [c.name for c in enumerate_clifford_group()]
        weights = {name: w for name, w in zip(names, certificate.weights) if w}
        logger.info(f"Канал {channel.label}: смесь Клиффордов ({len(weights)} элементов)")
        return UQCVerdict(VerdictKind.CLIFFORD_MIXTURE, certificate, weights=weights)

    point = rational_point(table, library.tolerances.rational_tol)
    tol = library.tolerances.violation_tol
    beta = _worst_violation(library.betas, table, point, tol)
    if beta is not None:
        measurement = recommend_measurement(beta.facet)
        logger.info(f"Канал {channel.label}: нарушена β-грань {beta.facet.describe()}, Π = {measurement.describe()}")
        return UQCVerdict(VerdictKind.BETA_VIOLATION, certificate, violation=beta, measurement=measurement)
    alpha = _worst_violation(library.alphas, table, point, tol)
    if alpha is not None:
        logger.info(f"Канал {channel.label}: нарушены только α-грани ({alpha.facet.describe()})")
        return UQCVerdict(VerdictKind.ALPHA_VIOLATION, certificate, violation=alpha)
    logger.info(f"Канал {channel.label}: вне политопа, грани не нарушены (неунитальный канал)")
    return UQCVerdict(VerdictKind.OUTSIDE_UNDETECTED, certificate)


def zero_locals(coeffs: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(0 if (r == 0) != (c == 0) else int(coeffs[r][c]) for c in range(4)) for r in range(4))


def _signs_agree(candidate: Facet, target, strict: bool) -> bool:
    for r, c in candidate.nonzero_positions():
        if target[r][c] == 0:
            if strict:
                return False
        elif (target[r][c] > 0) != (candidate.coeffs[r][c] > 0):
            return False
    return True


def decompose_3322(f: Facet, chsh_facets: Sequence[Facet]) -> Tuple[Tuple[Fraction, Facet], ...]:
    """f без локальных коэффициентов = ½ Σ четырех граней I2222 (точно)"""
    if f.klass is not FacetClass.I3322:
        raise ClassificationError(f"Разложение определено только для I3322: {f.klass.value}")
    target = zero_locals(f.coeffs)
    doubled = tuple(tuple(2 * v for v in row) for row in target)
    for strict in (True, False):
        candidates = [g for g in chsh_facets if _signs_agree(g, target, strict)]
        for combination in itertools.combinations(candidates, 4):
            total = tuple(tuple(sum(g.coeffs[r][c] for g in combination) for c in range(4)) for r in range(4))
            if total == doubled:
                return tuple((Fraction(1, 2), g) for g in combination)
    raise ClassificationError(f"Не найдено разложение I3322 на четыре I2222: {f.coeffs}")


def _min_value(facets: Sequence[Facet], table: CGTable) -> float:
    return min(float(evaluate_facet(f, table)) for f in facets)


def criterion_holds(criterion: Criterion, channel: Channel, library: FacetLibrary) -> bool:
    """True - канал 'неклассичен' по критерию (нарушение или вне политопа)"""
    table = channel_table(channel)
    tol = library.tolerances.violation_tol
    if criterion is Criterion.CHSH:
        return _min_value(library.chsh, table) < -tol
    if criterion is Criterion.BETA:
        return _min_value(library.betas, table) < -tol
    return not clifford_membership(table, library).inside


def threshold_scan(family: Family, theta: float, criterion: Criterion, library: FacetLibrary,
                   tol: Optional[float] = None, lo: Optional[float] = None,
                   hi: Optional[float] = None) -> ThresholdResult:
    """Бисекция по параметру шума до ширины интервала ≤ tol"""
    tol = tol if tol is not None else library.tolerances.scan_tol
    default_lo, default_hi = family.default_range
    lo = default_lo if lo is None else lo
    hi = default_hi if hi is None else hi
    if not lo < hi:
        raise ThresholdError(f"Пустой интервал сканирования [{lo}, {hi}]")

    def test(value: float) -> bool:
        return criterion_holds(criterion, family.channel(theta, value), library)

    at_lo, at_hi = test(lo), test(hi)
    if at_lo == at_hi:
        raise ThresholdError(f"Критерий {criterion.value} не меняется на [{lo}, {hi}]")

    iterations = 0
    while hi - lo > tol and iterations < library.tolerances.scan_max_iterations:
        middle = (lo + hi) / 2
        if test(middle) == at_lo:
            lo = middle
        else:
            hi = middle
        iterations += 1

    critical = (lo + hi) / 2
    equivalent_p = (1 - math.exp(-critical ** 2 / 2)) / 2 if family is Family.DEPHASED else None
    logger.info(f"Порог {family.value}/{criterion.value} при θ={theta:.6g}: "
                f"{family.parameter}* = {critical:.10f} (ширина {hi - lo:.2g})")
    return ThresholdResult(family, criterion, theta, family.parameter, critical, (lo, hi), iterations, equivalent_p)


def sweep(family: Family, theta: float, lo: float, hi: float, points: int,
          library: FacetLibrary) -> List[SweepRow]:
    """Сетка значений параметра: запасы CHSH и β, принадлежность политопу"""
    if points < 2 or not lo < hi:
        raise ThresholdError(f"Пустая сетка: [{lo}, {hi}], {points} точек")
    rows = []
    for value in np.linspace(lo, hi, points):
        table = channel_table(family.channel(theta, float(value)))
        rows.append(SweepRow(
            parameter=float(value),
            chsh_margin=-_min_value(library.chsh, table),
            beta_margin=-_min_value(library.betas, table),
            inside=clifford_membership(table, library).inside,
        ))
    return rows


def twirl_check(tol: float = 1e-12) -> bool:
    """Равномерная смесь 24 Клиффордов совпадает с полностью деполяризующим каналом"""
    twirled = channel_table(uniform_clifford_mixture()).as_array()
    depolarized = channel_table(total_depolarizing()).as_array()
    unit = np.zeros((4, 4))
    unit[0][0] = 1
    return bool(np.abs(twirled - depolarized).max() <= tol and np.abs(depolarized - unit).max() <= tol)
