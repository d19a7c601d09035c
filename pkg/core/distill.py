"""
Ancilla Preparation Module

Схема приготовления анциллы из канала: состояние Чоя, двухкубитное
Паули-измерение Π = ½(𝕀 ± σ_j⊗σ_k) с постселекцией, стабилизаторное
декодирование (локальные Клиффорды, X, CNOT) и проверка выхода за
стабилизаторный октаэдр |x|+|y|+|z| ≤ 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple

import numpy as np

from .channels import Channel, kraus_to_choi
from .clifford import (NON_IDENTITY, CliffordElement, PauliLabel, conjugation_action,
                       enumerate_clifford_group, pauli_matrix)
from .errors import PostselectionError
from .logger import logger

POSTSELECTION_CUTOFF = 1e-12

CNOT = np.array([[1, 0, 0, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0]], dtype=complex)


@dataclass(frozen=True)
class ParityMeasurement:
    """Π = ½(𝕀 + sign·σ_j⊗σ_k); σ_j на первом (неизмеряемом) кубите"""
    j: PauliLabel
    k: PauliLabel
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'j', PauliLabel.parse(self.j))
        object.__setattr__(self, 'k', PauliLabel.parse(self.k))
        if self.j is PauliLabel.I or self.k is PauliLabel.I:
            raise ValueError("Измерение четности требует неединичных Паули")
        if self.sign not in (1, -1):
            raise ValueError(f"Знак измерения должен быть ±1: {self.sign}")

    def projector(self) -> np.ndarray:
        return (np.eye(4) + self.sign * np.kron(pauli_matrix(self.j), pauli_matrix(self.k))) / 2

    def opposite(self) -> 'ParityMeasurement':
        return ParityMeasurement(self.j, self.k, -self.sign)

    def describe(self) -> str:
        return f"½(𝕀 {'+' if self.sign > 0 else '-'} σ_{self.j.name.lower()}⊗σ_{self.k.name.lower()})"

    def to_json(self) -> Dict:
        return {'j': self.j.name, 'k': self.k.name, 'sign': self.sign}


class OctahedronRegion(Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class AncillaReport:
    bloch: Tuple[float, float, float]
    success_prob: float
    octahedron_margin: float
    region: OctahedronRegion
    measurement: ParityMeasurement

    def __post_init__(self):
        if sum(v * v for v in self.bloch) > 1 + 1e-10:
            raise ValueError(f"Вектор Блоха вне шара: {self.bloch}")
        if not -1e-12 <= self.success_prob <= 1 + 1e-12:
            raise ValueError(f"Вероятность постселекции вне [0, 1]: {self.success_prob}")

    @property
    def useful(self) -> bool:
        """Кандидат для дистилляции магических состояний"""
        return self.region is OctahedronRegion.OUTSIDE

    def to_json(self) -> Dict:
        return {
            'bloch': list(self.bloch),
            'success_prob': self.success_prob,
            'octahedron_margin': self.octahedron_margin,
            'region': self.region.value,
            'measurement': self.measurement.to_json(),
        }


def octahedron_check(bloch, tol: float = 1e-12) -> Tuple[OctahedronRegion, float]:
    """Положение относительно |x|+|y|+|z| = 1 и запас |x|+|y|+|z| - 1"""
    margin = float(sum(abs(v) for v in bloch)) - 1
    if margin > tol:
        return OctahedronRegion.OUTSIDE, margin
    if margin < -tol:
        return OctahedronRegion.INSIDE, margin
    return OctahedronRegion.BOUNDARY, margin


def _to_z(p: PauliLabel) -> Tuple[CliffordElement, int]:
    """Клиффорд C (кратчайшее имя) и знак s такие, что C σ_p C† = s·Z"""
    if p is PauliLabel.Z:
        return enumerate_clifford_group()[0], 1
    candidates = []
    for element in enumerate_clifford_group():
        sign, image = conjugation_action(element, p)
        if image is PauliLabel.Z:
            candidates.append((sign < 0, len(element.name), element.name, element, sign))
    _, _, _, element, sign = min(candidates, key=lambda c: c[:3])
    return element, sign


def ancilla_circuit(m: ParityMeasurement) -> np.ndarray:
    """
    Декодирующая унитарная 4x4: CNOT(1→2) · (𝕀⊗X)^[четность нечетная] · (A⊗B),
    где A σ_j A† = ±Z, B σ_k B† = ±Z. Переводит образ Π в (кубит)⊗|0⟩.
    """
    first, first_sign = _to_z(m.j)
    second, second_sign = _to_z(m.k)
    local = np.kron(first.matrix, second.matrix)
    parity = m.sign * first_sign * second_sign
    flip = np.kron(np.eye(2), pauli_matrix('X')) if parity < 0 else np.eye(4)
    return CNOT @ flip @ local


def _bloch_vector(rho: np.ndarray) -> Tuple[float, float, float]:
    return tuple(float(np.trace(rho @ pauli_matrix(p)).real) for p in NON_IDENTITY)


def _first_qubit(rho: np.ndarray) -> np.ndarray:
    return np.einsum('abcb->ac', rho.reshape(2, 2, 2, 2))


def prepare_ancilla(channel: Channel, m: ParityMeasurement, tol: float = 1e-12) -> AncillaReport:
    """Проекция Чоя на Π, нормировка, декодирование, след по второму кубиту"""
    choi = kraus_to_choi(channel).state.matrix
    projector = m.projector()
    success = float(np.trace(projector @ choi).real)
    if success <= POSTSELECTION_CUTOFF:
        raise PostselectionError(f"Исход {m.describe()} имеет нулевую вероятность ({success:.3g})")

    post = projector @ choi @ projector / success
    decoder = ancilla_circuit(m)
    decoded = decoder @ post @ decoder.conj().T
    bloch = _bloch_vector(_first_qubit(decoded))
    region, margin = octahedron_check(bloch, tol)
    logger.debug(f"Анцилла {m.describe()}: p={success:.6g}, блох={bloch}, запас={margin:.6g}")
    return AncillaReport(bloch, min(max(success, 0.0), 1.0), margin, region, m)


def success_probabilities(channel: Channel, j, k) -> Tuple[float, float]:
    """Вероятности исходов + и - измерения σ_j⊗σ_k на состоянии Чоя"""
    choi = kraus_to_choi(channel).state.matrix
    plus = ParityMeasurement(j, k, 1).projector()
    minus = ParityMeasurement(j, k, -1).projector()
    return float(np.trace(plus @ choi).real), float(np.trace(minus @ choi).real)
