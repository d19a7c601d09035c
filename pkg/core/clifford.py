"""
Pauli/Clifford Algebra Module

Однокубитная группа Клиффорда (24 элемента по модулю фазы), двухкубитные
состояния и таблицы ожиданий Паули (CG-таблицы).

Соглашение о порядке: entries[r][c] = Tr(ϱ · σ_c ⊗ σ_r), индексы 0..3 ↔ I,X,Y,Z.
Столбец - первый (неизмеряемый) тензорный множитель, строка - второй, на
который действует канал.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .config_manager import Tolerances
from .errors import InvalidStateError
from .logger import logger

MATRIX_TOL = Tolerances().matrix_tol


class PauliLabel(Enum):
    """Метка оператора Паули"""
    I = 0
    X = 1
    Y = 2
    Z = 3

    @classmethod
    def parse(cls, value: 'str | int | PauliLabel') -> 'PauliLabel':
        if isinstance(value, PauliLabel):
            return value
        if isinstance(value, int):
            return cls(value)
        return cls[str(value).strip().upper()]


NON_IDENTITY = (PauliLabel.X, PauliLabel.Y, PauliLabel.Z)

_PAULI_MATRICES = {
    PauliLabel.I: np.array([[1, 0], [0, 1]], dtype=complex),
    PauliLabel.X: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliLabel.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    PauliLabel.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PHASE = np.array([[1, 0], [0, 1j]], dtype=complex)


def pauli_matrix(label: 'PauliLabel | str | int') -> np.ndarray:
    """Стандартная матрица Паули (копия, чтобы константы не менялись)"""
    return _PAULI_MATRICES[PauliLabel.parse(label)].copy()


def _signed_pauli(matrix: np.ndarray, tol: float) -> Tuple[int, PauliLabel]:
    """Разложение матрицы ±σ_q; иначе ValueError"""
    for q in NON_IDENTITY:
        coeff = np.trace(_PAULI_MATRICES[q] @ matrix) / 2
        if abs(abs(coeff) - 1) <= tol and abs(coeff.imag) <= tol:
            sign = 1 if coeff.real > 0 else -1
            if np.allclose(matrix, sign * _PAULI_MATRICES[q], atol=tol, rtol=0):
                return sign, q
    raise ValueError("Матрица не является знаковым оператором Паули")


SignedAction = Tuple[Tuple[int, PauliLabel], Tuple[int, PauliLabel], Tuple[int, PauliLabel]]


def signed_action_of(matrix: np.ndarray, tol: float = MATRIX_TOL) -> SignedAction:
    """Знаковая перестановка X,Y,Z, задаваемая сопряжением U σ U†"""
    u = np.asarray(matrix, dtype=complex)
    return tuple(_signed_pauli(u @ _PAULI_MATRICES[p] @ u.conj().T, tol) for p in NON_IDENTITY)


@dataclass(frozen=True, eq=False)
class CliffordElement:
    """Элемент группы Клиффорда; равенство - по signed_action"""
    name: str
    matrix: np.ndarray = field(repr=False)
    signed_action: SignedAction

    def __eq__(self, other):
        if not isinstance(other, CliffordElement):
            return NotImplemented
        return self.signed_action == other.signed_action

    def __hash__(self):
        return hash(tuple((s, q.value) for s, q in self.signed_action))

    @property
    def key(self) -> Tuple[int, ...]:
        return tuple(s * q.value for s, q in self.signed_action)

    def rotation_matrix(self) -> np.ndarray:
        """3x3 матрица R: C σ_j C† = Σ_k R[k][j] σ_k"""
        r = np.zeros((3, 3), dtype=int)
        for j, (sign, q) in enumerate(self.signed_action):
            r[q.value - 1][j] = sign
        return r

    def is_pauli(self) -> bool:
        return all(q.value == j + 1 for j, (_, q) in enumerate(self.signed_action))


@lru_cache(maxsize=1)
def enumerate_clifford_group() -> Tuple[CliffordElement, ...]:
    """Замыкание {H, S}: 24 элемента, имена - кратчайшие слова (H·S = 'HS')"""
    generators = (('H', HADAMARD), ('S', PHASE))
    identity = np.eye(2, dtype=complex)
    found: Dict[SignedAction, CliffordElement] = {}
    start = CliffordElement('I', identity, signed_action_of(identity))
    found[start.signed_action] = start
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for gen_name, gen in generators:
            product = gen @ current.matrix
            action = signed_action_of(product)
            if action not in found:
                name = gen_name if current.name == 'I' else gen_name + current.name
                element = CliffordElement(name, product, action)
                found[action] = element
                queue.append(element)

    group = tuple(found.values())
    logger.debug(f"Группа Клиффорда: {len(group)} элементов")
    return group


def identity_element() -> CliffordElement:
    return enumerate_clifford_group()[0]


def clifford_from_matrix(matrix: np.ndarray, tol: float = MATRIX_TOL) -> CliffordElement:
    """Элемент группы с тем же действием, что и унитарная матрица"""
    action = signed_action_of(matrix, tol)
    for element in enumerate_clifford_group():
        if element.signed_action == action:
            return element
    raise ValueError("Матрица не является элементом группы Клиффорда")


def clifford_by_name(name: str) -> CliffordElement:
    """Поиск по имени-слову ('H', 'S', 'HS', ...) или по Паули 'X', 'Y', 'Z'"""
    name = name.strip().upper()
    if name in ('X', 'Y', 'Z'):
        return clifford_from_matrix(pauli_matrix(name))
    for element in enumerate_clifford_group():
        if element.name == name:
            return element
    raise KeyError(f"Неизвестный элемент группы Клиффорда: {name}")


def compose(first: CliffordElement, second: CliffordElement) -> CliffordElement:
    """Произведение first·second (сначала second)"""
    return clifford_from_matrix(first.matrix @ second.matrix)


def inverse(element: CliffordElement) -> CliffordElement:
    return clifford_from_matrix(element.matrix.conj().T)


def conjugation_action(c: CliffordElement, p: 'PauliLabel | str') -> Tuple[int, PauliLabel]:
    """(знак, q) такие, что c σ_p c† = ±σ_q"""
    p = PauliLabel.parse(p)
    if p is PauliLabel.I:
        raise ValueError("Действие сопряжением определено только для X, Y, Z")
    return c.signed_action[p.value - 1]


# Двухкубитные состояния

@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Эрмитова 4x4 матрица плотности с единичным следом"""
    matrix: np.ndarray = field(repr=False)
    tol: float = 1e-10

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.shape != (4, 4):
            raise InvalidStateError(f"Ожидалась матрица 4x4, получено {rho.shape}")
        if not np.allclose(rho, rho.conj().T, atol=self.tol, rtol=0):
            raise InvalidStateError("Матрица плотности не эрмитова")
        trace = np.trace(rho).real
        if abs(trace - 1) > self.tol:
            raise InvalidStateError(f"След матрицы плотности {trace:.3g} != 1")
        if np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -self.tol:
            raise InvalidStateError("Матрица плотности не положительна")
        object.__setattr__(self, 'matrix', rho)


def bell_phi_vector() -> np.ndarray:
    """|Φ⟩ = (|00⟩ + |11⟩)/√2"""
    return np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def phi_state() -> TwoQubitState:
    phi = bell_phi_vector()
    return TwoQubitState(np.outer(phi, phi.conj()))


def maximally_mixed_state() -> TwoQubitState:
    return TwoQubitState(np.eye(4, dtype=complex) / 4)


# CG-таблицы

@dataclass(frozen=True)
class CGTable:
    """4x4 таблица ожиданий Паули; элементы - float или точные Fraction"""
    entries: Tuple[Tuple[object, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.entries)
        if len(rows) != 4 or any(len(row) != 4 for row in rows):
            raise InvalidStateError("CG-таблица должна быть 4x4")
        if rows[0][0] != 1 and abs(float(rows[0][0]) - 1) > 1e-9:
            raise InvalidStateError(f"Элемент II таблицы {rows[0][0]} != 1")
        for row in rows:
            for value in row:
                if abs(float(value)) > 1 + 1e-9:
                    raise InvalidStateError(f"Элемент таблицы {value} вне [-1, 1]")
        object.__setattr__(self, 'entries', rows)

    @classmethod
    def from_array(cls, array) -> 'CGTable':
        return cls(tuple(tuple(float(v) for v in row) for row in np.asarray(array, dtype=float)))

    @classmethod
    def from_coords(cls, coords: Sequence) -> 'CGTable':
        """Из 15 координат (построчно, без элемента II)"""
        if len(coords) != 15:
            raise InvalidStateError("Ожидалось 15 координат")
        flat = [1] + list(coords)
        return cls(tuple(tuple(flat[4 * r:4 * r + 4]) for r in range(4)))

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.entries])

    def coords(self) -> Tuple:
        """15 координат: построчно, без элемента II"""
        return tuple(v for r, row in enumerate(self.entries) for c, v in enumerate(row) if (r, c) != (0, 0))

    def is_exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for row in self.entries for v in row)

    def expectation(self, name: str) -> object:
        """Значение по имени: 'XY' = Tr(ϱ σ_x ⊗ σ_y) = entries[Y][X]"""
        first, second = PauliLabel.parse(name[0]), PauliLabel.parse(name[1])
        return self.entries[second.value][first.value]

    def local_entries(self) -> Tuple:
        """IX, IY, IZ, XI, YI, ZI"""
        return tuple(self.entries[r][0] for r in (1, 2, 3)) + tuple(self.entries[0][c] for c in (1, 2, 3))

    def correlation_block(self) -> np.ndarray:
        return self.as_array()[1:, 1:]


def cg_table(state: TwoQubitState) -> CGTable:
    """entries[r][c] = Tr(state · σ_c ⊗ σ_r)"""
    rho = state.matrix
    if abs(np.trace(rho).real - 1) > state.tol:
        raise InvalidStateError("След состояния != 1")
    table = np.empty((4, 4))
    for r, c in itertools.product(range(4), repeat=2):
        op = np.kron(_PAULI_MATRICES[PauliLabel(c)], _PAULI_MATRICES[PauliLabel(r)])
        table[r][c] = np.trace(rho @ op).real
    table[0][0] = 1.0
    return CGTable.from_array(np.clip(table, -1.0, 1.0))


def transpose_signs() -> np.ndarray:
    """diag(τ): σ_j^T = τ_j σ_j (Y^T = -Y)"""
    return np.diag([1, -1, 1])


def relabel_matrix(matrix: Sequence[Sequence], left: np.ndarray, right: np.ndarray) -> Tuple[Tuple, ...]:
    """M' = diag(1, L) · M · diag(1, R) в точной арифметике (L, R - знаковые перестановки)"""
    left4 = [[1, 0, 0, 0]] + [[0] + [int(v) for v in row] for row in np.asarray(left)]
    right4 = [[1, 0, 0, 0]] + [[0] + [int(v) for v in row] for row in np.asarray(right)]
    tmp = [[sum(left4[r][k] * matrix[k][c] for k in range(4)) for c in range(4)] for r in range(4)]
    return tuple(tuple(sum(tmp[r][k] * right4[k][c] for k in range(4)) for c in range(4)) for r in range(4))


def output_relabeling(c: CliffordElement) -> np.ndarray:
    """Левый множитель: таблица канала C∘𝓔 = diag(1, R_C) · T"""
    return c.rotation_matrix()


def input_relabeling(c: CliffordElement) -> np.ndarray:
    """Правый множитель: таблица канала 𝓔∘C = T · diag(1, D R_C D)"""
    d = transpose_signs()
    return d @ c.rotation_matrix() @ d


def relabel_table(table: CGTable, left: CliffordElement, right: CliffordElement) -> CGTable:
    """Таблица канала left∘𝓔∘right по таблице 𝓔"""
    return CGTable(relabel_matrix(table.entries, output_relabeling(left), input_relabeling(right)))


def all_relabelings() -> Iterable[Tuple[np.ndarray, np.ndarray]]:
    """Пары (L, R) для всех 24x24 композиций C_L ∘ · ∘ C_R"""
    group = enumerate_clifford_group()
    lefts = [output_relabeling(c) for c in group]
    rights = [input_relabeling(c) for c in group]
    return itertools.product(lefts, rights)


def composition_table() -> List[List[int]]:
    """Таблица умножения 24x24 по индексам enumerate_clifford_group()"""
    group = enumerate_clifford_group()
    index = {element.signed_action: i for i, element in enumerate(group)}
    return [[index[signed_action_of(a.matrix @ b.matrix)] for b in group] for a in group]
