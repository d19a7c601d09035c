"""
Quantum Channels Module

Однокубитные квантовые операции: операторы Крауса, состояние Чоя
ϱ_𝓔 = (𝕀⊗𝓔)|Φ⟩⟨Φ|, смеси унитарных, именованные семейства (фазовый гейт с
дефазировкой и с деполяризацией), JSON-схема каналов.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import unitary_group

from .clifford import (CGTable, CliffordElement, TwoQubitState, bell_phi_vector,
                       cg_table, clifford_by_name, enumerate_clifford_group, pauli_matrix)
from .config_manager import Tolerances
from .errors import InvalidChannelError, InvalidStateError
from .logger import logger

CHANNEL_TOL = Tolerances().channel_tol
KRAUS_EIGEN_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class Channel:
    """CP-TP канал в форме Крауса; проверяется при создании"""
    kraus: Tuple[np.ndarray, ...] = field(repr=False)
    label: str = "channel"
    tol: float = CHANNEL_TOL

    def __post_init__(self):
        ops = tuple(np.asarray(e, dtype=complex) for e in self.kraus)
        if not ops:
            raise InvalidChannelError("Нужен хотя бы один оператор Крауса")
        if any(e.shape != (2, 2) for e in ops):
            raise InvalidChannelError("Операторы Крауса должны быть 2x2")
        completeness = sum(e.conj().T @ e for e in ops)
        deviation = np.abs(completeness - np.eye(2)).max()
        if deviation > self.tol:
            raise InvalidChannelError(f"Σ E†E != 𝕀 (отклонение {deviation:.3g}): канал не сохраняет след")
        object.__setattr__(self, 'kraus', ops)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return apply(self, rho)


@dataclass(frozen=True, eq=False)
class ChoiState:
    """Состояние Чоя: положительно, Tr_2 = 𝕀/2"""
    state: TwoQubitState
    tol: float = CHANNEL_TOL

    def __post_init__(self):
        rho = self.state.matrix
        if np.linalg.eigvalsh(rho).min() < -self.tol:
            raise InvalidChannelError("Состояние Чоя не положительно: канал не вполне положителен")
        reduced = partial_trace_second(rho)
        if np.abs(reduced - np.eye(2) / 2).max() > self.tol:
            raise InvalidChannelError("Tr_2 состояния Чоя != 𝕀/2: канал не сохраняет след")


@dataclass(frozen=True, eq=False)
class UnitalMixture:
    """Вероятностная смесь унитарных Σ p_i U_i ρ U_i†"""
    terms: Tuple[Tuple[float, np.ndarray], ...] = field(repr=False)
    tol: float = CHANNEL_TOL

    def __post_init__(self):
        terms = tuple((p, np.asarray(u, dtype=complex)) for p, u in self.terms)
        if not terms:
            raise InvalidChannelError("Пустая смесь унитарных")
        if any(float(p) < 0 for p, _ in terms):
            raise InvalidChannelError("Отрицательная вероятность в смеси")
        if abs(float(sum(p for p, _ in terms)) - 1) > self.tol:
            raise InvalidChannelError("Вероятности смеси не нормированы")
        for _, u in terms:
            if u.shape != (2, 2) or np.abs(u.conj().T @ u - np.eye(2)).max() > self.tol:
                raise InvalidChannelError("Элемент смеси не унитарен")
        object.__setattr__(self, 'terms', terms)


@dataclass(frozen=True)
class DephasedPhaseGate:
    """U_z(θ) с дефазировкой силы s: ρ01 → e^{-s²/2} e^{-iθ} ρ01"""
    theta: float
    s: float

    def __post_init__(self):
        if self.s < 0:
            raise InvalidChannelError(f"Сила дефазировки s={self.s} < 0")

    @property
    def coherence(self) -> float:
        return float(np.exp(-self.s ** 2 / 2))

    @property
    def noise_rate(self) -> float:
        """p = (1 - e^{-s²/2})/2"""
        return (1 - self.coherence) / 2


@dataclass(frozen=True)
class DepolarizedPhaseGate:
    """(1-p) U_z(θ) ρ U_z(θ)† + p 𝕀/2"""
    theta: float
    p: float

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise InvalidChannelError(f"Вероятность деполяризации p={self.p} вне [0, 1]")


def phase_gate(theta: float) -> np.ndarray:
    """U_z(θ) = diag(1, e^{iθ}); U_z(π/4) - так называемый π/8-гейт"""
    return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)


def partial_trace_second(rho: np.ndarray) -> np.ndarray:
    """Tr по второму множителю 4x4 матрицы"""
    return np.einsum('abcb->ac', np.asarray(rho).reshape(2, 2, 2, 2))


def _validate_density(rho: np.ndarray, tol: float) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidStateError("Ожидалась матрица плотности 2x2")
    if not np.allclose(rho, rho.conj().T, atol=tol, rtol=0):
        raise InvalidStateError("Матрица плотности не эрмитова")
    if abs(np.trace(rho).real - 1) > tol:
        raise InvalidStateError("След матрицы плотности != 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise InvalidStateError("Матрица плотности не положительна")
    return rho


def apply(channel: Channel, rho: np.ndarray) -> np.ndarray:
    """Σ E_i ρ E_i†"""
    rho = _validate_density(rho, channel.tol)
    return sum(e @ rho @ e.conj().T for e in channel.kraus)


def kraus_to_choi(channel: Channel) -> ChoiState:
    """(𝕀⊗𝓔)[|Φ⟩⟨Φ|]"""
    phi = bell_phi_vector()
    projector = np.outer(phi, phi.conj())
    choi = np.zeros((4, 4), dtype=complex)
    for e in channel.kraus:
        lifted = np.kron(np.eye(2), e)
        choi += lifted @ projector @ lifted.conj().T
    return ChoiState(TwoQubitState(choi, tol=channel.tol), tol=channel.tol)


def choi_to_kraus(choi: ChoiState, label: str = "from_choi") -> Channel:
    """Операторы Крауса из спектрального разложения (собственные значения > 1e-12)"""
    values, vectors = np.linalg.eigh(choi.state.matrix)
    kraus = []
    for value, vector in zip(values, vectors.T):
        if value > KRAUS_EIGEN_CUTOFF:
            # (𝕀⊗E)|Φ⟩ имеет компоненты E[b][a]/√2 на |a⟩|b⟩
            kraus.append(np.sqrt(2 * value) * vector.reshape(2, 2).T)
    return Channel(tuple(kraus), label=label, tol=max(choi.tol, 1e-9))


def choi_to_cg(choi: ChoiState) -> CGTable:
    return cg_table(choi.state)


def channel_table(channel: Channel) -> CGTable:
    """CG-таблица состояния Чоя канала"""
    return choi_to_cg(kraus_to_choi(channel))


def compose(outer: Channel, inner: Channel) -> Channel:
    """outer ∘ inner"""
    kraus = tuple(a @ b for a in outer.kraus for b in inner.kraus)
    return Channel(kraus, label=f"{outer.label}∘{inner.label}", tol=max(outer.tol, inner.tol))


def is_unital(channel: Channel, tol: float = CHANNEL_TOL) -> bool:
    image = sum(e @ e.conj().T for e in channel.kraus)
    return bool(np.abs(image - np.eye(2)).max() <= tol)


def pauli_transfer_block(channel: Channel) -> np.ndarray:
    """R[k][j] = Tr(σ_k 𝓔(σ_j))/2 для j, k ∈ {X, Y, Z}"""
    block = np.empty((3, 3))
    for j in range(3):
        image = sum(e @ pauli_matrix(j + 1) @ e.conj().T for e in channel.kraus)
        for k in range(3):
            block[k][j] = np.trace(pauli_matrix(k + 1) @ image).real / 2
    return block


# Конструкторы

def make_unitary_channel(unitary: np.ndarray, label: str = "unitary", tol: float = CHANNEL_TOL) -> Channel:
    return Channel((np.asarray(unitary, dtype=complex),), label=label, tol=tol)


def identity_channel() -> Channel:
    return make_unitary_channel(np.eye(2), label="identity")


def make_dephased_phase_gate(spec: DephasedPhaseGate) -> Channel:
    """Две матрицы Крауса в физической форме (диагональные, ±e^{iθ})"""
    decay = spec.coherence
    e0 = np.sqrt((1 + decay) / 2) * np.array([[1, 0], [0, np.exp(1j * spec.theta)]])
    e1 = np.sqrt((1 - decay) / 2) * np.array([[1, 0], [0, -np.exp(1j * spec.theta)]])
    return Channel((e0, e1), label=f"dephased_phase(theta={spec.theta:.6g}, s={spec.s:.6g})")


def make_dephased_phase_gate_qi(spec: DephasedPhaseGate) -> Channel:
    """Эквивалентная форма: √(1-p) U_z(θ), √p σ_z U_z(θ)"""
    p = spec.noise_rate
    u = phase_gate(spec.theta)
    return Channel((np.sqrt(1 - p) * u, np.sqrt(p) * pauli_matrix('Z') @ u),
                   label=f"dephased_phase_qi(theta={spec.theta:.6g}, p={p:.6g})")


def make_depolarized_phase_gate(spec: DepolarizedPhaseGate) -> Channel:
    """p𝕀/2 = (p/4) Σ_P P ρ P, отсюда четыре оператора Крауса"""
    u = phase_gate(spec.theta)
    kraus = [np.sqrt(1 - 3 * spec.p / 4) * u]
    kraus += [np.sqrt(spec.p / 4) * pauli_matrix(label) @ u for label in ('X', 'Y', 'Z')]
    return Channel(tuple(kraus), label=f"depolarized_phase(theta={spec.theta:.6g}, p={spec.p:.6g})")


def total_depolarizing() -> Channel:
    return make_depolarized_phase_gate(DepolarizedPhaseGate(theta=0.0, p=1.0))


def make_unital_mixture(mixture: UnitalMixture, label: str = "unital_mixture") -> Channel:
    kraus = tuple(np.sqrt(float(p)) * u for p, u in mixture.terms if float(p) > 0)
    return Channel(kraus, label=label, tol=mixture.tol)


def make_clifford_mixture(weights: Mapping[CliffordElement, object], tol: float = CHANNEL_TOL) -> Channel:
    """Σ p_i C_i ρ C_i†; веса могут быть Fraction"""
    if any(float(p) < 0 for p in weights.values()):
        raise InvalidChannelError("Отрицательный вес в смеси Клиффордов")
    if abs(float(sum(weights.values())) - 1) > tol:
        raise InvalidChannelError("Веса смеси Клиффордов не нормированы")
    terms = tuple((float(p), c.matrix) for c, p in weights.items())
    label = " + ".join(f"{p}·{c.name}" for c, p in weights.items())
    return make_unital_mixture(UnitalMixture(terms, tol=tol), label=label)


def random_channel(rng: np.random.Generator, kraus_rank: int = 4) -> Channel:
    """Случайный CP-TP канал: изометрия из случайной унитарной 2r x 2r"""
    isometry = unitary_group.rvs(2 * kraus_rank, random_state=rng)[:, :2]
    kraus = tuple(isometry[2 * i:2 * i + 2, :] for i in range(kraus_rank))
    return Channel(kraus, label=f"random(rank={kraus_rank})", tol=1e-9)


def random_unital_channel(rng: np.random.Generator, terms: int = 3) -> Channel:
    """Случайная смесь унитарных с весами Дирихле"""
    weights = rng.dirichlet(np.ones(terms))
    unitaries = [unitary_group.rvs(2, random_state=rng) for _ in range(terms)]
    return make_unital_mixture(UnitalMixture(tuple(zip(weights, unitaries)), tol=1e-9),
                               label=f"random_unital(terms={terms})")


# JSON-схема

def _parse_number(value) -> Fraction | float:
    if isinstance(value, str):
        return Fraction(value)
    return value


def _parse_matrix(raw) -> np.ndarray:
    """[[re,im] x4] или [[[re,im],[re,im]], ...] построчно"""
    flat = []
    for item in raw:
        if len(item) == 2 and all(isinstance(v, (list, tuple)) for v in item):
            flat.extend(item)
        else:
            flat.append(item)
    if len(flat) != 4:
        raise InvalidChannelError("Матрица Крауса должна содержать 4 элемента [re, im]")
    return np.array([complex(float(re), float(im)) for re, im in flat]).reshape(2, 2)


def channel_from_json(data: Dict, tol: float = CHANNEL_TOL) -> Channel:
    """Канал из JSON: {"kraus": ...} или {"family": ...}; tol - допуск проверки CP/TP"""
    try:
        if 'kraus' in data:
            kraus = tuple(_parse_matrix(m) for m in data['kraus'])
            return Channel(kraus, label=data.get('label', 'kraus'), tol=tol)
        family = data.get('family')
        if family == 'dephased_phase':
            return make_dephased_phase_gate(DephasedPhaseGate(float(data['theta']), float(data['s'])))
        if family == 'depolarized_phase':
            return make_depolarized_phase_gate(DepolarizedPhaseGate(float(data['theta']), float(data['p'])))
        if family == 'clifford_mixture':
            weights = {clifford_by_name(name): _parse_number(p) for name, p in data['weights'].items()}
            return make_clifford_mixture(weights, tol=tol)
        if family == 'unitary':
            return make_unitary_channel(_parse_matrix(data['matrix']), label='unitary', tol=tol)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, InvalidChannelError):
            raise
        raise InvalidChannelError(f"Некорректное описание канала: {e}") from e
    raise InvalidChannelError(f"Неизвестное семейство канала: {data.get('family')}")


def load_channel(source: str, tol: float = CHANNEL_TOL) -> Channel:
    """Канал из строки JSON или пути к файлу"""
    path = Path(source)
    try:
        text = path.read_text(encoding='utf-8') if path.exists() else source
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidChannelError(f"Не удалось прочитать описание канала: {e}") from e
    channel = channel_from_json(data, tol)
    logger.debug(f"Загружен канал: {channel.label}")
    return channel


def uniform_clifford_mixture() -> Channel:
    group = enumerate_clifford_group()
    return make_clifford_mixture({c: Fraction(1, len(group)) for c in group})
