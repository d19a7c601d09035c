"""
LHV Simulator Module

Модель с общими случайными битами: три несмещенных бита r1, r2, r3 у обеих
сторон и детерминированные правила ответа для каждого направления Паули.
Точное усреднение по 8 наборам битов и Монте-Карло с воспроизводимым
генератором (numpy Philox, зерно и имя генератора сохраняются в отчете).
"""

from __future__ import annotations

import itertools
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .clifford import HADAMARD, PHASE, CGTable, TwoQubitState, cg_table
from .errors import BenchmarkError
from .logger import logger
from .polytopes import LocalConfigBits

GENERATOR_ID = "numpy.Philox"
_AXES = ('X', 'Y', 'Z')


@dataclass(frozen=True)
class SharedBits:
    r1: int
    r2: int
    r3: int

    def __getitem__(self, index: int) -> int:
        return (self.r1, self.r2, self.r3)[index]


@dataclass(frozen=True)
class OutputRule:
    """(-1)^(r[bit] + flip); bit=None - постоянный ответ (-1)^flip"""
    bit: Optional[int]
    flip: int = 0

    def __post_init__(self):
        if self.bit not in (None, 0, 1, 2) or self.flip not in (0, 1):
            raise ValueError(f"Некорректное правило ответа: bit={self.bit}, flip={self.flip}")

    def output(self, bits: SharedBits) -> int:
        exponent = self.flip + (bits[self.bit] if self.bit is not None else 0)
        return -1 if exponent % 2 else 1

    def sample(self, bits: np.ndarray) -> np.ndarray:
        """Векторный вариант: bits - массив (n, 3) из 0/1"""
        if self.bit is None:
            return np.full(bits.shape[0], -1 if self.flip else 1, dtype=np.int64)
        return 1 - 2 * ((bits[:, self.bit].astype(np.int64) + self.flip) % 2)

    def describe(self) -> str:
        if self.bit is None:
            return f"(-1)^{self.flip}"
        return f"(-1)^(r{self.bit + 1}{' + 1' if self.flip else ''})"


@dataclass(frozen=True)
class LHVRuleSet:
    """Правила для направлений X, Y, Z у каждой из сторон"""
    first: Tuple[OutputRule, OutputRule, OutputRule]
    second: Tuple[OutputRule, OutputRule, OutputRule]
    name: str = "rules"

    def rule(self, party: int, axis: int) -> Optional[OutputRule]:
        """axis 0..3 ↔ I,X,Y,Z; для I правила нет (ответ 1)"""
        if axis == 0:
            return None
        return (self.first, self.second)[party][axis - 1]


def phi_ruleset() -> LHVRuleSet:
    """X: обе стороны (-1)^r1; Y: A (-1)^r2, B (-1)^(r2+1); Z: обе (-1)^r3"""
    return LHVRuleSet(
        first=(OutputRule(0), OutputRule(1), OutputRule(2)),
        second=(OutputRule(0), OutputRule(1, 1), OutputRule(2)),
        name="phi",
    )


def constant_ruleset(bits: LocalConfigBits) -> LHVRuleSet:
    """Детерминированные ответы, воспроизводящие вершину LHV-политопа"""
    a, b, c, d, e, f = bits.as_tuple()
    return LHVRuleSet(
        first=(OutputRule(None, a), OutputRule(None, b), OutputRule(None, c)),
        second=(OutputRule(None, d), OutputRule(None, e), OutputRule(None, f)),
        name=f"constant{bits.as_tuple()}",
    )


def _single_output(rules: LHVRuleSet, party: int, axis: int, bits: SharedBits) -> int:
    rule = rules.rule(party, axis)
    return 1 if rule is None else rule.output(bits)


def exact_table(rules: LHVRuleSet) -> CGTable:
    """Точное среднее по всем 8 наборам общих битов"""
    assignments = [SharedBits(*values) for values in itertools.product((0, 1), repeat=3)]
    entries = []
    for r in range(4):
        row = []
        for c in range(4):
            total = sum(_single_output(rules, 0, c, bits) * _single_output(rules, 1, r, bits)
                        for bits in assignments)
            row.append(Fraction(total, len(assignments)))
        entries.append(tuple(row))
    return CGTable(tuple(entries))


@dataclass(frozen=True)
class SampledTable:
    table: CGTable
    samples: int
    seed: int
    workers: int
    generator: str = GENERATOR_ID


def _chunk_sums(rules: LHVRuleSet, count: int, seed_sequence: np.random.SeedSequence) -> np.ndarray:
    """Целые суммы произведений ответов по count розыгрышам на каждую пару настроек"""
    rng = np.random.Generator(np.random.Philox(seed_sequence))
    sums = np.zeros((4, 4), dtype=np.int64)
    for r, c in itertools.product(range(4), repeat=2):
        if (r, c) == (0, 0):
            sums[r][c] = count
            continue
        bits = rng.integers(0, 2, size=(count, 3), dtype=np.int8)
        first = rules.rule(0, c)
        second = rules.rule(1, r)
        a = first.sample(bits) if first else np.ones(count, dtype=np.int64)
        b = second.sample(bits) if second else np.ones(count, dtype=np.int64)
        sums[r][c] = int(np.sum(a * b))
    return sums


def sample_table(rules: LHVRuleSet, n: int, seed: int, workers: int = 1) -> SampledTable:
    """Монте-Карло: n розыгрышей на пару настроек, разбитых между потоками"""
    if n < 1:
        raise BenchmarkError(f"Число розыгрышей должно быть >= 1: {n}")
    workers = max(1, min(workers, n))
    children = np.random.SeedSequence(seed).spawn(workers)
    counts = [n // workers + (1 if i < n % workers else 0) for i in range(workers)]

    with ThreadPoolExecutor(max_workers=workers) as executor:
        chunks = list(executor.map(lambda args: _chunk_sums(rules, *args), zip(counts, children)))

    totals = sum(chunks)
    entries = tuple(tuple(Fraction(int(totals[r][c]), n) for c in range(4)) for r in range(4))
    logger.debug(f"Выборка {rules.name}: n={n}, seed={seed}, потоков={workers}")
    return SampledTable(CGTable(entries), n, seed, workers)


# Стабилизаторные состояния двух кубитов

def _state_key(vector: np.ndarray) -> Tuple:
    """Ключ с точностью до глобальной фазы"""
    lead = next(v for v in vector if abs(v) > 1e-9)
    normalized = vector * (abs(lead) / lead)
    return tuple((round(v.real, 8) + 0.0, round(v.imag, 8) + 0.0) for v in normalized)


def stabilizer_states() -> List[np.ndarray]:
    """Орбита |00⟩ под H, S на каждом кубите и CNOT в обе стороны (60 состояний)"""
    identity = np.eye(2, dtype=complex)
    cnot_12 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    cnot_21 = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex)
    generators = [np.kron(HADAMARD, identity), np.kron(identity, HADAMARD),
                  np.kron(PHASE, identity), np.kron(identity, PHASE), cnot_12, cnot_21]

    start = np.array([1, 0, 0, 0], dtype=complex)
    found: Dict[Tuple, np.ndarray] = {_state_key(start): start}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for gate in generators:
            image = gate @ current
            key = _state_key(image)
            if key not in found:
                found[key] = image
                queue.append(image)
    logger.debug(f"Стабилизаторных состояний: {len(found)}")
    return list(found.values())


def stabilizer_state_tables() -> Tuple[CGTable, ...]:
    """Точные таблицы (элементы 0, ±1) всех двухкубитных стабилизаторных состояний"""
    tables = set()
    for vector in stabilizer_states():
        table = cg_table(TwoQubitState(np.outer(vector, vector.conj())))
        tables.add(CGTable(tuple(tuple(int(round(v)) for v in row) for row in table.as_array())))
    return tuple(sorted(tables, key=lambda t: t.entries))


def ruleset_to_json(rules: LHVRuleSet) -> Dict:
    return {
        'name': rules.name,
        'first': {axis: rule.describe() for axis, rule in zip(_AXES, rules.first)},
        'second': {axis: rule.describe() for axis, rule in zip(_AXES, rules.second)},
    }
