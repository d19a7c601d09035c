#!/usr/bin/env python3
"""
LHV Simulator Test Tool

Проверяет модель с общими случайными битами для |Φ⟩, воспроизводимость
Монте-Карло и локальность двухкубитных стабилизаторных состояний.
"""

import itertools
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.clifford import cg_table, phi_state
from core.errors import BenchmarkError
from core.geometry import VPolytope, lp_membership
from core.lhv_simulator import (GENERATOR_ID, OutputRule, SharedBits, constant_ruleset, exact_table, phi_ruleset,
                                ruleset_to_json, sample_table, stabilizer_state_tables, stabilizer_states)
from core.polytopes import LocalConfigBits, lhv_vertex, lhv_vertices, table_point
from shared_cache import run_tests


def test_output_rules():
    bits = SharedBits(1, 0, 1)
    assert OutputRule(0).output(bits) == -1
    assert OutputRule(1).output(bits) == 1
    assert OutputRule(1, 1).output(bits) == -1
    assert OutputRule(None, 1).output(bits) == -1
    assert OutputRule(2, 1).describe() == "(-1)^(r3 + 1)"
    try:
        OutputRule(3)
    except ValueError:
        return
    raise AssertionError("Правило с битом r4 должно быть отклонено")


def test_phi_ruleset_is_exact():
    table = exact_table(phi_ruleset())
    assert table.expectation('XX') == 1
    assert table.expectation('YY') == -1
    assert table.expectation('ZZ') == 1
    assert table.expectation('XY') == 0 and table.expectation('IZ') == 0
    assert table.is_exact()
    assert np.allclose(table.as_array(), cg_table(phi_state()).as_array(), atol=1e-12)


def test_constant_rules_reproduce_vertices():
    for values in itertools.product((0, 1), repeat=6):
        bits = LocalConfigBits(*values)
        assert exact_table(constant_ruleset(bits)) == lhv_vertex(bits)


def test_sampling_is_reproducible():
    first = sample_table(phi_ruleset(), 20000, seed=20111, workers=3)
    second = sample_table(phi_ruleset(), 20000, seed=20111, workers=3)
    other = sample_table(phi_ruleset(), 20000, seed=7, workers=3)
    assert first.table == second.table
    assert first.table != other.table
    assert first.generator == GENERATOR_ID
    assert first.table.expectation('XX') == 1 and first.table.expectation('YY') == -1


def test_sampling_converges():
    sampled = sample_table(phi_ruleset(), 1_000_000, seed=20111, workers=4)
    deviation = np.abs(sampled.table.as_array() - exact_table(phi_ruleset()).as_array()).max()
    assert deviation < 0.005
    assert sampled.table.entries[0][0] == Fraction(1)


def test_sampling_rejects_empty_run():
    try:
        sample_table(phi_ruleset(), 0, seed=1)
    except BenchmarkError:
        return
    raise AssertionError("Ожидалась BenchmarkError")


def test_sixty_stabilizer_states():
    states = stabilizer_states()
    assert len(states) == 60
    assert all(abs(np.linalg.norm(v) - 1) < 1e-12 for v in states)
    tables = stabilizer_state_tables()
    assert len(tables) == 60
    assert all(v in (-1, 0, 1) for t in tables for row in t.entries for v in row)


def test_stabilizer_states_are_local():
    lhv = VPolytope(tuple(table_point(t) for t in lhv_vertices()))
    for table in stabilizer_state_tables():
        certificate = lp_membership(table_point(table), lhv)
        assert certificate.inside, table.entries


def test_ruleset_json():
    document = ruleset_to_json(phi_ruleset())
    assert document['name'] == 'phi'
    assert document['second']['Y'] == "(-1)^(r2 + 1)"
    assert document['first']['X'] == "(-1)^(r1)"


if __name__ == '__main__':
    tests = [
        test_output_rules,
        test_phi_ruleset_is_exact,
        test_constant_rules_reproduce_vertices,
        test_sampling_is_reproducible,
        test_sampling_converges,
        test_sampling_rejects_empty_run,
        test_sixty_stabilizer_states,
        test_stabilizer_states_are_local,
        test_ruleset_json,
    ]
    sys.exit(0 if run_tests("Тестирование LHV-модели", tests) else 1)
