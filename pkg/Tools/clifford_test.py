#!/usr/bin/env python3
"""
Clifford Test Tool

Проверяет группу Клиффорда, CG-таблицы и перемаркировки таблиц.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.channels import channel_table, identity_channel, make_unitary_channel
from core.clifford import (MATRIX_TOL, CGTable, PauliLabel, clifford_by_name, clifford_from_matrix, compose,
                           composition_table, conjugation_action, enumerate_clifford_group, inverse, phi_state,
                           cg_table, maximally_mixed_state, relabel_table, signed_action_of)
from core.config_manager import Tolerances
from core.errors import InvalidStateError
from shared_cache import run_tests


def test_group_has_24_elements():
    group = enumerate_clifford_group()
    assert len(group) == 24
    assert group[0].name == 'I'
    assert len({c.signed_action for c in group}) == 24


def test_composition_table_is_latin_square():
    table = composition_table()
    for row in table:
        assert sorted(row) == list(range(24))
    for column in zip(*table):
        assert sorted(column) == list(range(24))


def test_hadamard_and_phase_actions():
    h = clifford_by_name('H')
    assert conjugation_action(h, 'X') == (1, PauliLabel.Z)
    assert conjugation_action(h, 'Y') == (-1, PauliLabel.Y)
    assert conjugation_action(h, 'Z') == (1, PauliLabel.X)

    s = clifford_by_name('S')
    assert conjugation_action(s, 'X') == (1, PauliLabel.Y)
    assert conjugation_action(s, 'Y') == (-1, PauliLabel.X)


def test_matrix_tolerance():
    """Сдвиг фазы на 1e-10 выходит за matrix_tol, но проходит с грубым допуском"""
    h = clifford_by_name('H')
    assert MATRIX_TOL == Tolerances().matrix_tol == 1e-12
    assert clifford_from_matrix(np.exp(0.3j) * h.matrix).name == 'H'
    noisy = h.matrix @ np.diag([1, np.exp(1e-10j)])
    try:
        clifford_from_matrix(noisy)
    except ValueError:
        pass
    else:
        raise AssertionError("Зашумленная матрица принята при matrix_tol")
    assert clifford_from_matrix(noisy, tol=1e-8).name == 'H'
    assert signed_action_of(noisy, tol=1e-8) == h.signed_action


def test_inverse_and_paulis():
    for element in enumerate_clifford_group():
        assert compose(element, inverse(element)).name == 'I'
    paulis = [c for c in enumerate_clifford_group() if c.is_pauli()]
    assert len(paulis) == 4
    assert clifford_by_name('X').is_pauli()


def test_rotation_matrix_is_proper():
    for element in enumerate_clifford_group():
        r = element.rotation_matrix()
        assert np.array_equal(r @ r.T, np.eye(3, dtype=int))
        assert round(np.linalg.det(r)) == 1


def test_phi_table():
    table = cg_table(phi_state())
    assert abs(table.expectation('XX') - 1) < 1e-12
    assert abs(table.expectation('YY') + 1) < 1e-12
    assert abs(table.expectation('ZZ') - 1) < 1e-12
    assert np.allclose(table.local_entries(), 0)

    mixed = cg_table(maximally_mixed_state())
    assert np.allclose(mixed.as_array(), np.diag([1, 0, 0, 0]))


def test_expectation_order():
    """'XY' - σ_x на первом (столбец), σ_y на втором (строка)"""
    entries = [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0.5, 0, 0], [0, 0, 0, 0]]
    table = CGTable.from_array(entries)
    assert table.expectation('XY') == 0.5
    assert table.expectation('YX') == 0


def test_table_validation():
    for bad in ([[2, 0, 0, 0]] + [[0] * 4] * 3, [[1, 0, 0, 0], [0, 1.5, 0, 0]] + [[0] * 4] * 2):
        try:
            CGTable.from_array(bad)
        except InvalidStateError:
            continue
        raise AssertionError(f"Таблица должна быть отклонена: {bad}")


def test_relabeling_matches_composed_unitary():
    """Таблица канала A∘𝕀∘B совпадает с перемаркировкой таблицы тождества"""
    identity_table = channel_table(identity_channel())
    group = enumerate_clifford_group()
    for left in group[::5]:
        for right in group[::3]:
            expected = channel_table(make_unitary_channel(left.matrix @ right.matrix)).as_array()
            relabeled = relabel_table(identity_table, left, right).as_array()
            assert np.allclose(expected, relabeled, atol=1e-10), (left.name, right.name)


if __name__ == '__main__':
    tests = [
        test_group_has_24_elements,
        test_composition_table_is_latin_square,
        test_hadamard_and_phase_actions,
        test_matrix_tolerance,
        test_inverse_and_paulis,
        test_rotation_matrix_is_proper,
        test_phi_table,
        test_expectation_order,
        test_table_validation,
        test_relabeling_matches_composed_unitary,
    ]
    sys.exit(0 if run_tests("Тестирование алгебры Клиффорда", tests) else 1)
