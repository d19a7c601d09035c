#!/usr/bin/env python3
"""
Ancilla Test Tool

Проверяет приготовление анциллы: измерение четности на состоянии Чоя,
стабилизаторное декодирование и положение относительно октаэдра.
"""

import itertools
import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.channels import (DephasedPhaseGate, compose, identity_channel, make_dephased_phase_gate,
                           make_unitary_channel, phase_gate, random_channel, total_depolarizing)
from core.clifford import clifford_by_name
from core.distill import (OctahedronRegion, ParityMeasurement, ancilla_circuit, octahedron_check,
                          prepare_ancilla, success_probabilities)
from core.errors import PostselectionError
from core.witness import recommend_measurement, verify_theorem1
from shared_cache import run_tests, shared_library

ZZ = ParityMeasurement('Z', 'Z', 1)
PI8_GATE = make_unitary_channel(phase_gate(math.pi / 4), label="pi/8")


def test_octahedron_regions():
    assert octahedron_check((1, 0, 0))[0] is OctahedronRegion.BOUNDARY
    region, margin = octahedron_check((0.5, 0.5, 0.5))
    assert region is OctahedronRegion.OUTSIDE and abs(margin - 0.5) < 1e-12
    assert octahedron_check((0.1, -0.1, 0.1))[0] is OctahedronRegion.INSIDE


def test_measurement_validation():
    for args in (('I', 'Z', 1), ('X', 'Z', 0)):
        try:
            ParityMeasurement(*args)
        except ValueError:
            continue
        raise AssertionError(f"Измерение {args} должно быть отклонено")
    assert ZZ.opposite() == ParityMeasurement('Z', 'Z', -1)
    assert ZZ.describe() == "½(𝕀 + σ_z⊗σ_z)"


def test_decoder_maps_eigenspace_to_ancilla():
    """U Π U† = 𝕀 ⊗ |0⟩⟨0| для всех 18 измерений"""
    target = np.kron(np.eye(2), np.diag([1, 0]))
    for j, k, sign in itertools.product('XYZ', 'XYZ', (1, -1)):
        m = ParityMeasurement(j, k, sign)
        u = ancilla_circuit(m)
        assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
        assert np.allclose(u @ m.projector() @ u.conj().T, target, atol=1e-12), m.describe()


def test_identity_gives_stabilizer_state():
    report = prepare_ancilla(identity_channel(), ZZ)
    assert np.allclose(report.bloch, (1, 0, 0), atol=1e-12)
    assert report.region is OctahedronRegion.BOUNDARY
    assert not report.useful
    assert abs(report.success_prob - 1) < 1e-12


def test_pi8_gate_gives_magic_state():
    report = prepare_ancilla(PI8_GATE, ZZ)
    c = 1 / math.sqrt(2)
    assert np.allclose(report.bloch, (c, c, 0), atol=1e-12)
    assert report.useful
    assert abs(report.octahedron_margin - (math.sqrt(2) - 1)) < 1e-12


def test_dephasing_shrinks_ancilla():
    s = 0.5
    report = prepare_ancilla(make_dephased_phase_gate(DephasedPhaseGate(math.pi / 4, s)), ZZ)
    decay = math.exp(-s ** 2 / 2)
    assert abs(report.octahedron_margin - (math.sqrt(2) * decay - 1)) < 1e-12
    assert abs(report.success_prob - 1) < 1e-12


def test_ancilla_threshold_matches_chsh():
    """Запас октаэдра √2·e^{-s²/2} - 1 > 0 ровно при s² < ln 2"""
    def useful(s: float) -> bool:
        return prepare_ancilla(make_dephased_phase_gate(DephasedPhaseGate(math.pi / 4, s)), ZZ).octahedron_margin > 0

    c = 1 / math.sqrt(2)
    assert np.allclose(prepare_ancilla(make_dephased_phase_gate(DephasedPhaseGate(math.pi / 4, 0.0)), ZZ).bloch,
                       (c, c, 0), atol=1e-12)
    lo, hi = 0.0, 3.0
    assert useful(lo) and not useful(hi)
    while hi - lo > 1e-9:
        middle = (lo + hi) / 2
        if useful(middle):
            lo = middle
        else:
            hi = middle
    assert abs((lo + hi) / 2 - math.sqrt(math.log(2))) < 2e-9


def test_zero_probability_outcome():
    assert np.allclose(success_probabilities(identity_channel(), 'Z', 'Z'), (1, 0), atol=1e-12)
    try:
        prepare_ancilla(identity_channel(), ZZ.opposite())
    except PostselectionError:
        pass
    else:
        raise AssertionError("Ожидалась PostselectionError")

    report = prepare_ancilla(total_depolarizing(), ParityMeasurement('X', 'Y', -1))
    assert abs(report.success_prob - 0.5) < 1e-12
    assert report.region is OctahedronRegion.INSIDE


def test_outcome_probabilities_sum_to_one():
    rng = np.random.Generator(np.random.Philox(5))
    for _ in range(10):
        channel = random_channel(rng, kraus_rank=2)
        for j, k in itertools.product('XYZ', repeat=2):
            plus, minus = success_probabilities(channel, j, k)
            assert abs(plus + minus - 1) < 1e-12


def test_violated_beta_gives_useful_ancilla():
    """Нарушенная β-грань и рекомендованное Π дают анциллу вне октаэдра"""
    library = shared_library()
    rng = np.random.Generator(np.random.Philox(99))
    checked = 0
    for i in range(60):
        channel = random_channel(rng, kraus_rank=1 + i % 2)
        witness = verify_theorem1(channel, library).witness
        if witness is None:
            continue
        report = prepare_ancilla(channel, recommend_measurement(witness.facet))
        assert report.octahedron_margin > 0, channel.label
        checked += 1
    assert checked > 0


def test_diagonal_clifford_rotates_ancilla():
    """Клиффорд, сохраняющий Z, до канала поворачивает анциллу вокруг оси z"""
    channel = make_dephased_phase_gate(DephasedPhaseGate(math.pi / 4, 0.3))
    base = prepare_ancilla(channel, ZZ)
    rotated = prepare_ancilla(compose(channel, make_unitary_channel(clifford_by_name('S').matrix)), ZZ)
    assert abs(rotated.octahedron_margin - base.octahedron_margin) < 1e-12
    assert np.allclose(rotated.bloch, (-base.bloch[1], base.bloch[0], base.bloch[2]), atol=1e-12)


if __name__ == '__main__':
    tests = [
        test_octahedron_regions,
        test_measurement_validation,
        test_decoder_maps_eigenspace_to_ancilla,
        test_identity_gives_stabilizer_state,
        test_pi8_gate_gives_magic_state,
        test_dephasing_shrinks_ancilla,
        test_ancilla_threshold_matches_chsh,
        test_zero_probability_outcome,
        test_outcome_probabilities_sum_to_one,
        test_violated_beta_gives_useful_ancilla,
        test_diagonal_clifford_rotates_ancilla,
    ]
    sys.exit(0 if run_tests("Тестирование приготовления анциллы", tests) else 1)
