#!/usr/bin/env python3
"""
Witness Test Tool

Проверяет слой решений: пары I2222 ↔ β, избыточность I3322, вердикт о
пригодности канала и пороги для зашумленного π/8-гейта.
"""

import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.channels import (DepolarizedPhaseGate, UnitalMixture, channel_table, identity_channel,
                           make_clifford_mixture, make_depolarized_phase_gate, make_unital_mixture,
                           make_unitary_channel, phase_gate, random_channel, random_unital_channel, total_depolarizing)
from core.clifford import clifford_by_name, enumerate_clifford_group, pauli_matrix
from core.distill import ParityMeasurement
from core.errors import ClassificationError, ThresholdError
from core.polytopes import (CANONICAL_BETA, CANONICAL_I2222, CANONICAL_I3322, FacetClass, PolytopeKind,
                            make_facet)
from core.witness import (Criterion, Family, UQCVerdict, VerdictKind, ViolationReport, chsh_scan, clifford_membership,
                          decompose_3322, evaluate_facet, most_violated, pairing_difference, rational_point,
                          recommend_measurement, scan_facets, sweep, theorem1_pair, threshold_scan, twirl_check,
                          uqc_witness, verify_theorem1, zero_locals)
from shared_cache import run_tests, shared_library

PI8_GATE = make_unitary_channel(phase_gate(math.pi / 4), label="pi/8")
SQRT_LN2 = math.sqrt(math.log(2))


def test_pairing_is_bijection():
    library = shared_library()
    pairing = library.pairing
    assert len(pairing) == 72
    assert set(pairing.values()) == set(library.betas)
    for chsh, beta in pairing.items():
        difference = pairing_difference(chsh, beta)
        assert difference[0][0] == -1
        others = [v for r, row in enumerate(difference) for c, v in enumerate(row) if (r, c) != (0, 0) and v]
        assert len(others) == 1 and abs(others[0]) == 1


def test_canonical_pair():
    library = shared_library()
    chsh = make_facet(CANONICAL_I2222, PolytopeKind.LHV)
    beta = theorem1_pair(chsh, library.betas)
    assert beta.coeffs == CANONICAL_BETA
    assert pairing_difference(chsh, beta) == ((-1, 0, 0, 0), (0, 0, 0, 0), (0, 0, 0, 0), (0, 0, 0, 1))


def test_recommended_measurement():
    beta = make_facet(CANONICAL_BETA, PolytopeKind.CLIFFORD)
    assert recommend_measurement(beta) == ParityMeasurement('Z', 'Z', 1)
    try:
        recommend_measurement(make_facet(CANONICAL_I2222, PolytopeKind.LHV))
    except ClassificationError:
        return
    raise AssertionError("Рекомендация для I2222 должна быть отклонена")


def test_i3322_decomposition():
    library = shared_library()
    facet = make_facet(CANONICAL_I3322, PolytopeKind.LHV)
    parts = decompose_3322(facet, library.chsh)
    assert len(parts) == 4
    assert all(weight == Fraction(1, 2) and g.klass is FacetClass.I2222 for weight, g in parts)
    target = zero_locals(facet.coeffs)
    for r in range(4):
        for c in range(4):
            assert sum(weight * g.coeffs[r][c] for weight, g in parts) == target[r][c]


def test_worked_i3322_decomposition():
    """I3322 без локальных членов = ½(A + B + C + D), каждый член - грань I2222"""
    expected = {
        ((2, 0, 0, 0), (0, 0, 0, 0), (0, 1, 1, 0), (0, -1, 1, 0)),
        ((2, 0, 0, 0), (0, 0, 1, -1), (0, 0, 1, 1), (0, 0, 0, 0)),
        ((2, 0, 0, 0), (0, 1, 0, -1), (0, 1, 0, 1), (0, 0, 0, 0)),
        ((2, 0, 0, 0), (0, 1, 1, 0), (0, 0, 0, 0), (0, -1, 1, 0)),
    }
    facet = make_facet(CANONICAL_I3322, PolytopeKind.LHV)
    assert zero_locals(facet.coeffs) == ((4, 0, 0, 0), (0, 1, 1, -1), (0, 1, 1, 1), (0, -1, 1, 0))
    parts = decompose_3322(facet, shared_library().chsh)
    assert {g.coeffs for _, g in parts} == expected
    assert [weight for weight, _ in parts] == [Fraction(1, 2)] * 4


def test_all_i3322_decompose():
    library = shared_library()
    assert len(library.i3322) == 576
    for facet in library.i3322:
        decompose_3322(facet, library.chsh)


def test_i3322_redundant_on_unital_tables():
    library = shared_library()
    rng = np.random.Generator(np.random.Philox(3322))
    facets = library.i3322[::24]
    for _ in range(10):
        table = channel_table(random_unital_channel(rng, 3))
        chsh_clean = not any(r.violated for r in scan_facets(library.chsh, table, 1e-12))
        for facet in facets:
            parts = decompose_3322(facet, library.chsh)
            value = float(evaluate_facet(facet, table))
            assert abs(value - sum(float(w * evaluate_facet(g, table)) for w, g in parts)) < 1e-12
            if chsh_clean:
                assert value >= -1e-12


def test_pi8_gate_violates_chsh_at_tsirelson():
    reports = chsh_scan(PI8_GATE, shared_library())
    worst = most_violated(reports)
    assert sum(r.violated for r in reports) == 1
    assert worst.facet.coeffs == CANONICAL_I2222
    assert abs(worst.value - (2 - 2 * math.sqrt(2))) < 1e-12


def test_theorem1_on_random_channels():
    library = shared_library()
    rng = np.random.Generator(np.random.Philox(2024))
    for i in range(40):
        channel = random_channel(rng, kraus_rank=1 + i % 4) if i % 2 else random_unital_channel(rng, 3)
        result = verify_theorem1(channel, library)
        assert result.holds
        for chsh, beta in result.pairs:
            assert beta.value <= chsh.value + 1e-9
            assert beta.violated


def test_identity_is_clifford_mixture():
    verdict = uqc_witness(identity_channel(), shared_library())
    assert verdict.kind is VerdictKind.CLIFFORD_MIXTURE
    assert verdict.weights == {'I': 1}
    assert verdict.separator is None
    table = channel_table(identity_channel())
    assert abs(evaluate_facet(make_facet(CANONICAL_BETA, PolytopeKind.CLIFFORD), table)) < 1e-12
    assert abs(evaluate_facet(make_facet(CANONICAL_I2222, PolytopeKind.LHV), table)) < 1e-12


def test_clifford_mixture_weights():
    channel = make_clifford_mixture({clifford_by_name('H'): Fraction(1, 3), clifford_by_name('S'): Fraction(2, 3)})
    verdict = uqc_witness(channel, shared_library())
    assert verdict.kind is VerdictKind.CLIFFORD_MIXTURE
    assert sum(verdict.weights.values()) == 1


def test_pi8_gate_verdict():
    verdict = uqc_witness(PI8_GATE, shared_library())
    assert verdict.kind is VerdictKind.BETA_VIOLATION
    assert verdict.violation.violated
    assert verdict.measurement == ParityMeasurement('Z', 'Z', 1)
    assert verdict.separator is not None


def _diagonal_collapse_channel(sigma: float):
    """Блок Паули-переноса со столбцом X = -σ(1,1,1)/√3 и нулевыми Y, Z"""
    phi = math.acos(-1 / math.sqrt(3))
    axis = (pauli_matrix('Y') - pauli_matrix('Z')) / math.sqrt(2)
    rotation = math.cos(phi / 2) * np.eye(2) - 1j * math.sin(phi / 2) * axis
    weights = {'I': (1 + sigma) / 4, 'X': (1 + sigma) / 4, 'Y': (1 - sigma) / 4, 'Z': (1 - sigma) / 4}
    terms = tuple((p, rotation @ (np.eye(2) if q == 'I' else pauli_matrix(q))) for q, p in weights.items())
    return make_unital_mixture(UnitalMixture(terms), label=f"collapse({sigma})")


def test_alpha_only_violation():
    """α-грань: 1 - 0.8√3 < 0, все β-грани ≥ 1 - 1.6/√3 > 0"""
    channel = _diagonal_collapse_channel(0.8)
    verdict = uqc_witness(channel, shared_library())
    assert verdict.kind is VerdictKind.ALPHA_VIOLATION
    assert verdict.violation.facet.klass is FacetClass.ALPHA
    assert abs(verdict.violation.value - (1 - 0.8 * math.sqrt(3))) < 1e-9
    assert verdict.measurement is None


def test_boundary_clifford_mixtures_stay_inside():
    """Смесь двух Клиффордов с float-весом лежит на ребре политопа"""
    library = shared_library()
    group = enumerate_clifford_group()
    rng = np.random.Generator(np.random.Philox(868))
    pairs = [('SSSHS', 'SHSS', 0.0869), ('SHS', 'SSSH', 0.5228)]
    for _ in range(40):
        a, b = rng.choice(len(group), size=2, replace=False)
        pairs.append((group[a].name, group[b].name, float(rng.uniform(0.01, 0.99))))
    for first, second, weight in pairs:
        channel = make_clifford_mixture({clifford_by_name(first): weight, clifford_by_name(second): 1 - weight})
        verdict = uqc_witness(channel, library)
        assert verdict.kind is VerdictKind.CLIFFORD_MIXTURE, (first, second, weight)
        assert verdict.certificate.distance <= library.tolerances.membership_tol
        point = rational_point(channel_table(channel), library.tolerances.rational_tol)
        assert verdict.certificate.verify(point.coords, library.clifford.vpoly)


def test_membership_agrees_with_facets_for_unital_channels():
    library = shared_library()
    rng = np.random.Generator(np.random.Philox(120))
    channels = [random_unital_channel(rng, 2 + i % 3) for i in range(30)]
    channels += [make_depolarized_phase_gate(DepolarizedPhaseGate(math.pi / 4, p)) for p in (0.1, 0.3, 0.45, 0.46, 0.8)]
    for channel in channels:
        table = channel_table(channel)
        violated = any(r.violated for r in scan_facets(library.clifford.facets, table,
                                                       library.tolerances.violation_tol))
        verdict = uqc_witness(channel, library)
        assert clifford_membership(table, library).inside == (not violated), channel.label
        assert (verdict.kind is VerdictKind.CLIFFORD_MIXTURE) == (not violated), channel.label
        if verdict.violation is not None:
            assert verdict.violation.violated


def test_verdict_rejects_unviolated_facet():
    library = shared_library()
    table = channel_table(PI8_GATE)
    outside = clifford_membership(table, library)
    beta = make_facet(CANONICAL_BETA, PolytopeKind.CLIFFORD)
    satisfied = next(f for f in library.betas if not ViolationReport.of(f, table).violated)
    UQCVerdict(VerdictKind.BETA_VIOLATION, outside, violation=ViolationReport.of(beta, table))
    for kind, report in ((VerdictKind.BETA_VIOLATION, ViolationReport.of(satisfied, table)),
                         (VerdictKind.ALPHA_VIOLATION, None),
                         (VerdictKind.CLIFFORD_MIXTURE, None)):
        try:
            UQCVerdict(kind, outside, violation=report)
        except ClassificationError:
            continue
        raise AssertionError(f"Вердикт {kind.value} должен быть отклонен")


def test_depolarized_between_thresholds_violates_beta_only():
    channel = make_depolarized_phase_gate(DepolarizedPhaseGate(math.pi / 4, 0.4))
    library = shared_library()
    assert most_violated(chsh_scan(channel, library)) is None
    assert uqc_witness(channel, library).kind is VerdictKind.BETA_VIOLATION


def test_total_depolarizing_is_inside():
    assert uqc_witness(total_depolarizing(), shared_library()).kind is VerdictKind.CLIFFORD_MIXTURE
    assert twirl_check()


def test_depolarized_thresholds():
    library = shared_library()
    chsh = threshold_scan(Family.DEPOLARIZED, math.pi / 4, Criterion.CHSH, library, tol=1e-7)
    beta = threshold_scan(Family.DEPOLARIZED, math.pi / 4, Criterion.BETA, library, tol=1e-7)
    assert abs(chsh.critical - (1 - 1 / math.sqrt(2))) < 1e-6
    assert abs(beta.critical - (1 - 1 / (2 * math.sqrt(2) - 1))) < 1e-6
    assert chsh.bracket_width <= 1e-7
    assert chsh.equivalent_p is None


def test_dephased_thresholds_coincide():
    library = shared_library()
    results = [threshold_scan(Family.DEPHASED, math.pi / 4, c, library, tol=1e-6) for c in Criterion]
    for result in results:
        assert abs(result.critical - SQRT_LN2) < 1e-5, result.criterion
    assert abs(results[0].equivalent_p - (1 - 1 / math.sqrt(2)) / 2) < 1e-5


def test_threshold_errors():
    library = shared_library()
    for lo, hi in ((0.5, 0.5), (0.9, 1.0)):
        try:
            threshold_scan(Family.DEPOLARIZED, math.pi / 4, Criterion.CHSH, library, tol=1e-3, lo=lo, hi=hi)
        except ThresholdError:
            continue
        raise AssertionError(f"Ожидалась ThresholdError для [{lo}, {hi}]")


def test_sweep_margins():
    rows = sweep(Family.DEPOLARIZED, math.pi / 4, 0.0, 1.0, 5, shared_library())
    assert [r.parameter for r in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert abs(rows[0].chsh_margin - (2 * math.sqrt(2) - 2)) < 1e-9
    assert [r.inside for r in rows] == [False, False, True, True, True]
    assert all(r.beta_margin >= r.chsh_margin - 1e-9 for r in rows)


if __name__ == '__main__':
    tests = [
        test_pairing_is_bijection,
        test_canonical_pair,
        test_recommended_measurement,
        test_i3322_decomposition,
        test_worked_i3322_decomposition,
        test_all_i3322_decompose,
        test_i3322_redundant_on_unital_tables,
        test_pi8_gate_violates_chsh_at_tsirelson,
        test_theorem1_on_random_channels,
        test_identity_is_clifford_mixture,
        test_clifford_mixture_weights,
        test_pi8_gate_verdict,
        test_alpha_only_violation,
        test_boundary_clifford_mixtures_stay_inside,
        test_membership_agrees_with_facets_for_unital_channels,
        test_verdict_rejects_unviolated_facet,
        test_depolarized_between_thresholds_violates_beta_only,
        test_total_depolarizing_is_inside,
        test_depolarized_thresholds,
        test_dephased_thresholds_coincide,
        test_threshold_errors,
        test_sweep_margins,
    ]
    sys.exit(0 if run_tests("Тестирование критериев", tests) else 1)
