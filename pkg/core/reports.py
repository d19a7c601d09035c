"""
Отчеты: JSON-документы для analyze/lhv/verify, CSV для сканов, график скана.
"""

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

from .clifford import CGTable
from .distill import AncillaReport
from .geometry import SeparationCertificate
from .logger import logger
from .lhv_simulator import SampledTable
from .witness import SweepRow, Theorem1Result, ThresholdResult, UQCVerdict, ViolationReport
from .polytopes import facet_to_json

SWEEP_COLUMNS = ('parameter', 'chsh_margin', 'beta_margin', 'inside')


def _number(value):
    """Fraction -> 'p/q' (точно), прочие числа -> float"""
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else int(value)
    if isinstance(value, int):
        return value
    return float(value)


def table_to_json(table: CGTable) -> List[List]:
    return [[_number(v) for v in row] for row in table.entries]


def violation_to_json(report: Optional[ViolationReport]) -> Optional[Dict]:
    if report is None:
        return None
    return {
        'facet': facet_to_json(report.facet),
        'inequality': report.facet.describe(),
        'value': report.value,
        'violated': report.violated,
        'margin': report.margin,
    }


def certificate_to_json(certificate: SeparationCertificate) -> Dict:
    if certificate.inside:
        document = {'inside': True, 'weights': [_number(w) for w in certificate.weights]}
        if certificate.distance:
            document['distance'] = _number(certificate.distance)
        return document
    return {
        'inside': False,
        'separator': {'normal': list(certificate.separator.normal), 'offset': certificate.separator.offset},
        'separation_depth': _number(certificate.depth),
    }


def verdict_to_json(verdict: UQCVerdict) -> Dict:
    document = {
        'verdict': verdict.kind.value,
        'certificate': certificate_to_json(verdict.certificate),
    }
    if verdict.weights is not None:
        document['weights'] = {name: _number(w) for name, w in verdict.weights.items()}
    if verdict.violation is not None:
        document['violation'] = violation_to_json(verdict.violation)
    if verdict.measurement is not None:
        document['recommended_measurement'] = verdict.measurement.to_json()
    return document


def theorem1_to_json(result: Theorem1Result) -> Dict:
    return {
        'holds': result.holds,
        'violated_chsh': len(result.violated_chsh),
        'most_violated_beta': violation_to_json(result.witness),
        'pairs': [{'chsh': violation_to_json(chsh), 'beta': violation_to_json(beta)}
                  for chsh, beta in result.pairs],
    }


def threshold_to_json(result: ThresholdResult) -> Dict:
    document = {
        'family': result.family.value,
        'criterion': result.criterion.value,
        'theta': result.theta,
        'parameter': result.parameter,
        'critical': result.critical,
        'bracket': list(result.bracket),
        'bracket_width': result.bracket_width,
        'iterations': result.iterations,
    }
    if result.equivalent_p is not None:
        document['equivalent_p'] = result.equivalent_p
    return document


def ancilla_to_json(report: Optional[AncillaReport]) -> Optional[Dict]:
    return report.to_json() if report is not None else None


def sampled_to_json(sampled: SampledTable) -> Dict:
    return {
        'table': [[float(v) for v in row] for row in sampled.table.entries],
        'n': sampled.samples,
        'seed': sampled.seed,
        'workers': sampled.workers,
        'generator': sampled.generator,
    }


def dumps(document: Dict) -> str:
    """Детерминированный JSON (сортировка ключей)"""
    return json.dumps(document, indent=2, ensure_ascii=False, sort_keys=True)


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([f"{row.parameter:.10g}", f"{row.chsh_margin:.12g}",
                         f"{row.beta_margin:.12g}", int(row.inside)])
    return buffer.getvalue()


def sweep_to_json(rows: Sequence[SweepRow]) -> List[Dict]:
    return [{'parameter': r.parameter, 'chsh_margin': r.chsh_margin,
             'beta_margin': r.beta_margin, 'inside': r.inside} for r in rows]


def plot_sweep(rows: Sequence[SweepRow], output: Path, title: str, parameter: str,
               thresholds: Sequence[ThresholdResult] = ()) -> Path:
    """Запасы CHSH и β вдоль скана; вертикальные линии - найденные пороги"""
    output = Path(output)
    fig, ax = plt.subplots(figsize=(8, 5))
    xs = [r.parameter for r in rows]
    ax.plot(xs, [r.chsh_margin for r in rows], color='#FF6B6B', label='CHSH (I2222)')
    ax.plot(xs, [r.beta_margin for r in rows], color='#45B7D1', label='β')
    outside = [r.parameter for r in rows if not r.inside]
    if outside:
        ax.axvspan(min(outside), max(outside), alpha=0.15, color='gray', label='вне политопа Клиффорда')
    for threshold in thresholds:
        ax.axvline(threshold.critical, linestyle='--', color='black', linewidth=0.8)
        ax.text(threshold.critical, ax.get_ylim()[1], f" {threshold.criterion.value}", fontsize=8, va='top')
    ax.axhline(0, color='black', linewidth=0.5)
    ax.set_xlabel(parameter)
    ax.set_ylabel('запас нарушения (-значение грани)')
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, dpi=150, bbox_inches='tight')
    plt.close(fig)
    logger.info(f"График сохранен: {output}")
    return output
