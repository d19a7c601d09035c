#!/usr/bin/env python3
"""
Stabilizer Bell Benchmark - проверка однокубитных операций на нелокальность
и на пригодность для универсальных вычислений (дистилляция магических состояний)

Команды:
    polytopes build|show  - перечисление граней LHV-политопа и политопа Клиффорда
    analyze               - полный анализ канала (CHSH, пары I2222/β, вердикт, анцилла)
    scan                  - сетка и пороги для зашумленного фазового гейта
    verify                - проверка всех утверждений (переписи граней, пары, разложения)
    lhv                   - модель с общими случайными битами для |Φ⟩

Коды выхода: 0 - успех, 1 - проверка не прошла, 2 - некорректный ввод.
"""

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from core.channels import (Channel, channel_from_json, channel_table, load_channel, random_channel,
                           random_unital_channel)
from core.config_manager import ConfigManager, Tolerances
from core.distill import prepare_ancilla
from core.errors import (BenchmarkError, CacheError, ClassificationError, GeometryError,
                         InvalidChannelError, InvalidStateError, PostselectionError, ThresholdError)
from core.geometry import RationalVector, lp_membership
from core.lhv_simulator import exact_table, phi_ruleset, ruleset_to_json, sample_table, stabilizer_state_tables
from core.logger import logger, set_level
from core.polytopes import (FacetClass, build_clifford_polytope,
                            build_lhv_polytope, cache_for, check_vertex_validity, facet_to_json,
                            halfspace_from_facet, table_point)
from core import reports
from core.witness import (Criterion, Family, FacetLibrary, chsh_scan, decompose_3322, most_violated,
                          pairing_difference, sweep, threshold_scan, twirl_check, uqc_witness,
                          verify_theorem1)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID_INPUT = 2

THETA_HELP = ('угол фазового гейта U_z(θ)=diag(1, e^{iθ}) в радианах; '
              'π/8-гейт - это U_z(π/4), т.е. --theta 0.7853981634')


class BenchmarkRunner:
    """Выполнение команд CLI поверх модулей core"""

    def __init__(self, config: ConfigManager, tolerances: Tolerances, cache_dir: Path,
                 output_format: str = 'json'):
        self.config = config
        self.tolerances = tolerances
        self.cache = cache_for(cache_dir)
        self.output_format = output_format
        self._library: Optional[FacetLibrary] = None

    @property
    def library(self) -> FacetLibrary:
        if self._library is None:
            self._library = FacetLibrary.build(self.cache, self.tolerances)
        return self._library

    def emit(self, document, text: Optional[str] = None):
        if self.output_format == 'text' and text is not None:
            print(text)
        else:
            print(reports.dumps(document))

    # polytopes

    def polytopes_build(self, refresh: bool = False) -> int:
        lhv = build_lhv_polytope(self.cache, refresh)
        clifford = build_clifford_polytope(self.cache, refresh)
        summary = f"{lhv.census_string()}, {clifford.census_string()}"
        ok = lhv.census_matches() and clifford.census_matches()
        self.emit({
            'summary': summary,
            'census_ok': ok,
            'lhv': {'facets': len(lhv.facets), 'census': _census_json(lhv.census()), 'hash': lhv.polytope_hash,
                    'from_cache': lhv.from_cache},
            'clifford': {'facets': len(clifford.facets), 'census': _census_json(clifford.census()),
                         'hash': clifford.polytope_hash, 'from_cache': clifford.from_cache},
        }, summary)
        if not ok:
            logger.error(f"Перепись граней не совпадает с ожидаемой: {summary}")
        return EXIT_OK if ok else EXIT_FAILURE

    def polytopes_show(self, kind: str, klass: Optional[str]) -> int:
        data = self.library.lhv if kind == 'lhv' else self.library.clifford
        facets = data.facets if klass is None else data.facets_of(FacetClass(klass))
        self.emit({'polytope': data.kind.value, 'hash': data.polytope_hash,
                   'facets': [facet_to_json(f) for f in facets]},
                  '\n'.join(f"{f.klass.value:6s} {f.describe()} ≥ 0" for f in facets))
        return EXIT_OK

    # analyze

    def analyze(self, channel: Channel) -> int:
        library = self.library
        table = channel_table(channel)
        chsh_reports = chsh_scan(channel, library)
        theorem = verify_theorem1(channel, library)
        verdict = uqc_witness(channel, library)

        ancilla = None
        if verdict.measurement is not None:
            try:
                ancilla = prepare_ancilla(channel, verdict.measurement, self.tolerances.octahedron_tol)
            except PostselectionError as e:
                logger.warning(f"Анцилла не приготовлена: {e}")

        chsh_worst = most_violated(chsh_reports)
        document = {
            'channel': channel.label,
            'table': reports.table_to_json(table),
            'chsh': {
                'violated': sum(r.violated for r in chsh_reports),
                'most_violated': reports.violation_to_json(chsh_worst),
            },
            'theorem1': reports.theorem1_to_json(theorem),
            'uqc': reports.verdict_to_json(verdict),
            'ancilla': reports.ancilla_to_json(ancilla),
            'polytope_hashes': {'lhv': library.lhv.polytope_hash, 'clifford': library.clifford.polytope_hash},
        }
        text = (f"{channel.label}: CHSH нарушено {document['chsh']['violated']}/72, "
                f"вердикт {verdict.kind.value}"
                + (f", Π = {verdict.measurement.describe()}" if verdict.measurement else '')
                + (f", запас октаэдра {ancilla.octahedron_margin:.6f}" if ancilla else ''))
        self.emit(document, text)
        return EXIT_OK

    # scan

    def scan(self, family: Family, theta: float, criteria: List[Criterion], lo: Optional[float],
             hi: Optional[float], points: int, plot: Optional[Path]) -> int:
        default_lo, default_hi = family.default_range
        lo = default_lo if lo is None else lo
        hi = default_hi if hi is None else hi
        rows = sweep(family, theta, lo, hi, points, self.library)
        thresholds = [threshold_scan(family, theta, c, self.library, self.tolerances.scan_tol, lo, hi)
                      for c in criteria]

        if plot is not None:
            reports.plot_sweep(rows, plot, f"{family.value}, θ = {theta:.6g}", family.parameter, thresholds)

        if self.output_format == 'csv':
            print(reports.sweep_to_csv(rows), end='')
            for t in thresholds:
                logger.info(f"{t.criterion.value}: {t.parameter}* = {t.critical:.10f}")
        else:
            self.emit({'sweep': reports.sweep_to_json(rows),
                       'thresholds': [reports.threshold_to_json(t) for t in thresholds]},
                      '\n'.join(f"{t.criterion.value}: {t.parameter}* = {t.critical:.10f}" for t in thresholds))
        return EXIT_OK

    # verify

    def verify(self, samples: int, seed: int) -> int:
        checks: Dict[str, bool] = {}
        details: Dict[str, object] = {}
        library = self.library

        checks['lhv_census'] = library.lhv.census_matches()
        checks['clifford_census'] = library.clifford.census_matches()
        details['census'] = f"{library.lhv.census_string()}, {library.clifford.census_string()}"

        checks['vertex_validity'] = check_vertex_validity(library.lhv) and check_vertex_validity(library.clifford)
        checks['clifford_inside_lhv'] = all(f.value(t) >= 0 for f in library.lhv.facets
                                            for t in library.clifford.vertices)

        try:
            pairing = library.pairing
            checks['pairing_bijection'] = len(pairing) == 72 and all(
                _difference_is_tight(pairing_difference(f, b)) for f, b in pairing.items())
        except ClassificationError as e:
            logger.error(f"Пары I2222 ↔ β: {e}")
            checks['pairing_bijection'] = False

        decomposed = 0
        for facet in library.i3322:
            try:
                decompose_3322(facet, library.chsh)
                decomposed += 1
            except ClassificationError as e:
                logger.error(str(e))
        checks['i3322_decomposition'] = decomposed == len(library.i3322) == 576
        details['i3322_decomposed'] = decomposed

        stabilizer_tables = stabilizer_state_tables()
        inside = sum(lp_membership(table_point(t), library.lhv.vpoly).inside for t in stabilizer_tables)
        checks['stabilizer_locality'] = inside == len(stabilizer_tables) == 60
        details['stabilizer_inside'] = f"{inside}/{len(stabilizer_tables)}"

        checks['twirl'] = twirl_check()

        rng = np.random.Generator(np.random.Philox(seed))
        theorem_ok, tsirelson_ok = _random_channel_checks(library, rng, samples)
        checks['theorem1_random_channels'] = theorem_ok
        checks['tsirelson'] = tsirelson_ok
        details['random_channels'] = samples

        mixtures = self.config.getint('Verify', 'clifford_mixtures', 1000)
        checks['membership_certificates'] = _certificate_checks(library, rng, mixtures)
        details['clifford_mixtures'] = mixtures

        for name, ok in checks.items():
            (logger.info if ok else logger.error)(f"{'✅' if ok else '❌'} {name}")
        passed = all(checks.values())
        self.emit({'passed': passed, 'checks': checks, 'details': details,
                   'seed': seed, 'generator': 'numpy.Philox'},
                  '\n'.join(f"{'✅' if ok else '❌'} {name}" for name, ok in checks.items())
                  + f"\n{details['census']}; стабилизаторные состояния {details['stabilizer_inside']}")
        return EXIT_OK if passed else EXIT_FAILURE

    # lhv

    def lhv(self, samples: int, seed: int, workers: int, stabilizer_orbit: bool) -> int:
        rules = phi_ruleset()
        exact = exact_table(rules)
        sampled = sample_table(rules, samples, seed, workers)
        deviation = float(np.abs(sampled.table.as_array() - exact.as_array()).max())
        document = {
            'ruleset': ruleset_to_json(rules),
            'exact_table': reports.table_to_json(exact),
            'sampled': reports.sampled_to_json(sampled),
            'max_deviation': deviation,
        }
        lines = [f"точная таблица: XX={exact.expectation('XX')}, YY={exact.expectation('YY')}, "
                 f"ZZ={exact.expectation('ZZ')}",
                 f"выборка n={samples}: максимальное отклонение {deviation:.5f}"]
        if stabilizer_orbit:
            tables = stabilizer_state_tables()
            vpoly = build_lhv_polytope(self.cache).vpoly
            inside = sum(lp_membership(table_point(t), vpoly).inside for t in tables)
            document['stabilizer_orbit'] = {'inside': inside, 'total': len(tables)}
            lines.append(f"{inside}/{len(tables)} inside LHV polytope")
        self.emit(document, '\n'.join(lines))
        return EXIT_OK


def _census_json(census) -> Dict[str, int]:
    return {k.value: v for k, v in census.items()}


def _difference_is_tight(difference) -> bool:
    others = [v for r, row in enumerate(difference) for c, v in enumerate(row) if (r, c) != (0, 0) and v]
    return difference[0][0] == -1 and len(others) == 1 and abs(others[0]) == 1


def _random_channel_checks(library: FacetLibrary, rng: np.random.Generator, samples: int):
    """value(β) ≤ value(I2222) для всех пар и граница Цирельсона на случайных каналах"""
    chsh = np.array([f.coeffs for f in library.chsh], dtype=float)
    betas = np.array([library.pairing[f].coeffs for f in library.chsh], dtype=float)
    theorem_ok, lowest = True, math.inf
    for i in range(samples):
        channel = random_channel(rng, kraus_rank=1 + i % 4) if i % 2 else random_unital_channel(rng, 1 + i % 5)
        table = channel_table(channel).as_array()
        chsh_values = np.einsum('frc,rc->f', chsh, table)
        beta_values = np.einsum('frc,rc->f', betas, table)
        if np.any(beta_values > chsh_values + 1e-9):
            logger.error(f"Нарушение value(β) ≤ value(I2222) на {channel.label}")
            theorem_ok = False
        lowest = min(lowest, float(chsh_values.min()))
    tsirelson_ok = lowest >= 2 - 2 * math.sqrt(2) - 1e-9
    logger.info(f"Минимум I2222 по {samples} каналам: {lowest:.6f} (граница {2 - 2 * math.sqrt(2):.6f})")
    return theorem_ok, tsirelson_ok


def _certificate_checks(library: FacetLibrary, rng: np.random.Generator, count: int) -> bool:
    """Случайные смеси Клиффордов внутри; сдвинутые по нормали β - снаружи"""
    vertices = library.clifford.vpoly.vertices
    betas = library.betas
    for _ in range(count):
        raw = rng.integers(0, 7, size=len(vertices))
        raw[rng.integers(len(vertices))] += 1
        weights = [Fraction(int(v), int(raw.sum())) for v in raw]
        point = [sum(w * v[i] for w, v in zip(weights, vertices)) for i in range(vertices[0].dim)]
        certificate = lp_membership(point, library.clifford.vpoly)
        if not certificate.inside or not certificate.verify(point, library.clifford.vpoly):
            return False

        beta = betas[int(rng.integers(len(betas)))]
        halfspace = halfspace_from_facet(beta.coeffs)
        normal = halfspace.normal
        value = halfspace.value(point)
        step = Fraction(value + 1, sum(n * n for n in normal))
        shifted = RationalVector(tuple(x - step * n for x, n in zip(point, normal)))
        certificate = lp_membership(shifted.coords, library.clifford.vpoly)
        if certificate.inside or not certificate.verify(shifted.coords, library.clifford.vpoly):
            return False
    return True


def _channel_from_args(args, tol: float) -> Channel:
    if args.channel_file:
        return load_channel(args.channel_file, tol)
    if not args.family:
        raise InvalidChannelError("Нужен --channel-file или --family")
    parameter = 's' if args.family == Family.DEPHASED.value else 'p'
    value = getattr(args, parameter)
    if value is None:
        raise InvalidChannelError(f"Для семейства {args.family} нужен --{parameter}")
    return channel_from_json({'family': args.family, 'theta': args.theta, parameter: value}, tol)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default='benchmark_config.ini', help='Файл конфигурации INI')
    common.add_argument('--cache-dir', type=str, help='Директория кэша политопов')
    common.add_argument('--tol', type=float, help='Точность бисекции порогов (> 0)')
    common.add_argument('--format', choices=['json', 'csv', 'text'], default='json', help='Формат вывода')
    common.add_argument('--seed', type=int, help='Зерно генератора (numpy Philox)')
    common.add_argument('--samples', type=int, help='Число случайных каналов / розыгрышей')
    common.add_argument('--verbose', action='store_true', help='Подробное логирование')

    parser = argparse.ArgumentParser(
        description='Нелокальность и пригодность однокубитных операций для универсальных вычислений',
        epilog='Углы задаются в радианах. ' + THETA_HELP,
    )
    commands = parser.add_subparsers(dest='command', required=True)

    polytopes = commands.add_parser('polytopes', parents=[common], help='Грани LHV и Клиффорда')
    polytopes.add_argument('action', choices=['build', 'show'])
    polytopes.add_argument('--polytope', choices=['lhv', 'clifford'], default='clifford')
    polytopes.add_argument('--class', dest='klass', choices=[k.value for k in FacetClass])
    polytopes.add_argument('--force', action='store_true', help='Пересчитать, игнорируя кэш')

    for name, help_text in (('analyze', 'Полный анализ канала'), ('scan', 'Сетка и пороги')):
        sub = commands.add_parser(name, parents=[common], help=help_text)
        sub.add_argument('--channel-file', type=str, help='JSON канала (путь или строка)')
        sub.add_argument('--family', choices=[f.value for f in Family])
        sub.add_argument('--theta', type=float, default=math.pi / 4, help=THETA_HELP)
        sub.add_argument('--s', type=float, help='Сила дефазировки s ≥ 0')
        sub.add_argument('--p', type=float, help='Вероятность деполяризации p ∈ [0, 1]')
        if name == 'scan':
            sub.add_argument('--criterion', choices=[c.value for c in Criterion] + ['all'], default='all')
            sub.add_argument('--lo', type=float, help='Начало интервала параметра')
            sub.add_argument('--hi', type=float, help='Конец интервала параметра')
            sub.add_argument('--points', type=int, help='Число точек сетки')
            sub.add_argument('--plot', type=str, help='Сохранить график скана (PNG)')

    commands.add_parser('verify', parents=[common], help='Проверка всех утверждений')

    lhv = commands.add_parser('lhv', parents=[common], help='Модель с общими случайными битами')
    lhv.add_argument('--workers', type=int, help='Число потоков выборки')
    lhv.add_argument('--stabilizer-orbit', action='store_true', help='Проверить 60 стабилизаторных состояний')
    return parser


def run(args) -> int:
    config = ConfigManager(args.config)
    set_level('DEBUG' if args.verbose else config.get('General', 'log_level', 'INFO'))
    tolerances = config.tolerances().override(scan_tol=args.tol)
    cache_dir = Path(args.cache_dir) if args.cache_dir else config.cache_dir()
    runner = BenchmarkRunner(config, tolerances, cache_dir, args.format)
    seed = args.seed if args.seed is not None else config.getint('Sampling', 'seed', 20111)

    if args.command == 'polytopes':
        if args.action == 'build':
            return runner.polytopes_build(args.force)
        return runner.polytopes_show(args.polytope, args.klass)
    if args.command == 'analyze':
        return runner.analyze(_channel_from_args(args, tolerances.channel_tol))
    if args.command == 'scan':
        if not args.family:
            raise InvalidChannelError("Для scan нужно --family")
        criteria = list(Criterion) if args.criterion == 'all' else [Criterion(args.criterion)]
        points = args.points or config.getint('Scan', 'grid_points', 41)
        plot = Path(args.plot) if args.plot else None
        return runner.scan(Family(args.family), args.theta, criteria, args.lo, args.hi, points, plot)
    if args.command == 'verify':
        samples = args.samples if args.samples is not None else config.getint('Verify', 'random_channels', 10000)
        return runner.verify(samples, seed)
    if args.command == 'lhv':
        samples = args.samples if args.samples is not None else config.getint('Sampling', 'samples', 1000000)
        workers = args.workers or config.getint('Sampling', 'workers', 4)
        return runner.lhv(samples, seed, workers, args.stabilizer_orbit)
    return EXIT_INVALID_INPUT


def main(argv: Optional[List[str]] = None) -> int:
    """Главная функция"""
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (InvalidChannelError, InvalidStateError, ThresholdError) as e:
        logger.error(f"Некорректный ввод: {e}")
        return EXIT_INVALID_INPUT
    except (CacheError, ClassificationError, GeometryError) as e:
        logger.error(f"Проверка не прошла: {e}")
        return EXIT_FAILURE
    except BenchmarkError as e:
        logger.error(f"Некорректные параметры: {e}")
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
