import configparser
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import BenchmarkError
from .logger import logger


@dataclass(frozen=True)
class Tolerances:
    """Численные допуски, общие для всех модулей"""
    matrix_tol: float = 1e-12      # знаковое действие Клиффорда на матрицах Паули
    channel_tol: float = 1e-10     # CP/TP проверки каналов
    violation_tol: float = 1e-12   # порог нарушения грани
    rational_tol: float = 1e-12    # рационализация цепными дробями для LP
    membership_tol: float = 1e-9   # расстояние до политопа Клиффорда, считаемое ошибкой округления
    octahedron_tol: float = 1e-12  # граница стабилизаторного октаэдра
    scan_tol: float = 1e-9         # ширина интервала бисекции
    scan_max_iterations: int = 60

    def __post_init__(self):
        for name in ('matrix_tol', 'channel_tol', 'violation_tol', 'membership_tol',
                     'rational_tol', 'octahedron_tol', 'scan_tol'):
            if getattr(self, name) <= 0:
                raise BenchmarkError(f"Допуск {name} должен быть > 0")
        if self.scan_max_iterations < 1:
            raise BenchmarkError("scan_max_iterations должен быть >= 1")

    def override(self, **values) -> 'Tolerances':
        """Копия с переопределенными значениями (None пропускается)"""
        return replace(self, **{k: v for k, v in values.items() if v is not None})


class ConfigManager:
    """Менеджер конфигурации"""

    DEFAULT_CONFIG = """
[General]
# Директория кэша H-представлений политопов (канонический JSON)
cache_dir = .polytope_cache
# Уровень логирования: DEBUG, INFO, WARNING, ERROR
log_level = INFO

[Tolerances]
# Проверка полной положительности и сохранения следа
channel_tol = 1e-10
# Значение грани ниже -violation_tol считается нарушением
violation_tol = 1e-12
# Точность рационализации таблиц перед точным LP
rational_tol = 1e-12
# Точка LP вне политопа Клиффорда ближе membership_tol (норма max) - его элемент
membership_tol = 1e-9
# Допуск границы стабилизаторного октаэдра
octahedron_tol = 1e-12

[Scan]
# Ширина интервала бисекции для порогов
tolerance = 1e-9
# Максимальное число итераций бисекции
max_iterations = 60
# Число точек сетки при сканировании
grid_points = 41

[Sampling]
# Зерно генератора (Philox) для Монте-Карло
seed = 20111
# Число розыгрышей общих бит на пару настроек
samples = 1000000
# Число потоков для выборки
workers = 4

[Verify]
# Число случайных CP-TP каналов для проверки теоремы
random_channels = 10000
# Число случайных смесей Клиффордов для проверки сертификатов
clifford_mixtures = 1000
"""

    def __init__(self, config_file: str = 'benchmark_config.ini'):
        self.config_file = config_file
        self.config = configparser.ConfigParser()
        self.load_config()

    def load_config(self):
        """Загрузка конфигурации с автоматическим обновлением"""
        if Path(self.config_file).exists():
            self._update_existing_config()
        else:
            self.create_default_config()

        self.config.read(self.config_file, encoding='utf-8')
        logger.debug(f"Конфигурация загружена из: {self.config_file}")

    def create_default_config(self):
        """Создание файла конфигурации по умолчанию"""
        Path(self.config_file).write_text(self.DEFAULT_CONFIG.strip() + "\n", encoding='utf-8')
        logger.info(f"Создан файл конфигурации: {self.config_file}")

    def get(self, section: str, option: str, fallback=None):
        """Получение значения из конфигурации"""
        try:
            return self.config.get(section, option)
        except (configparser.NoSectionError, configparser.NoOptionError):
            return fallback

    def getint(self, section: str, option: str, fallback=0):
        """Получение целочисленного значения"""
        try:
            return self.config.getint(section, option)
        except (configparser.NoSectionError, configparser.NoOptionError, ValueError):
            return fallback

    def getfloat(self, section: str, option: str, fallback=0.0):
        """Получение значения с плавающей точкой"""
        try:
            return self.config.getfloat(section, option)
        except (configparser.NoSectionError, configparser.NoOptionError, ValueError):
            return fallback

    def tolerances(self) -> Tolerances:
        """Допуски из секций [Tolerances] и [Scan]"""
        defaults = Tolerances()
        return Tolerances(
            channel_tol=self.getfloat('Tolerances', 'channel_tol', defaults.channel_tol),
            violation_tol=self.getfloat('Tolerances', 'violation_tol', defaults.violation_tol),
            rational_tol=self.getfloat('Tolerances', 'rational_tol', defaults.rational_tol),
            membership_tol=self.getfloat('Tolerances', 'membership_tol', defaults.membership_tol),
            octahedron_tol=self.getfloat('Tolerances', 'octahedron_tol', defaults.octahedron_tol),
            scan_tol=self.getfloat('Scan', 'tolerance', defaults.scan_tol),
            scan_max_iterations=self.getint('Scan', 'max_iterations', defaults.scan_max_iterations),
        )

    def cache_dir(self) -> Path:
        return Path(self.get('General', 'cache_dir', '.polytope_cache'))

    def _parse_default_config(self) -> configparser.ConfigParser:
        """Парсинг конфигурации по умолчанию"""
        default_config = configparser.ConfigParser()
        default_config.read_string(self.DEFAULT_CONFIG.strip())
        return default_config

    def _update_existing_config(self):
        """Дополнение существующего конфига недостающими секциями и опциями"""
        try:
            existing_config = configparser.ConfigParser()
            existing_config.read(self.config_file, encoding='utf-8')
            default_config = self._parse_default_config()

            added = []
            for section_name in default_config.sections():
                if not existing_config.has_section(section_name):
                    logger.info(f"Добавляем новую секцию: [{section_name}]")
                    existing_config.add_section(section_name)
                for option, value in default_config.items(section_name):
                    if not existing_config.has_option(section_name, option):
                        existing_config.set(section_name, option, value)
                        added.append(f"{section_name}.{option}")

            if added:
                logger.info(f"Добавлены опции: {', '.join(added)}")
                self._save_config_with_comments(existing_config)

        except configparser.Error as e:
            logger.error(f"Ошибка обновления конфигурации: {e}")
            logger.info("Используем конфигурацию как есть")

    def _save_config_with_comments(self, config: configparser.ConfigParser):
        """Сохранение конфигурации с комментариями из DEFAULT_CONFIG"""
        comments = self._extract_comments_from_default()
        lines = []
        for section_name in config.sections():
            lines.append(f"[{section_name}]")
            for option, value in config.items(section_name):
                comment = comments.get(f"{section_name}.{option}")
                if comment:
                    lines.append(comment)
                lines.append(f"{option} = {value}")
            lines.append("")

        try:
            Path(self.config_file).write_text("\n".join(lines), encoding='utf-8')
        except OSError as e:
            logger.error(f"Ошибка сохранения конфигурации: {e}")

    def _extract_comments_from_default(self) -> dict:
        """Комментарии к опциям из DEFAULT_CONFIG: 'секция.опция' -> текст"""
        comments = {}
        section = None
        pending = []
        for line in self.DEFAULT_CONFIG.strip().splitlines():
            line = line.strip()
            if line.startswith('#'):
                pending.append(line)
            elif line.startswith('[') and line.endswith(']'):
                section = line[1:-1]
                pending = []
            elif '=' in line and section:
                option = line.split('=')[0].strip()
                if pending:
                    comments[f"{section}.{option}"] = '\n'.join(pending)
                pending = []
            else:
                pending = []
        return comments
