import logging
import sys


def setup_logger(name: str = __name__, log_file: str = 'bell_benchmark.log',
                 level: int = logging.INFO):
    """Настройка логгера для модуля"""
    logger = logging.getLogger(name)

    # Избегаем дублирования handlers
    if not logger.handlers:
        logger.setLevel(level)

        # Форматтер
        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )

        # Handler для файла
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

        # Консоль: stderr, stdout занят JSON/CSV отчетами
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    return logger


def set_level(level: str | int):
    """Смена уровня логирования (например, из --verbose или конфига)"""
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.INFO)
    logger.setLevel(level)


# Глобальный логгер для всего проекта
logger = setup_logger('StabilizerBellBenchmark')
