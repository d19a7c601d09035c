"""
Исключения StabilizerBellBenchmark.

Внутренние модули бросают исключения, внешний слой (CLI, загрузка кэша)
логирует их и переводит в коды выхода.
"""


class BenchmarkError(Exception):
    """Базовое исключение проекта"""


class InvalidStateError(BenchmarkError, ValueError):
    """Некорректная матрица плотности (след, эрмитовость, положительность)"""


class InvalidChannelError(BenchmarkError, ValueError):
    """Канал не является CP-TP отображением или задан некорректно"""


class GeometryError(BenchmarkError, ValueError):
    """Вырожденный набор вершин или несовпадение размерностей"""


class ClassificationError(BenchmarkError):
    """Неизвестная сигнатура грани, не найдена пара или разложение"""


class ThresholdError(BenchmarkError, ValueError):
    """Критерий не меняет значение на концах интервала сканирования"""


class PostselectionError(BenchmarkError, ValueError):
    """Постселекция на исход с нулевой вероятностью"""


class CacheError(BenchmarkError):
    """Файл кэша поврежден или не читается"""
