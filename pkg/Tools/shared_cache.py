"""
Общий кэш политопов для тестовых скриптов.

Перечисление граней LHV-политопа занимает минуты, поэтому все тесты берут
H-представления из одной директории во временной папке системы.
"""

import sys
import tempfile
from functools import lru_cache
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.geometry import PolytopeCache
from core.witness import FacetLibrary

SHARED_CACHE_DIR = Path(tempfile.gettempdir()) / "bell_benchmark_test_cache"


@lru_cache(maxsize=1)
def shared_library() -> FacetLibrary:
    return FacetLibrary.build(PolytopeCache(SHARED_CACHE_DIR))


def run_tests(title: str, tests) -> bool:
    """Запуск test_* функций вне pytest с итоговой сводкой"""
    print(f"🧪 {title}")
    print("=" * 60)
    failed = []
    for test in tests:
        try:
            test()
            print(f"✅ {test.__name__}")
        except Exception as e:
            failed.append(test.__name__)
            print(f"❌ {test.__name__}: {type(e).__name__}: {e}")

    print()
    if failed:
        print(f"❌ Не пройдено {len(failed)} из {len(tests)}: {', '.join(failed)}")
        return False
    print(f"🎉 Все {len(tests)} тестов пройдены успешно!")
    return True
