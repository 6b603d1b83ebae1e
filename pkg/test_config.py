"""
測試環境配置
單元測試、資料集測試與 CI 共用的常數和小工具
"""

import os
from datetime import date, timedelta
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from app.core.config import DATA_PACKAGE_DIR

# 測試環境變數
TEST_ENV_VARS = {
    "LOG_LEVEL": "WARNING",
    "OUTPUT_DIR": "./ci_output",
}

# 預設星曆（卡林頓第 1 自轉 1853-11-09）
DEFAULT_EPOCH_JD = 2398167.329
DEFAULT_PERIOD_DAYS = 27.2753

CYCLE_TABLE = DATA_PACKAGE_DIR / "cycle_table.csv"
CYCLE_TABLE_MINIMA = DATA_PACKAGE_DIR / "cycle_table_minima.csv"
FIXTURE_SPEC = DATA_PACKAGE_DIR / "fixture_synth.json"
SHIPPED_CYCLES = list(range(12, 24))

# Greenwich 全資料集的驗收範圍
DATASET_EXPECTATIONS = {
    "n_per_hemisphere": 1706,
    "n_tolerance": 10,
    "negative_above_2se_share": (0.80, 1.00),
    "original_above_2se_share": (0.40, 0.70),
    "mean_significant_tau": (9.0, 11.0),
    "negative_k2": {"min_r": 0.85, "min_points": 18},
    "positive_k2": {"min_r": 0.80, "min_points": 9},
}

CI_TEST_CONFIG = {
    "fixture_runs": 2,
    "ignored_files": ["manifest.json"],
}


def setup_test_environment():
    """設定測試環境變數"""
    for key, value in TEST_ENV_VARS.items():
        os.environ.setdefault(key, value)


def sinusoid(n: int, period: float = 10.0, amplitude: float = 1.0, phase: float = 0.0) -> np.ndarray:
    t = np.arange(n, dtype=np.float64)
    return amplitude * np.sin(2.0 * np.pi * t / period + phase)


def daily_line(day: date, total: float, north: float, south: float) -> str:
    """Greenwich 版面的一行：年 月 日 總面積 北 南"""
    return f"{day.year:4d} {day.month:2d} {day.day:2d} {total:8.1f} {north:8.1f} {south:8.1f}\n"


def daily_file_bytes(
    start: date,
    north: Sequence[float],
    south: Optional[Sequence[float]] = None,
    header: bool = True,
) -> bytes:
    south = south if south is not None else [0.0] * len(north)
    lines: List[str] = ["# Greenwich daily hemispheric sunspot areas\n"] if header else []
    for offset, (n_area, s_area) in enumerate(zip(north, south)):
        lines.append(daily_line(start + timedelta(days=offset), n_area + s_area, n_area, s_area))
    return "".join(lines).encode("utf-8")


def single_cycle_table(path: Path, start: str = "1850-01-01", end: str = "2100-01-01", cycle: int = 12) -> Path:
    path.write_text(f"cycle,start_date,end_date\n{cycle},{start},{end}\n", encoding="utf-8")
    return path


def dataset_path() -> Optional[Path]:
    """已下載的 Greenwich 每日面積檔，沒有時回傳 None"""
    from app.core.config import settings

    path = settings.daily_area_path
    return path if path.is_file() else None


def get_test_config() -> Dict[str, Any]:
    """獲取測試配置"""
    return {
        "env_vars": TEST_ENV_VARS,
        "dataset": DATASET_EXPECTATIONS,
        "ci": CI_TEST_CONFIG,
    }
