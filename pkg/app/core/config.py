from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import orjson
from pydantic import BaseModel, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.core.periodicity.errors import InvalidConfig
from app.models.periodicity import (
    DEFAULT_COLUMN_MAP,
    DEFAULT_WINDOWS,
    Background,
    CarringtonEphemeris,
    CoiPolicy,
    ColumnMap,
    EdgePolicy,
    GapPolicy,
    HemisphereSelection,
    LagWindow,
    PairingRule,
    SeriesKind,
)

DATA_PACKAGE_DIR = Path(__file__).resolve().parent.parent / "data"


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    # Basic settings
    PROJECT_NAME: str = "Sunspot Area Periodicity"
    API_V1_STR: str = "/api/v1"

    # Data locations
    SUNSPOT_DATA_DIR: Path = Path("./data")
    DAILY_AREA_FILE: str = "daily_area.txt"
    OUTPUT_DIR: Path = Path("./output")
    CYCLE_TABLE_PATH: Path = DATA_PACKAGE_DIR / "cycle_table.csv"
    FIXTURE_SPEC_PATH: Path = DATA_PACKAGE_DIR / "fixture_synth.json"

    # Carrington ephemeris (rotation 1 starts 1853-11-09)
    CARRINGTON_EPOCH_JD: float = 2398167.329
    CARRINGTON_PERIOD_DAYS: float = 27.2753

    # Analysis defaults
    EDGE_POLICY: EdgePolicy = EdgePolicy.SHRINK
    GAP_POLICY: GapPolicy = GapPolicy.SKIP
    ACF_MAX_LAG: int = 27
    WAVELET_OMEGA0: float = 6.0
    WAVELET_DJ: float = 0.125
    WAVELET_BACKGROUND: Background = Background.RED
    SIGNIFICANCE_LEVEL: float = 0.95
    DEFAULT_SEED: int = 20090101
    LILLIEFORS_REPLICATES: int = 0

    LOG_LEVEL: str = "INFO"

    # Download script only; the library never goes online
    GREENWICH_DAILY_URL: str = "https://solarscience.msfc.nasa.gov/greenwch/daily_area.txt"

    # CORS settings
    ALLOWED_HOSTS: List[str] = ["*"]

    @property
    def daily_area_path(self) -> Path:
        return self.SUNSPOT_DATA_DIR / self.DAILY_AREA_FILE


settings = Settings()


class RunConfig(BaseModel):
    """單次分析執行的完整設定"""

    input_path: Optional[Path] = None
    fixture: bool = False
    fixture_spec_path: Optional[Path] = None
    column_map: ColumnMap = DEFAULT_COLUMN_MAP
    hemispheres: HemisphereSelection = HemisphereSelection.BOTH
    cycle_table_path: Path
    ephemeris: CarringtonEphemeris = CarringtonEphemeris()
    edge_policy: EdgePolicy = EdgePolicy.SHRINK
    gap_policy: GapPolicy = GapPolicy.SKIP
    max_lag: int = 27
    windows: Tuple[LagWindow, ...] = DEFAULT_WINDOWS
    omega0: float = 6.0
    s0: float = 2.0
    dj: float = 0.125
    background: Background = Background.RED
    coi_policy: CoiPolicy = CoiPolicy.ALL
    significance_level: float = 0.95
    alpha: float = 0.05
    bin_count: Optional[int] = None
    pairing: PairingRule = PairingRule()
    dominant_period_kind: SeriesKind = SeriesKind.ORIGINAL
    lilliefors_replicates: int = 0
    output_dir: Path
    seed: int = 0

    @field_validator("significance_level", "alpha")
    @classmethod
    def _open_unit_interval(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError("level must lie in (0, 1)")
        return value

    @model_validator(mode="after")
    def _windows_ordered(self) -> "RunConfig":
        names = [w.name for w in self.windows]
        if names[:3] != ["short", "mid", "long"]:
            raise ValueError("windows must be named short, mid, long in that order")
        for previous, current in zip(self.windows, self.windows[1:]):
            if current.low <= previous.high:
                raise ValueError("lag windows must be disjoint and ordered")
        if self.max_lag < self.windows[-1].high:
            raise ValueError("max_lag must reach the end of the last lag window")
        if not self.fixture and self.input_path is None:
            raise ValueError("an input path is required unless running the fixture")
        return self

    @classmethod
    def from_settings(cls, source: Optional[Settings] = None, **overrides: Any) -> "RunConfig":
        """Defaults from Settings, then ``overrides`` (config file, CLI flags)"""
        source = source or settings
        values: Dict[str, Any] = {
            "input_path": source.daily_area_path,
            "cycle_table_path": source.CYCLE_TABLE_PATH,
            "fixture_spec_path": source.FIXTURE_SPEC_PATH,
            "ephemeris": {
                "epoch_julian_date": source.CARRINGTON_EPOCH_JD,
                "synodic_period_days": source.CARRINGTON_PERIOD_DAYS,
            },
            "edge_policy": source.EDGE_POLICY,
            "gap_policy": source.GAP_POLICY,
            "max_lag": source.ACF_MAX_LAG,
            "omega0": source.WAVELET_OMEGA0,
            "dj": source.WAVELET_DJ,
            "background": source.WAVELET_BACKGROUND,
            "significance_level": source.SIGNIFICANCE_LEVEL,
            "lilliefors_replicates": source.LILLIEFORS_REPLICATES,
            "output_dir": source.OUTPUT_DIR,
            "seed": source.DEFAULT_SEED,
        }
        for key, value in overrides.items():
            if key == "ephemeris" and isinstance(value, dict):
                values["ephemeris"] = {**values["ephemeris"], **value}
            else:
                values[key] = value
        try:
            return cls(**values)
        except ValidationError as e:
            raise InvalidConfig(f"invalid run configuration: {e}") from e


def load_config_file(path: Path) -> Dict[str, Any]:
    """讀取 JSON 設定檔"""
    try:
        data = orjson.loads(Path(path).read_bytes())
    except FileNotFoundError as e:
        raise InvalidConfig("config file not found", path=str(path)) from e
    except orjson.JSONDecodeError as e:
        raise InvalidConfig(f"config file is not valid JSON: {e}", path=str(path)) from e
    if not isinstance(data, dict):
        raise InvalidConfig("config file must hold a JSON object", path=str(path))
    return data
