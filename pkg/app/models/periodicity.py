"""Domain models for the sunspot-area periodicity chain.

Records that cross a file or HTTP boundary hold plain lists; containers for
long numeric series hold numpy arrays (``arbitrary_types_allowed``) and are
serialized with orjson's numpy support.
"""

from datetime import date
from enum import Enum
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Hemisphere(str, Enum):
    NORTH = "north"
    SOUTH = "south"


class HemisphereSelection(str, Enum):
    NORTH = "north"
    SOUTH = "south"
    BOTH = "both"

    def hemispheres(self) -> List[Hemisphere]:
        if self is HemisphereSelection.BOTH:
            return [Hemisphere.NORTH, Hemisphere.SOUTH]
        return [Hemisphere(self.value)]


class GapPolicy(str, Enum):
    SKIP = "skip"
    ZERO = "zero"
    ERROR = "error"


class EdgePolicy(str, Enum):
    SHRINK = "shrink"
    TRIM = "trim"


class SeriesKind(str, Enum):
    ORIGINAL = "original"
    POSITIVE = "positive"
    NEGATIVE = "negative"


class Significance(str, Enum):
    ABOVE_2SE = "above_2se"
    BETWEEN_1SE_2SE = "between_1se_2se"
    BELOW_1SE = "below_1se"


class Background(str, Enum):
    WHITE = "white"
    RED = "red"


class CoiPolicy(str, Enum):
    ALL = "all"
    EXCLUDE_COI = "exclude_coi"


class TestName(str, Enum):
    __test__ = False

    LILLIEFORS = "lilliefors"
    SHAPIRO_WILK = "shapiro_wilk"
    KS_TWO_SAMPLE = "ks_two_sample"


# ---------------------------------------------------------------- ingest

class DailyAreaRecord(BaseModel):
    """單日半球黑子面積（百萬分之一半球）"""
    model_config = ConfigDict(frozen=True)

    date: date
    area_total: float = Field(ge=0)
    area_north: float = Field(ge=0)
    area_south: float = Field(ge=0)


class ColumnMap(BaseModel):
    """Token positions of a line-oriented daily area file.

    ``date_columns`` is either (year, month, day) or a single ISO-8601 column.
    ``delimiter`` None means any run of whitespace.
    """
    model_config = ConfigDict(frozen=True)

    date_columns: Tuple[int, ...] = (0, 1, 2)
    north_column: int = 4
    south_column: int = 5
    total_column: Optional[int] = 3
    missing_sentinel: Optional[str] = "-1"
    delimiter: Optional[str] = None

    @field_validator("date_columns")
    @classmethod
    def _date_column_count(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if len(value) not in (1, 3):
            raise ValueError("date_columns must hold one ISO column or year/month/day columns")
        return value

    @model_validator(mode="after")
    def _distinct_indices(self) -> "ColumnMap":
        indices = list(self.date_columns) + [self.north_column, self.south_column]
        if self.total_column is not None:
            indices.append(self.total_column)
        if len(set(indices)) != len(indices):
            raise ValueError("column indices must be distinct")
        if min(indices) < 0:
            raise ValueError("column indices must be non-negative")
        return self

    @property
    def width(self) -> int:
        indices = list(self.date_columns) + [self.north_column, self.south_column]
        if self.total_column is not None:
            indices.append(self.total_column)
        return max(indices) + 1


# Greenwich/NGDC daily hemispheric file: "YYYY MM DD total north south"
DEFAULT_COLUMN_MAP = ColumnMap()

# date,area_total,area_north,area_south
CANONICAL_COLUMN_MAP = ColumnMap(
    date_columns=(0,),
    total_column=1,
    north_column=2,
    south_column=3,
    missing_sentinel=None,
    delimiter=",",
)


class ParseStats(BaseModel):
    lines: int = 0
    parsed: int = 0
    skipped_header: int = 0
    skipped_missing: int = 0


# -------------------------------------------------------------- calendar

class CarringtonEphemeris(BaseModel):
    model_config = ConfigDict(frozen=True)

    epoch_julian_date: float = 2398167.329
    synodic_period_days: float = 27.2753

    @field_validator("synodic_period_days")
    @classmethod
    def _period_range(cls, value: float) -> float:
        if not 25.0 < value < 30.0:
            raise ValueError("synodic period must lie in (25, 30) days")
        return value


class CycleEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    cycle_number: int = Field(ge=1)
    start_date: date
    end_date: date
    # "fitted": end chosen to match a reference series length, not an observed minimum
    end_basis: Literal["minimum", "fitted"] = "minimum"

    @model_validator(mode="after")
    def _ordered(self) -> "CycleEntry":
        if self.end_date <= self.start_date:
            raise ValueError(f"cycle {self.cycle_number} ends before it starts")
        return self


class CycleTable(BaseModel):
    entries: List[CycleEntry]

    @model_validator(mode="after")
    def _contiguous(self) -> "CycleTable":
        if not self.entries:
            raise ValueError("cycle table is empty")
        for previous, current in zip(self.entries, self.entries[1:]):
            if current.cycle_number <= previous.cycle_number:
                raise ValueError("cycle table must be sorted by cycle number")
            if current.start_date != previous.end_date:
                raise ValueError(
                    f"cycle {current.cycle_number} does not start where cycle {previous.cycle_number} ends"
                )
        return self

    @property
    def start_date(self) -> date:
        return self.entries[0].start_date

    @property
    def end_date(self) -> date:
        return self.entries[-1].end_date

    def cycle_for(self, day: date) -> Optional[int]:
        for entry in self.entries:
            if entry.start_date <= day < entry.end_date:
                return entry.cycle_number
        return None


class CycleSegment(BaseModel):
    """Positions ``[start, stop)`` of one cycle inside a rotation series"""
    model_config = ConfigDict(frozen=True)

    cycle_number: int
    start: int
    stop: int

    @property
    def length(self) -> int:
        return self.stop - self.start


# ----------------------------------------------------------------- fluct

class RotationMean(BaseModel):
    model_config = ConfigDict(frozen=True)

    rotation_index: int
    mean_area: float = Field(ge=0)
    # 0 marks a rotation without any observed day; its mean is interpolated
    day_count: int = Field(ge=0)
    date_mid: date


class RotationSeries(BaseModel):
    hemisphere: Hemisphere
    rotations: List[RotationMean]

    @model_validator(mode="after")
    def _contiguous(self) -> "RotationSeries":
        for previous, current in zip(self.rotations, self.rotations[1:]):
            if current.rotation_index != previous.rotation_index + 1:
                raise ValueError("rotation indices must be contiguous and increasing")
        return self

    def __len__(self) -> int:
        return len(self.rotations)

    @property
    def indices(self) -> np.ndarray:
        return np.array([r.rotation_index for r in self.rotations], dtype=np.int64)

    @property
    def means(self) -> np.ndarray:
        return np.array([r.mean_area for r in self.rotations], dtype=np.float64)

    @property
    def dates(self) -> List[date]:
        return [r.date_mid for r in self.rotations]

    def subset(self, start: int, stop: int) -> "RotationSeries":
        return RotationSeries(hemisphere=self.hemisphere, rotations=self.rotations[start:stop])


class FluctuationSeries(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    hemisphere: Hemisphere
    rotation_indices: np.ndarray
    date_mid: List[date]
    mean_area: np.ndarray
    smoothed: np.ndarray
    values: np.ndarray
    positive_part: np.ndarray
    negative_part: np.ndarray
    n: int

    @model_validator(mode="after")
    def _shape(self) -> "FluctuationSeries":
        arrays = (
            self.rotation_indices, self.mean_area, self.smoothed,
            self.values, self.positive_part, self.negative_part,
        )
        if any(len(a) != self.n for a in arrays) or len(self.date_mid) != self.n:
            raise ValueError("all fluctuation arrays must have length n")
        if np.any(self.positive_part < 0) or np.any(self.negative_part > 0):
            raise ValueError("positive part must be >= 0 and negative part <= 0")
        return self

    def series(self, kind: SeriesKind) -> np.ndarray:
        if kind is SeriesKind.POSITIVE:
            return self.positive_part
        if kind is SeriesKind.NEGATIVE:
            return self.negative_part
        return self.values

    def segment(self, segment: CycleSegment, kind: SeriesKind) -> np.ndarray:
        return self.series(kind)[segment.start:segment.stop]


# ----------------------------------------------------------------- stats

class HistogramFit(BaseModel):
    bin_edges: List[float]
    counts: List[int]
    gauss_mu: float
    gauss_sigma: float = Field(gt=0)
    skewness: float
    n: int
    positive_count: int
    negative_count: int

    @property
    def bin_centers(self) -> List[float]:
        return [(a + b) / 2.0 for a, b in zip(self.bin_edges, self.bin_edges[1:])]


class TestResult(BaseModel):
    __test__ = False

    test_name: TestName
    statistic: float = Field(ge=0)
    p_value: float = Field(ge=0, le=1)
    reject_at_05: bool
    alpha: float = 0.05
    critical_value: Optional[float] = None
    n: int


# ------------------------------------------------------------------- acf

class LagWindow(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    low: int = Field(ge=1)
    high: int

    @model_validator(mode="after")
    def _ordered(self) -> "LagWindow":
        if self.high < self.low:
            raise ValueError(f"window {self.name} has high < low")
        return self


DEFAULT_WINDOWS: Tuple[LagWindow, ...] = (
    LagWindow(name="short", low=7, high=13),
    LagWindow(name="mid", low=14, high=19),
    LagWindow(name="long", low=20, high=27),
)

# window used for the k-th multiple of the short-window period
HARMONIC_WINDOWS: Dict[int, str] = {1: "short", 2: "mid", 3: "long"}


class AcfPeak(BaseModel):
    lag: int
    value: float
    se: float
    window: str
    significance: Significance
    local_maximum: bool = True


class AcfAnalysis(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    hemisphere: Hemisphere
    cycle_number: int
    series_kind: SeriesKind
    n: int
    lags: np.ndarray
    c: np.ndarray
    se: np.ndarray
    peaks: List[AcfPeak]
    reliable_max_lag: int = 27

    def peak(self, window: str) -> Optional[AcfPeak]:
        for peak in self.peaks:
            if peak.window == window:
                return peak
        return None


class SkippedSegment(BaseModel):
    hemisphere: Hemisphere
    cycle_number: int
    # None when every kind of the segment was skipped
    series_kind: Optional[SeriesKind] = None
    length: int
    reason: str


class KindSummary(BaseModel):
    kind: SeriesKind
    cases: int
    above_2se_share: Optional[float]
    between_share: Optional[float]
    mean_significant_tau: Optional[float]
    significant_taus: List[int]


class AcfSurvey(BaseModel):
    analyses: List[AcfAnalysis]
    skipped: List[SkippedSegment]
    summaries: List[KindSummary]
    mean_significant_tau_all: Optional[float]

    def find(self, hemisphere: Hemisphere, cycle_number: int, kind: SeriesKind) -> Optional[AcfAnalysis]:
        for analysis in self.analyses:
            if (analysis.hemisphere, analysis.cycle_number, analysis.series_kind) == (hemisphere, cycle_number, kind):
                return analysis
        return None

    def of_kind(self, kind: SeriesKind) -> List[AcfAnalysis]:
        return [a for a in self.analyses if a.series_kind is kind]

    def summary(self, kind: SeriesKind) -> Optional[KindSummary]:
        for item in self.summaries:
            if item.kind is kind:
                return item
        return None


# --------------------------------------------------------------- wavelet

class SpectralPeak(BaseModel):
    period: float
    power: float


class GlobalSpectrum(BaseModel):
    periods: List[float]
    power: List[float]
    peaks: List[SpectralPeak]


class WaveletAnalysis(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    hemisphere: Optional[Hemisphere] = None
    cycle_number: Optional[int] = None
    series_kind: Optional[SeriesKind] = None
    n: int
    dt: float
    omega0: float
    dj: float
    scales: np.ndarray
    periods: np.ndarray
    # [scale, time], normalized by the series variance
    power: np.ndarray
    coi: np.ndarray
    variance: float
    lag1: float
    significant: Optional[np.ndarray] = None
    global_spectrum: Optional[np.ndarray] = None
    global_peaks: List[SpectralPeak] = []

    def in_coi(self) -> np.ndarray:
        """True where edge effects make the power untrustworthy"""
        return self.periods[:, None] > self.coi[None, :]


# ------------------------------------------------------------- harmonics

class PeakPair(BaseModel):
    hemisphere: Hemisphere
    cycle_number: int
    kind: SeriesKind
    tau: int
    tau_k: int
    k: int

    @field_validator("k")
    @classmethod
    def _harmonic(cls, value: int) -> int:
        if value not in (2, 3):
            raise ValueError("k must be 2 or 3")
        return value


class PairingRule(BaseModel):
    # minimum c/se ratio required of both peaks
    floor: float = 1.0
    # keep the window argmax of every case regardless of significance
    argmax_only: bool = False


class PairCollection(BaseModel):
    kind: SeriesKind
    k: int
    pairs: List[PeakPair]
    excluded: int


class RegressionFit(BaseModel):
    slope: float
    intercept: float
    r: float = Field(ge=-1, le=1)
    n_points: int = Field(ge=3)
    level: float = 0.95
    t_critical: float
    residual_se: float
    mean_x: float
    band_x: List[float]
    band_half_width: List[float]

    def predict(self, x: float) -> float:
        return self.intercept + self.slope * x


class MatchedPeak(BaseModel):
    hemisphere: Hemisphere
    cycle_number: int
    acf_lag: int
    wavelet_period: float


class AgreementSummary(BaseModel):
    kind: SeriesKind
    n_acf_peaks: int
    matched: List[MatchedPeak]
    pearson_r: Optional[float]
    agreement_fraction: Optional[float]


# ----------------------------------------------------------------- synth

class SinusoidComponent(BaseModel):
    type: Literal["sinusoid"] = "sinusoid"
    period: float = Field(gt=0)
    amplitude: float = 1.0
    phase: float = 0.0


class WhiteNoiseComponent(BaseModel):
    type: Literal["white_noise"] = "white_noise"
    sigma: float = Field(default=1.0, ge=0)


class Ar1Component(BaseModel):
    type: Literal["ar1"] = "ar1"
    phi: float = Field(gt=-1, lt=1)
    sigma: float = Field(default=1.0, ge=0)


class PulseTrainComponent(BaseModel):
    """Poisson pulses with lognormal amplitudes (activity complexes)"""
    type: Literal["pulse_train"] = "pulse_train"
    mean_spacing: float = Field(gt=0)
    amplitude_mu: float = 0.0
    amplitude_sigma: float = Field(default=1.0, ge=0)
    width: int = Field(default=1, ge=1)


SynthComponent = Annotated[
    Union[SinusoidComponent, WhiteNoiseComponent, Ar1Component, PulseTrainComponent],
    Field(discriminator="type"),
]


class SynthSpec(BaseModel):
    n: int = Field(ge=1)
    components: List[SynthComponent] = []
    seed: int = 0
    offset: float = 0.0


class DailyFixtureSpec(BaseModel):
    """Per-rotation synthetic areas for both hemispheres, expanded to days from ``start_date``"""
    start_date: date
    north: SynthSpec
    south: SynthSpec


# ----------------------------------------------------------------- report

class HemisphereDistribution(BaseModel):
    hemisphere: Hemisphere
    n: int
    histogram: HistogramFit
    tests: List[TestResult]


class RegressionSummary(BaseModel):
    kind: SeriesKind
    k: int
    n_pairs: int
    excluded: int
    fit: Optional[RegressionFit]


class RunReport(BaseModel):
    status: str
    input: str
    n_per_hemisphere: Dict[str, int]
    cycles_per_hemisphere: Dict[str, int]
    distributions: List[HemisphereDistribution]
    survey: List[KindSummary]
    mean_significant_tau_all: Optional[float]
    skipped_segments: List[SkippedSegment]
    regressions: List[RegressionSummary]
    agreement: List[AgreementSummary]
    dominant_period_ks: Optional[TestResult]
    distribution_ks: Optional[TestResult]
