"""
分析流程的錯誤類別

Every error carries the module it came from plus a small context dict, and
belongs to one of three families that the CLI maps to exit codes.
"""

from typing import Any, Dict, Optional


class PeriodicityError(Exception):
    """Base class for all analysis-chain errors"""

    exit_code: int = 1
    module: str = "core"

    def __init__(self, message: str, module: Optional[str] = None, **context: Any):
        super().__init__(message)
        self.message = message
        if module is not None:
            self.module = module
        self.context: Dict[str, Any] = context

    def __str__(self) -> str:
        if not self.context:
            return f"[{self.module}] {self.message}"
        details = ", ".join(f"{key}={value}" for key, value in self.context.items())
        return f"[{self.module}] {self.message} ({details})"


# 設定錯誤 (exit 2)
class ConfigError(PeriodicityError):
    exit_code = 2
    module = "config"


class InvalidConfig(ConfigError):
    pass


class InvalidSpec(ConfigError):
    module = "synth"


# 資料錯誤 (exit 3)
class DataError(PeriodicityError):
    exit_code = 3
    module = "ingest"


class InputNotFound(DataError):
    pass


class MalformedLine(DataError):
    def __init__(self, line_number: int, content: str, reason: str = "unparseable numeric field"):
        super().__init__(reason, line_number=line_number, content=content.strip())
        self.line_number = line_number
        self.content = content


class NonMonotonicDate(DataError):
    def __init__(self, line_number: int, content: str):
        super().__init__("date does not increase", line_number=line_number, content=content.strip())
        self.line_number = line_number


class NegativeArea(DataError):
    def __init__(self, line_number: int, content: str):
        super().__init__("negative area", line_number=line_number, content=content.strip())
        self.line_number = line_number


class GapFound(DataError):
    def __init__(self, missing_date):
        super().__init__("calendar gap in daily records", missing_date=missing_date.isoformat())
        self.missing_date = missing_date


class DateBeforeEpoch(DataError):
    module = "calendar"


class UncoveredRotation(DataError):
    module = "calendar"


class InvalidCycleTable(DataError):
    module = "calendar"


class EmptyRotation(DataError):
    module = "fluct"


# 分析退化 (exit 4)
class AnalysisError(PeriodicityError):
    exit_code = 4
    module = "analysis"


class SeriesTooShort(AnalysisError):
    pass


class ConstantSeries(AnalysisError):
    pass


class DegenerateSample(AnalysisError):
    module = "stats"


class SampleTooSmall(AnalysisError):
    module = "stats"


class SampleTooLarge(AnalysisError):
    module = "stats"


class SegmentTooShort(AnalysisError):
    module = "acf"


class DegenerateAbscissae(AnalysisError):
    module = "harmonics"


class TooFewPoints(AnalysisError):
    module = "harmonics"
