"""
合成序列產生器

Every component draws from one PCG64 stream in declaration order, so a spec
and seed always give the same values on every platform.
"""

import logging
from datetime import timedelta
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import orjson
from pydantic import ValidationError
from scipy.signal import lfilter

from app.core.periodicity.calendar import DEFAULT_EPHEMERIS, rotation_number
from app.core.periodicity.errors import InvalidSpec
from app.models.periodicity import (
    Ar1Component,
    CarringtonEphemeris,
    DailyAreaRecord,
    DailyFixtureSpec,
    PulseTrainComponent,
    SinusoidComponent,
    SynthSpec,
    WhiteNoiseComponent,
)

logger = logging.getLogger(__name__)


def _sinusoid(component: SinusoidComponent, t: np.ndarray) -> np.ndarray:
    return component.amplitude * np.sin(2.0 * np.pi * t / component.period + component.phase)


def _white_noise(component: WhiteNoiseComponent, n: int, rng: np.random.Generator) -> np.ndarray:
    return component.sigma * rng.standard_normal(n)


def _ar1(component: Ar1Component, n: int, rng: np.random.Generator) -> np.ndarray:
    """Stationary AR(1): the first value is drawn from the marginal distribution"""
    shocks = component.sigma * rng.standard_normal(n)
    shocks[0] /= np.sqrt(1.0 - component.phi ** 2)
    return lfilter([1.0], [1.0, -component.phi], shocks)


def _pulse_train(component: PulseTrainComponent, n: int, rng: np.random.Generator) -> np.ndarray:
    # enough exponential gaps to pass the end of the series
    count = int(np.ceil(n / component.mean_spacing)) * 2 + 10
    onsets = np.cumsum(rng.exponential(component.mean_spacing, size=count))
    amplitudes = rng.lognormal(component.amplitude_mu, component.amplitude_sigma, size=count)

    values = np.zeros(n)
    for onset, amplitude in zip(onsets, amplitudes):
        start = int(onset)
        if start >= n:
            break
        values[start:start + component.width] += amplitude
    return values


def generate(spec: SynthSpec) -> np.ndarray:
    """Sum of all components plus the offset"""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    t = np.arange(spec.n, dtype=np.float64)
    values = np.full(spec.n, spec.offset, dtype=np.float64)
    for component in spec.components:
        if isinstance(component, SinusoidComponent):
            values += _sinusoid(component, t)
        elif isinstance(component, WhiteNoiseComponent):
            values += _white_noise(component, spec.n, rng)
        elif isinstance(component, Ar1Component):
            values += _ar1(component, spec.n, rng)
        elif isinstance(component, PulseTrainComponent):
            values += _pulse_train(component, spec.n, rng)
        else:
            raise InvalidSpec("unknown component", component=type(component).__name__)
    return values


def parse_synth_spec(data: Union[Dict[str, Any], bytes]) -> SynthSpec:
    try:
        if isinstance(data, (bytes, str)):
            return SynthSpec.model_validate_json(data)
        return SynthSpec.model_validate(data)
    except ValidationError as e:
        raise InvalidSpec(f"invalid synth spec: {e}") from e


def load_synth_spec(path: Union[str, Path]) -> SynthSpec:
    path = Path(path)
    if not path.is_file():
        raise InvalidSpec("synth spec not found", path=str(path))
    return parse_synth_spec(path.read_bytes())


def load_fixture_spec(path: Union[str, Path]) -> DailyFixtureSpec:
    path = Path(path)
    try:
        return DailyFixtureSpec.model_validate(orjson.loads(path.read_bytes()))
    except FileNotFoundError as e:
        raise InvalidSpec("fixture spec not found", path=str(path)) from e
    except (orjson.JSONDecodeError, ValidationError) as e:
        raise InvalidSpec(f"invalid fixture spec: {e}", path=str(path)) from e


def synthesize_daily_records(
    fixture: DailyFixtureSpec,
    eph: CarringtonEphemeris = DEFAULT_EPHEMERIS,
) -> List[DailyAreaRecord]:
    """Expand per-rotation series to one record per day.

    Every day of a rotation carries that rotation's value, clipped at 0.
    Days run from ``start_date`` through the last rotation both specs cover.
    """
    north = np.clip(generate(fixture.north), 0.0, None)
    south = np.clip(generate(fixture.south), 0.0, None)
    rotations = min(len(north), len(south))

    first = rotation_number(fixture.start_date, eph)
    records: List[DailyAreaRecord] = []
    day = fixture.start_date
    while True:
        offset = rotation_number(day, eph) - first
        if offset >= rotations:
            break
        n_area, s_area = float(north[offset]), float(south[offset])
        records.append(DailyAreaRecord(date=day, area_total=n_area + s_area, area_north=n_area, area_south=s_area))
        day += timedelta(days=1)
    logger.info("synthesized %d daily records over %d rotations", len(records), rotations)
    return records
