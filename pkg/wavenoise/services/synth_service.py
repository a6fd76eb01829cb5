# wavenoise/services/synth_service.py
"""
Deterministic synthetic-noise generators and named recipe presets
Every random draw comes from the pinned xoshiro256** generator, so a recipe
and seed reproduce the same samples on every platform.
"""
import json
import logging
import math
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Union

import numpy as np
from pydantic import ValidationError
from scipy import fft

from wavenoise.core.errors import InputFileError, RateTooHighError, RecipeError, validation_messages
from wavenoise.core.rng import Xoshiro256StarStar, derive_seed
from wavenoise.schemas.recipe import (
    ColoredComponent,
    DriftComponent,
    EnsembleRecipe,
    NoiseComponent,
    NoiseRecipe,
    RtsComponent,
    SeriesEntry,
    SharedComponent,
    SinusoidComponent,
    WhiteComponent,
)
from wavenoise.schemas.timeseries import SeriesSet, TimeSeries
from wavenoise.utils.file_handler import read_json

logger = logging.getLogger(__name__)

# salts separating the independent and shared sub-streams of an ensemble
_SERIES_SALT = 0
_SHARED_SALT = 1


class SynthService:
    """Service class for synthetic noise generation"""

    # ========================================================================
    # GENERATORS
    # ========================================================================

    @staticmethod
    def rts_values(n: int, dt: float, rate_up: float, rate_down: float, amplitude: float, seed: int) -> np.ndarray:
        """
        Two-state {0, amplitude} Markov chain

        Per-step switching probabilities are 1 - exp(-rate * dt). The first
        state is drawn from the stationary occupancy (low if both rates are 0).
        """
        for name, rate in (("rate_up", rate_up), ("rate_down", rate_down)):
            if rate < 0 or rate * dt >= 1.0:
                raise RateTooHighError(
                    f"{name}={rate:g} 1/s with dt={dt:g} s gives rate*dt={rate * dt:g}; it must lie in [0, 1)",
                    {name: rate, "dt": dt},
                )
        p_up = -math.expm1(-rate_up * dt)
        p_down = -math.expm1(-rate_down * dt)
        total = rate_up + rate_down
        p_high = rate_up / total if total > 0 else 0.0

        draws = Xoshiro256StarStar(seed).uniform(n).tolist()
        states = np.empty(n, dtype=bool)
        high = draws[0] < p_high
        states[0] = high
        for i in range(1, n):
            if high:
                if draws[i] < p_down:
                    high = False
            elif draws[i] < p_up:
                high = True
            states[i] = high
        return np.where(states, float(amplitude), 0.0)

    def gen_rts(
        self,
        n: int,
        dt: float,
        rate_up: float,
        rate_down: float,
        amplitude: float = 1.0,
        seed: int = 0,
        label: str = "rts",
    ) -> TimeSeries:
        """
        Random telegraph signal

        Args:
            n: Number of samples
            dt: Sampling interval in seconds
            rate_up: 0 -> amplitude switching rate in 1/s
            rate_down: amplitude -> 0 switching rate in 1/s
            amplitude: High-state level
            seed: 64-bit seed

        Returns:
            TimeSeries
        """
        values = self.rts_values(n, dt, rate_up, rate_down, amplitude, seed)
        return TimeSeries(label=label, dt=dt, values=values)

    @staticmethod
    def colored_values(n: int, dt: float, beta: float, level: float, seed: int) -> np.ndarray:
        """Spectral synthesis: complex Gaussian bins shaped by f^(-beta/2), DC removed"""
        if not 0.0 <= beta <= 2.0:
            raise RecipeError(f"colored-noise exponent beta must lie in [0, 2], got {beta}")
        if level == 0:
            return np.zeros(n)

        frequencies = fft.rfftfreq(n, d=dt)
        normals = Xoshiro256StarStar(seed).standard_normal(2 * frequencies.size)
        bins = normals[0::2] + 1j * normals[1::2]
        shape = np.zeros(frequencies.size)
        shape[1:] = frequencies[1:] ** (-beta / 2.0)
        bins = bins * shape
        if n % 2 == 0:
            bins[-1] = bins[-1].real
        values = fft.irfft(bins, n=n)

        spread = float(np.std(values, ddof=1))
        if spread == 0.0:
            return np.zeros(n)
        return values * (level / spread)

    def gen_colored(
        self,
        n: int,
        dt: float,
        beta: float,
        level: float = 1.0,
        seed: int = 0,
        label: str = "colored",
    ) -> TimeSeries:
        """
        1/f^beta noise scaled to standard deviation `level`

        Args:
            n: Number of samples
            dt: Sampling interval in seconds
            beta: Spectral exponent in [0, 2]
            level: Output standard deviation (0 gives zeros)
            seed: 64-bit seed

        Returns:
            TimeSeries
        """
        return TimeSeries(label=label, dt=dt, values=self.colored_values(n, dt, beta, level, seed))

    # ========================================================================
    # COMPOSITION
    # ========================================================================

    def component_values(self, component: NoiseComponent, n: int, dt: float, seed: int) -> np.ndarray:
        """Samples of one recipe component; `seed` is used unless the component pins its own"""
        seed = seed if component.seed is None else component.seed
        t = np.arange(n) * dt

        if isinstance(component, RtsComponent):
            return self.rts_values(n, dt, component.rate_up, component.rate_down, component.amplitude, seed)
        if isinstance(component, ColoredComponent):
            return self.colored_values(n, dt, component.beta, component.level, seed)
        if isinstance(component, SinusoidComponent):
            values = component.amplitude * np.sin(2.0 * np.pi * component.frequency * t + component.phase)
            if component.is_burst:
                values = np.where((t >= component.burst_start) & (t < component.burst_end), values, 0.0)
            return values
        if isinstance(component, DriftComponent):
            return component.slope * t
        if isinstance(component, WhiteComponent):
            if component.sigma == 0:
                return np.zeros(n)
            return component.sigma * Xoshiro256StarStar(seed).standard_normal(n)
        raise RecipeError(f"unknown component kind: {getattr(component, 'kind', component)!r}")

    def compose(self, recipe: NoiseRecipe) -> TimeSeries:
        """
        Sum of a recipe's components

        Component i draws from derive_seed(recipe.seed, i) unless it pins a seed.
        """
        values = np.zeros(recipe.n)
        for index, component in enumerate(recipe.components):
            values = values + self.component_values(
                component, recipe.n, recipe.dt, derive_seed(recipe.seed, index)
            )
        return TimeSeries(label=recipe.label, units=recipe.units, t0=recipe.t0, dt=recipe.dt, values=values)

    def gen_ensemble(self, recipe: EnsembleRecipe) -> SeriesSet:
        """
        Compose every member and add each shared component instance to its targets

        Args:
            recipe: Ensemble recipe

        Returns:
            SeriesSet in recipe order
        """
        totals: Dict[str, np.ndarray] = {}
        members: List[NoiseRecipe] = []
        for index in range(len(recipe.series)):
            member = recipe.member_recipe(index, derive_seed(recipe.seed, _SERIES_SALT, index))
            members.append(member)
            totals[member.label] = self.compose(member).values

        for index, shared in enumerate(recipe.shared):
            values = self.component_values(
                shared.component, recipe.n, recipe.dt, derive_seed(recipe.seed, _SHARED_SALT, index)
            )
            for target in shared.targets:
                totals[target] = totals[target] + values

        entries = [
            TimeSeries(label=m.label, units=m.units, t0=m.t0, dt=m.dt, values=totals[m.label])
            for m in members
        ]
        logger.info(
            f"Generated ensemble '{recipe.name}': {len(entries)} series, "
            f"{len(recipe.shared)} shared components, N={recipe.n}"
        )
        return SeriesSet(entries=entries)

    def gen_pairset(
        self,
        shared: Sequence[NoiseComponent],
        independent: Sequence[NoiseComponent],
        n: int,
        dt: float = 1.0,
        seed: int = 0,
        labels: Sequence[str] = ("x", "y"),
    ) -> SeriesSet:
        """
        Two series sharing component instances plus independent draws of the rest

        Args:
            shared: Components added identically to both series
            independent: Components drawn separately for each series
            n: Number of samples
            dt: Sampling interval
            seed: Ensemble seed
            labels: Series labels

        Returns:
            SeriesSet of two series
        """
        recipe = EnsembleRecipe(
            name="pairset",
            n=n,
            dt=dt,
            seed=seed,
            series=[SeriesEntry(label=label, components=list(independent)) for label in labels],
            shared=[SharedComponent(targets=list(labels), component=component) for component in shared],
        )
        return self.gen_ensemble(recipe)

    # ========================================================================
    # RECIPE FILES
    # ========================================================================

    def load_recipe(self, path: Union[str, Path]) -> EnsembleRecipe:
        """
        Read a recipe from JSON

        A document with a "series" list is an ensemble; anything else is read
        as a single-series recipe and wrapped into a one-member ensemble.

        Args:
            path: JSON recipe file

        Returns:
            EnsembleRecipe
        """
        path = Path(path)
        if not path.is_file():
            raise InputFileError(f"Recipe file not found: {path}", {"path": str(path)})
        try:
            document = read_json(path)
        except json.JSONDecodeError as e:
            raise RecipeError(f"Recipe {path} is not valid JSON: {str(e)}", {"path": str(path)})

        try:
            if isinstance(document, dict) and "series" in document:
                return EnsembleRecipe.model_validate(document)
            single = NoiseRecipe.model_validate(document)
        except ValidationError as e:
            raise RecipeError(
                f"Recipe {path} is invalid",
                {"path": str(path), "errors": validation_messages(e)},
            )
        return EnsembleRecipe(
            name=single.label, n=single.n, dt=single.dt, t0=single.t0, seed=single.seed,
            units=single.units,
            series=[SeriesEntry(label=single.label, seed=single.seed, components=single.components)],
        )

    # ========================================================================
    # PRESETS
    # ========================================================================

    def preset(self, name: str, n: int = 8192, dt: float = 1.0, seed: int = 0) -> EnsembleRecipe:
        """Named ensemble recipe"""
        builder = PRESETS.get(name)
        if builder is None:
            raise RecipeError(f"unknown preset '{name}'; choose from {sorted(PRESETS)}")
        return builder(n, dt, seed)


def _bump(n: int, dt: float, seed: int) -> EnsembleRecipe:
    """1/f background plus one dominant fluctuator switching about every 100 s"""
    return EnsembleRecipe(
        name="bump", n=n, dt=dt, seed=seed,
        series=[SeriesEntry(label="x", components=[
            ColoredComponent(beta=1.0, level=1.0),
            RtsComponent(rate_up=0.01 / dt, rate_down=0.01 / dt, amplitude=3.0),
        ])],
    )


EIGHT_SERIES_LABELS = [
    "q1_rabi", "q2_rabi", "q1_larmor", "q2_larmor",
    "q1_cz_phase", "q2_cz_phase", "exchange_level", "readout_point",
]


def _eight_series(n: int, dt: float, seed: int) -> EnsembleRecipe:
    """
    Eight feedback-variable analogs
    q1_larmor and q2_larmor share a fluctuator; q1_cz_phase and exchange_level
    share a slow oscillation. Every other pair is independent.
    """
    series = []
    for index, label in enumerate(EIGHT_SERIES_LABELS):
        series.append(SeriesEntry(label=label, components=[
            ColoredComponent(beta=0.8 + 0.1 * (index % 4), level=1.0),
            WhiteComponent(sigma=0.5),
        ]))
    return EnsembleRecipe(
        name="eight_series", n=n, dt=dt, seed=seed, series=series,
        shared=[
            SharedComponent(
                targets=["q1_larmor", "q2_larmor"],
                component=RtsComponent(rate_up=0.02 / dt, rate_down=0.02 / dt, amplitude=2.0),
            ),
            SharedComponent(
                targets=["q1_cz_phase", "exchange_level"],
                component=SinusoidComponent(frequency=0.02 / dt, amplitude=1.0),
            ),
        ],
    )


def _shared_burst(n: int, dt: float, seed: int) -> EnsembleRecipe:
    """A sinusoid present in both series during the middle fifth of the record"""
    duration = n * dt
    return EnsembleRecipe(
        name="shared_burst", n=n, dt=dt, seed=seed,
        series=[SeriesEntry(label=label, components=[WhiteComponent(sigma=1.0)]) for label in ("x", "y")],
        shared=[SharedComponent(targets=["x", "y"], component=SinusoidComponent(
            frequency=1.0 / (64.0 * dt), amplitude=math.sqrt(2.0),
            burst_start=0.4 * duration, burst_end=0.6 * duration,
        ))],
    )


def _slow_sinusoid(n: int, dt: float, seed: int) -> EnsembleRecipe:
    """A shared slow sinusoid at SNR 1 in independent white noise"""
    return EnsembleRecipe(
        name="slow_sinusoid", n=n, dt=dt, seed=seed,
        series=[SeriesEntry(label=label, components=[WhiteComponent(sigma=1.0)]) for label in ("x", "y")],
        shared=[SharedComponent(targets=["x", "y"], component=SinusoidComponent(
            frequency=1.0 / (128.0 * dt), amplitude=math.sqrt(2.0),
        ))],
    )


def _rts_pair(n: int, dt: float, seed: int) -> EnsembleRecipe:
    """A shared fluctuator with a 50-sample mean dwell on independent 1/f backgrounds"""
    return EnsembleRecipe(
        name="rts_pair", n=n, dt=dt, seed=seed,
        series=[SeriesEntry(label=label, components=[ColoredComponent(beta=1.0, level=1.0)])
                for label in ("x", "y")],
        shared=[SharedComponent(targets=["x", "y"], component=RtsComponent(
            rate_up=0.02 / dt, rate_down=0.02 / dt, amplitude=2.0,
        ))],
    )


def _shared_drift(n: int, dt: float, seed: int) -> EnsembleRecipe:
    """A shared random-walk-like (beta = 2) component under independent white noise"""
    return EnsembleRecipe(
        name="shared_drift", n=n, dt=dt, seed=seed,
        series=[SeriesEntry(label=label, components=[WhiteComponent(sigma=1.0)]) for label in ("x", "y")],
        shared=[SharedComponent(targets=["x", "y"], component=ColoredComponent(beta=2.0, level=1.0))],
    )


PRESETS: Dict[str, Callable[[int, float, int], EnsembleRecipe]] = {
    "bump": _bump,
    "eight_series": _eight_series,
    "shared_burst": _shared_burst,
    "slow_sinusoid": _slow_sinusoid,
    "rts_pair": _rts_pair,
    "shared_drift": _shared_drift,
}
