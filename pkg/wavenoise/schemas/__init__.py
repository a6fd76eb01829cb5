# wavenoise/schemas/__init__.py
from wavenoise.schemas.timeseries import *
from wavenoise.schemas.wavelet import *
from wavenoise.schemas.spectrum import *
from wavenoise.schemas.correlation import *
from wavenoise.schemas.variance import *
from wavenoise.schemas.recipe import *
from wavenoise.schemas.run_config import *

__all__ = [
    # Time series schemas
    "TimeSeries",
    "SeriesSet",

    # Wavelet schemas
    "BasisKind",
    "Normalization",
    "GridMode",
    "WaveletBasis",
    "ScaleGrid",
    "WaveletMatrix",
    "WaveletSpectrum",

    # Spectrum schemas
    "Estimator",
    "WindowKind",
    "Spectrum",
    "CoherenceSpectrum",

    # Correlation schemas
    "PearsonComponent",
    "CoherenceMap",
    "ScaleCorrelationEntry",
    "ScaleCorrelation",
    "CorrelationPair",
    "CorrelationGrid",

    # Variance transform schemas
    "CovarianceVector",
    "VarianceTransformResult",
    "PeakVarianceRow",
    "PeakVarianceSummary",

    # Recipe schemas
    "RtsComponent",
    "ColoredComponent",
    "SinusoidComponent",
    "DriftComponent",
    "WhiteComponent",
    "NoiseComponent",
    "NoiseRecipe",
    "SeriesEntry",
    "SharedComponent",
    "EnsembleRecipe",

    # Run configuration
    "RunConfig",
]
