from wavenoise.services.timeseries_service import TimeSeriesService
from wavenoise.services.wavelet_service import WaveletService
from wavenoise.services.spectral_service import SpectralService
from wavenoise.services.correlation_service import CorrelationService
from wavenoise.services.variance_service import VarianceService
from wavenoise.services.synth_service import SynthService

__all__ = [
    "TimeSeriesService",
    "WaveletService",
    "SpectralService",
    "CorrelationService",
    "VarianceService",
    "SynthService",
]
