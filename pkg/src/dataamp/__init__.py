"""Entropy-based histogramming and limits on data amplification."""

__version__ = "0.1.0"

from .amplifier import AmplificationReport, audit, chain_m_eff, gencopy, m_eff, max_gain  # noqa: E402
from .distributions import DistributionModel, parse_model  # noqa: E402
from .histogram import Histogram, Sample, bin_width, build, shannon_entropy  # noqa: E402
from .knn import averaged_kld, kld_variance, knn_entropy, knn_kld  # noqa: E402

__all__ = [
    "AmplificationReport",
    "DistributionModel",
    "Histogram",
    "Sample",
    "audit",
    "averaged_kld",
    "bin_width",
    "build",
    "chain_m_eff",
    "gencopy",
    "kld_variance",
    "knn_entropy",
    "knn_kld",
    "m_eff",
    "max_gain",
    "parse_model",
    "shannon_entropy",
]
