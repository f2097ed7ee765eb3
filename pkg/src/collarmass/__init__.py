"""Collar extensions of Bartnik data and the mass bounds they give."""

__version__ = "0.1.0"

from .surface import AxisymmetricMetric, BartnikData, SurfaceField  # noqa: E402
from .paths import TraceFreePath, build_path  # noqa: E402
from .collar import CollarSpec, build_collar, certify  # noqa: E402
from .mass import upper_bound_mass, convexity_margin, hawking_mass  # noqa: E402
from .corner import WarpedManifold, CornerManifold, adm_mass  # noqa: E402

__all__ = [
    "AxisymmetricMetric", "BartnikData", "SurfaceField", "TraceFreePath", "build_path",
    "CollarSpec", "build_collar", "certify", "upper_bound_mass", "convexity_margin",
    "hawking_mass", "WarpedManifold", "CornerManifold", "adm_mass",
]
