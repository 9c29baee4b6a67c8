"""Simulation and inversion toolkit for narrow laser beams in turbulent media.

Forward side: closed Fourier-form beam densities, off-axis single-scattering
measurements, and sinograms of the transverse profile.  Inverse side:
beam-axis triangulation, radial inverse Radon reconstruction, and explicit
recovery of the physical parameters (attenuation, diffusion scale,
fractional exponent, amplitude product, source distance).
"""

__version__ = "0.1.0"

from .pencil_beam import GridSpec, MediumParams  # noqa: F401
from .geometry import BeamAxis, Camera, DetectorPlane  # noqa: F401
