"""Eigenmodes, mode volume, coupling and tuning of bottle whispering-gallery resonators."""

__version__ = "0.1.0"

from .coupling import g_at_surface_curve, g_max, regime_report, sphere_g_curve, sphere_mode
from .fields import field_grid, intensity, mode_volume, rho_cutoff
from .geometry import ResonatorProfile, caustic, paraxial_error_bound
from .materials import CS_D2, SILICA, silica_index
from .modes import BottleMode, ModeIndices, solve_bottle_mode
from .tuning import mode_spacings, strain_budget, temperature_tuning

__all__ = [
    "BottleMode", "CS_D2", "ModeIndices", "ResonatorProfile", "SILICA",
    "caustic", "field_grid", "g_at_surface_curve", "g_max", "intensity",
    "mode_spacings", "mode_volume", "paraxial_error_bound", "regime_report",
    "rho_cutoff", "silica_index", "solve_bottle_mode", "sphere_g_curve",
    "sphere_mode", "strain_budget", "temperature_tuning",
]
