from strobosam.models.averaging import (
    averaged1_rhs,
    averaged2_rhs,
    hat_to_polar,
    polar_averaged1_rhs,
    polar_to_hat,
)
from strobosam.models.duffing import duffing_rhs, phys_to_rotating, rotate_to_phys, rotating_rhs, sweep_phase

__all__ = [
    "averaged1_rhs",
    "averaged2_rhs",
    "duffing_rhs",
    "hat_to_polar",
    "phys_to_rotating",
    "polar_averaged1_rhs",
    "polar_to_hat",
    "rotate_to_phys",
    "rotating_rhs",
    "sweep_phase",
]
