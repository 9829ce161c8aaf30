from strobosam.solvers.odecore import adaptive_integrate, fixed_rk4
from strobosam.solvers.sam import (
    poincare_pow,
    sam_f_eval,
    sam_integrate,
    sam_state_at,
    strang_micro_step,
    stroboscopic_times,
)

__all__ = [
    "adaptive_integrate",
    "fixed_rk4",
    "poincare_pow",
    "sam_f_eval",
    "sam_integrate",
    "sam_state_at",
    "strang_micro_step",
    "stroboscopic_times",
]
