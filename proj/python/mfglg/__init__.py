"""Mean field game solver with a high-order transport discretization.

The heavy lifting lives in the compiled extension; this package re-exports
the study driver, the self-check runner, and the closed-form oracle used
by the linear-quadratic benchmark.
"""

from ._core import (
    __version__,
    defaults,
    lq_density,
    lq_value,
    run_study,
    verify,
)

__all__ = [
    "__version__",
    "defaults",
    "lq_density",
    "lq_value",
    "run_study",
    "verify",
]
