"""
mopasym - Mehler-Heine asymptotics of multiple orthogonal polynomials

Exact and arbitrary-precision constructions of seven families of multiple
orthogonal polynomials (Jacobi-Angelesco, Jacobi-Pineiro, multiple Laguerre
of both kinds, Sorokin's Laguerre polynomials on rays, and the K-Bessel,
I-Bessel and Meijer-G families), their hard-edge limit functions 0Fr, and a
harness that measures how fast the rescaled polynomials and zeros approach
those limits.

Quick Start:
    pip install mopasym

    mopasym eval --family kbessel --alpha 0 --nu 1 --n 1 --x 3
    mopasym mh-table --theorem 6 --family kbessel --alpha 0 --nu 1
    mopasym verify

Usage:
    from mopasym import FamilyFactory, PrecisionContext
    from mopasym.core.schema import KBesselSpec

    ctx = PrecisionContext(digits=50)
    family = FamilyFactory.create(KBesselSpec(alpha=0, nu=1), ctx)
"""

__version__ = "0.1.0"

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .config import settings as settings
    from .core.families import FamilyFactory as FamilyFactory
    from .core.harness import run_mh_experiment as run_mh_experiment
    from .core.harness import run_zero_scaling as run_zero_scaling
    from .core.precision import PrecisionContext as PrecisionContext

__all__ = [
    "settings",
    "FamilyFactory",
    "PrecisionContext",
    "run_mh_experiment",
    "run_zero_scaling",
    "__version__",
]


def __getattr__(name: str):
    # Lazily import the numerics to keep CLI startup lightweight.
    if name == "settings":
        from .config import settings as value
        return value
    if name == "FamilyFactory":
        from .core.families import FamilyFactory as value
        return value
    if name == "PrecisionContext":
        from .core.precision import PrecisionContext as value
        return value
    if name in ("run_mh_experiment", "run_zero_scaling"):
        from .core import harness
        return getattr(harness, name)
    raise AttributeError(f"module 'mopasym' has no attribute '{name}'")
