"""Exception hierarchy.

Every numerical failure derives from :class:`NumericalError` so the CLI can
map it to exit code 2 and print the class name.
"""


class NumericalError(RuntimeError):
    """Base class for failures of a numerical routine."""


class NonConvergence(NumericalError):
    """QR iteration exceeded its iteration budget."""


class DefectivePairing(NumericalError):
    """Left/right eigenvectors cannot be biorthonormalized (exceptional point)."""


class SingularMatrix(NumericalError):
    """Pivot below the singularity threshold in an LU factorization."""


class StepUnderflow(NumericalError):
    """Adaptive integrator step collapsed."""


class UnsupportedOnsite(ValueError):
    """Bloch form requested for a chain with on-site potentials."""


class GapClosure(NumericalError):
    """|E(k)| vanishes on the k-grid, winding number undefined."""


class NonQuantized(NumericalError):
    """Winding sum is not close to an integer, k-grid too coarse."""


class NoEdgePair(NumericalError):
    """No pair of edge-localized eigenstates found."""


class DegenerateCoupling(NumericalError):
    """Intracell coupling vanishes, localization constants diverge."""


class SingularMiddleBlock(NumericalError):
    """Middle-qubit block M is singular, adiabatic elimination undefined."""
