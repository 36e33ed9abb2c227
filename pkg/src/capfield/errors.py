"""Exception types shared across the package."""


class GridMismatchError(ValueError):
    """Two objects that must live on the same spatial grid do not."""


class DomainViolationError(ValueError):
    """A value left the domain an operation requires (e.g. negative power of zero)."""


class ConfigError(ValueError):
    """Run configuration is malformed or inconsistent.  CLI exit code 2."""


class UnsupportedCaseError(RuntimeError):
    """A case the solver refuses by design (e.g. initial state above the
    investment trigger, two-factor lattice).  CLI exit code 3."""


class SolverError(RuntimeError):
    """A numerical solve failed (bracket not found, level grid exhausted)."""
