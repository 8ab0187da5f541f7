"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An operation received an out-of-domain parameter."""


class ModelMismatchError(ValueError):
    """An operation was applied to a graph with the wrong diffusion model tag."""


class CapacityError(RuntimeError):
    """An exact computation would exceed its size or iteration guard."""


class FormatError(ValueError):
    """Malformed input file; the message carries a line number when known."""


class ContractViolationError(ValueError):
    """Inputs break an API precondition (e.g. vaccinating an infected node)."""
