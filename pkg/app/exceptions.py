class RDSAError(Exception):
    """Base class of every error raised by the clustering pipeline."""


class InputError(RDSAError):
    """Invalid files, arguments or array shapes. Commands exit with code 2."""

    exit_code = 2


class TrainingDivergence(RDSAError):
    """The optimisation produced non-finite values. Commands exit with code 3."""

    exit_code = 3


class ShapeMismatch(InputError):
    pass


class LengthMismatch(InputError):
    pass


class LabelsRequired(InputError):
    pass
