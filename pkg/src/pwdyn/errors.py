"""Exception hierarchy.

``ValidationError`` subclasses signal malformed input (CLI exit code 1);
``ResourceCap`` signals that an exact representation outgrew its budget
(CLI exit code 2).
"""


class PwdynError(Exception):
    pass


class ValidationError(PwdynError, ValueError):
    pass


class BadPartition(ValidationError):
    pass


class NotBijective(ValidationError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class OutOfDomain(ValidationError):
    pass


class NoFinitePartition(PwdynError):
    pass


class NotStabilized(PwdynError):
    pass


class NullAttractor(PwdynError):
    pass


class Stabilized(PwdynError):
    """Raised by box-dimension estimation when the attractor is a finite union of intervals."""


class DegenerateArrangement(ValidationError):
    pass


class ResourceCap(PwdynError):
    def __init__(self, message, size=None, budget=None):
        super().__init__(message)
        self.size = size
        self.budget = budget
