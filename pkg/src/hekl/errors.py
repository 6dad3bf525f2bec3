"""Exception hierarchy shared by all hekl modules."""


class HeklError(Exception):
    pass


class ParameterError(HeklError, ValueError):
    """Invalid parameters, sizes or mismatched operands."""


class DomainError(HeklError, ArithmeticError):
    """Arithmetic on a value outside the operation's domain (e.g. no inverse)."""


class StateError(HeklError, RuntimeError):
    """Operation not valid for the object's current state (level, size)."""


class PrimeExhaustionError(ParameterError):
    """Not enough NTT-friendly primes in the requested range."""


class EncodingOverflowError(ParameterError):
    """Scaled plaintext does not fit in the modulus headroom."""


class PoolError(HeklError, RuntimeError):
    """Buffer pool contract violation (double release, foreign buffer)."""
