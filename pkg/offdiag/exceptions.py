#
# offdiag/exceptions.py
#
# the offdiag exception tree, grouped by parent via 80-wide dash comments
#

import traceback
from typing import Optional


class OffdiagError(Exception):
    """ Any exception that stems from offdiag. """
    def __init__(self, message: str, e: Optional[Exception] = None):
        if e is not None:
            before = f" {str(type(e))[8:-2]}"
            tb = traceback.format_exc()
            super().__init__(f"{before}\n{message}{tb}\n")
        else: super().__init__(str(message))

# -----------------------------------------------------------------------------

class ConfigError(OffdiagError):
    """ Base class for configuration errors. """

class ConfigSyntaxError(ConfigError):
    """ Configuration file could not be parsed. """
    def __init__(self, config_path: str, e: Exception):
        super().__init__(f"Could not parse config {config_path}, with exception:", e)

class InvalidConfigValue(ConfigError):
    """ Parser found an invalid configuration value. """
    def __init__(self, key_path: str, message: str):
        self.key_path = key_path
        super().__init__(f"{key_path}: {message}")

# -----------------------------------------------------------------------------

class ModelError(OffdiagError):
    """ Base class for errors in the spectral data (m, v, a1). """

class InvalidMeasure(ModelError):
    """ Measure parameters violate the measure invariants. """

class InvalidModel(ModelError):
    """ Coupling or corner entry is inconsistent with the measure. """

class ModelFileError(ModelError):
    """ Model file could not be read; carries the offending field path. """
    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}" if field_path else message)

class AllWeightsZero(ModelError):
    """ Coupling vanishes on the whole support of m, so nu is the zero measure. """
    def __init__(self):
        super().__init__("Coupling v vanishes on supp m; the weighted measure nu is zero")

class EmptyModel(ModelError):
    """ Model has no atoms to work with. """
    def __init__(self, what: str = "nu"):
        super().__init__(f"Measure {what} has no atoms")

class NotRefinable(ModelError):
    """ Attempted to refine a model that has no refinement rule. """
    def __init__(self, reason: str):
        super().__init__(f"Model is not refinable: {reason}")

# -----------------------------------------------------------------------------

class EvaluationError(OffdiagError):
    """ Base class for errors while evaluating transforms. """

class OffAxisRequired(EvaluationError):
    """ Transform was requested at a point where it is only defined off the real axis. """
    def __init__(self, z: complex, needed: str = "Im z != 0"):
        super().__init__(f"Point {z} not allowed, need {needed}")

class DenominatorVanishes(EvaluationError):
    """ Denominator (a1 - z) - F(z) is numerically zero. """
    def __init__(self, z: complex):
        super().__init__(f"Denominator of phi vanishes at z = {z}")

class AtomAtLambda(EvaluationError):
    """ Lambda coincides with an atom of nu; the boundary value diverges there. """
    def __init__(self, lam: float, weight: float):
        self.lam = lam
        self.weight = weight
        super().__init__(f"lambda = {lam!r} is an atom of nu (weight {weight!r}); F(lambda + i0) diverges")

# -----------------------------------------------------------------------------

class RiccatiError(OffdiagError):
    """ Base class for errors around the functional X_lambda. """

class AtAtom(RiccatiError):
    """ X_lambda applied to a vector that does not vanish at the atom lambda. """
    def __init__(self, lam: float):
        self.lam = lam
        super().__init__(f"lambda = {lam!r} is an atom carrying v*phi != 0; X_lambda phi diverges")

class NotInSupport(RiccatiError):
    """ Lambda fails the singular-support membership test. """
    def __init__(self, lam: float, tag: str):
        self.lam = lam
        self.tag = tag
        super().__init__(f"lambda = {lam!r} classifies as {tag}, not a singular-support candidate")

class NotPurePoint(RiccatiError):
    """ Operation needs an eigenvalue and lambda is not one. """
    def __init__(self, lam: float, tag: str):
        self.lam = lam
        self.tag = tag
        super().__init__(f"lambda = {lam!r} classifies as {tag}, not PurePoint")

class NotApplicable(RiccatiError):
    """ Norm bound requested outside of its smallness condition. """
    def __init__(self, v_norm: float, threshold: float):
        self.v_norm = v_norm
        self.threshold = threshold
        super().__init__(f"||V|| = {v_norm!r} is not below c_pi * d = {threshold!r}")

# -----------------------------------------------------------------------------

class OracleError(OffdiagError):
    """ Base class for errors of the dense ground-truth engine. """

class OracleTooLarge(OracleError):
    """ Model has more atoms than the dense oracle accepts. """
    def __init__(self, size: int, cap: int):
        super().__init__(f"Model has {size} atoms, dense oracle is capped at {cap}")

class OracleFailure(OracleError):
    """ Dense eigensolve or linear solve failed its own checks. """

# -----------------------------------------------------------------------------

class WriterException(OffdiagError):
    """ Base class for writer errors. """

class WriterNotFound(WriterException):
    """ Writer type given not known. """
    def __init__(self, writer_name: str):
        super().__init__(f"Unknown writer type {writer_name}")

class WriterAlreadyEnabled(WriterException):
    """ Tried to enable a writer that was already enabled. """
    def __init__(self, writer_name: str):
        super().__init__(f"Writer {writer_name} is already enabled!")

class WriterAlreadyDisabled(WriterException):
    """ Tried to disable a writer that was already disabled. """
    def __init__(self, writer_name: str):
        super().__init__(f"Writer {writer_name} is already disabled!")
