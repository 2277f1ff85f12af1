"""Exception hierarchy shared by every module."""


class EffectusLabError(Exception):
    """Base class for all errors raised by effectus_lab."""


class ShapeMismatch(EffectusLabError, ValueError):
    pass


class NotHermitian(EffectusLabError, ValueError):
    pass


class NotPSD(EffectusLabError, ValueError):
    pass


class NotEffect(EffectusLabError, ValueError):
    pass


class NotProjection(EffectusLabError, ValueError):
    pass


class NotSharp(NotProjection):
    pass


class NotSubalgebra(EffectusLabError, ValueError):
    pass


class NotSummable(EffectusLabError, ValueError):
    pass


class NotPositive(EffectusLabError, ValueError):
    pass


class TargetNotFactor(EffectusLabError, ValueError):
    pass


class NotADilationTriple(EffectusLabError, ValueError):
    pass


class NotIsomorphic(EffectusLabError, ValueError):
    pass


class UniversalPropertyViolated(EffectusLabError, ValueError):
    pass


class NotPure(EffectusLabError, ValueError):
    pass


class NotNormalized(EffectusLabError, ValueError):
    pass


class NotDefined(EffectusLabError, ValueError):
    pass
