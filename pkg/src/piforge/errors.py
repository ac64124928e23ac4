"""Exception hierarchy shared by all piforge modules."""


class PiforgeError(Exception):
    """Base class for every error raised by piforge."""


# coefficient rings

class NonPrimeCharacteristic(PiforgeError, ValueError):
    pass


class ExtensionTooLarge(PiforgeError, ValueError):
    pass


class DivisionByZero(PiforgeError, ZeroDivisionError):
    pass


class MixedFields(PiforgeError, TypeError):
    pass


class CharacteristicZero(PiforgeError, ValueError):
    pass


class NotAField(PiforgeError, ValueError):
    pass


class ParseError(PiforgeError, ValueError):
    pass


# free algebra and named polynomials

class VariableAbsent(PiforgeError, ValueError):
    pass


class BinomialVanishes(PiforgeError, ValueError):
    pass


class NotUnital(PiforgeError, ValueError):
    pass


class CapTooLarge(PiforgeError, ValueError):
    pass


class UnsupportedN(PiforgeError, ValueError):
    pass


class NotLinear(PiforgeError, ValueError):
    pass


class NotMultilinear(PiforgeError, ValueError):
    pass


# matrices

class SizeTooLarge(PiforgeError, ValueError):
    pass


class NotPPower(PiforgeError, ValueError):
    pass


class MixedSizes(PiforgeError, ValueError):
    pass


# quivers

class TooLarge(PiforgeError, ValueError):
    pass


class InvalidStep(PiforgeError, ValueError):
    pass


class InvalidQuiver(PiforgeError, ValueError):
    pass


class NotAPath(PiforgeError, ValueError):
    pass


# evaluation and testing

class UnassignedVariable(PiforgeError, KeyError):
    pass


class UnknownPurity(PiforgeError, ValueError):
    pass


class NotAlternating(PiforgeError, ValueError):
    pass


class BudgetExceeded(PiforgeError, ValueError):
    pass
