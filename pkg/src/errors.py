class BarrenBenchError(Exception):
    pass


class ArgumentError(BarrenBenchError, ValueError):
    pass


class DimensionError(BarrenBenchError, ValueError):
    pass


class ValidationError(BarrenBenchError, ValueError):
    pass


class ConfigError(ValidationError):
    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")

    def __reduce__(self):
        return type(self), (self.field, self.message)


class NumericalError(BarrenBenchError, ArithmeticError):
    pass


class DegenerateStateError(NumericalError):
    pass


class DivergenceError(NumericalError):
    pass


class UnsupportedError(BarrenBenchError, NotImplementedError):
    pass


class RepresentationVanishesError(ArgumentError):
    pass


class DegenerateRegimeError(ArgumentError):
    pass


class SizeGuardError(ArgumentError):
    pass


class FitError(BarrenBenchError, ValueError):
    pass
