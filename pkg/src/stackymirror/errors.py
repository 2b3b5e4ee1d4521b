"""Exception hierarchy; every error carries a machine-readable ``code``."""


class EngineError(Exception):
    code = "engine-error"
    exit_code = 3


class ParseError(EngineError):
    code = "parse-error"
    exit_code = 4

    def __init__(self, message: str, line: int | None = None, column: int | None = None,
                 path: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if path:
            where.append(f"at {path}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line, self.column, self.path = line, column, path


class ValidationError(EngineError):
    code = "validation-failure"
    exit_code = 2


class UnsupportedInput(EngineError):
    code = "unsupported-input"


class InvalidFan(EngineError):
    code = "invalid-fan"
    exit_code = 2


class InvalidExtension(EngineError):
    code = "invalid-extension"
    exit_code = 2


class DomainError(EngineError):
    code = "domain-error"


class NonTerminatingEnumeration(EngineError):
    code = "non-terminating-enumeration"


class SingularFactor(EngineError):
    code = "singular-factor"


class DegenerateNormalization(EngineError):
    code = "degenerate-normalization"


class NonInvertibleMap(EngineError):
    code = "non-invertible-map"


class RankDeficiency(EngineError):
    code = "rank-deficiency"


class ShapeError(EngineError):
    code = "shape-violation"


class ConstructionError(EngineError):
    code = "construction-error"


class ConvexityViolation(EngineError):
    code = "convexity-violation"


class CoarsenessViolation(EngineError):
    code = "coarseness-violation"


class NonConvexLimit(EngineError):
    code = "non-convex-limit"


class Obstruction(EngineError):
    code = "obstruction"
