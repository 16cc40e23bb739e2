"""Exception hierarchy shared by all modules.

Every exception carries an ``exit_code`` so the CLI can map failures to
distinct process statuses without a lookup table scattered around.
"""

from __future__ import annotations

from typing import Any


class PoissonLiftError(Exception):
    exit_code = 1

    def to_dict(self) -> dict[str, Any]:
        return {"type": type(self).__name__, "message": str(self), "exit_code": self.exit_code}


# -- polynomial layer -------------------------------------------------------


class ContextError(PoissonLiftError, ValueError):
    """Operands live over different variable contexts."""

    exit_code = 2


class VarError(PoissonLiftError, KeyError):
    """Unknown variable, or a parameter used as a differentiation target."""

    exit_code = 2

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else ""


class EvalError(PoissonLiftError, ValueError):
    exit_code = 2


class PolySyntaxError(PoissonLiftError, ValueError):
    exit_code = 2

    def __init__(self, message: str, text: str, offset: int):
        super().__init__(f"syntax error at offset {offset}: {message}")
        self.text = text
        self.offset = offset

    def to_dict(self) -> dict[str, Any]:
        d = super().to_dict()
        d["offset"] = self.offset
        return d


# -- tensor construction -----------------------------------------------------


class NotAntisymmetric(PoissonLiftError, ValueError):
    exit_code = 2


class UnknownAlgebra(PoissonLiftError, KeyError):
    exit_code = 3

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class JacobiFailed(PoissonLiftError, ValueError):
    exit_code = 4

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


# -- hypotheses of the constructors ------------------------------------------


class PreconditionViolated(PoissonLiftError, ValueError):
    """A hypothesis of a construction fails.

    ``hypothesis`` names the failed assumption, ``residual`` is the first
    nonzero witness and ``value`` optionally carries the formal result that
    was computed anyway.
    """

    exit_code = 4

    def __init__(self, hypothesis: str, residual=None, value=None, detail: str = ""):
        msg = f"precondition violated: {hypothesis}"
        if residual is not None:
            msg += f" (residual {residual})"
        if detail:
            msg += f"; {detail}"
        super().__init__(msg)
        self.hypothesis = hypothesis
        self.residual = residual
        self.value = value

    def to_dict(self) -> dict[str, Any]:
        d = super().to_dict()
        d["hypothesis"] = self.hypothesis
        if self.residual is not None:
            d["residual"] = str(self.residual)
        return d


class NotPoisson(PreconditionViolated):
    def __init__(self, residual=None, detail: str = ""):
        super().__init__("tensor satisfies the Jacobi identity", residual, detail=detail)


class NotCompatible(PreconditionViolated):
    def __init__(self, residual=None, detail: str = ""):
        super().__init__("tensors are Schouten-compatible", residual, detail=detail)


class NotCasimir(PreconditionViolated):
    def __init__(self, residual=None, detail: str = ""):
        super().__init__("function is a Casimir", residual, detail=detail)


class DependsOnXp(PreconditionViolated):
    def __init__(self, residual=None, detail: str = ""):
        super().__init__("tensor is independent of x_p", residual, detail=detail)


class NotLinear(PreconditionViolated):
    def __init__(self, residual=None, detail: str = ""):
        super().__init__("function is linear", residual, detail=detail)


class NotLinearTensor(PreconditionViolated):
    def __init__(self, residual=None, detail: str = ""):
        super().__init__("tensor is linear in the coordinates", residual, detail=detail)


class NotHomogeneous(PreconditionViolated):
    def __init__(self, residual=None, detail: str = ""):
        super().__init__("function is linear- or quadratic-homogeneous", residual, detail=detail)


class ConditionsViolated(PreconditionViolated):
    """Semidirect-product conditions fail; ``tensor`` is still attached."""

    def __init__(self, report, tensor=None):
        first = report.witnesses[0] if report.witnesses else (None, None)
        super().__init__(
            "semidirect product conditions", first[1], value=tensor, detail=f"first failing index {first[0]}"
        )
        self.report = report
        self.tensor = tensor


class SideConditionFailed(PreconditionViolated):
    def __init__(self, i: int, j: int, residual=None):
        super().__init__("side condition on f_i", residual, detail=f"i={i}, j={j}")
        self.i, self.j = i, j


class ConditionFailed(PreconditionViolated):
    def __init__(self, i: int, j: int, residual=None, what: str = "defining condition"):
        super().__init__(what, residual, detail=f"i={i}, j={j}")
        self.i, self.j = i, j


class InvolutionHypothesisFailed(PreconditionViolated):
    def __init__(self, pair, which: str, residual=None):
        super().__init__(f"functions in involution for {which}", residual, detail=f"pair {pair}")
        self.pair, self.which = pair, which


# -- numerics -----------------------------------------------------------------


class InsufficientSamples(PoissonLiftError, RuntimeError):
    exit_code = 5


class DivergenceError(PoissonLiftError, FloatingPointError):
    exit_code = 5

    def __init__(self, step: int, state=None):
        super().__init__(f"non-finite state at step {step}")
        self.step = step
        self.state = state
