"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class CritnodeError(Exception):
    exit_code = 1


class InvalidInputError(CritnodeError, ValueError):
    exit_code = 2


class BackendError(CritnodeError, RuntimeError):
    exit_code = 3


class BudgetExceededError(CritnodeError):
    exit_code = 4


class ConstraintViolation(CritnodeError):
    """A variable assignment breaks a named ILP constraint."""

    exit_code = 3

    def __init__(self, constraint_name, detail=""):
        self.constraint_name = constraint_name
        msg = f"constraint {constraint_name!r} violated"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
