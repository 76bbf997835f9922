class InvalidConfigurationError(ValueError):
    pass


class InvalidJobError(ValueError):
    pass


class DSLSyntaxError(ValueError):
    def __init__(self, message, line=None, column=None):
        super(DSLSyntaxError, self).__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def __str__(self):
        if self.line is None:
            return self.message
        return "line {0}, column {1}: {2}".format(
            self.line, self.column, self.message)


class UndeclaredSymbolError(ValueError):
    def __init__(self, name, line=None):
        super(UndeclaredSymbolError, self).__init__(name)
        self.name = name
        self.line = line

    def __str__(self):
        if self.line is None:
            return "undeclared symbol {0!r}".format(self.name)
        return "line {0}: undeclared symbol {1!r}".format(
            self.line, self.name)


class NonPolynomialError(ValueError):
    pass


class NotOrthonomicError(RuntimeError):
    pass


class InsufficientOrderError(ValueError):
    pass


class NotApplicableError(RuntimeError):
    pass


class BudgetExceededError(RuntimeError):
    def __init__(self, budget):
        super(BudgetExceededError, self).__init__(budget)
        self.budget = budget

    def __str__(self):
        return "completion exceeded its budget of {0} reductions".format(
            self.budget)


class NotClosedError(RuntimeError):
    def __init__(self, entries):
        super(NotClosedError, self).__init__("Not closed")
        self.entries = entries

    def __str__(self):
        return ("commutators do not decompose in the basis: "
                "{0}".format(self.entries))


class SingularExponentMatrixError(RuntimeError):
    pass


class ParameterBearingError(ValueError):
    pass


class NoDecompositionError(RuntimeError):
    pass


class NotVariationalSymmetryError(RuntimeError):
    def __init__(self, residual):
        super(NotVariationalSymmetryError, self).__init__("Not variational")
        self.residual = residual

    def __str__(self):
        return "current is not conserved, divergence is {0}".format(
            self.residual)


class HigherOrderLagrangianError(ValueError):
    pass
