"""Exception hierarchy shared by the whole package."""


class GrammarError(ValueError):
    """Invalid grammar text or structure."""


class GrammarSyntaxError(GrammarError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class CycleError(GrammarError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cyclic rules: " + " -> ".join(self.cycle))


class RankError(GrammarError):
    """Inconsistent ranks, non-linear right-hand sides or bad parameter sets."""


class LengthOverflow(GrammarError):
    """A derived string or tree does not fit into a signed 64-bit counter."""

    def __init__(self, symbol):
        self.symbol = symbol
        super().__init__(f"size of val({symbol}) is >= 2^63")


class GuardExceeded(RuntimeError):
    """Raised instead of expanding something larger than the caller allows."""

    def __init__(self, size, guard):
        self.size = size
        self.guard = guard
        super().__init__(f"expansion has size {size}, guard is {guard}")


class FingerprintContradiction(AssertionError):
    """The deterministic endpoint check disagreed with a fingerprint answer."""
