class ColorlabError(Exception):
    """Base class for all errors raised by colorlab."""


class UnknownNodeError(ColorlabError, KeyError):
    pass


class PreconditionError(ColorlabError, ValueError):
    pass


class OracleFailure(ColorlabError):
    """No proper k-coloring exists for the queried neighbourhood."""


class BudgetBreach(ColorlabError):
    """A commit would land outside the group that owns it."""


class AdversaryError(ColorlabError):
    pass
