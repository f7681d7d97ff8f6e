class ConfigError(ValueError):
    """Invalid scenario or parameter set; the message names the offending field."""


class IllPosedError(ConfigError):
    """The best-reply system violates nu^k > 4 (M - 2) alpha**2."""


class DomainError(RuntimeError):
    """A particle left its admissible domain during a run."""
