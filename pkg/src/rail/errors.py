"""Exception types shared across modules, mapped to CLI exit codes."""


class ConfigError(ValueError):
    """Malformed config file, unknown keys, or invariant violations. Exit code 2."""


class FingerprintMismatchError(ConfigError):
    """Artifact was produced under a different env/sensor configuration. Exit code 2."""


class NumericalAbortError(RuntimeError):
    """Non-finite parameters encountered during training. Exit code 3."""
