"""Exception types shared across the package."""


class InvalidActionError(ValueError):
    """An action failed its spec or action-mask check.

    ``batch_index`` names the offending entry when the step was batched.
    """

    def __init__(self, message: str, batch_index: int | None = None):
        if batch_index is not None:
            message = f"batch index {batch_index}: {message}"
        super().__init__(message)
        self.batch_index = batch_index


class ContractViolationError(RuntimeError):
    """The caller broke an API contract, e.g. stepped a finished episode."""

    def __init__(self, message: str, batch_index: int | None = None):
        if batch_index is not None:
            message = f"batch index {batch_index}: {message}"
        super().__init__(message)
        self.batch_index = batch_index


class EnvNotFoundError(LookupError):
    def __init__(self, env_id: str, suggestions: list[str]):
        hint = f"; did you mean {', '.join(suggestions)}?" if suggestions else ""
        super().__init__(f"no environment registered as {env_id!r}{hint}")
        self.env_id = env_id
        self.suggestions = suggestions


class RegistryConflictError(ValueError):
    pass


class InstanceFormatError(ValueError):
    """Malformed instance file; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line
