"""
Exception hierarchy shared by the library and the command line.

Each error carries the process exit code the CLI should use and a
human-readable detail string.
"""


class MaxDistError(Exception):
    """Base error. `exit_code` is what the CLI returns when this escapes."""

    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class InputError(MaxDistError):
    """File could not be read, parsed or written."""

    exit_code = 1


class DomainError(MaxDistError, ValueError):
    """A parameter lies outside the operation's domain."""

    exit_code = 2


class GeometryError(DomainError):
    """Dimension mismatch, empty input or malformed graph."""


class InfeasibleError(DomainError):
    """The candidate grid cannot reach the required coverage margin."""


class CertificateError(MaxDistError):
    """A coverage certificate that was required to pass did not."""

    exit_code = 3

    def __init__(self, detail: str, certificate=None):
        super().__init__(detail)
        self.certificate = certificate
