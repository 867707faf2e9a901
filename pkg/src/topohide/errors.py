"""Exception hierarchy and the accept/reject verdict shared by all verifiers."""

from __future__ import annotations

from dataclasses import dataclass


class TopoHideError(Exception):
    """Base class for every error raised by this package."""


class InputError(TopoHideError, ValueError):
    """A caller passed a value outside an operation's domain."""


class StructureError(TopoHideError):
    """A graph cannot support the requested operation (no boundary, too few loops, ...)."""


class NoPathError(StructureError):
    """No route exists within the requested length bound."""


class MalformedError(TopoHideError, ValueError):
    """Bytes or files that do not decode to a well-formed object."""


class IssuanceRefused(TopoHideError):
    """The auditor declined to sign a graph commitment."""


class ProofRefused(TopoHideError):
    """The prover's preconditions failed; no transcript was produced."""


class RoutingError(TopoHideError):
    """A message could not be delivered on the channel fabric."""


@dataclass(frozen=True)
class Verdict:
    """Outcome of a verification.

    ``code`` names the first failed check (an equation group, never secret
    data) and is ``None`` on acceptance.
    """

    accepted: bool
    code: str | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.accepted

    @classmethod
    def accept(cls) -> Verdict:
        return cls(True)

    @classmethod
    def reject(cls, code: str, detail: str = "") -> Verdict:
        return cls(False, code, detail)
