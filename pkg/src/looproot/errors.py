"""Exception hierarchy shared by every looproot module."""

from __future__ import annotations


class LoopRootError(Exception):
    """Base class for domain errors. The CLI maps these to exit status 1."""


class GCMError(LoopRootError, ValueError):
    def __init__(self, pair: tuple[str, str], message: str) -> None:
        self.pair = pair
        super().__init__(f"{message} at ({pair[0]},{pair[1]})")


class DiagonalNotTwo(GCMError):
    pass


class PositiveOffDiagonal(GCMError):
    pass


class AsymmetricZero(GCMError):
    pass


class MalformedMatrix(LoopRootError, ValueError):
    pass


class SafetyCapExceeded(LoopRootError):
    pass


class IncompleteSystem(LoopRootError):
    pass


class RootNotInAmbient(LoopRootError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class NotClosed(LoopRootError):
    pass


class PostconditionFailure(LoopRootError):
    pass


class LiftIncomplete(LoopRootError):
    pass


class RankBoundExceeded(LoopRootError):
    pass


class RootNotInSubsystem(LoopRootError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class NotSimple(LoopRootError):
    pass


class NotAScalingFunction(LoopRootError, ValueError):
    pass


class NotFiniteType(LoopRootError):
    pass


class NonIntegerEntry(LoopRootError):
    pass


class InvalidPair(LoopRootError, ValueError):
    pass


class NotARootFunction(LoopRootError, ValueError):
    pass


class InternalInconsistency(LoopRootError):
    pass


class WindowOverflow(LoopRootError):
    pass


class MalformedInput(LoopRootError, ValueError):
    pass
