"""
Exception hierarchy shared by the simulator, protocol engine and attacks
"""


class QssError(ValueError):
    """Base class for every error raised by the laboratory"""


class DimensionError(QssError):
    """Invalid (dimension, basis kind) pair"""

    def __init__(self, d: int, kind: str, reason: str):
        self.d = d
        self.kind = kind
        self.reason = reason
        super().__init__(f"d={d} is not valid for {kind}: {reason}")


class StateError(QssError):
    """Shape, normalization or orthonormality failure on a state or basis"""


class LabelError(QssError):
    """Basis or outcome label out of range, or labels that break consistency"""


class EnumerationError(QssError):
    """Exhaustive enumeration would exceed the configured budget"""


class ProtocolError(QssError):
    """Protocol operation used outside its preconditions"""


class AttackUnavailable(QssError):
    """The adversary lacks the public information an attack step needs"""
