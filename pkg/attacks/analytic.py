"""
Closed-form intercept-resend detection rates and the weighted error sum they come from
"""
import sympy

from quantum.bases import PROTOCOL_KINDS, BasisKind, BasisSpec, analytic_overlap, validate_dimension
from quantum.errors import LabelError


def _check_kind(d: int, kind: BasisKind) -> BasisKind:
    kind = BasisKind(kind)
    if kind not in PROTOCOL_KINDS:
        raise LabelError(f"detection rates are defined for mub and mbb, not {kind.value}")
    validate_dimension(d, kind)
    return kind


def analytic_detection_rate(d: int, kind: BasisKind) -> sympy.Rational:
    """((d-1)/d)^2 for MUBs, (4d^2 - 10d + 6)/d^3 for MBBs"""
    kind = _check_kind(d, kind)
    if kind is BasisKind.MUB:
        return sympy.Rational(d - 1, d) ** 2
    return sympy.Rational(4 * d * d - 10 * d + 6, d ** 3)


def weighted_error_term(d: int, kind: BasisKind, A: int, a: int, A_guess: int, a_guess: int) -> float:
    """|<A_a|A'_a'>|^2 (1 - |<A'_a'|A_a>|^2): chance of outcome a' times chance the resent pair then fails"""
    kind = _check_kind(d, kind)
    for name, label in (("basis", A), ("guessed basis", A_guess)):
        if not 0 <= label < d:
            raise LabelError(f"{name} label {label} out of range for d={d}")
    overlap = analytic_overlap(BasisSpec(kind=kind, d=d, P=A), a, BasisSpec(kind=kind, d=d, P=A_guess), a_guess)
    weight = abs(overlap) ** 2
    return weight * (1.0 - weight)


def exact_weighted_error_sum(d: int, kind: BasisKind) -> sympy.Rational:
    """The weighted error sum evaluated in exact rational arithmetic.

    MUB overlaps between different bases have |.|^2 = (k|d)^2 / d. MBB overlaps
    are delta + (z - 1)/d with z = e^{2 pi i k / d}, so each term w(1 - w) is a
    Laurent polynomial in z whose powers sum over k = 1..d-1 to d-1 (z^m = 1)
    or -1 (any other m).
    """
    kind = _check_kind(d, kind)
    if kind is BasisKind.MUB:
        # the d guessed outcomes cancel the 1/d weight on each basis offset
        per_offset = [sympy.Rational(sympy.legendre_symbol(k, d) ** 2, d) for k in range(1, d)]
        return sum((w * (1 - w) for w in per_offset), sympy.Integer(0))

    z = sympy.Symbol("z")

    def offset_sum(same_outcome: bool) -> sympy.Rational:
        delta = 1 if same_outcome else 0
        x = delta + (z - 1) * sympy.Rational(1, d)
        x_bar = delta + (1 / z - 1) * sympy.Rational(1, d)
        w = x * x_bar
        terms = sympy.Poly(sympy.expand(w * (1 - w) * z ** 2), z).terms()
        return sum(
            (coeff * (d - 1 if (power - 2) % d == 0 else -1) for (power,), coeff in terms),
            sympy.Integer(0),
        )

    # guessed outcome a' = 0 matches a = 0 once; the other d-1 labels differ
    return (offset_sum(True) + (d - 1) * offset_sum(False)) / d


def weighted_error_sum(d: int, kind: BasisKind) -> tuple[float, sympy.Rational]:
    """Average error over wrong guesses A' = A - delta, delta = 1..d-1, each weighted 1/d.

    Returned as the float sum of weighted_error_term and as the exact rational value.
    """
    kind = _check_kind(d, kind)
    total = sum(
        weighted_error_term(d, kind, 0, 0, (-delta) % d, a_guess)
        for delta in range(1, d)
        for a_guess in range(d)
    ) / d
    return total, exact_weighted_error_sum(d, kind)
