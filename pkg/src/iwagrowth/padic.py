"""Exact arithmetic in Z/p^K with explicit precision tracking.

Every scalar in the library is a residue mod p^K together with the
context (p, K) it lives in.  Valuations are truncated at K: the zero
residue reports the saturated value K, printed as ">=K", and anything
consuming a saturated valuation is expected to escalate precision
rather than trust it.  Contexts never coerce; mixing two precisions is
an error.
"""

from dataclasses import dataclass

from .errors import ContextMismatch, NonUnit


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class PrimeContext:
    """An odd prime p and a working precision K (arithmetic is mod p^K)."""

    p: int
    prec: int

    def __post_init__(self):
        if self.p < 3 or self.p % 2 == 0 or not _is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.prec < 1:
            raise ValueError(f"precision must be >= 1, got {self.prec}")

    @property
    def modulus(self) -> int:
        return self.p ** self.prec

    def scaled(self, factor: int) -> "PrimeContext":
        """Same prime at `factor` times the precision (escalation helper)."""
        return PrimeContext(self.p, self.prec * factor)

    def lowered(self, drop: int) -> "PrimeContext":
        """Same prime with `drop` fewer digits (used after dividing out p^drop)."""
        return PrimeContext(self.p, self.prec - drop)

    def __repr__(self):
        return f"PrimeContext(p={self.p}, prec={self.prec})"


def vp(n: int, p: int, cap: int) -> int:
    """Valuation of the integer n at p, saturating at cap (n=0 reports cap)."""
    if n % p ** cap == 0:
        return cap
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class PadicInt:
    """An element of Z/p^K.  Immutable; all operators require equal contexts."""

    __slots__ = ("residue", "ctx")

    def __init__(self, value: int, ctx: PrimeContext):
        object.__setattr__(self, "residue", value % ctx.modulus)
        object.__setattr__(self, "ctx", ctx)

    def __setattr__(self, *_):
        raise AttributeError("PadicInt is immutable")

    def _check(self, other: "PadicInt") -> "PadicInt":
        if not isinstance(other, PadicInt):
            raise TypeError(f"expected PadicInt, got {type(other).__name__}")
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return PadicInt(self.residue + other.residue, self.ctx)

    def __sub__(self, other):
        other = self._check(other)
        return PadicInt(self.residue - other.residue, self.ctx)

    def __mul__(self, other):
        other = self._check(other)
        return PadicInt(self.residue * other.residue, self.ctx)

    def __neg__(self):
        return PadicInt(-self.residue, self.ctx)

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return PadicInt(pow(self.residue, e, self.ctx.modulus), self.ctx)

    def __eq__(self, other):
        return (
            isinstance(other, PadicInt)
            and self.ctx == other.ctx
            and self.residue == other.residue
        )

    def __hash__(self):
        return hash((self.residue, self.ctx))

    def is_zero(self) -> bool:
        return self.residue == 0

    def val(self) -> int:
        """Largest e <= K with p^e | residue; the zero residue saturates at K."""
        return vp(self.residue, self.ctx.p, self.ctx.prec)

    def val_is_saturated(self) -> bool:
        return self.residue == 0

    def inv(self) -> "PadicInt":
        """Multiplicative inverse mod p^K; requires valuation 0."""
        if self.residue % self.ctx.p == 0:
            raise NonUnit(f"valuation {self.val()} element has no inverse mod p^K")
        return PadicInt(pow(self.residue, -1, self.ctx.modulus), self.ctx)

    def unit_part(self) -> "PadicInt":
        """self / p^val as an element of the context lowered by val."""
        v = self.val()
        if self.val_is_saturated():
            raise NonUnit("zero residue has no unit part")
        return PadicInt(self.residue // self.ctx.p ** v, self.ctx.lowered(v))

    def __repr__(self):
        return f"{self.residue} (mod {self.ctx.p}^{self.ctx.prec})"


def format_valuation(v: int, ctx: PrimeContext) -> str:
    """Render a (possibly saturated) valuation: '2' or '>=5'."""
    return f">={ctx.prec}" if v >= ctx.prec else str(v)
