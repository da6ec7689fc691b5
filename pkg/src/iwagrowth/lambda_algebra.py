"""The one-variable Iwasawa algebra Z_p[[X]] (X = gamma - 1).

Polynomials and capped power series are coefficient lists over a
PrimeContext.  The module provides the omega/Phi tower

    omega_n = (1+X)^(p^n) - 1,      Phi_{n/n0} = omega_n / omega_{n0},

Weierstrass division and preparation F = u * p^mu * g (u a unit series,
g distinguished; mu and deg g are the mu- and lambda-invariants of F),
and p-valuations of resultants.  Cyclotomic evaluation points are never
represented: every order statement at a p^n-th root of unity is routed
through v_p(Res(., Phi_n)), normalized so that the uniformizer has
order 1 and p has order p^(n-1)(p-1).
"""

import math

from .errors import (
    BadRange,
    CapExceeded,
    ContextMismatch,
    ConvergenceFailure,
    PrecisionExhausted,
)
from .padic import PadicInt, PrimeContext, vp


def _trim(coeffs):
    n = len(coeffs)
    while n > 0 and coeffs[n - 1] == 0:
        n -= 1
    return coeffs[:n]


def _add(a, b, q):
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return [(x + y) % q for x, y in zip(a, b)]


def _mul(a, b, q, cap=None):
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if cap is not None:
        n = min(n, cap + 1)
    out = [0] * n
    for i, x in enumerate(a):
        if x == 0 or i >= n:
            continue
        hi = min(len(b), n - i)
        for j in range(hi):
            out[i + j] = (out[i + j] + x * b[j]) % q
    return out


def _scale(a, c, q):
    return [x * c % q for x in a]


class LambdaPoly:
    """Polynomial over Z/p^K; coefficient i is the coefficient of X^i."""

    __slots__ = ("coeffs", "ctx")

    def __init__(self, coeffs, ctx: PrimeContext):
        q = ctx.modulus
        self.coeffs = _trim([int(c) % q for c in coeffs])
        self.ctx = ctx

    @property
    def degree(self) -> int:
        """Degree, with the convention deg 0 = -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def coeff(self, i: int) -> PadicInt:
        c = self.coeffs[i] if i < len(self.coeffs) else 0
        return PadicInt(c, self.ctx)

    def _check(self, other):
        if self.ctx != other.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")

    def __add__(self, other):
        self._check(other)
        return LambdaPoly(_add(self.coeffs, other.coeffs, self.ctx.modulus), self.ctx)

    def __sub__(self, other):
        self._check(other)
        neg = _scale(other.coeffs, -1, self.ctx.modulus)
        return LambdaPoly(_add(self.coeffs, neg, self.ctx.modulus), self.ctx)

    def __mul__(self, other):
        self._check(other)
        return LambdaPoly(_mul(self.coeffs, other.coeffs, self.ctx.modulus), self.ctx)

    def __eq__(self, other):
        return (
            isinstance(other, LambdaPoly)
            and self.ctx == other.ctx
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((tuple(self.coeffs), self.ctx))

    def is_distinguished(self) -> bool:
        """Monic with every lower coefficient divisible by p."""
        return self.is_monic() and all(c % self.ctx.p == 0 for c in self.coeffs[:-1])

    def evaluate(self, x: PadicInt) -> PadicInt:
        acc = PadicInt(0, self.ctx)
        for c in reversed(self.coeffs):
            acc = acc * x + PadicInt(c, self.ctx)
        return acc

    def to_series(self, cap: int) -> "LambdaSeries":
        if self.degree > cap:
            raise CapExceeded(f"degree {self.degree} exceeds cap {cap}")
        return LambdaSeries(self.coeffs, self.ctx, cap)

    def __repr__(self):
        return f"LambdaPoly({poly_to_string(self)!r}, {self.ctx})"


class LambdaSeries:
    """Power series truncated at X-degree cap; arithmetic is closed under the cap."""

    __slots__ = ("coeffs", "ctx", "cap")

    def __init__(self, coeffs, ctx: PrimeContext, cap: int):
        if cap < 0:
            raise ValueError("cap must be >= 0")
        q = ctx.modulus
        coeffs = [int(c) % q for c in coeffs]
        if len(coeffs) > cap + 1:
            coeffs = coeffs[: cap + 1]
        self.coeffs = _trim(coeffs)
        self.ctx = ctx
        self.cap = cap

    def _check(self, other):
        if self.ctx != other.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")

    def __add__(self, other):
        self._check(other)
        cap = min(self.cap, other.cap)
        return LambdaSeries(_add(self.coeffs, other.coeffs, self.ctx.modulus), self.ctx, cap)

    def __sub__(self, other):
        self._check(other)
        cap = min(self.cap, other.cap)
        neg = _scale(other.coeffs, -1, self.ctx.modulus)
        return LambdaSeries(_add(self.coeffs, neg, self.ctx.modulus), self.ctx, cap)

    def __mul__(self, other):
        self._check(other)
        cap = min(self.cap, other.cap)
        return LambdaSeries(_mul(self.coeffs, other.coeffs, self.ctx.modulus, cap), self.ctx, cap)

    def __eq__(self, other):
        return (
            isinstance(other, LambdaSeries)
            and self.ctx == other.ctx
            and self.cap == other.cap
            and self.coeffs == other.coeffs
        )

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_unit(self) -> bool:
        return bool(self.coeffs) and self.coeffs[0] % self.ctx.p != 0

    def truncate_to_poly(self) -> LambdaPoly:
        return LambdaPoly(self.coeffs, self.ctx)

    def inverse(self) -> "LambdaSeries":
        """Series inverse mod X^(cap+1); requires a unit constant term."""
        if not self.is_unit():
            raise PrecisionExhausted("series inverse needs a unit constant term")
        q = self.ctx.modulus
        a = self.coeffs + [0] * (self.cap + 1 - len(self.coeffs))
        inv0 = pow(a[0], -1, q)
        out = [inv0]
        for k in range(1, self.cap + 1):
            s = 0
            for i in range(1, k + 1):
                s += a[i] * out[k - i]
            out.append(-inv0 * s % q)
        return LambdaSeries(out, self.ctx, self.cap)

    def __repr__(self):
        return f"LambdaSeries({poly_to_string(self)!r}, cap={self.cap}, {self.ctx})"


def default_cap(p: int, n_max: int) -> int:
    """Series degree cap wide enough for the omega tower up to n_max."""
    return p**n_max + 8


def omega(ctx: PrimeContext, n: int, cap: int = None) -> LambdaPoly:
    """(1+X)^(p^n) - 1: monic of degree p^n with constant term 0."""
    if n < 0:
        raise BadRange(f"omega level must be >= 0, got {n}")
    deg = ctx.p**n
    if cap is not None and deg > cap:
        raise CapExceeded(f"omega_{n} has degree {deg} > cap {cap}")
    q = ctx.modulus
    coeffs = [math.comb(deg, i) % q for i in range(deg + 1)]
    coeffs[0] = 0
    return LambdaPoly(coeffs, ctx)


def phi_rel(ctx: PrimeContext, n: int, n0: int, cap: int = None) -> LambdaPoly:
    """The exact quotient omega_n / omega_{n0}; phi_rel(n, n-1) is Phi_n."""
    if n < n0 or n0 < 0:
        raise BadRange(f"need n >= n0 >= 0, got n={n}, n0={n0}")
    if n == n0:
        return LambdaPoly([1], ctx)
    num = omega(ctx, n, cap)
    den = omega(ctx, n0)
    quo, rem = _monic_divmod(num.coeffs, den.coeffs, ctx.modulus)
    assert not _trim(rem), "omega_{n0} must divide omega_n exactly"
    return LambdaPoly(quo, ctx)


def cyclotomic(ctx: PrimeContext, n: int) -> LambdaPoly:
    """Phi_n = omega_n / omega_{n-1}, the p^n-th cyclotomic polynomial in 1+X."""
    if n < 1:
        raise BadRange(f"cyclotomic level must be >= 1, got {n}")
    return phi_rel(ctx, n, n - 1)


def _monic_divmod(f, g, q):
    """Long division of f by monic g over Z/q; exact ring operations."""
    assert g and g[-1] == 1
    dg = len(g) - 1
    rem = list(f)
    if len(rem) < len(g):
        return [], rem
    quo = [0] * (len(rem) - dg)
    for i in range(len(rem) - 1, dg - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        quo[i - dg] = c
        for j in range(dg + 1):
            rem[i - dg + j] = (rem[i - dg + j] - c * g[j]) % q
    return quo, rem[:dg]


def weierstrass_div(F, g: LambdaPoly):
    """Divide F by a monic polynomial g: F = q*g + r with deg r < deg g.

    For monic g the classical long division stays in Z_p and coincides
    with Weierstrass division, so no iteration is needed here.
    """
    if g.ctx != F.ctx:
        raise ContextMismatch(f"{F.ctx} vs {g.ctx}")
    if not g.is_monic():
        raise BadRange("divisor must be monic")
    cap = getattr(F, "cap", None)
    if cap is None:
        cap = max(len(F.coeffs) - 1, g.degree, 0)
    if len(F.coeffs) - 1 > cap:
        raise CapExceeded(f"dividend degree {len(F.coeffs) - 1} exceeds cap {cap}")
    quo, rem = _monic_divmod(F.coeffs, g.coeffs, F.ctx.modulus)
    return LambdaSeries(quo, F.ctx, cap), LambdaPoly(rem, F.ctx)


def _divide_by_weierstrass_series(h, f, lam, ctx, cap):
    """h = q*f + r for a series f of Weierstrass degree lam (unit coeff at lam,
    lower coefficients divisible by p).  Classical successive approximation:
    each pass pushes the defect up by one power of p, so K+1 passes suffice.
    Returns (q, r) as coefficient lists.
    """
    q_mod = ctx.modulus
    f_low = f[:lam]
    f_high = LambdaSeries(f[lam:], ctx, cap - lam if cap >= lam else 0)
    f_high_inv = f_high.inverse()
    quo = [0] * (cap - lam + 1)
    work = list(h)
    for _ in range(ctx.prec + 1):
        high = _trim(work[lam:])
        if not high:
            return _trim(quo), _trim(work[:lam])
        step = _mul(high, f_high_inv.coeffs, q_mod, cap - lam)
        quo = _add(quo, step, q_mod)
        low_correction = _mul(step, f_low, q_mod, cap)
        work = _add(work[:lam], _scale(low_correction, -1, q_mod), q_mod)
    raise ConvergenceFailure(
        f"Weierstrass division did not converge within {ctx.prec + 1} passes"
    )


class WeierstrassData:
    """The factorization F = unit * p^mu * distinguished.

    After p^mu is divided out, mu digits of precision are spent: unit
    and distinguished live at precision K - mu, and the recombination
    p^mu * unit * distinguished reproduces F exactly mod p^K.
    """

    __slots__ = ("unit", "mu", "distinguished", "ctx", "cap")

    def __init__(self, unit: LambdaSeries, mu: int, distinguished: LambdaPoly,
                 ctx: PrimeContext, cap: int):
        self.unit = unit
        self.mu = mu
        self.distinguished = distinguished
        self.ctx = ctx  # context of the prepared input
        self.cap = cap

    @property
    def lam(self) -> int:
        """lambda-invariant: degree of the distinguished factor."""
        return self.distinguished.degree

    def recombine(self) -> LambdaSeries:
        """unit * p^mu * distinguished, lifted back to the original context."""
        prod = self.unit * self.distinguished.to_series(self.cap)
        scale = self.ctx.p**self.mu
        return LambdaSeries([c * scale for c in prod.coeffs], self.ctx, self.cap)

    def __repr__(self):
        return (
            f"WeierstrassData(mu={self.mu}, lambda={self.lam}, "
            f"g={poly_to_string(self.distinguished)!r})"
        )


def weierstrass_prep(F) -> WeierstrassData:
    """Prepare F = u * p^mu * g with u a unit series and g distinguished.

    mu is the minimal coefficient valuation and deg g the least index
    attaining it.  g is found by the iterative division of X^(deg g) by
    F/p^mu, whose remainder has p-divisible coefficients; the quotient
    is the inverse of the unit.
    """
    ctx = F.ctx
    cap = getattr(F, "cap", None)
    if cap is None:
        cap = max(len(F.coeffs) - 1, 0)
    coeffs = F.coeffs
    if not coeffs:
        raise PrecisionExhausted("cannot prepare the zero series at this precision")
    mu = min(vp(c, ctx.p, ctx.prec) for c in coeffs)
    low = ctx.lowered(mu)
    q_low = low.modulus
    reduced = [(c // ctx.p**mu) % q_low for c in coeffs]
    lam = next(i for i, c in enumerate(reduced) if c % ctx.p != 0)
    if lam > cap:
        raise CapExceeded(f"no unit coefficient within cap {cap}")

    if lam == 0:
        unit = LambdaSeries(reduced, low, cap)
        g = LambdaPoly([1], low)
    else:
        x_lam = [0] * lam + [1]
        quo, rem = _divide_by_weierstrass_series(x_lam, reduced, lam, low, cap)
        g_coeffs = _add(x_lam, _scale(rem, -1, q_low), q_low)
        g = LambdaPoly(g_coeffs, low)
        unit = LambdaSeries(quo, low, cap).inverse()
    assert g.is_distinguished(), "prepared factor is not distinguished"
    return WeierstrassData(unit, mu, g, ctx, cap)


def resultant_val(F: LambdaPoly, G: LambdaPoly) -> int:
    """v_p of the Sylvester resultant of F and G.

    Computed by min-valuation-pivot triangularization of the Sylvester
    matrix mod p^K.  Raises PrecisionExhausted when the determinant
    valuation saturates (retry with larger K; a persistent saturation
    means gcd(F, G) != 1).
    """
    if F.ctx != G.ctx:
        raise ContextMismatch(f"{F.ctx} vs {G.ctx}")
    if F.is_zero() or G.is_zero():
        raise PrecisionExhausted("resultant of a zero polynomial at this precision")
    ctx = F.ctx
    df, dg = F.degree, G.degree
    if df == 0:
        return dg * F.coeff(0).val() if dg > 0 else 0
    if dg == 0:
        return df * G.coeff(0).val()

    n = df + dg
    fc = list(reversed(F.coeffs))
    gc = list(reversed(G.coeffs))
    rows = []
    for i in range(dg):
        rows.append([0] * i + fc + [0] * (dg - 1 - i))
    for i in range(df):
        rows.append([0] * i + gc + [0] * (df - 1 - i))

    p, K, q = ctx.p, ctx.prec, ctx.modulus
    total = 0
    act_rows = list(range(n))
    act_cols = list(range(n))
    while act_rows:
        best = None
        for i in act_rows:
            for j in act_cols:
                e = rows[i][j]
                if e == 0:
                    continue
                v = vp(e, p, K)
                if best is None or v < best[0]:
                    best = (v, i, j)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            raise PrecisionExhausted("resultant valuation saturated at this precision")
        v, r0, c0 = best
        total += v
        if total >= K:
            raise PrecisionExhausted("resultant valuation saturated at this precision")
        piv = rows[r0]
        uinv = pow(piv[c0] // p**v, -1, q)
        pv = p**v
        for i in act_rows:
            if i == r0 or rows[i][c0] == 0:
                continue
            m = (rows[i][c0] // pv) * uinv % q
            rows[i] = [(x - m * y) % q for x, y in zip(rows[i], piv)]
        act_rows.remove(r0)
        act_cols.remove(c0)
    return total


# --- text / JSON forms ----------------------------------------------------

def poly_to_string(poly) -> str:
    """Render as 'X^3+3*X+3' with decimal coefficients, highest degree first."""
    if not poly.coeffs:
        return "0"
    q = poly.ctx.modulus
    parts = []
    for i in range(len(poly.coeffs) - 1, -1, -1):
        c = poly.coeffs[i] % q
        if c == 0:
            continue
        if i == 0:
            term = str(c)
        elif i == 1:
            term = "X" if c == 1 else f"{c}*X"
        else:
            term = f"X^{i}" if c == 1 else f"{c}*X^{i}"
        parts.append(term)
    return "+".join(parts) if parts else "0"


def poly_from_string(s: str, ctx: PrimeContext) -> LambdaPoly:
    """Parse 'X^3+3*X+3' (also '-' signs, 'X^0', spaces) into a polynomial."""
    text = s.replace(" ", "").replace("-", "+-")
    if not text or text == "+":
        raise ValueError(f"cannot parse polynomial from {s!r}")
    coeffs = {}
    for term in text.split("+"):
        if not term:
            continue
        sign = 1
        if term.startswith("-"):
            sign = -1
            term = term[1:]
        if "X" in term:
            head, _, tail = term.partition("X")
            coef = int(head.rstrip("*")) if head.rstrip("*") else 1
            exp = int(tail[1:]) if tail.startswith("^") else (1 if not tail else None)
            if exp is None:
                raise ValueError(f"bad term {term!r} in {s!r}")
        else:
            coef = int(term)
            exp = 0
        coeffs[exp] = coeffs.get(exp, 0) + sign * coef
    top = max(coeffs) if coeffs else 0
    return LambdaPoly([coeffs.get(i, 0) for i in range(top + 1)], ctx)


def poly_to_json(poly) -> list:
    """JSON form: array of decimal coefficient strings, index = degree."""
    return [str(c) for c in poly.coeffs]


def poly_from_json(data, ctx: PrimeContext) -> LambdaPoly:
    return LambdaPoly([int(c) for c in data], ctx)
