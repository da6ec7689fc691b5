"""Finitely presented Lambda(Gamma)-modules and their coinvariant growth.

A module is given in one of three forms:

  divisors   direct sum of Lambda/(F_i), F_i nonzero, as exact integer
             coefficient lists (optionally plus finite trivial-action
             summands Z/p^c, the pseudo-null stand-ins);
  action     a gamma-action matrix on a finite-rank free Z_p-module;
  relations  a raw relation matrix with polynomial entries, reduced to
             finite level by imposing omega_N (no structure theorem is
             attempted for this form).

The level-n coinvariants M/omega_n M are presented as integer matrices
and handed to the SNF oracle; the closed formulas (kernel orders via
resultants, the mu/lambda/nu law) are checked against that oracle, not
the other way around.
"""

import math
from dataclasses import dataclass

from .errors import InfiniteModule, PrecisionExhausted
from .growthfit import GrowthTable
from .lambda_algebra import LambdaPoly, cyclotomic, default_cap, resultant_val, weierstrass_prep
from .padic import PrimeContext
from .snf import PMatrix, stable_snf

DEFAULT_PREC = 12
MAX_ESCALATIONS = 6


class GammaModule:
    """A finitely presented Lambda(Gamma)-module over an odd prime p.

    Coefficient data is kept as exact integers so that precision can be
    escalated internally.  Modules produced mod p^K by upstream
    pipelines set prec_hint; such modules refuse reinterpretation above
    that precision and their owners must rebuild instead.
    """

    def __init__(self, p, form, divisors=None, action=None, relations=None,
                 n_gens=None, finite_part=(), prec_hint=None):
        if form not in ("divisors", "action", "relations"):
            raise ValueError(f"unknown form {form!r}")
        self.p = p
        self.form = form
        self.divisors = [list(map(int, f)) for f in (divisors or [])]
        self.action = [list(map(int, row)) for row in (action or [])]
        self.relations = [
            [list(map(int, poly)) for poly in row] for row in (relations or [])
        ]
        self.n_gens = n_gens
        self.finite_part = tuple(int(c) for c in finite_part)
        self.prec_hint = prec_hint
        if form == "divisors" and any(not any(f) for f in self.divisors):
            raise ValueError("divisor polynomials must be nonzero")
        if form == "relations":
            if n_gens is None:
                raise ValueError("relations form needs the generator count")
        if any(c < 1 for c in self.finite_part):
            raise ValueError("finite summand exponents must be >= 1")

    @classmethod
    def from_divisors(cls, p, divisors, finite_part=()):
        return cls(p, "divisors", divisors=divisors, finite_part=finite_part)

    @classmethod
    def from_action(cls, p, matrix, prec_hint=None, finite_part=()):
        return cls(p, "action", action=matrix, prec_hint=prec_hint,
                   finite_part=finite_part)

    @classmethod
    def from_relations(cls, p, n_gens, rows, prec_hint=None):
        return cls(p, "relations", relations=rows, n_gens=n_gens,
                   prec_hint=prec_hint)

    def to_json_dict(self):
        out = {"ring": "gamma", "p": str(self.p), "form": self.form}
        if self.form == "divisors":
            out["divisors"] = [[str(c) for c in f] for f in self.divisors]
        elif self.form == "action":
            out["action"] = [[str(c) for c in row] for row in self.action]
        else:
            out["gens"] = str(self.n_gens)
            out["relations"] = [
                [[str(c) for c in poly] for poly in row] for row in self.relations
            ]
        if self.finite_part:
            out["finite_part"] = [str(c) for c in self.finite_part]
        return out

    @classmethod
    def from_json_dict(cls, data):
        if data.get("ring") != "gamma":
            raise ValueError("not a gamma-module description")
        p = int(data["p"])
        form = data["form"]
        finite = [int(c) for c in data.get("finite_part", [])]
        if form == "divisors":
            return cls.from_divisors(
                p, [[int(c) for c in f] for f in data["divisors"]], finite
            )
        if form == "action":
            return cls.from_action(
                p, [[int(c) for c in row] for row in data["action"]],
                finite_part=finite,
            )
        if form == "relations":
            return cls.from_relations(
                p,
                int(data["gens"]),
                [[[int(c) for c in poly] for poly in row] for row in data["relations"]],
            )
        raise ValueError(f"unknown form {form!r}")


@dataclass(frozen=True)
class GammaInvariants:
    """(mu, lambda, nu) with the stabilization index n0 the law is certified from."""

    mu: int
    lam: int
    nu: int
    n0: int
    checked_levels: tuple = ()

    def predict(self, p: int, n: int) -> int:
        return self.mu * p**n + self.lam * n + self.nu


# --- exact integer polynomial helpers (no modulus: presentation data) ------

def _omega_z(p: int, n: int):
    deg = p**n
    coeffs = [math.comb(deg, i) for i in range(deg + 1)]
    coeffs[0] = 0
    return coeffs


def _reduce_mod_monic_z(f, g):
    """Remainder of f modulo monic g, exact over Z."""
    rem = list(f)
    dg = len(g) - 1
    for i in range(len(rem) - 1, dg - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        for j in range(dg + 1):
            rem[i - dg + j] -= c * g[j]
    return rem[:dg] + [0] * max(0, dg - len(rem))


def _matmul_z(a, b):
    n, k, m = len(a), len(b), len(b[0])
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def _matpow_z(a, e):
    n = len(a)
    out = [[int(i == j) for j in range(n)] for i in range(n)]
    base = [row[:] for row in a]
    while e:
        if e & 1:
            out = _matmul_z(out, base)
        base = _matmul_z(base, base)
        e >>= 1
    return out


def char_poly_shifted(action) -> list:
    """det((1+X) I - A) as an exact integer coefficient list.

    Faddeev-LeVerrier gives det(Y I - A) with exact integer divisions;
    Y = 1 + X is then expanded binomially.
    """
    r = len(action)
    if any(len(row) != r for row in action):
        raise ValueError("action matrix must be square")
    c = [0] * (r + 1)
    c[r] = 1
    m = [[int(i == j) for j in range(r)] for i in range(r)]
    for k in range(1, r + 1):
        m = _matmul_z(action, m)
        tr = sum(m[i][i] for i in range(r))
        assert tr % k == 0, "Faddeev-LeVerrier trace division must be exact"
        ck = -(tr // k)
        c[r - k] = ck
        for i in range(r):
            m[i][i] += ck
    out = [0] * (r + 1)
    for k in range(r + 1):
        if c[k] == 0:
            continue
        for j in range(k + 1):
            out[j] += c[k] * math.comb(k, j)
    return out


def char_poly_from_action(action, ctx: PrimeContext) -> LambdaPoly:
    """Characteristic polynomial of the gamma-action in the variable X = gamma-1."""
    return LambdaPoly(char_poly_shifted(action), ctx)


# --- level-n presentations --------------------------------------------------

def _divisor_block(f, p, n):
    """Rows presenting Lambda/(F, omega_n) on the basis 1, X, ..., X^(p^n - 1)."""
    deg = p**n
    om = _omega_z(p, n)
    om[-1] = 1  # monic leading coefficient
    rows = []
    shifted = list(f)
    for _ in range(deg):
        rows.append(_reduce_mod_monic_z(shifted, om))
        shifted = [0] + shifted
    return rows


def _block_diag(blocks):
    total_cols = sum(len(b[0]) for b in blocks if b)
    rows = []
    offset = 0
    for b in blocks:
        if not b:
            continue
        w = len(b[0])
        for r in b:
            rows.append([0] * offset + r + [0] * (total_cols - offset - w))
        offset += w
    return rows


def presentation_at_level(module: GammaModule, n: int):
    """Exact integer relation matrix of M/omega_n M (rows = relations)."""
    p = module.p
    blocks = []
    if module.form == "divisors":
        for f in module.divisors:
            blocks.append(_divisor_block(f, p, n))
    elif module.form == "action":
        b = _matpow_z(module.action, p**n)
        for i in range(len(b)):
            b[i][i] -= 1
        blocks.append(b)
    else:
        deg = p**n
        om = _omega_z(p, n)
        om[-1] = 1
        n_gens = module.n_gens
        rows = []
        for rel in module.relations:
            if len(rel) != n_gens:
                raise ValueError("relation width disagrees with generator count")
            shifted = [list(poly) for poly in rel]
            for _ in range(deg):
                row = []
                for g in range(n_gens):
                    row.extend(_reduce_mod_monic_z(shifted[g], om))
                rows.append(row)
                shifted = [[0] + poly for poly in shifted]
        if rows:
            blocks.append(rows)
        else:
            blocks.append([[0] * (n_gens * deg)])
    for c in module.finite_part:
        blocks.append([[p**c]])
    return _block_diag(blocks)


def _level_builder(module: GammaModule, n: int):
    rows = presentation_at_level(module, n)

    def build(ctx: PrimeContext) -> PMatrix:
        if module.prec_hint is not None and ctx.prec > module.prec_hint:
            raise PrecisionExhausted(
                f"module data only valid mod p^{module.prec_hint}; rebuild upstream"
            )
        return PMatrix(rows, ctx)

    return build


def coinvariant_order(module: GammaModule, n: int, start_prec: int = DEFAULT_PREC) -> int:
    """e(M/omega_n M) via the SNF oracle; InfiniteModule when not finite."""
    ctx = PrimeContext(module.p, start_prec)
    res = stable_snf(_level_builder(module, n), ctx)
    if res.col_deficit > 0 or res.saturated > 0:
        raise InfiniteModule(
            f"M/omega_{n} M has free rank {res.rank_free} "
            "(characteristic ideal shares a factor with the omega tower)",
            level=n,
        )
    return res.exponent()


def coinvariant_order_seq(module: GammaModule, n_range, start_prec: int = DEFAULT_PREC) -> GrowthTable:
    """The growth table (n, e(M/omega_n M)) over the requested levels."""
    points = tuple(
        (n, 0, coinvariant_order(module, n, start_prec)) for n in n_range
    )
    return GrowthTable(points, axis="n")


def kernel_order(f, p: int, n: int, start_prec: int = DEFAULT_PREC) -> int:
    """e(ker of Lambda/(F, omega_n) -> Lambda/(F, omega_{n-1})) = v_p(Res(F, Phi_n)).

    f is an exact integer coefficient list.  Saturation that survives
    every precision escalation certifies gcd(F, omega_n) != 1.
    """
    prec = start_prec
    for _ in range(MAX_ESCALATIONS):
        ctx = PrimeContext(p, prec)
        try:
            return resultant_val(LambdaPoly(f, ctx), cyclotomic(ctx, n))
        except PrecisionExhausted:
            prec *= 2
    raise InfiniteModule(
        f"Res(F, Phi_{n}) saturated through {MAX_ESCALATIONS} escalations; "
        "gcd(F, omega_n) != 1",
        level=n,
    )


def stabilization_index(p: int, lam: int) -> int:
    """Least n0 >= 0 with p^(n0-1)(p-1) > lam (lam over-approximates every
    irreducible factor degree, so no factorization is needed)."""
    if lam == 0:
        return 0
    n0 = 1
    while p ** (n0 - 1) * (p - 1) <= lam:
        n0 += 1
    return n0


def extract_invariants(module: GammaModule, start_prec: int = DEFAULT_PREC) -> GammaInvariants:
    """Read (mu, lambda) off Weierstrass data, nu off one oracle point.

    nu is computed, never fitted: nu = e_{n0} - mu p^{n0} - lam n0, with
    n0 from the total distinguished degree.  The law is then re-checked
    against the oracle at n0 and n0 + 1.
    """
    if module.form == "relations":
        raise ValueError("extract_invariants needs divisor or action form")
    p = module.p
    if module.form == "divisors":
        polys = module.divisors
    else:
        polys = [char_poly_shifted(module.action)]

    mu = lam = 0
    prec = start_prec
    for f in polys:
        for _ in range(MAX_ESCALATIONS):
            ctx = PrimeContext(p, prec)
            cap = max(len(f) - 1, 0) + 1
            try:
                data = weierstrass_prep(LambdaPoly(f, ctx).to_series(cap))
                break
            except PrecisionExhausted:
                prec *= 2
        else:
            raise PrecisionExhausted("divisor coefficients saturate at every precision")
        mu += data.mu
        lam += data.lam

    n0 = stabilization_index(p, lam)
    e_n0 = coinvariant_order(module, n0, start_prec)
    nu = e_n0 - mu * p**n0 - lam * n0
    inv = GammaInvariants(mu=mu, lam=lam, nu=nu, n0=n0,
                          checked_levels=(n0, n0 + 1))
    e_next = coinvariant_order(module, n0 + 1, start_prec)
    if e_next != inv.predict(p, n0 + 1):
        raise PrecisionExhausted(
            f"oracle disagrees with invariants at n={n0 + 1}: "
            f"{e_next} != {inv.predict(p, n0 + 1)}"
        )
    return inv
