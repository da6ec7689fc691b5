"""Exact integer fitting of the growth laws against (n, m, e) tables.

All fits run on exact differences of integers and Fractions; there is
no least-squares anywhere, because the laws are exact beyond their
stabilization index and a float would blur the O-term certificates.
Fit reports expose only constants witnessed on the computed window --
no claim is made beyond it.

Models:
  iwasawa        e_n = mu*p^n + lambda*n + nu          (exact on a suffix)
  cm             e_m = mu_H*p^((d-1)m) + lambda_H*m*p^((d-2)m) + O(p^((d-2)m))
  diagonal main  e_{n,n} = tau*n*p^n + O(p^n)
  diagonal upper etilde_{n,n} <= mu*p^(2n) + tau*n*p^n + C*p^n   (bound check)
  perbet         etilde_{n,n} = rho*n*p^(dn) + mu*p^(dn) + O(n*p^((d-1)n))
"""

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from .errors import BoundViolated, NoStabilization


@dataclass(frozen=True)
class GrowthTable:
    """Sequence of (n, m, e) points along one axis: 'n', 'm' or 'diag'."""

    points: tuple
    axis: str

    def __post_init__(self):
        if self.axis not in ("n", "m", "diag"):
            raise ValueError(f"unknown axis {self.axis!r}")
        idx = self.indices()
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be strictly increasing along the axis")
        if any(e < 0 for e in self.exponents()):
            raise ValueError("e values must be >= 0")
        if self.axis == "diag" and any(n != m for n, m, _ in self.points):
            raise ValueError("diagonal table needs n == m in every row")

    def indices(self):
        pos = 1 if self.axis == "m" else 0
        return [pt[pos] for pt in self.points]

    def exponents(self):
        return [pt[2] for pt in self.points]

    @classmethod
    def from_sequence(cls, axis: str, values, start: int = 0, fixed: int = 0):
        pts = []
        for i, e in enumerate(values):
            k = start + i
            if axis == "n":
                pts.append((k, fixed, e))
            elif axis == "m":
                pts.append((fixed, k, e))
            else:
                pts.append((k, k, e))
        return cls(tuple(pts), axis)

    def to_json_dict(self):
        return {
            "axis": self.axis,
            "points": [
                {"n": str(n), "m": str(m), "e": str(e)} for n, m, e in self.points
            ],
        }


@dataclass(frozen=True)
class FitReport:
    """A fitted model with its exactness window and witnessed O-constant."""

    model: str
    invariants: dict
    window: tuple
    residuals: tuple
    bound_constant: Fraction = None

    def to_json_dict(self):
        out = {
            "model": self.model,
            "invariants": {k: str(v) for k, v in self.invariants.items()},
            "window": [str(self.window[0]), str(self.window[1])],
            "residuals": [str(r) for r in self.residuals],
        }
        if self.bound_constant is not None:
            out["witnessed_constant"] = str(self.bound_constant)
        return out


def _round_exact(x: Fraction) -> int:
    """Nearest integer, ties to even (Python round semantics, but exact)."""
    return round(Fraction(x))


def _require_consecutive(indices):
    if any(b - a != 1 for a, b in zip(indices, indices[1:])):
        raise NoStabilization("fit needs consecutive indices along the axis")


def fit_iwasawa(table: GrowthTable, p: int) -> FitReport:
    """Fit e_n = mu*p^n + lambda*n + nu exactly on the longest suffix.

    mu and lambda come from two consecutive first differences
    (Delta_n = mu*p^n*(p-1) + lambda); every remaining suffix point
    must then match exactly.  Longest fitting suffix wins.
    """
    ns = table.indices()
    es = table.exponents()
    if len(ns) < 4:
        raise NoStabilization(f"need >= 4 points, got {len(ns)}")
    _require_consecutive(ns)
    for w in range(len(ns) - 2):
        n0, e0 = ns[w], es[w]
        d1 = es[w + 1] - es[w]
        d2 = es[w + 2] - es[w + 1]
        step = (p - 1) ** 2 * p**n0
        if (d2 - d1) % step != 0:
            continue
        mu = (d2 - d1) // step
        lam = d1 - mu * p**n0 * (p - 1)
        nu = e0 - mu * p**n0 - lam * n0
        if mu < 0 or lam < 0:
            continue
        if all(
            es[i] == mu * p ** ns[i] + lam * ns[i] + nu for i in range(w, len(ns))
        ):
            return FitReport(
                model="iwasawa",
                invariants={"mu": mu, "lambda": lam, "nu": nu},
                window=(n0, ns[-1]),
                residuals=tuple(0 for _ in range(w, len(ns))),
                bound_constant=Fraction(0),
            )
    raise NoStabilization("no suffix of length >= 3 fits the iwasawa model exactly")


def fit_cm_law(table: GrowthTable, d: int, p: int) -> FitReport:
    """Fit the two leading Cuoco-Monsky terms by stabilized rounding.

    mu_H = round(e_m / p^((d-1)m)) must agree on the last two points,
    lambda_H likewise on the residual; the leftover residuals are
    certified against C * p^((d-2)m) with the smallest witnessed C.
    """
    ms = table.indices()
    es = table.exponents()
    if len(ms) < 3:
        raise NoStabilization(f"need >= 3 points, got {len(ms)}")

    mu_pair = [_round_exact(Fraction(es[i], p ** ((d - 1) * ms[i]))) for i in (-2, -1)]
    if mu_pair[0] != mu_pair[1]:
        raise NoStabilization(f"mu_H rounding disagrees on last two points: {mu_pair}")
    mu_h = mu_pair[1]

    lam_votes = []
    for i in (-2, -1):
        m = ms[i]
        if m == 0:
            continue
        r = es[i] - mu_h * p ** ((d - 1) * m)
        lam_votes.append(_round_exact(Fraction(r, m * p ** ((d - 2) * m))))
    if not lam_votes:
        raise NoStabilization("need points with m >= 1 to fit lambda_H")
    if len(lam_votes) == 2 and lam_votes[0] != lam_votes[1]:
        raise NoStabilization(f"lambda_H rounding disagrees: {lam_votes}")
    lam_h = lam_votes[-1]

    residuals = tuple(
        es[i] - mu_h * p ** ((d - 1) * ms[i]) - lam_h * ms[i] * p ** ((d - 2) * ms[i])
        for i in range(len(ms))
    )
    c = max(
        (Fraction(abs(r), p ** ((d - 2) * m)) for m, r in zip(ms, residuals)),
        default=Fraction(0),
    )
    return FitReport(
        model="cm",
        invariants={"mu_h": mu_h, "lambda_h": lam_h},
        window=(ms[0], ms[-1]),
        residuals=residuals,
        bound_constant=c,
    )


def _stabilized_diff_round(values):
    """round(v[i+1] - v[i]) with the last two differences required to agree."""
    diffs = [values[i + 1] - values[i] for i in range(len(values) - 1)]
    if len(diffs) < 2:
        raise NoStabilization("need >= 3 points for a stabilized difference")
    r1, r2 = _round_exact(diffs[-2]), _round_exact(diffs[-1])
    if r1 != r2:
        raise NoStabilization(f"difference rounding disagrees: {r1} vs {r2}")
    return r2


def fit_diagonal(table: GrowthTable, model: str, p: int, d: int = 2, params=None) -> FitReport:
    """Diagonal-axis fits: 'main' (tau), 'upper' (bound check), 'perbet' (rho, mu)."""
    if table.axis != "diag":
        raise ValueError("diagonal fit needs a diagonal table")
    ns = table.indices()
    es = table.exponents()
    params = params or {}

    if model == "main":
        _require_consecutive(ns)
        scaled = [Fraction(e, p**n) for n, e in zip(ns, es)]  # tau*n + O(1)
        tau = _stabilized_diff_round(scaled)
        residuals = tuple(e - tau * n * p**n for n, e in zip(ns, es))
        c = max(
            (Fraction(abs(r), p**n) for n, r in zip(ns, residuals)),
            default=Fraction(0),
        )
        return FitReport(
            model="diagonal-main",
            invariants={"tau": tau},
            window=(ns[0], ns[-1]),
            residuals=residuals,
            bound_constant=c,
        )

    if model == "upper":
        mu = int(params["mu"])
        tau = int(params["tau"])
        slack = tuple(e - mu * p ** (2 * n) - tau * n * p**n for n, e in zip(ns, es))
        c = max(
            (Fraction(s, p**n) for n, s in zip(ns, slack)),
            default=Fraction(0),
        )
        c = max(c, Fraction(0))
        if "c_max" in params:
            c_max = Fraction(params["c_max"])
            for n, s in zip(ns, slack):
                if Fraction(s, p**n) > c_max:
                    raise BoundViolated(
                        f"upper bound with C={c_max} fails at n={n}", n=n
                    )
        return FitReport(
            model="diagonal-upper",
            invariants={"mu": mu, "tau": tau},
            window=(ns[0], ns[-1]),
            residuals=slack,
            bound_constant=c,
        )

    if model == "perbet":
        _require_consecutive(ns)
        scaled = [Fraction(e, p ** (d * n)) for n, e in zip(ns, es)]  # rho*n + mu + o(1)
        rho = _stabilized_diff_round(scaled)
        mu_votes = [_round_exact(scaled[i] - rho * ns[i]) for i in (-2, -1)]
        if mu_votes[0] != mu_votes[1]:
            raise NoStabilization(f"perbet mu rounding disagrees: {mu_votes}")
        mu = mu_votes[1]
        residuals = tuple(
            e - rho * n * p ** (d * n) - mu * p ** (d * n) for n, e in zip(ns, es)
        )
        c = max(
            (
                Fraction(abs(r), max(n, 1) * p ** ((d - 1) * n))
                for n, r in zip(ns, residuals)
            ),
            default=Fraction(0),
        )
        return FitReport(
            model="perbet",
            invariants={"rho": rho, "mu": mu},
            window=(ns[0], ns[-1]),
            residuals=residuals,
            bound_constant=c,
        )

    raise ValueError(f"unknown diagonal model {model!r}")


def parse_growth_csv(text: str) -> GrowthTable:
    """Parse 'n,m,e' CSV (decimal integers) and detect the active axis."""
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows or [c.strip().lower() for c in rows[0]] != ["n", "m", "e"]:
        raise ValueError("CSV must start with header 'n,m,e'")
    points = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ValueError(f"line {lineno}: expected 3 fields, got {len(row)}")
        try:
            n, m, e = (int(cell.strip()) for cell in row)
        except ValueError:
            raise ValueError(f"line {lineno}: fields must be decimal integers")
        if e < 0:
            raise ValueError(f"line {lineno}: e must be >= 0, got {e}")
        points.append((n, m, e))
    if not points:
        raise ValueError("CSV contains no data rows")
    ns = {pt[0] for pt in points}
    ms = {pt[1] for pt in points}
    if len(ns) > 1 and len(ms) > 1:
        axis = "diag"
    elif len(ns) > 1:
        axis = "n"
    elif len(ms) > 1:
        axis = "m"
    else:
        raise ValueError("table must vary along some axis")
    return GrowthTable(tuple(points), axis)
