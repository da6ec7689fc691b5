"""Smith normal form over Z/p^K: the brute-force order/rank oracle.

Z/p^K is a chain ring, so a single global min-valuation pivot sweep
produces the divisibility chain directly: every remaining entry is
divisible by the pivot, and row elimination followed by zeroing the
pivot row (a unimodular column operation, since the pivot column is
already clear) diagonalizes in one pass.

Matrices carry exact integer entries interpreted mod p^K.  A diagonal
valuation v < K is then the true elementary divisor exponent; a
saturated slot (zero mod p^K) is either free rank or an order beyond
the precision, and is only declared free after it survives two
successive precision doublings.  That certification is sound for the
bounded module sizes this library ships; it is how "order > p^K" is
distinguished from "genuinely infinite".

Rows are relations, columns are generators: the cokernel is
Z_p^cols / rowspan.
"""

from dataclasses import dataclass, field

from .errors import InfiniteModule, PrecisionExhausted
from .padic import PadicInt, PrimeContext, vp


class PMatrix:
    """Dense matrix over Z/p^K; entries are exact integers read mod p^K."""

    __slots__ = ("entries", "rows", "cols", "ctx")

    def __init__(self, entries, ctx: PrimeContext):
        self.entries = [list(map(int, row)) for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        if any(len(r) != self.cols for r in self.entries):
            raise ValueError("ragged matrix")
        self.ctx = ctx

    def entry(self, i: int, j: int) -> PadicInt:
        return PadicInt(self.entries[i][j], self.ctx)

    def at_precision(self, ctx: PrimeContext) -> "PMatrix":
        """Reinterpret the same exact entries at another precision."""
        return PMatrix(self.entries, ctx)

    def __repr__(self):
        return f"PMatrix({self.rows}x{self.cols}, {self.ctx})"


@dataclass(frozen=True)
class SnfResult:
    """Diagonal data of U*A*V over Z/p^K.

    vals: valuations of the non-saturated diagonal entries, weakly
    increasing.  saturated: diagonal slots that were zero mod p^K
    (undecided between free rank and order beyond precision).
    col_deficit: generator columns no relation can ever reach --
    provably free at any precision.
    """

    vals: tuple
    saturated: int
    col_deficit: int
    ctx: PrimeContext
    free_certified: bool = False
    # pivot bookkeeping, populated only when transforms are requested
    pivot_cols: tuple = ()
    free_cols: tuple = ()
    col_transform: list = field(default_factory=list, compare=False)
    col_transform_inv: list = field(default_factory=list, compare=False)

    @property
    def rank_free(self) -> int:
        """Saturated-or-absent diagonal positions, read as cokernel free rank."""
        return self.saturated + self.col_deficit

    def exponent(self) -> int:
        """p-exponent of the torsion part: sum of finite diagonal valuations."""
        return sum(self.vals)

    def diag_display(self):
        return [str(v) for v in self.vals] + [f">={self.ctx.prec}"] * self.saturated


def snf(A: PMatrix, want_transform: bool = False) -> SnfResult:
    """Min-valuation-pivot Smith normal form; deterministic (row, col) tie-break."""
    p, K = A.ctx.p, A.ctx.prec
    q = A.ctx.modulus
    M = [[e % q for e in row] for row in A.entries]
    R, C = A.rows, A.cols
    act_rows = list(range(R))
    act_cols = list(range(C))
    col_active = [True] * C
    row_min = [None] * R  # (val, col) over active cols, or "zero"

    V = Vinv = None
    if want_transform:
        V = [[int(i == j) for j in range(C)] for i in range(C)]
        Vinv = [[int(i == j) for j in range(C)] for i in range(C)]

    def refresh(i):
        best_v, best_c = None, None
        row = M[i]
        for j in act_cols:
            e = row[j]
            if e == 0:
                continue
            v = vp(e, p, K)
            if best_v is None or v < best_v:
                best_v, best_c = v, j
                if v == 0:
                    break
        row_min[i] = "zero" if best_v is None else (best_v, best_c)

    for i in act_rows:
        refresh(i)

    vals = []
    pivot_cols = []
    while act_rows and act_cols:
        # global minimum valuation, first row then first column within it
        best = None  # (val, row, col)
        for i in act_rows:
            cached = row_min[i]
            if cached == "zero":
                continue
            if cached is None or not col_active[cached[1]]:
                refresh(i)
                cached = row_min[i]
                if cached == "zero":
                    continue
            v, c = cached
            if best is None or v < best[0]:
                best = (v, i, c)
                if v == 0:
                    break
        if best is None:
            break  # every remaining entry is zero mod p^K
        v, r0, c0 = best
        piv = M[r0]
        uinv = pow(piv[c0] // p**v, -1, q)
        pv = p**v
        for i in act_rows:
            if i == r0:
                continue
            e = M[i][c0]
            if e == 0:
                continue
            m = (e // pv) * uinv % q
            row = M[i]
            M[i] = [(x - m * y) % q for x, y in zip(row, piv)]
            row_min[i] = None
        if want_transform:
            # zeroing the pivot row is the column op C_j -= m_j * C_c0
            for j in act_cols:
                if j == c0 or piv[j] == 0:
                    continue
                m = (piv[j] // pv) * uinv % q
                for t in range(C):
                    V[t][j] = (V[t][j] - m * V[t][c0]) % q
                for t in range(C):
                    Vinv[c0][t] = (Vinv[c0][t] + m * Vinv[j][t]) % q
        vals.append(v)
        pivot_cols.append(c0)
        act_rows.remove(r0)
        act_cols.remove(c0)
        col_active[c0] = False

    saturated = min(len(act_rows), len(act_cols))
    deficit = len(act_cols) - saturated
    assert all(a <= b for a, b in zip(vals, vals[1:])), "divisor chain broken"
    return SnfResult(
        vals=tuple(vals),
        saturated=saturated,
        col_deficit=deficit,
        ctx=A.ctx,
        pivot_cols=tuple(pivot_cols),
        free_cols=tuple(act_cols),
        col_transform=V if want_transform else [],
        col_transform_inv=Vinv if want_transform else [],
    )


MAX_ESCALATIONS = 6


def stable_snf(build, ctx: PrimeContext, max_rounds: int = MAX_ESCALATIONS) -> SnfResult:
    """SNF with the two-successive-precision free-rank certification.

    `build(ctx)` must return the presentation matrix at the requested
    precision, from exact data.  Escalates by doubling K until either
    no slot saturates or two successive rounds agree, in which case the
    saturated slots are certified free.
    """
    prev = None
    for _ in range(max_rounds):
        res = snf(build(ctx))
        if res.saturated == 0:
            return res
        if prev is not None and prev.vals == res.vals and prev.saturated == res.saturated:
            return SnfResult(
                vals=res.vals,
                saturated=res.saturated,
                col_deficit=res.col_deficit,
                ctx=res.ctx,
                free_certified=True,
            )
        prev = res
        ctx = ctx.scaled(2)
    raise PrecisionExhausted(
        f"diagonal still saturating after {max_rounds} precision doublings"
    )


def coker_order(A: PMatrix) -> int:
    """p-exponent of #coker(A); InfiniteModule when the cokernel has free rank.

    Escalates internally by reinterpreting the exact entries at doubled
    precision when a diagonal slot saturates.
    """
    res = stable_snf(A.at_precision, A.ctx)
    if res.col_deficit > 0 or res.saturated > 0:
        raise InfiniteModule(
            f"cokernel has free rank {res.rank_free}; p-exponent undefined"
        )
    return res.exponent()


def coker_rank(A: PMatrix) -> int:
    """Certified free rank of coker(A) (stable under two precision doublings)."""
    res = stable_snf(A.at_precision, A.ctx)
    return res.rank_free
