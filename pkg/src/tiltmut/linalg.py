"""Dense exact linear algebra over the rationals.

Vectors are lists of Fraction, matrices are lists of row vectors.  Sizes
here are small (tens of coordinates), so plain Gaussian elimination with
exact pivots is both fast enough and free of numerical questions.
"""

from __future__ import annotations

from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form.  Returns (nonzero rows, pivot column indices)."""
    mat = [list(row) for row in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pivot_row = None
        for k in range(r, len(mat)):
            if mat[k][col] != 0:
                pivot_row = k
                break
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        inv = ONE / mat[r][col]
        mat[r] = [x * inv for x in mat[r]]
        for k in range(len(mat)):
            if k != r and mat[k][col] != 0:
                factor = mat[k][col]
                mat[k] = [a - factor * b for a, b in zip(mat[k], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Canonical kernel basis of the linear map given by a coefficient matrix.

    The matrix maps x (length ncols) to rows . x.  Basis vectors are the
    standard free-variable vectors read off the RREF, one per non-pivot
    column, in column order.
    """
    reduced, pivots = rref(rows)
    pivot_set = set(pivots)
    free_cols = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for free in free_cols:
        vec = [ZERO] * ncols
        vec[free] = ONE
        for rowi, pivot_col in enumerate(pivots):
            vec[pivot_col] = -reduced[rowi][free]
        basis.append(vec)
    return basis


def rank(rows: list[list[Fraction]]) -> int:
    reduced, _ = rref(rows)
    return len(reduced)


def in_span(vec: list[Fraction], reduced_rows: list[list[Fraction]], pivots: list[int]) -> bool:
    """Membership test against an RREF basis."""
    residual = reduce_against(vec, reduced_rows, pivots)
    return all(x == 0 for x in residual)


def reduce_against(vec, reduced_rows, pivots):
    """Eliminate vec against an RREF basis, returning the residual."""
    out = list(vec)
    for row, col in zip(reduced_rows, pivots):
        if out[col] != 0:
            factor = out[col]
            out = [a - factor * b for a, b in zip(out, row)]
    return out


def solve_in_span(vec, reduced_rows, pivots):
    """Coefficients expressing vec over an RREF basis, or None if outside."""
    coeffs = []
    out = list(vec)
    for row, col in zip(reduced_rows, pivots):
        c = out[col]
        coeffs.append(c)
        if c != 0:
            out = [a - c * b for a, b in zip(out, row)]
    if any(x != 0 for x in out):
        return None
    return coeffs


def complement_basis(sub_rows, space_rows):
    """Canonical complement of span(sub) inside span(space).

    Both spans are put in RREF; since sub lies inside space, the pivot
    columns of sub form a subset of those of space, and the space rows
    whose pivots are not pivots of sub are returned.
    """
    sub_red, sub_piv = rref(sub_rows)
    space_red, space_piv = rref(space_rows)
    sub_set = set(sub_piv)
    return [row for row, piv in zip(space_red, space_piv) if piv not in sub_set]


class SpanTracker:
    """Incrementally grown subspace with exact membership tests.

    add() returns True when the vector enlarged the span.  Each accepted
    vector may carry a tag; the tracker remembers how its internal echelon
    rows combine the tagged originals, so express() can answer "which
    combination of the vectors I fed you equals this one".
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []
        # row k equals sum of combos[k][tag] * (original tagged vector)
        self.combos: list[dict] = []

    def __len__(self):
        return len(self.rows)

    def residual(self, vec):
        return reduce_against(vec, self.rows, self.pivots)

    def contains(self, vec) -> bool:
        return all(x == 0 for x in self.residual(vec))

    def add(self, vec, tag=None) -> bool:
        out = list(vec)
        combo = {tag: ONE} if tag is not None else {}
        for row, col, row_combo in zip(self.rows, self.pivots, self.combos):
            factor = out[col]
            if factor != 0:
                out = [a - factor * b for a, b in zip(out, row)]
                for t, c in row_combo.items():
                    combo[t] = combo.get(t, ZERO) - factor * c
        for col in range(self.ncols):
            if out[col] != 0:
                inv = ONE / out[col]
                out = [x * inv for x in out]
                combo = {t: c * inv for t, c in combo.items() if c != 0}
                self.rows.append(out)
                self.pivots.append(col)
                self.combos.append(combo)
                return True
        return False

    def express(self, vec):
        """Write vec over the original tagged vectors: {tag: coef}, or None."""
        acc: dict = {}
        out = list(vec)
        for row, col, combo in zip(self.rows, self.pivots, self.combos):
            c = out[col]
            if c != 0:
                out = [a - c * b for a, b in zip(out, row)]
                for t, k in combo.items():
                    acc[t] = acc.get(t, ZERO) + c * k
        if any(x != 0 for x in out):
            return None
        return {t: c for t, c in acc.items() if c != 0}
