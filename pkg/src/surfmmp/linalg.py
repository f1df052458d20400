"""Exact linear algebra over rationals.

Everything here works on plain ``fractions.Fraction`` values, list-of-list
matrices and never touches floating point: the callers classify razor-edge
cases (a coefficient exactly 1, a minor exactly 0) where any rounding would
be wrong.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InputError, InvariantViolation

Mat = list[list[Fraction]]
Vec = list[Fraction]


def to_fraction_matrix(rows) -> Mat:
    return [[Fraction(x) for x in row] for row in rows]


def determinant(matrix) -> Fraction:
    """Determinant by exact Gaussian elimination with row swaps."""
    a = to_fraction_matrix(matrix)
    n = len(a)
    if any(len(row) != n for row in a):
        raise InputError("determinant requires a square matrix")
    det = Fraction(1)
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            det = -det
        pivot = a[col][col]
        det *= pivot
        for r in range(col + 1, n):
            if a[r][col] == 0:
                continue
            factor = a[r][col] / pivot
            for c in range(col, n):
                a[r][c] -= factor * a[col][c]
    return det


def leading_principal_minors(matrix) -> list[Fraction]:
    """Determinants of the k-by-k leading blocks, k = 1..n."""
    n = len(matrix)
    return [
        determinant([row[: k + 1] for row in matrix[: k + 1]])
        for k in range(n)
    ]


def rank(matrix) -> int:
    a = to_fraction_matrix(matrix)
    if not a:
        return 0
    rows, cols = len(a), len(a[0])
    rk = 0
    for col in range(cols):
        pivot_row = next((r for r in range(rk, rows) if a[r][col] != 0), None)
        if pivot_row is None:
            continue
        a[rk], a[pivot_row] = a[pivot_row], a[rk]
        pivot = a[rk][col]
        for r in range(rk + 1, rows):
            if a[r][col] == 0:
                continue
            factor = a[r][col] / pivot
            for c in range(col, cols):
                a[r][c] -= factor * a[rk][c]
        rk += 1
        if rk == rows:
            break
    return rk


def solve_square(matrix, rhs) -> Vec:
    """Solve A x = b for nonsingular square A; raises on singular input."""
    a = to_fraction_matrix(matrix)
    b = [Fraction(x) for x in rhs]
    n = len(a)
    if len(b) != n or any(len(row) != n for row in a):
        raise InputError("solve_square requires square A and matching b")
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot_row is None:
            raise InputError("singular matrix in exact solve")
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            b[col], b[pivot_row] = b[pivot_row], b[col]
        pivot = a[col][col]
        for r in range(col + 1, n):
            if a[r][col] == 0:
                continue
            factor = a[r][col] / pivot
            for c in range(col, n):
                a[r][c] -= factor * a[col][c]
            b[r] -= factor * b[col]
    x = [Fraction(0)] * n
    for row in range(n - 1, -1, -1):
        acc = b[row]
        for c in range(row + 1, n):
            acc -= a[row][c] * x[c]
        x[row] = acc / a[row][row]
    return x


def congruence_diagonalize(matrix) -> tuple[Vec, Mat]:
    """Diagonalise a symmetric matrix by congruence: returns (d, P) with
    P A P^T = diag(d).

    Rows of P are exact witnesses: row i pairs to d[i] under the form.
    """
    a = to_fraction_matrix(matrix)
    n = len(a)
    p = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]

    def add_row_col(dst: int, src: int, factor: Fraction) -> None:
        for c in range(n):
            a[dst][c] += factor * a[src][c]
        for r in range(n):
            a[r][dst] += factor * a[r][src]
        for c in range(n):
            p[dst][c] += factor * p[src][c]

    def swap(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        for row in a:
            row[i], row[j] = row[j], row[i]
        p[i], p[j] = p[j], p[i]

    for k in range(n):
        if a[k][k] == 0:
            swap_to = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if swap_to is not None:
                swap(k, swap_to)
            else:
                off = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if off is None:
                    continue  # row already clear; diagonal entry stays 0
                # both diagonals vanish, so adding the row makes a[k][k] = 2 a[k][off]
                add_row_col(k, off, Fraction(1))
        pivot = a[k][k]
        for r in range(k + 1, n):
            if a[r][k] != 0:
                add_row_col(r, k, -a[r][k] / pivot)
    return [a[i][i] for i in range(n)], p


def quadratic_form(matrix, vector) -> Fraction:
    m = to_fraction_matrix(matrix)
    v = [Fraction(x) for x in vector]
    return sum(v[i] * m[i][j] * v[j] for i in range(len(v)) for j in range(len(v)))


def solve_nonnegative(columns: list[Vec], target: Vec) -> tuple[Vec | None, Vec | None]:
    """Exact feasibility of  sum_j x_j * columns[j] = target,  x >= 0.

    Returns (x, None) with a feasible point, or (None, y) with a Farkas
    certificate: y . columns[j] <= 0 for every j and y . target > 0.
    Phase-one simplex with Bland's rule; all arithmetic is exact so the
    returned certificate is verified before being handed back.
    """
    m = len(target)
    n = len(columns)
    if any(len(col) != m for col in columns):
        raise InputError("column dimension mismatch in solve_nonnegative")
    b = [Fraction(x) for x in target]
    flips = [Fraction(-1) if b[i] < 0 else Fraction(1) for i in range(m)]
    tab = [
        [flips[i] * Fraction(columns[j][i]) for j in range(n)]
        + [Fraction(1 if k == i else 0) for k in range(m)]
        + [flips[i] * b[i]]
        for i in range(m)
    ]
    basis = [n + i for i in range(m)]
    # objective row for min(sum of artificials): z_j = (sum over rows) - cost_j
    z = [sum(tab[i][j] for i in range(m)) for j in range(n + m + 1)]
    for j in range(n, n + m):
        z[j] -= 1

    while True:
        enter = next((j for j in range(n + m) if z[j] > 0), None)
        if enter is None:
            break
        best_row, best_ratio = None, None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[best_row])
                ):
                    best_row, best_ratio = i, ratio
        if best_row is None:
            raise InvariantViolation("phase-one simplex cannot be unbounded")
        pivot = tab[best_row][enter]
        tab[best_row] = [v / pivot for v in tab[best_row]]
        for i in range(m):
            if i != best_row and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [tab[i][c] - f * tab[best_row][c] for c in range(n + m + 1)]
        if z[enter] != 0:
            f = z[enter]
            z = [z[c] - f * tab[best_row][c] for c in range(n + m + 1)]
        basis[best_row] = enter

    objective = z[-1]
    if objective == 0:
        x = [Fraction(0)] * n
        for i, var in enumerate(basis):
            if var < n:
                x[var] = tab[i][-1]
        assert all(
            sum(x[j] * columns[j][i] for j in range(n)) == b[i] for i in range(m)
        ), "simplex returned a non-solution"
        assert all(v >= 0 for v in x)
        return x, None
    # Farkas multipliers read off the artificial columns of the z row.
    y = [flips[i] * (z[n + i] + 1) for i in range(m)]
    assert all(
        sum(y[i] * columns[j][i] for i in range(m)) <= 0 for j in range(n)
    ), "invalid infeasibility certificate"
    assert sum(y[i] * b[i] for i in range(m)) > 0
    return None, y
