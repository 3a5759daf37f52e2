"""Exact rational linear algebra: rank/kernel, orthogonal projection against a
positive definite form, strict-inequality feasibility by Fourier-Motzkin
elimination, and invariance dimension of H-form regions.

Everything here is pure and exact: entries are `fractions.Fraction`, inputs are
immutable, and no floating point is used.  Subspaces are stored with a
canonical reduced-echelon basis so equality of spans is plain `==`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]

NEG_INFINITY = float("-inf")


def vec(entries: Iterable) -> Vec:
    return tuple(Fraction(e) for e in entries)


def mat(rows: Iterable[Iterable]) -> Mat:
    m = tuple(vec(r) for r in rows)
    if m and any(len(r) != len(m[0]) for r in m):
        raise ValueError("ragged matrix")
    return m


def zeros(n: int) -> Vec:
    return (Fraction(0),) * n


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    if len(a) != len(b):
        raise ValueError("dimension mismatch")
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def vec_add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))

def vec_sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))

def vec_scale(c: Fraction, a: Sequence[Fraction]) -> Vec:
    return tuple(c * x for x in a)


def mat_vec(m: Sequence[Sequence[Fraction]], x: Sequence[Fraction]) -> Vec:
    return tuple(dot(row, x) for row in m)


def transpose(m: Sequence[Sequence[Fraction]]) -> Mat:
    if not m:
        return ()
    return tuple(tuple(row[j] for row in m) for j in range(len(m[0])))


def _rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    work = [list(Fraction(e) for e in r) for r in rows]
    if not work:
        return [], []
    ncols = len(work[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        pv = work[r][c]
        work[r] = [e / pv for e in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return work, pivots


def rank(m: Sequence[Sequence[Fraction]]) -> int:
    """Exact rank over the rationals."""
    return len(_rref(m)[1])


def _kernel_vectors(m: Sequence[Sequence[Fraction]], ncols: int) -> list[Vec]:
    """Free-variable kernel basis (one vector per non-pivot column)."""
    red, pivots = _rref(m)
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -red[i][f]
        out.append(tuple(v))
    return out


def solve(m: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Vec:
    """Solve a square nonsingular system exactly."""
    n = len(m)
    if n != len(rhs) or any(len(r) != n for r in m):
        raise ValueError("solve expects a square system")
    aug = [list(row) + [Fraction(r)] for row, r in zip(m, rhs)]
    red, pivots = _rref(aug)
    if pivots != list(range(n)):
        raise ValueError("singular system")
    return tuple(red[i][n] for i in range(n))


def det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by fraction-preserving elimination."""
    n = len(m)
    work = [list(Fraction(e) for e in r) for r in m]
    result = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if work[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            work[c], work[pr] = work[pr], work[c]
            result = -result
        result *= work[c][c]
        inv = 1 / work[c][c]
        for i in range(c + 1, n):
            if work[i][c] != 0:
                f = work[i][c] * inv
                work[i] = [a - f * b for a, b in zip(work[i], work[c])]
    return result


def mat_inverse(m: Sequence[Sequence[Fraction]]) -> Mat:
    n = len(m)
    aug = [list(Fraction(e) for e in row) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    red, pivots = _rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix not invertible")
    return tuple(tuple(red[i][n:]) for i in range(n))


@dataclass(frozen=True)
class Subspace:
    """A rational subspace with canonical reduced-echelon basis.

    Construct through :meth:`span` (canonicalizes any spanning set) or
    :meth:`from_independent` (rejects dependent input).  Canonical bases make
    subspace equality decidable by ``==``.
    """

    ambient_dim: int
    basis: Mat

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Sequence[Fraction]]) -> "Subspace":
        vs = [vec(v) for v in vectors]
        for v in vs:
            if len(v) != ambient_dim:
                raise ValueError("vector/ambient dimension mismatch")
        red, pivots = _rref(vs)
        return cls(ambient_dim, tuple(tuple(red[i]) for i in range(len(pivots))))

    @classmethod
    def from_independent(cls, ambient_dim: int, vectors: Iterable[Sequence[Fraction]]) -> "Subspace":
        vs = [vec(v) for v in vectors]
        s = cls.span(ambient_dim, vs)
        if s.dim != len(vs):
            raise ValueError("basis vectors are linearly dependent")
        return s

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        eye = tuple(tuple(Fraction(int(i == j)) for j in range(ambient_dim))
                    for i in range(ambient_dim))
        return cls(ambient_dim, eye)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def contains(self, v: Sequence[Fraction]) -> bool:
        if len(v) != self.ambient_dim:
            raise ValueError("dimension mismatch")
        return rank(list(self.basis) + [vec(v)]) == self.dim

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.basis)

    def coordinates(self, v: Sequence[Fraction]) -> Optional[Vec]:
        """Coefficients of v in the canonical basis, or None if outside."""
        if self.is_zero():
            return () if all(e == 0 for e in v) else None
        sys_rows = transpose(self.basis)
        aug = [list(row) + [Fraction(e)] for row, e in zip(sys_rows, v)]
        red, pivots = _rref(aug)
        ncols = self.dim
        if ncols in pivots:
            return None  # inconsistent: v not in the span
        coeffs = [Fraction(0)] * ncols
        for i, p in enumerate(pivots):
            coeffs[p] = red[i][ncols]
        return tuple(coeffs)


@dataclass(frozen=True)
class BilinearForm:
    """Symmetric strictly positive definite rational form given by its Gram matrix."""

    gram: Mat

    def __post_init__(self):
        g = self.gram
        n = len(g)
        if any(len(r) != n for r in g):
            raise ValueError("gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
            raise ValueError("gram matrix must be symmetric")
        # Sylvester: all leading principal minors strictly positive.
        for k in range(1, n + 1):
            if det([row[:k] for row in g[:k]]) <= 0:
                raise ValueError("gram matrix must be positive definite")

    @classmethod
    def standard(cls, n: int) -> "BilinearForm":
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @classmethod
    def scaled(cls, n: int, c) -> "BilinearForm":
        c = Fraction(c)
        return cls(tuple(tuple(c * Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.gram)

    def pair(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
        return dot(mat_vec(self.gram, a), b)

    def dual_vector(self, functional: Sequence[Fraction]) -> Vec:
        """The vector u with (u | x) = functional(x) for all x."""
        return solve(self.gram, functional)


@dataclass(frozen=True)
class Orthant:
    """A strict sign pattern (+1/-1 per functional)."""

    signs: tuple[int, ...]

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("orthant signs must be +1 or -1")

    def __len__(self) -> int:
        return len(self.signs)


@dataclass(frozen=True)
class StrictRegion:
    """Intersection of strict half-spaces {x : f_i(x) < a_i}."""

    ambient_dim: int
    constraints: tuple[tuple[Vec, Fraction], ...]

    def __post_init__(self):
        for f, _ in self.constraints:
            if len(f) != self.ambient_dim:
                raise ValueError("constraint/ambient dimension mismatch")
            if all(e == 0 for e in f):
                raise ValueError("constraint functionals must be nonzero")

    @classmethod
    def of(cls, ambient_dim: int, constraints: Iterable[tuple[Sequence, object]]) -> "StrictRegion":
        return cls(ambient_dim,
                   tuple((vec(f), Fraction(a)) for f, a in constraints))


# --- Fourier-Motzkin feasibility -------------------------------------------

# A constraint is (coeffs, rhs, strict): coeffs.x < rhs if strict else <= rhs.
_FMRow = tuple[Vec, Fraction, bool]


def _fm_normalize(coeffs: Vec, rhs: Fraction, strict: bool) -> _FMRow:
    lead = next((c for c in coeffs if c != 0), None)
    if lead is None:
        return coeffs, rhs, strict
    s = abs(lead)
    return tuple(c / s for c in coeffs), rhs / s, strict


def fm_feasible(constraints: Sequence[tuple[Sequence[Fraction], Fraction, bool]],
                nvars: int) -> bool:
    """Exact feasibility of a system of strict/weak linear inequalities."""
    rows: set[_FMRow] = set()
    consts: list[tuple[Fraction, bool]] = []
    for coeffs, rhs, strict in constraints:
        coeffs = vec(coeffs)
        if len(coeffs) != nvars:
            raise ValueError("constraint arity mismatch")
        if all(c == 0 for c in coeffs):
            consts.append((Fraction(rhs), strict))
        else:
            rows.add(_fm_normalize(coeffs, Fraction(rhs), strict))
    for rhs, strict in consts:
        if (strict and rhs <= 0) or (not strict and rhs < 0):
            return False
    for j in range(nvars):
        pos = [r for r in rows if r[0][j] > 0]
        neg = [r for r in rows if r[0][j] < 0]
        keep = {r for r in rows if r[0][j] == 0}
        for (cp, bp, sp), (cn, bn, sn) in itertools.product(pos, neg):
            mp, mn = -cn[j], cp[j]  # positive multipliers eliminating x_j
            coeffs = tuple(mp * a + mn * b for a, b in zip(cp, cn))
            rhs = mp * bp + mn * bn
            strict = sp or sn
            if all(c == 0 for c in coeffs):
                if (strict and rhs <= 0) or (not strict and rhs < 0):
                    return False
            else:
                keep.add(_fm_normalize(coeffs, rhs, strict))
        rows = keep
    return True


# --- spec'd operations -------------------------------------------------------

def kernel_basis(m: Sequence[Sequence[Fraction]]) -> Subspace:
    """Canonical basis of the rational null space (empty iff injective)."""
    rows = mat(m)
    ncols = len(rows[0]) if rows else 0
    return Subspace.span(ncols, _kernel_vectors(rows, ncols))


def integral_kernel_vector(m: Sequence[Sequence[int]]) -> Optional[tuple[int, ...]]:
    """A nonzero integer kernel vector with coprime entries, or None.

    Input entries must be integers; the rational kernel vector from the
    free-variable construction has its denominators cleared and common factor
    removed.
    """
    rows = mat(m)
    for r in rows:
        for e in r:
            if e.denominator != 1:
                raise ValueError("integral_kernel_vector expects integer entries")
    ncols = len(rows[0]) if rows else 0
    kern = _kernel_vectors(rows, ncols)
    if not kern:
        return None
    v = kern[0]
    lcm = 1
    for e in v:
        lcm = lcm * e.denominator // _gcd(lcm, e.denominator)
    ints = [int(e * lcm) for e in v]
    g = 0
    for e in ints:
        g = _gcd(g, abs(e))
    return tuple(e // g for e in ints)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def project_subspace(w: Subspace, u: Subspace, form: BilinearForm) -> Subspace:
    """Image of W under the orthogonal projection onto U w.r.t. the form."""
    if w.ambient_dim != u.ambient_dim or form.dim != w.ambient_dim:
        raise ValueError("dimension mismatch")
    if u.is_zero() or w.is_zero():
        return Subspace.zero(u.ambient_dim)
    gram_u = [[form.pair(a, b) for b in u.basis] for a in u.basis]
    images = []
    for x in w.basis:
        rhs = [form.pair(a, x) for a in u.basis]
        t = solve(gram_u, rhs)
        img = zeros(u.ambient_dim)
        for c, b in zip(t, u.basis):
            img = vec_add(img, vec_scale(c, b))
        images.append(img)
    return Subspace.span(u.ambient_dim, images)


def restricted_independent(functionals: Sequence[Sequence[Fraction]],
                           w: Subspace,
                           form: Optional[BilinearForm] = None) -> bool:
    """Are the functionals linearly independent when restricted to w?

    Decided by the rank of the evaluation matrix [f_i(b_j)].  When the
    functionals are independent on the ambient space, the answer must agree
    with the projection criterion pi_U(W) = U for U the span of form-duals;
    that equivalence is cross-asserted.
    """
    fs = [vec(f) for f in functionals]
    if not fs:
        return True
    for f in fs:
        if len(f) != w.ambient_dim:
            raise ValueError("dimension mismatch")
    evaluation = [[dot(f, b) for b in w.basis] for f in fs]
    result = rank(evaluation) == len(fs)
    if __debug__ and rank(fs) == len(fs):
        frm = form if form is not None else BilinearForm.standard(w.ambient_dim)
        duals = Subspace.span(w.ambient_dim, [frm.dual_vector(f) for f in fs])
        assert result == (project_subspace(w, duals, frm) == duals)
    return result


def orthant_meets_subspace(functionals: Sequence[Sequence[Fraction]],
                           sigma: Orthant,
                           u: Subspace) -> bool:
    """Does u contain a point with sign(f_i(x)) = sigma_i for every i?"""
    fs = [vec(f) for f in functionals]
    if len(fs) != len(sigma.signs):
        raise ValueError("functional/orthant arity mismatch")
    if u.is_zero():
        return False
    # Coordinates c on the basis of u; each strict sign is -sigma_i*f_i(Bc) < 0.
    constraints = []
    for f, s in zip(fs, sigma.signs):
        coeffs = tuple(-s * dot(f, b) for b in u.basis)
        constraints.append((coeffs, Fraction(0), True))
    return fm_feasible(constraints, u.dim)


def _region_feasible(region: StrictRegion) -> bool:
    return fm_feasible([(f, a, True) for f, a in region.constraints],
                       region.ambient_dim)


def invdim(region: StrictRegion):
    """Dimension of the translation stabilizer; NEG_INFINITY for the empty set.

    For a nonempty region the stabilizer is the common kernel of the
    constraint functionals that survive sequential redundancy removal
    (a constraint is redundant iff its reversal is infeasible against the
    remaining ones; sequential removal keeps duplicate constraints sound).
    """
    if not _region_feasible(region):
        return NEG_INFINITY
    cons = list(region.constraints)
    active = list(range(len(cons)))
    for i in range(len(cons)):
        if i not in active:
            continue
        others = [j for j in active if j != i]
        f_i, a_i = cons[i]
        system = [(cons[j][0], cons[j][1], True) for j in others]
        system.append((vec_scale(Fraction(-1), f_i), -a_i, False))  # f_i(x) >= a_i
        if not fm_feasible(system, region.ambient_dim):
            active = others
    r = rank([cons[j][0] for j in active]) if active else 0
    # For nonempty regions redundant constraints never add rank.
    assert r == (rank([f for f, _ in cons]) if cons else 0)
    return region.ambient_dim - r
