"""Shared builders for test configurations."""

from fractions import Fraction as F

from nondiv import (
    CartanSpace,
    GroupConfig,
    GroupSpec,
    LieElement,
    Subspace,
    centralizer_weyl_validate,
    identity_centralizer_element,
    signed_permutation_matrix,
)

import itertools


def full_cartan_vectors(n, m):
    out = []
    for k in range(m):
        for j in range(n - 1):
            v = [F(0)] * (n * m)
            v[k * n + j] = F(1)
            v[k * n + j + 1] = F(-1)
            out.append(tuple(v))
    return out


def delta_vectors(n, m):
    """Basis of the diagonally embedded trace-zero torus."""
    out = []
    for j in range(n - 1):
        v = [F(0)] * (n * m)
        for k in range(m):
            v[k * n + j] = F(1)
            v[k * n + j + 1] = F(-1)
        out.append(tuple(v))
    return out


def delta_line_subspace(n, m):
    return Subspace.span(n * m, delta_vectors(n, m))


def torus_config(spec, a_basis):
    """Trivial-M configuration over the full Cartan torus."""
    space = CartanSpace(spec)
    return GroupConfig(spec, (), space.full_subspace(), a_basis,
                       (identity_centralizer_element(spec),))


def _zero_matrix(n):
    return tuple(tuple(F(0) for _ in range(n)) for _ in range(n))


def so21_block_element(rows, n=4, m=2, factor=0, offset=1):
    """Embed a 3x3 generator into the given factor at the given offset."""
    mats = []
    for k in range(m):
        mat = [[F(0)] * n for _ in range(n)]
        if k == factor:
            for i in range(3):
                for j in range(3):
                    mat[i + offset][j + offset] = F(rows[i][j])
        mats.append(tuple(tuple(r) for r in mat))
    return LieElement(tuple(mats))


def so21_generators():
    """so(2,1) for the form diag(1,1,-1): one rotation, two boosts."""
    return (
        so21_block_element([[0, 1, 0], [-1, 0, 0], [0, 0, 0]]),
        so21_block_element([[0, 0, 1], [0, 0, 0], [1, 0, 0]]),
        so21_block_element([[0, 0, 0], [0, 0, 1], [0, 1, 0]]),
    )


def so21_d_vectors():
    """Lie(D) for the SO(2,1)-block instance: a line in factor 1, full T' in factor 2."""
    vs = [tuple([F(3), F(-1), F(-1), F(-1)] + [F(0)] * 4)]
    for j in range(3):
        v = [F(0)] * 8
        v[4 + j] = F(1)
        v[4 + j + 1] = F(-1)
        vs.append(tuple(v))
    return vs


def so21_centralizer_elements():
    eye4 = tuple(tuple(F(int(i == j)) for j in range(4)) for i in range(4))
    return [(eye4, signed_permutation_matrix(p))
            for p in itertools.permutations(range(4))]


def so21_config(a_vectors):
    """Res SL_4 (m=2) with M = SO(2,1) in the lower-right block of factor 1."""
    spec = GroupSpec(4, 2)
    gens = so21_generators()
    d = Subspace.span(8, so21_d_vectors())
    cws = tuple(centralizer_weyl_validate(spec, gens, d, so21_centralizer_elements()))
    a = Subspace.span(8, a_vectors)
    return GroupConfig(spec, gens, d, a, cws)


def sl_block_generators(n, m, factor, pos, size, diagonal=False):
    """Generators of an sl_size block at the given position.

    With diagonal=True the block is embedded diagonally across all factors.
    """
    gens = []
    for a in range(pos, pos + size - 1):
        for (i, j) in ((a, a + 1), (a + 1, a)):
            mats = []
            for k in range(m):
                mat = [[F(0)] * n for _ in range(n)]
                if diagonal or k == factor:
                    mat[i][j] = F(1)
                mats.append(tuple(tuple(r) for r in mat))
            gens.append(LieElement(tuple(mats)))
    return tuple(gens)


def block_centralizer_torus_vectors(n, m, factors_with_block, pos, size):
    """Basis of the diagonals commuting with an sl_size block at pos.

    On factors carrying the block the entries over the block are equal; the
    remaining factors contribute their full trace-zero space.
    """
    out = []
    block = set(range(pos, pos + size))
    for k in range(m):
        if k in factors_with_block:
            for u in range(n):
                if u in block:
                    continue
                v = [F(0)] * (n * m)
                v[k * n + u] = F(1)
                for b in block:
                    v[k * n + b] = F(-1, size)
                out.append(tuple(v))
        else:
            for j in range(n - 1):
                v = [F(0)] * (n * m)
                v[k * n + j] = F(1)
                v[k * n + j + 1] = F(-1)
                out.append(tuple(v))
    return out
