"""Restricted Weyl group of an SL_n product (a product of symmetric groups),
its action on Cartan functionals and Lie elements, and validation of
user-supplied centralizer Weyl representatives."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .linalg import Mat, Subspace, Vec, det, mat, mat_inverse
from .rootdata import CartanSpace, Functional, GroupSpec, LieElement, mat_mul

Permutation = tuple[int, ...]  # one-line notation, 0-based: i -> p[i]


def _check_permutation(p: Sequence[int], n: int) -> Permutation:
    t = tuple(p)
    if sorted(t) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {t}")
    return t


@dataclass(frozen=True)
class WeylElement:
    """One permutation per factor, acting on coordinates."""

    perms: tuple[Permutation, ...]

    def __post_init__(self):
        n = len(self.perms[0]) if self.perms else 0
        for p in self.perms:
            _check_permutation(p, n)

    def is_identity(self) -> bool:
        return all(p == tuple(range(len(p))) for p in self.perms)


def weyl_identity(spec: GroupSpec) -> WeylElement:
    return WeylElement((tuple(range(spec.n)),) * spec.m)


def weyl_inverse(w: WeylElement) -> WeylElement:
    out = []
    for p in w.perms:
        q = [0] * len(p)
        for i, pi in enumerate(p):
            q[pi] = i
        out.append(tuple(q))
    return WeylElement(tuple(out))


def weyl_compose(w1: WeylElement, w2: WeylElement) -> WeylElement:
    """(w1*w2)(i) = w1(w2(i))."""
    return WeylElement(tuple(tuple(p1[i] for i in p2)
                             for p1, p2 in zip(w1.perms, w2.perms)))


def enumerate_weyl(spec: GroupSpec) -> Iterator[WeylElement]:
    """All (n!)^m elements, in lexicographic product order of one-line notations."""
    for perms in itertools.product(itertools.permutations(range(spec.n)),
                                   repeat=spec.m):
        yield WeylElement(perms)


def weyl_order(spec: GroupSpec) -> int:
    fact = 1
    for k in range(2, spec.n + 1):
        fact *= k
    return fact ** spec.m


def act_on_functional(w: WeylElement, f: Functional) -> Functional:
    """w(f)(x) = f(Ad(w^-1)x); on dual coordinates each block is permuted by w."""
    n = len(w.perms[0])
    m = len(w.perms)
    if len(f.vector) != n * m:
        raise ValueError("dimension mismatch")
    out = [Fraction(0)] * (n * m)
    for k, p in enumerate(w.perms):
        for i in range(n):
            out[k * n + p[i]] = f.vector[k * n + i]
    return Functional(tuple(out))


def perm_sign(p: Permutation) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def signed_permutation_matrix(p: Permutation) -> Mat:
    """Determinant-one representative of the permutation.

    For odd permutations one row is negated; the row of the largest moved
    index is chosen, deterministically.
    """
    n = len(p)
    negate = -1
    if perm_sign(p) < 0:
        negate = max(i for i in range(n) if p[i] != i)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        rows[p[i]][i] = Fraction(-1 if p[i] == negate else 1)
    return tuple(tuple(r) for r in rows)


def act_on_lie(w: WeylElement, x: LieElement) -> LieElement:
    """Conjugation by the signed permutation representatives, per factor."""
    factors = []
    for p, f in zip(w.perms, x.factors):
        n = len(p)
        negate = -1
        if perm_sign(p) < 0:
            negate = max(i for i in range(n) if p[i] != i)
        sigma = [(-1 if p[i] == negate else 1) for i in range(n)]
        out = [[Fraction(0)] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                if f[a][b] != 0:
                    out[p[a]][p[b]] = sigma[a] * sigma[b] * f[a][b]
        factors.append(tuple(tuple(r) for r in out))
    return LieElement(tuple(factors))


class InvalidCentralizerWeyl(ValueError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"centralizer Weyl candidate #{index}: {reason}")
        self.index = index
        self.reason = reason


@dataclass(frozen=True)
class CentralizerWeylElement:
    """A validated representative of the centralizer Weyl group.

    Holds one invertible rational matrix per factor together with the exact
    inverses; the induced linear action on Cartan coordinates is exposed via
    :meth:`transport` / :meth:`transport_inverse` (conjugation of diagonal
    matrices, defined on the normalized torus).
    """

    matrices: tuple[Mat, ...]
    inverses: tuple[Mat, ...]

    @classmethod
    def build(cls, matrices: Iterable[Iterable[Iterable]]) -> "CentralizerWeylElement":
        ms = tuple(mat(f) for f in matrices)
        return cls(ms, tuple(mat_inverse(f) for f in ms))

    def is_identity(self) -> bool:
        return all(all(f[i][j] == (1 if i == j else 0)
                       for i in range(len(f)) for j in range(len(f)))
                   for f in self.matrices)

    def _conjugate_diagonal(self, v: Vec, left: tuple[Mat, ...],
                            right: tuple[Mat, ...]) -> Vec:
        n = len(self.matrices[0])
        out: list[Fraction] = []
        for k, (l, r) in enumerate(zip(left, right)):
            block = v[k * n:(k + 1) * n]
            diag = tuple(tuple(block[i] if i == j else Fraction(0)
                               for j in range(n)) for i in range(n))
            y = mat_mul(mat_mul(l, diag), r)
            for i in range(n):
                for j in range(n):
                    if i != j and y[i][j] != 0:
                        raise ValueError(
                            "conjugated Cartan vector is not diagonal; "
                            "vector is outside the normalized torus")
            out.extend(y[i][i] for i in range(n))
        return tuple(out)

    def transport(self, v: Vec) -> Vec:
        """Ad(w') on a diagonal Cartan vector."""
        return self._conjugate_diagonal(v, self.matrices, self.inverses)

    def transport_inverse(self, v: Vec) -> Vec:
        """Ad(w'^-1) on a diagonal Cartan vector."""
        return self._conjugate_diagonal(v, self.inverses, self.matrices)


def identity_centralizer_element(spec: GroupSpec) -> CentralizerWeylElement:
    eye = tuple(tuple(Fraction(int(i == j)) for j in range(spec.n))
                for i in range(spec.n))
    return CentralizerWeylElement.build((eye,) * spec.m)


def centralizer_weyl_validate(spec: GroupSpec,
                              m_gens: Sequence[LieElement],
                              d: Subspace,
                              elems: Sequence[Iterable[Iterable[Iterable]]],
                              ) -> list[CentralizerWeylElement]:
    """Validate candidate centralizer Weyl representatives.

    Each candidate must centralize every generator of Lie(M) under
    conjugation and map the span of d onto itself; the identity is prepended
    when absent.  Raises InvalidCentralizerWeyl naming the failed check.
    """
    n, m = spec.n, spec.m
    space = CartanSpace(spec)
    validated: list[CentralizerWeylElement] = []
    for idx, cand in enumerate(elems):
        ms = tuple(mat(f) for f in cand)
        if len(ms) != m or any(len(f) != n or any(len(r) != n for r in f) for f in ms):
            raise InvalidCentralizerWeyl(idx, "wrong matrix shape")
        for k, f in enumerate(ms):
            if det(f) != 1:
                raise InvalidCentralizerWeyl(
                    idx, f"determinant is not 1 in factor {k + 1}")
        elem = CentralizerWeylElement.build(ms)
        for gi, gen in enumerate(m_gens):
            for k in range(m):
                lhs = mat_mul(ms[k], gen.factors[k])
                rhs = mat_mul(gen.factors[k], ms[k])
                if lhs != rhs:
                    raise InvalidCentralizerWeyl(
                        idx, f"does not centralize M generator #{gi + 1}")
        images = []
        for v in d.basis:
            try:
                images.append(elem.transport(v))
            except ValueError:
                raise InvalidCentralizerWeyl(
                    idx, "does not normalize D (image of Lie(D) not diagonal)")
        if Subspace.span(space.ambient_dim, images) != d:
            raise InvalidCentralizerWeyl(idx, "does not normalize D")
        validated.append(elem)
    if not any(e.is_identity() for e in validated):
        validated.insert(0, identity_centralizer_element(spec))
    return validated
