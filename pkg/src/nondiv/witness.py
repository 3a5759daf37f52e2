"""Constructive divergence pipeline behind a certificate.

From a replayable certificate this module builds an escape vector v in the
span U of the transported weight duals, a sign orthant missed by the
projection U' of the transported Lie(A), the divergence sequence
g_N = w' exp(N v) w, and a two-part verification: the exact part re-checks the
rational conditions that carry the universal quantifier over H, the numeric
part samples H and measures wedge-line norm decay along h * g_N.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .criterion import Certificate, GroupConfig, replay_certificate
from .linalg import (
    Orthant,
    Subspace,
    Vec,
    dot,
    mat_inverse,
    orthant_meets_subspace,
    project_subspace,
    vec_add,
    vec_scale,
)
from .rootdata import (
    CartanSpace,
    LieElement,
    ParabolicSide,
    fundamental_weight,
    nilradical_basis,
    weight_of_nilradical,
)
from .weyl import act_on_functional, signed_permutation_matrix


class NotProperError(RuntimeError):
    """The projected subspace is not proper; contradicts the certificate."""


class NoMissedOrthantError(RuntimeError):
    """No orthant avoids the projected subspace; contradicts the certificate."""


class ExactCheckFailedError(RuntimeError):
    """An exact witness condition failed on re-verification."""


@dataclass(frozen=True)
class EscapeWitness:
    u_vectors: tuple[Vec, ...]   # duals of the w-transported weights
    u_space: Subspace            # U = span(u_vectors)
    u_prime: Subspace            # projection of the transported Lie(A) onto U
    sigma0: Orthant              # orthant missed by u_prime
    v: Vec                       # escape vector, each weight value exactly +-2


@dataclass(frozen=True)
class WedgeLine:
    rep_index: int
    side: ParabolicSide
    basis: tuple[LieElement, ...]

    @classmethod
    def of(cls, space: CartanSpace, j: int, side: ParabolicSide) -> "WedgeLine":
        return cls(j, side, tuple(nilradical_basis(space, j, side)))


@dataclass(frozen=True)
class DivergenceSequence:
    certificate: Certificate
    witness: EscapeWitness
    n_values: tuple[int, ...]
    elements: tuple[tuple[np.ndarray, ...], ...]  # one m-tuple per N


def first_missed_orthant(funcs: Sequence[Vec], u_prime: Subspace) -> Orthant:
    """First orthant in scan order (+1 before -1, per index) avoiding u_prime."""
    k = len(funcs)
    for signs in itertools.product((1, -1), repeat=k):
        cand = Orthant(signs)
        if not orthant_meets_subspace(funcs, cand, u_prime):
            return cand
    raise NoMissedOrthantError("every orthant meets the projected subspace")


def escape_vector(funcs: Sequence[Vec], u_vectors: Sequence[Vec],
                  sigma0: Orthant) -> Vec:
    """The combination of the in-span dual basis with every weight value +-2."""
    k = len(funcs)
    ambient = len(u_vectors[0])
    gram = [[dot(f, u) for u in u_vectors] for f in funcs]
    ginv = mat_inverse(gram)
    v: Vec = tuple(Fraction(0) for _ in range(ambient))
    for j in range(k):
        dual_j = tuple(Fraction(0) for _ in range(ambient))
        for l in range(k):
            dual_j = vec_add(dual_j, vec_scale(ginv[l][j], u_vectors[l]))
        v = vec_add(v, vec_scale(Fraction(2 * sigma0.signs[j]), dual_j))
    assert all(dot(f, v) == 2 * s for f, s in zip(funcs, sigma0.signs))
    return v


def build_escape_witness(cert: Certificate, config: GroupConfig) -> EscapeWitness:
    """Escape data for a certificate: U, U', the missed orthant, and v."""
    if not replay_certificate(config, cert):
        raise ValueError("certificate does not replay against the configuration")
    space = CartanSpace(config.spec)
    funcs = [act_on_functional(cert.w, fundamental_weight(space, i)).vector
             for i in cert.subset]
    u_vectors = tuple(funcs)  # standard form: dual vector = coefficient vector
    u_space = Subspace.span(space.ambient_dim, u_vectors)
    transported = Subspace.span(
        space.ambient_dim,
        [cert.w_prime.transport_inverse(b) for b in config.a_basis.basis])
    u_prime = project_subspace(transported, u_space, space.form)
    if u_prime.dim >= u_space.dim:
        raise NotProperError("projection of Lie(A) covers the weight span")
    sigma0 = first_missed_orthant(funcs, u_prime)
    v = escape_vector(funcs, u_vectors, sigma0)
    return EscapeWitness(u_vectors, u_space, u_prime, sigma0, v)


# --- realization over the reals ---------------------------------------------

def _np_factors(x: LieElement) -> list[np.ndarray]:
    return [np.array([[float(e) for e in row] for row in f]) for f in x.factors]


def _np_mat(m) -> np.ndarray:
    return np.array([[float(e) for e in row] for row in m])


def realize_weyl_matrices(w) -> list[np.ndarray]:
    return [_np_mat(signed_permutation_matrix(p)) for p in w.perms]


def _exp_cartan(space: CartanSpace, v: Sequence, scale: float = 1.0) -> list[np.ndarray]:
    n = space.spec.n
    out = []
    for k in range(space.spec.m):
        block = [float(e) * scale for e in v[k * n:(k + 1) * n]]
        out.append(np.diag(np.exp(block)))
    return out


def realize_divergence_sequence(cert: Certificate, witness: EscapeWitness,
                                config: GroupConfig,
                                n_values: Sequence[int]) -> DivergenceSequence:
    """g_N = w' exp(N v) w as float matrices, one m-tuple per requested N."""
    space = CartanSpace(config.spec)
    w_mats = realize_weyl_matrices(cert.w)
    wp_mats = [_np_mat(f) for f in cert.w_prime.matrices]
    elements = []
    for n_val in n_values:
        exp_mats = _exp_cartan(space, witness.v, scale=float(n_val))
        factors = tuple(wp @ e @ wm for wp, e, wm in zip(wp_mats, exp_mats, w_mats))
        for f in factors:
            if abs(np.linalg.det(f) - 1.0) > 1e-9:
                raise ExactCheckFailedError("divergence element determinant drifted")
        elements.append(factors)
    return DivergenceSequence(cert, witness, tuple(int(n) for n in n_values),
                              tuple(elements))


def wedge_norm(line: WedgeLine, g: Sequence[np.ndarray]) -> float:
    """Norm of the wedge line image under Ad(g), via the Gram determinant.

    The ambient inner product makes matrix units orthonormal in each factor;
    no wedge space is materialized, only a d x d determinant.
    """
    g_inv = [np.linalg.inv(f) for f in g]
    moved = []
    for b in line.basis:
        moved.append([gf @ bf @ gi for gf, bf, gi in zip(g, _np_factors(b), g_inv)])
    d = len(moved)
    gram = np.empty((d, d))
    for i in range(d):
        for j in range(i + 1):
            val = sum(float(np.sum(x * y)) for x, y in zip(moved[i], moved[j]))
            gram[i][j] = gram[j][i] = val
    return math.sqrt(max(np.linalg.det(gram), 0.0))


def closed_form_torus_norm(config: GroupConfig, cert: Certificate,
                           witness: EscapeWitness, line: WedgeLine,
                           a_vec: Vec, n_val: int, base_norm: float) -> float:
    """Norm of the wedge line under exp(a) * g_N for a torus sample a in Lie(A).

    The weight exponent is evaluated exactly in rational arithmetic; only the
    final exponential is floating point.  base_norm is the line norm under
    w'w alone.
    """
    space = CartanSpace(config.spec)
    omega = weight_of_nilradical(space, line.rep_index, line.side)
    w_omega = act_on_functional(cert.w, omega).vector
    x_prime = cert.w_prime.transport_inverse(a_vec)
    exponent = dot(w_omega, x_prime) + n_val * dot(w_omega, witness.v)
    return math.exp(float(exponent)) * base_norm


@dataclass(frozen=True)
class HSampler:
    """Deterministic H samples: a grid in Lie(A) times short words in exp(Lie(M))."""

    space: CartanSpace
    a_points: tuple[Vec, ...]
    a_labels: tuple[str, ...]
    m_words: tuple[tuple[np.ndarray, ...], ...]
    word_labels: tuple[str, ...]

    @classmethod
    def default(cls, config: GroupConfig, grid_radius: int = 5,
                grid_points: int = 21, n_words: int = 8,
                max_word_len: int = 3, seed: int = 0x5EED) -> "HSampler":
        space = CartanSpace(config.spec)
        basis = config.a_basis.basis
        if grid_points < 2:
            raise ValueError("grid needs at least two points per dimension")
        step = Fraction(2 * grid_radius, grid_points - 1)
        coords = [(-Fraction(grid_radius) + k * step) for k in range(grid_points)]
        points = []
        a_labels = []
        if basis:
            for combo in itertools.product(coords, repeat=len(basis)):
                p = tuple(Fraction(0) for _ in range(space.ambient_dim))
                for c, b in zip(combo, basis):
                    p = vec_add(p, vec_scale(c, b))
                points.append(p)
                a_labels.append("t=(" + ",".join(str(c) for c in combo) + ")")
        else:
            points.append(tuple(Fraction(0) for _ in range(space.ambient_dim)))
            a_labels.append("t=()")
        eye = tuple(np.eye(space.spec.n) for _ in range(space.spec.m))
        words: list[tuple[np.ndarray, ...]] = [eye]
        labels = ["id"]
        gens = config.m_generators
        if gens:
            rng = random.Random(seed)
            gen_mats = [_np_factors(g) for g in gens]
            for _ in range(n_words):
                length = rng.randint(1, max_word_len)
                mats = [np.eye(space.spec.n) for _ in range(space.spec.m)]
                label = []
                for _ in range(length):
                    gi = rng.randrange(len(gens))
                    sign = rng.choice((1, -1))
                    label.append(f"{'+' if sign > 0 else '-'}X{gi + 1}")
                    for k in range(space.spec.m):
                        mats[k] = mats[k] @ expm(sign * gen_mats[gi][k])
                words.append(tuple(mats))
                labels.append("*".join(label))
        return cls(space, tuple(points), tuple(a_labels), tuple(words), tuple(labels))

    def samples(self):
        """Yields (a_point, h_matrices, label)."""
        for a, a_label in zip(self.a_points, self.a_labels):
            a_mats = _exp_cartan(self.space, a)
            for word, w_label in zip(self.m_words, self.word_labels):
                h = tuple(am @ wm for am, wm in zip(a_mats, word))
                yield a, h, f"{a_label};{w_label}"


@dataclass(frozen=True)
class DecayRow:
    n_value: int
    max_min_norm: float
    worst_sample: str
    fired: tuple[tuple[str, int], ...]  # which (index, side) achieved the min


@dataclass(frozen=True)
class WitnessReport:
    exact_passed: bool
    n_target: int
    baseline: float
    n_zero_required: float
    rows: tuple[DecayRow, ...]
    anomalies: tuple[tuple[int, float, str], ...]


def check_witness_exact(witness: EscapeWitness) -> None:
    """Exact part of the divergence verification, in rational arithmetic.

    The orthant-emptiness plus the weight values on v exceeding 1 with the
    certified sign pattern carry the uniform bound over all of H; any failure
    means the certificate or the witness construction is unsound.
    """
    funcs = witness.u_vectors
    if witness.u_prime.dim >= witness.u_space.dim:
        raise ExactCheckFailedError("projected subspace is not proper")
    if orthant_meets_subspace(funcs, witness.sigma0, witness.u_prime):
        raise ExactCheckFailedError("witness orthant meets the projected subspace")
    for f, s in zip(funcs, witness.sigma0.signs):
        val = dot(f, witness.v)
        if not (abs(val) > 1 and (val > 0) == (s > 0)):
            raise ExactCheckFailedError("escape vector weight values are not as certified")


def decay_table(seq: DivergenceSequence, sampler: HSampler,
                config: GroupConfig) -> tuple[DecayRow, ...]:
    """Max over H samples of the min wedge-line norm, one row per N.

    The minimum ranges over the certified indices and both parabolic sides;
    a row for N = 0 is always included as the baseline.
    """
    space = CartanSpace(config.spec)
    cert = seq.certificate
    lines = []
    for j in cert.subset:
        for side in (ParabolicSide.STANDARD, ParabolicSide.OPPOSITE):
            lines.append(WedgeLine.of(space, j, side))

    def max_min_norm(g_mats) -> DecayRow:
        worst = -1.0
        worst_label = ""
        fired: dict[str, int] = {}
        for _, h, label in sampler.samples():
            hg = tuple(hf @ gf for hf, gf in zip(h, g_mats))
            best = None
            best_key = None
            for line in lines:
                val = wedge_norm(line, hg)
                key = f"{line.rep_index}:{line.side.value}"
                if best is None or val < best:
                    best, best_key = val, key
            fired[best_key] = fired.get(best_key, 0) + 1
            if best > worst:
                worst, worst_label = best, label
        return worst, worst_label, fired

    w_mats = realize_weyl_matrices(cert.w)
    wp_mats = [_np_mat(f) for f in cert.w_prime.matrices]
    baseline_g = tuple(wp @ wm for wp, wm in zip(wp_mats, w_mats))  # N = 0
    n_to_mats = dict(zip(seq.n_values, seq.elements))
    if 0 not in n_to_mats:
        n_to_mats = {0: baseline_g, **n_to_mats}
    rows = []
    for n_val in sorted(n_to_mats):
        worst, label, fired = max_min_norm(n_to_mats[n_val])
        rows.append(DecayRow(n_val, worst, label, tuple(sorted(fired.items()))))
    return tuple(rows)


def verify_divergence(seq: DivergenceSequence, sampler: HSampler,
                      n_target: int, config: GroupConfig) -> WitnessReport:
    """Two-part divergence verification.

    Exact part: re-checks, in rational arithmetic, that the witness orthant
    misses the projected subspace and that every weight value on v exceeds 1
    in absolute value with the witness sign pattern.  Numeric part: samples H,
    evaluates the minimum wedge-line norm over the certified indices and both
    parabolic sides on h * g_N, and reports the maximum over samples per N;
    rows at N beyond the derived threshold must drop below 1/n_target, and
    violations are reported (not fatal) with the offending sample.
    """
    check_witness_exact(seq.witness)
    rows = decay_table(seq, sampler, config)
    baseline = next(r.max_min_norm for r in rows if r.n_value == 0)
    n_zero_required = math.log(max(n_target * baseline, 1e-300))
    anomalies = []
    for row in rows:
        if row.n_value >= n_zero_required and row.max_min_norm >= 1.0 / n_target:
            anomalies.append((row.n_value, row.max_min_norm, row.worst_sample))
    return WitnessReport(True, n_target, baseline, n_zero_required,
                         rows, tuple(anomalies))
