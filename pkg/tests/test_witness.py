import math
import random
from fractions import Fraction as F

import numpy as np
import pytest

from nondiv.criterion import check_general, check_torus
from nondiv.linalg import Subspace, dot
from nondiv.rootdata import CartanSpace, GroupSpec, ParabolicSide
from nondiv.witness import (
    HSampler,
    WedgeLine,
    build_escape_witness,
    check_witness_exact,
    closed_form_torus_norm,
    decay_table,
    escape_vector,
    first_missed_orthant,
    realize_divergence_sequence,
    realize_weyl_matrices,
    verify_divergence,
    wedge_norm,
    _np_mat,
)

from helpers import delta_line_subspace, so21_config, torus_config


def example1_m2_setup():
    spec = GroupSpec(2, 2)
    a = delta_line_subspace(2, 2)
    config = torus_config(spec, a)
    verdict = check_torus(spec, a)
    witness = build_escape_witness(verdict.certificate, config)
    return config, verdict.certificate, witness


def so21_line_setup():
    a = [tuple([F(0)] * 4 + [F(1), F(-1), F(0), F(0)])]
    config = so21_config(a)
    verdict = check_general(config)
    witness = build_escape_witness(verdict.certificate, config)
    return config, verdict.certificate, witness


class TestMissedOrthant:
    def test_plane_with_diagonal(self):
        funcs = [(F(1), F(0)), (F(0), F(1))]
        u_prime = Subspace.span(2, [[1, 1]])
        sigma0 = first_missed_orthant(funcs, u_prime)
        assert sigma0.signs == (1, -1)
        v = escape_vector(funcs, funcs, sigma0)
        assert v == (F(2), F(-2))

    def test_zero_subspace_takes_first(self):
        funcs = [(F(1), F(0)), (F(0), F(1))]
        sigma0 = first_missed_orthant(funcs, Subspace.zero(2))
        assert sigma0.signs == (1, 1)

    def test_line_case(self):
        funcs = [(F(1),)]
        sigma0 = first_missed_orthant(funcs, Subspace.zero(1))
        assert sigma0.signs == (1,)
        assert escape_vector(funcs, funcs, sigma0) == (F(2),)


class TestEscapeWitness:
    def test_example1_m2(self):
        config, cert, witness = example1_m2_setup()
        assert witness.sigma0.signs == (1,)
        assert witness.u_prime.is_zero()
        assert witness.v == (F(1), F(-1), F(-1), F(1))
        assert all(dot(u, witness.v) == 2 * s
                   for u, s in zip(witness.u_vectors, witness.sigma0.signs))

    def test_so21_line(self):
        config, cert, witness = so21_line_setup()
        assert witness.u_prime.dim < witness.u_space.dim
        check_witness_exact(witness)

    def test_rejects_unreplayable_certificate(self):
        import dataclasses
        config, cert, _ = example1_m2_setup()
        bad = dataclasses.replace(cert, subset=(2,) if cert.subset == (1,) else (1,))
        with pytest.raises(ValueError):
            build_escape_witness(bad, config)


class TestWedgeNorm:
    def test_identity_is_one(self):
        line = WedgeLine.of(CartanSpace(GroupSpec(2, 1)), 1, ParabolicSide.STANDARD)
        assert wedge_norm(line, [np.eye(2)]) == pytest.approx(1.0, abs=1e-12)

    def test_sl2_weight(self):
        line = WedgeLine.of(CartanSpace(GroupSpec(2, 1)), 1, ParabolicSide.STANDARD)
        for t in (0.5, -1.0, 2.0):
            g = [np.diag([math.exp(t), math.exp(-t)])]
            assert wedge_norm(line, g) == pytest.approx(math.exp(2 * t), rel=1e-9)

    def test_sl2_t_minus_one(self):
        line = WedgeLine.of(CartanSpace(GroupSpec(2, 1)), 1, ParabolicSide.STANDARD)
        g = [np.diag([math.exp(-1.0), math.exp(1.0)])]
        assert wedge_norm(line, g) == pytest.approx(0.1353352832366127, abs=1e-9)

    def test_sign_independence(self):
        # Norms are blind to the representative sign correction.
        config, cert, witness = example1_m2_setup()
        space = CartanSpace(config.spec)
        line = WedgeLine.of(space, 1, ParabolicSide.STANDARD)
        mats = realize_weyl_matrices(cert.w)
        flipped = [m.copy() for m in mats]
        flipped[1][0, :] *= -1.0
        assert wedge_norm(line, mats) == pytest.approx(
            wedge_norm(line, flipped), rel=1e-12)


class TestDivergenceSequence:
    def test_determinants_one(self):
        config, cert, witness = example1_m2_setup()
        seq = realize_divergence_sequence(cert, witness, config, [0, 5, 10])
        for mats in seq.elements:
            for f in mats:
                assert abs(np.linalg.det(f) - 1.0) < 1e-9

    def test_escape_vector_is_diagonal_cartan(self):
        config, cert, witness = example1_m2_setup()
        space = CartanSpace(config.spec)
        assert space.contains(witness.v)


class TestClosedForm:
    def test_matches_gram_on_random_instances(self):
        rng = random.Random(2024)
        checked = 0
        for config, cert, witness in (example1_m2_setup(), so21_line_setup()):
            space = CartanSpace(config.spec)
            w_mats = realize_weyl_matrices(cert.w)
            wp_mats = [_np_mat(f) for f in cert.w_prime.matrices]
            g0 = tuple(wp @ wm for wp, wm in zip(wp_mats, w_mats))
            lines = [WedgeLine.of(space, j, side)
                     for j in cert.subset for side in ParabolicSide]
            bases = {id(ln): wedge_norm(ln, g0) for ln in lines}
            for _ in range(50):
                coeffs = [F(rng.randint(-8, 8), rng.randint(1, 2))
                          for _ in config.a_basis.basis]
                a_vec = tuple(sum((c * b[j] for c, b in
                                   zip(coeffs, config.a_basis.basis)), F(0))
                              for j in range(space.ambient_dim))
                n_val = rng.randint(0, 3)
                seq = realize_divergence_sequence(cert, witness, config, [n_val])
                from nondiv.witness import _exp_cartan
                h = _exp_cartan(space, a_vec)
                hg = tuple(hf @ gf for hf, gf in zip(h, seq.elements[0]))
                for ln in lines:
                    expected = closed_form_torus_norm(
                        config, cert, witness, ln, a_vec, n_val, bases[id(ln)])
                    actual = wedge_norm(ln, hg)
                    assert actual == pytest.approx(expected, rel=1e-9)
                    checked += 1
        assert checked >= 100


class TestMInvariance:
    def test_wedge_line_fixed_by_m_words(self):
        config, cert, witness = so21_line_setup()
        space = CartanSpace(config.spec)
        sampler = HSampler.default(config, grid_points=3, grid_radius=1)
        seq = realize_divergence_sequence(cert, witness, config, [1])
        g = seq.elements[0]
        lines = [WedgeLine.of(space, j, side)
                 for j in cert.subset for side in ParabolicSide]
        for word in sampler.m_words:
            for line in lines:
                base = wedge_norm(line, g)
                moved = wedge_norm(line, tuple(w @ gf for w, gf in zip(word, g)))
                assert moved == pytest.approx(base, rel=1e-6)


class TestSampler:
    def test_grid_shape_and_determinism(self):
        config, _, _ = example1_m2_setup()
        s1 = HSampler.default(config)
        s2 = HSampler.default(config)
        assert len(s1.a_points) == 21
        assert s1.a_points == s2.a_points and s1.word_labels == s2.word_labels

    def test_m_words_seeded(self):
        config, _, _ = so21_line_setup()
        s1 = HSampler.default(config, seed=0x5EED)
        s2 = HSampler.default(config, seed=0x5EED)
        s3 = HSampler.default(config, seed=1)
        assert s1.word_labels == s2.word_labels
        assert len(s1.m_words) == 9  # identity + 8 words
        assert s1.word_labels != s3.word_labels

    def test_trivial_m_single_word(self):
        config, _, _ = example1_m2_setup()
        sampler = HSampler.default(config)
        assert len(sampler.m_words) == 1


class TestVerifyDivergence:
    def test_baseline_and_decay(self):
        config, cert, witness = example1_m2_setup()
        seq = realize_divergence_sequence(cert, witness, config, [0, 10])
        sampler = HSampler.default(config)
        report = verify_divergence(seq, sampler, 1000, config)
        assert report.exact_passed
        rows = {r.n_value: r.max_min_norm for r in report.rows}
        assert rows[0] == pytest.approx(1.0, rel=1e-9)
        assert rows[10] < math.exp(-10) * rows[0]
        assert not report.anomalies

    def test_decay_monotone_on_samples(self):
        config, cert, witness = so21_line_setup()
        seq = realize_divergence_sequence(cert, witness, config, [0, 1, 2, 3])
        sampler = HSampler.default(config, grid_points=5)
        rows = decay_table(seq, sampler, config)
        values = [r.max_min_norm for r in rows]
        assert all(a > b for a, b in zip(values, values[1:]))
        for row in rows:
            assert row.max_min_norm <= math.exp(-row.n_value) * values[0] * (1 + 1e-9)
