import math

import numpy as np
import pytest
from scipy import integrate, stats

from slfusion import (
    Domain,
    DogmaticLimit,
    EvidenceRecord,
    HyperOpinion,
    dirichlet_pdf,
    dogmatic_weights,
    evidence_to_opinion,
    hyper_dirichlet_pdf,
    opinion_to_evidence,
)
from slfusion.errors import (
    BadOverride,
    DogmaticOpinion,
    DomainViolation,
    NegativeMass,
    NoDogmaticOpinion,
)
from slfusion.verification import RandomOpinionSpec, generate_opinions

from conftest import BINARY, binomial, max_diff

K3 = Domain(("x1", "x2", "x3"))
HALF = (0.5, 0.5)


class TestBijection:
    def test_vacuous_has_no_evidence(self):
        ev = opinion_to_evidence(HyperOpinion(BINARY, {}, 1.0))
        assert dict(ev.r) == {}
        assert ev.prior_weight == 2.0

    def test_a3(self):
        # r = W b / u = 2 * 0.7 / 0.2 and 2 * 0.1 / 0.2, by hand
        ev = opinion_to_evidence(binomial(0.7, 0.1, 0.2))
        assert ev.r[0b01] == pytest.approx(7.0, abs=1e-12)
        assert ev.r[0b10] == pytest.approx(1.0, abs=1e-12)

    def test_dogmatic_rejected(self):
        with pytest.raises(DogmaticOpinion):
            opinion_to_evidence(binomial(1.0, 0.0, 0.0))

    def test_back_to_opinion(self):
        assert evidence_to_opinion(EvidenceRecord(BINARY, {}, HALF)).uncertainty == 1.0
        op = evidence_to_opinion(EvidenceRecord(BINARY, {0b01: 7.0, 0b10: 1.0}, HALF))
        assert max_diff(op, binomial(0.7, 0.1, 0.2)) < 1e-12
        op = evidence_to_opinion(EvidenceRecord(BINARY, {0b01: 2.0, 0b10: 2.0}, HALF))
        assert max_diff(op, binomial(1 / 3, 1 / 3, 1 / 3)) < 1e-15

    def test_record_validation(self):
        with pytest.raises(NegativeMass):
            EvidenceRecord(BINARY, {0b01: -1.0}, HALF)
        with pytest.raises(NegativeMass):
            EvidenceRecord(BINARY, {0b01: math.inf}, HALF)

    @pytest.mark.parametrize("w", [1.0, 2.0, 5.0])
    @pytest.mark.parametrize("hyper", [False, True])
    def test_round_trip(self, w, hyper):
        for seed in range(200):
            for op in generate_opinions(RandomOpinionSpec(seed, 4, 3, hyper, shared_base_rate=False)):
                ev = opinion_to_evidence(op, w)
                assert max_diff(evidence_to_opinion(ev), op) <= 1e-12
                again = opinion_to_evidence(evidence_to_opinion(ev), w)
                for x, r in ev.r.items():
                    assert again.r[x] == pytest.approx(r, rel=1e-9)


def _beta_record(r1, r2):
    return EvidenceRecord(BINARY, {0b01: r1, 0b10: r2}, HALF, 2.0)


class TestDensity:
    def test_uniform(self):
        ev = _beta_record(0.0, 0.0)
        for p in (0.0, 0.3, 1.0):
            assert dirichlet_pdf(ev, (p, 1.0 - p)) == pytest.approx(1.0, abs=1e-15)

    def test_beta_2_2(self):
        # Gamma(4) / (Gamma(2) Gamma(2)) * 0.5 * 0.5 = 6 * 0.25
        assert dirichlet_pdf(_beta_record(1.0, 1.0), (0.5, 0.5)) == pytest.approx(1.5, abs=1e-12)

    def test_boundary_zero(self):
        assert dirichlet_pdf(_beta_record(1.0, 1.0), (1.0, 0.0)) == 0.0

    def test_domain_violation(self):
        ev = EvidenceRecord(BINARY, {}, (0.2, 0.8), 2.0)  # alpha(x) = 0.4 < 1
        with pytest.raises(DomainViolation):
            dirichlet_pdf(ev, (0.0, 1.0))

    @pytest.mark.parametrize("r", [(0.0, 0.0), (1.0, 1.0), (7.0, 1.0), (3.5, 0.0), (40.0, 25.0)])
    def test_matches_scipy(self, r):
        ev = _beta_record(*r)
        alpha = [r[0] + 1.0, r[1] + 1.0]
        for p in (0.1, 0.37, 0.8):
            assert dirichlet_pdf(ev, (p, 1 - p)) == pytest.approx(stats.beta.pdf(p, *alpha), rel=1e-10)

    @pytest.mark.parametrize("r", [(0.0, 0.0), (1.0, 1.0), (7.0, 1.0), (0.0, 5.0), (12.0, 30.0)])
    def test_integrates_to_one(self, r):
        ev = _beta_record(*r)
        total, _ = integrate.quad(lambda p: dirichlet_pdf(ev, (p, 1.0 - p)), 0.0, 1.0)
        assert total == pytest.approx(1.0, abs=1e-4)

    def test_large_evidence_does_not_overflow(self):
        ev = _beta_record(5000.0, 5000.0)
        assert math.isfinite(dirichlet_pdf(ev, (0.5, 0.5)))


class TestHyperDensity:
    def test_singleton_support_matches_dirichlet(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            r = rng.uniform(0, 5, size=3)
            ev = EvidenceRecord(K3, {1 << i: v for i, v in enumerate(r)}, (0.2, 0.3, 0.5))
            p = rng.dirichlet(np.ones(3))
            hp = {1 << i: v for i, v in enumerate(p)}
            assert hyper_dirichlet_pdf(ev, hp) == dirichlet_pdf(ev, tuple(p))

    def test_k2_uniform(self):
        ev = EvidenceRecord(BINARY, {}, HALF)
        assert hyper_dirichlet_pdf(ev, {0b01: 0.3, 0b10: 0.7}) == pytest.approx(1.0, abs=1e-15)

    def test_composite_evidence(self):
        third = (1 / 3,) * 3
        ev = EvidenceRecord(K3, {0b011: 2.0}, third)
        # alpha = 2/3 per singleton and 2 on {x1, x2}; composite p = 0 zeroes p**(alpha - 1)
        point = {0b001: 1 / 3, 0b010: 1 / 3, 0b100: 1 / 3}
        assert hyper_dirichlet_pdf(ev, point) == 0.0
        # interior point of the active coordinates vs scipy
        interior = {0b001: 0.2, 0b010: 0.2, 0b100: 0.3, 0b011: 0.3}
        want = stats.dirichlet.pdf([0.2, 0.2, 0.3, 0.3], [2 / 3, 2 / 3, 2 / 3, 2.0])
        assert hyper_dirichlet_pdf(ev, interior) == pytest.approx(want, rel=1e-10)
        # zero-strength composites hold no mass
        assert hyper_dirichlet_pdf(ev, {**interior, 0b011: 0.2, 0b101: 0.1}) == 0.0

    def test_composite_evidence_integrates_to_one(self):
        """Monte Carlo over the active 3-simplex: E_uniform[f] / Gamma(4) = integral."""
        third = (1 / 3,) * 3
        ev = EvidenceRecord(K3, {0b011: 2.0}, third)
        rng = np.random.default_rng(2024)
        # uniform Dirichlet(1, 1, 1, 1) has density Gamma(4) = 6 on the simplex
        samples = rng.dirichlet(np.ones(4), size=40000)
        keys = (0b001, 0b010, 0b100, 0b011)
        values = [hyper_dirichlet_pdf(ev, dict(zip(keys, s))) for s in samples]
        # heavy tail near p(x) = 0 for alpha < 1, hence the loose bound
        assert np.mean(values) / 6.0 == pytest.approx(1.0, abs=0.05)


class TestDogmaticWeights:
    def test_default_equal(self):
        ops = [binomial(1.0, 0.0, 0.0), binomial(0.2, 0.3, 0.5), binomial(0.0, 1.0, 0.0)]
        assert dict(dogmatic_weights(ops).weights) == {0: 0.5, 2: 0.5}

    def test_single(self):
        assert dict(dogmatic_weights([binomial(1.0, 0.0, 0.0)]).weights) == {0: 1.0}

    def test_override(self):
        ops = [binomial(1.0, 0.0, 0.0), binomial(0.0, 1.0, 0.0)]
        gamma = dogmatic_weights(ops, DogmaticLimit({0: 0.2, 1: 0.8}))
        assert dict(gamma.weights) == pytest.approx({0: 0.2, 1: 0.8})

    def test_override_restricted(self):
        ops = [binomial(1.0, 0.0, 0.0), binomial(0.2, 0.3, 0.5), binomial(0.0, 1.0, 0.0)]
        gamma = dogmatic_weights(ops, DogmaticLimit({0: 0.1, 1: 0.5, 2: 0.4}))
        assert dict(gamma.weights) == pytest.approx({0: 0.2, 2: 0.8})

    def test_errors(self):
        with pytest.raises(NoDogmaticOpinion):
            dogmatic_weights([binomial(0.2, 0.3, 0.5)])
        ops = [binomial(1.0, 0.0, 0.0), binomial(0.2, 0.3, 0.5)]
        with pytest.raises(BadOverride):
            dogmatic_weights(ops, DogmaticLimit({1: 1.0}))
        with pytest.raises(BadOverride):
            DogmaticLimit({0: 0.3})
