#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "gpc/channel.hpp"
#include "gpc/mub.hpp"

using namespace gpc;
using Catch::Matchers::WithinAbs;

namespace {

RealVector random_probs(int d, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    RealVector p(d + 2);
    for (int i = 0; i < d + 2; ++i) p(i) = e(rng);
    return p / p.sum();
}

Matrix random_state(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = cplx(n(rng), n(rng));
    Matrix rho = g * g.adjoint();
    rho = 0.5 * (rho + rho.adjoint());
    return rho / rho.trace().real();
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("probability and eigenvalue pictures: fixed points", "[channel]") {
    RealVector ones = RealVector::Ones(3);
    RealVector p = probs_from_eigenvalues(ones, 2);
    CHECK((p - (RealVector(4) << 1, 0, 0, 0).finished()).cwiseAbs().maxCoeff() < 1e-15);

    for (int d : {2, 3, 5}) {
        const RealVector q = probs_from_eigenvalues(RealVector::Zero(d + 1), d);
        CHECK_THAT(q(0), WithinAbs(1.0 / (d * d), 1e-15));
        for (int a = 1; a <= d + 1; ++a) CHECK_THAT(q(a), WithinAbs((d - 1.0) / (d * d), 1e-15));
        CHECK_THAT(q.sum(), WithinAbs(1.0, 1e-15));

        RealVector id = RealVector::Zero(d + 2);
        id(0) = 1.0;
        CHECK((eigenvalues_from_probs(id, d) - RealVector::Ones(d + 1)).cwiseAbs().maxCoeff() < 1e-15);
    }
    const RealVector depol = eigenvalues_from_probs(RealVector::Constant(4, 0.25), 2);
    CHECK(depol.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("eigenvalue route reproduces the semigroup-mixture probabilities", "[channel]") {
    const int d = 3;
    const RealVector x = (RealVector(4) << 0.5, 0.5, 0.0, 0.0).finished();
    const double e = std::exp(-1.0);
    RealVector lambda(4);
    for (int a = 0; a < 4; ++a) lambda(a) = e + (1.0 - e) * x(a);
    const RealVector p = probs_from_eigenvalues(lambda, d);
    CHECK_THAT(p(0), WithinAbs((1.0 + (d - 1) * e) / d, 1e-14));
    for (int a = 0; a < 4; ++a) CHECK_THAT(p(a + 1), WithinAbs((d - 1.0) * (1.0 - e) * x(a) / d, 1e-14));
}

TEST_CASE("round trip on random normalized probability vectors", "[channel][property]") {
    std::mt19937_64 rng(20240611);
    for (int d : {2, 3, 5}) {
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const RealVector p = random_probs(d, rng);
            worst = std::max(worst, (probs_from_eigenvalues(eigenvalues_from_probs(p, d), d) - p).cwiseAbs().maxCoeff());
        }
        INFO("d = " << d);
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("unnormalized probabilities are rejected", "[channel]") {
    RealVector p = RealVector::Constant(5, 0.2);
    p(0) += 1e-6;
    CHECK_THROWS_AS(eigenvalues_from_probs(p, 3), Error);
    try {
        ChannelState::from_probs(3, p);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NotNormalized);
    }
}

TEST_CASE("apply: identity, dephasing and the Weyl eigenrelation", "[channel]") {
    std::mt19937_64 rng(7);
    for (int d : {2, 3, 5}) {
        INFO("d = " << d);
        const MubSet m = build_mubs(d);
        const WeylEigenbasis u = build_eigenbasis(m);
        const Matrix rho = random_state(d, rng);
        const DensityMatrix state(rho);
        CHECK(max_abs(apply(ChannelState::identity(d), state, m).matrix() - rho) < 1e-12);

        for (int a = 0; a <= d; ++a) {
            // p_0 = 1/d, p_a = (d-1)/d is the bare pinching Phi_a
            RealVector q = RealVector::Zero(d + 2);
            q(0) = 1.0 / d;
            q(a + 1) = (d - 1.0) / d;
            const Matrix out = apply(ChannelState::from_probs(d, q), state, m).matrix();
            CHECK(max_abs(out - m.pinch(a, rho)) < 1e-12);
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l)
                    if (k != l) CHECK(std::abs(m.vector(a, k).dot(out * m.vector(a, l))) < 1e-12);
        }

        const ChannelState ch = ChannelState::from_probs(d, random_probs(d, rng));
        for (int a = 0; a <= d; ++a)
            for (int k = 1; k < d; ++k) {
                const Matrix& op = u.op(a, k);
                CHECK(max_abs(apply_map(ch, op, m) - ch.eigenvalues()(a) * op) < 1e-12);
            }
        CHECK(max_abs(apply_map(ch, Matrix::Identity(d, d), m) - Matrix::Identity(d, d)) < 1e-12);
    }
}

TEST_CASE("apply rejects non-CP channels and mismatched dimensions", "[channel]") {
    const MubSet m3 = build_mubs(3);
    RealVector p(5);
    p << 0.4, -0.05, 0.25, 0.2, 0.2;
    const ChannelState bad = ChannelState::from_probs(3, p);
    CHECK_FALSE(bad.completely_positive());
    CHECK_THROWS_AS(apply(bad, DensityMatrix::maximally_mixed(3), m3), Error);
    CHECK_THROWS_AS(apply(ChannelState::identity(3), DensityMatrix::maximally_mixed(2), m3), Error);
}

TEST_CASE("density matrix validation", "[channel]") {
    Matrix not_unit = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(DensityMatrix(not_unit), Error);
    Matrix not_psd(2, 2);
    not_psd << 1.5, 0, 0, -0.5;
    CHECK_THROWS_AS(DensityMatrix(not_psd), Error);
    Matrix not_herm(2, 2);
    not_herm << 0.5, 0.3, 0.1, 0.5;
    CHECK_THROWS_AS(DensityMatrix(not_herm), Error);
    CHECK_NOTHROW(DensityMatrix::maximally_mixed(5));
}

TEST_CASE("Choi matrix of the identity is the maximally entangled projector", "[channel]") {
    for (int d : {2, 3}) {
        const Matrix c = choi_matrix(ChannelState::identity(d), build_mubs(d));
        CVector omega = CVector::Zero(d * d);
        for (int i = 0; i < d; ++i) omega(i * d + i) = 1.0 / std::sqrt(double(d));
        CHECK(max_abs(c - omega * omega.adjoint()) < 1e-12);
        const RealVector ev = hermitian_eigenvalues(c);
        CHECK_THAT(ev.maxCoeff(), WithinAbs(1.0, 1e-12));
        CHECK((ev.array().abs() > 1e-10).count() == 1);
    }
}

TEST_CASE("Choi spectrum, trace preservation and CP equivalence", "[channel][property]") {
    std::mt19937_64 rng(99);
    for (int d : {2, 3, 5}) {
        INFO("d = " << d);
        const MubSet m = build_mubs(d);
        const int trials = d == 5 ? 200 : 1000;
        int disagreements = 0;
        double worst_spectrum = 0.0, worst_ptrace = 0.0;
        std::uniform_real_distribution<double> lam(-1.0, 1.0);
        for (int trial = 0; trial < trials; ++trial) {
            RealVector l(d + 1);
            for (int a = 0; a <= d; ++a) l(a) = lam(rng);
            const ChannelState ch = ChannelState::from_eigenvalues(d, l);
            const Matrix c = choi_matrix(ch, m);
            RealVector ev = hermitian_eigenvalues(c);
            std::sort(ev.data(), ev.data() + ev.size());
            std::vector<double> expected{ch.probs()(0)};
            for (int a = 1; a <= d + 1; ++a)
                for (int k = 1; k < d; ++k) expected.push_back(ch.probs()(a) / (d - 1.0));
            std::sort(expected.begin(), expected.end());
            for (int i = 0; i < d * d; ++i) worst_spectrum = std::max(worst_spectrum, std::abs(ev(i) - expected[i]));

            Matrix reduced = Matrix::Zero(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) reduced(i, j) = c.block(i * d, j * d, d, d).trace();
            worst_ptrace = std::max(worst_ptrace, max_abs(reduced - Matrix::Identity(d, d) / double(d)));

            const bool cp_probs = ch.probs().minCoeff() >= -1e-12;
            const bool cp_choi = ev.minCoeff() >= -1e-10;
            if (cp_probs != cp_choi || cp_probs != ch.completely_positive()) ++disagreements;
        }
        CHECK(worst_spectrum < 1e-12);
        CHECK(worst_ptrace < 1e-12);
        CHECK(disagreements == 0);
    }
}

TEST_CASE("random CP instances have PSD Choi matrices; one negative p breaks it", "[channel][property]") {
    std::mt19937_64 rng(5);
    const MubSet m = build_mubs(3);
    double worst = 1.0;
    for (int trial = 0; trial < 500; ++trial)
        worst = std::min(worst, hermitian_eigenvalues(choi_matrix(ChannelState::from_probs(3, random_probs(3, rng)), m)).minCoeff());
    CHECK(worst >= -1e-10);

    RealVector p(5);
    p << 0.4, -0.05, 0.25, 0.2, 0.2;
    CHECK(hermitian_eigenvalues(choi_matrix(ChannelState::from_probs(3, p), m)).minCoeff() < 0.0);
}

TEST_CASE("unitality and multiplicativity", "[channel][property]") {
    std::mt19937_64 rng(11);
    for (int d : {2, 3, 5}) {
        const MubSet m = build_mubs(d);
        const Matrix mixed = Matrix::Identity(d, d) / double(d);
        double unital = 0.0, product = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const ChannelState a = ChannelState::from_probs(d, random_probs(d, rng));
            const ChannelState b = ChannelState::from_probs(d, random_probs(d, rng));
            unital = std::max(unital, max_abs(apply(a, DensityMatrix::maximally_mixed(d), m).matrix() - mixed));
            const ChannelState ab = compose(a, b);
            product = std::max(product, (ab.eigenvalues() - a.eigenvalues().cwiseProduct(b.eigenvalues())).cwiseAbs().maxCoeff());
            const Matrix rho = random_state(d, rng);
            product = std::max(product, max_abs(apply_map(ab, rho, m) - apply_map(a, apply_map(b, rho, m), m)));
        }
        INFO("d = " << d);
        CHECK(unital < 1e-12);
        CHECK(product < 1e-12);
    }
}
