#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "gpc/errors.hpp"
#include "gpc/linalg.hpp"
#include "gpc/mixture.hpp"

namespace gpc {

enum class Flavor { MarkovConstant, MixtureTimeDep, RateTimeDep };

constexpr std::string_view to_string(Flavor f) noexcept {
    switch (f) {
    case Flavor::MarkovConstant: return "markov";
    case Flavor::MixtureTimeDep: return "mixture";
    case Flavor::RateTimeDep: return "ratedep";
    }
    return "unknown";
}

/// Generator G(t) of dp/dt = G(t) p on the (d+2)-state space {0, 1, ..., d+1};
/// state 0 carries p_0 and state a+1 carries p_a.
class ClassicalGenerator {
public:
    ClassicalGenerator(int d, Flavor flavor, RealMatrix constant)
        : dim_(d), flavor_(flavor), constant_(std::move(constant)) {}
    ClassicalGenerator(int d, Flavor flavor, std::function<RealMatrix(double)> fn)
        : dim_(d), flavor_(flavor), fn_(std::move(fn)) {}

    int dim() const noexcept { return dim_; }
    int states() const noexcept { return dim_ + 2; }
    Flavor flavor() const noexcept { return flavor_; }
    bool is_constant() const noexcept { return constant_.has_value(); }

    RealMatrix at(double t) const { return constant_ ? *constant_ : fn_(t); }

private:
    int dim_;
    Flavor flavor_;
    std::optional<RealMatrix> constant_;
    std::function<RealMatrix(double)> fn_;
};

struct ProbabilityTrajectory {
    std::vector<double> t;
    std::vector<RealVector> p;
    Flavor flavor = Flavor::MarkovConstant;
};

/// Time-independent rates Gamma_{0->a} = (d-1) x_a, Gamma_{a->0} = 1, scaled by
/// r/d so that the flow reproduces the semigroup mixture with rate r. The
/// default r = d gives the bare rate matrix.
inline ClassicalGenerator markov_generator(const RealVector& x, int d, double r) {
    if (x.size() != d + 1) throw Error(Errc::DimensionMismatch, "expected d+1 mixing weights");
    if (x.minCoeff() < 0.0 || std::abs(x.sum() - 1.0) > kExactTol)
        throw Error(Errc::NotNormalized, "mixing weights must lie on the simplex");
    RealMatrix g = RealMatrix::Zero(d + 2, d + 2);
    g(0, 0) = -(d - 1.0);
    for (int a = 0; a <= d; ++a) {
        g(0, a + 1) = 1.0;
        g(a + 1, 0) = (d - 1.0) * x(a);
        g(a + 1, a + 1) = -1.0;
    }
    return ClassicalGenerator(d, Flavor::MarkovConstant, RealMatrix((r / d) * g));
}

inline ClassicalGenerator markov_generator(const RealVector& x, int d) { return markov_generator(x, d, d); }

/// (1/d) L(t) for the general mixture, with W = (d-1) sum_a w'_a x_a:
///   L_00 = -W,  L_0l = -W + d w'_l,  L_k0 = L_kl = (d-1) x_k w'_k,
///   L_kk = -[d(1 - x_k) + x_k] w'_k.
/// Evaluating at a time with some w'_a < 0 throws NegativeWeightDerivative.
inline RealMatrix mixture_generator_matrix(const MixtureSpec& spec, double t) {
    const int d = spec.dim();
    const RealVector& x = spec.x();
    RealVector dw(d + 1);
    for (int a = 0; a <= d; ++a) {
        dw(a) = spec.weight(a).derivative(t);
        if (dw(a) < 0.0)
            throw Error(Errc::NegativeWeightDerivative,
                        "w'_" + std::to_string(a + 1) + "(" + std::to_string(t) + ") = " + std::to_string(dw(a)));
    }
    const double big_w = (d - 1.0) * dw.dot(x);
    RealMatrix g(d + 2, d + 2);
    g(0, 0) = -big_w;
    for (int l = 0; l <= d; ++l) g(0, l + 1) = -big_w + d * dw(l);
    for (int k = 0; k <= d; ++k) {
        const double gain = (d - 1.0) * x(k) * dw(k);
        g.row(k + 1).setConstant(gain);
        g(k + 1, k + 1) = -(d * (1.0 - x(k)) + x(k)) * dw(k);
    }
    return g / static_cast<double>(d);
}

inline ClassicalGenerator mixture_generator(const MixtureSpec& spec) {
    return ClassicalGenerator(spec.dim(), Flavor::MixtureTimeDep,
                              [spec](double t) { return mixture_generator_matrix(spec, t); });
}

/// Rate-equation generator with rates
///   g_{0->a} = gamma_a,  g_{a->0} = (d-1) gamma_a,  g_{a->b} = gamma_0 - gamma_a - gamma_b,
/// where gamma_0 = sum_a gamma_a. Off-diagonal entries may be negative.
inline RealMatrix ratedep_matrix(const RealVector& gamma, int d) {
    if (gamma.size() != d + 1) throw Error(Errc::DimensionMismatch, "expected d+1 rates");
    const double g0 = gamma.sum();
    RealMatrix g(d + 2, d + 2);
    g(0, 0) = -(d - 1.0) * g0;
    for (int a = 0; a <= d; ++a) {
        g(0, a + 1) = gamma(a);
        g(a + 1, 0) = (d - 1.0) * gamma(a);
        for (int b = 0; b <= d; ++b)
            g(a + 1, b + 1) = (a == b) ? (d - 2.0) * gamma(a) - (d - 1.0) * g0 : g0 - gamma(a) - gamma(b);
    }
    return g / static_cast<double>(d);
}

/// The d = 3 rate matrix A(t)/3 written entry by entry in terms of the four
/// rates, kept separate from ratedep_matrix so the two can be compared.
inline RealMatrix ratedep_matrix_d3(const RealVector& gamma) {
    if (gamma.size() != 4) throw Error(Errc::DimensionMismatch, "expected 4 rates");
    const double g1 = gamma(0), g2 = gamma(1), g3 = gamma(2), g4 = gamma(3);
    const double g0 = gamma.sum();
    RealMatrix a(5, 5);
    // clang-format off
    a << -2 * g0, g1,          g2,          g3,          g4,
         2 * g1,  g1 - 2 * g0, g3 + g4,     g2 + g4,     g2 + g3,
         2 * g2,  g3 + g4,     g2 - 2 * g0, g1 + g4,     g1 + g3,
         2 * g3,  g2 + g4,     g1 + g4,     g3 - 2 * g0, g1 + g2,
         2 * g4,  g2 + g3,     g1 + g3,     g1 + g2,     g4 - 2 * g0;
    // clang-format on
    return a / 3.0;
}

inline ClassicalGenerator ratedep_generator(const RateVector& rates, int d) {
    return ClassicalGenerator(d, Flavor::RateTimeDep, ratedep_matrix(rates.gamma, d));
}

inline ClassicalGenerator ratedep_generator(const MixtureSpec& spec) {
    return ClassicalGenerator(spec.dim(), Flavor::RateTimeDep,
                              [spec](double t) { return ratedep_matrix(rates_at(spec, t).gamma, spec.dim()); });
}

namespace detail {
inline void check_distribution(const RealVector& p0, int states) {
    if (p0.size() != states) throw Error(Errc::DimensionMismatch, "expected " + std::to_string(states) + " entries");
    if (p0.minCoeff() < -1e-10 || std::abs(p0.sum() - 1.0) > 1e-10)
        throw Error(Errc::NotNormalized, "initial distribution must lie on the simplex");
}
} // namespace detail

/// Fixed-step RK4 from t = 0 with step <= t_max / 2000, reporting at each
/// grid time.
inline ProbabilityTrajectory integrate(const ClassicalGenerator& gen, const RealVector& p0,
                                       const std::vector<double>& t_grid) {
    detail::check_distribution(p0, gen.states());
    if (t_grid.empty()) throw Error(Errc::EmptyGrid, "time grid is empty");
    if (t_grid.front() < 0.0) throw Error(Errc::NegativeTime, "time grid must start at t >= 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw Error(Errc::InvalidArgument, "time grid must increase");

    const double h_max = t_grid.back() / 2000.0;
    ProbabilityTrajectory traj{{}, {}, gen.flavor()};
    RealVector p = p0;
    double t = 0.0;
    auto rhs = [&gen](double s, const RealVector& q) -> RealVector { return gen.at(s) * q; };
    for (const double target : t_grid) {
        const double span = target - t;
        if (span > 0.0) {
            const long steps = std::max(1L, static_cast<long>(std::ceil(span / h_max)));
            const double h = span / steps;
            if (!(t + h > t)) throw Error(Errc::StepSizeUnderflow, "RK4 step underflows at t = " + std::to_string(t));
            for (long s = 0; s < steps; ++s) {
                const double ts = t + s * h;
                const RealVector k1 = rhs(ts, p);
                const RealVector k2 = rhs(ts + 0.5 * h, p + 0.5 * h * k1);
                const RealVector k3 = rhs(ts + 0.5 * h, p + 0.5 * h * k2);
                const RealVector k4 = rhs(ts + h, p + h * k3);
                p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            t = target;
        }
        traj.t.push_back(target);
        traj.p.push_back(p);
    }
    return traj;
}

/// exp(G t) p0 for a constant generator.
inline RealVector propagate_exact(const ClassicalGenerator& gen, const RealVector& p0, double t) {
    if (!gen.is_constant()) throw Error(Errc::InvalidArgument, "exact propagation needs a constant generator");
    detail::check_distribution(p0, gen.states());
    const RealMatrix gt = gen.at(0.0) * t;
    return gt.exp() * p0;
}

} // namespace gpc
