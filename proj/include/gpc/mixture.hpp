#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gpc/channel.hpp"
#include "gpc/errors.hpp"
#include "gpc/linalg.hpp"
#include "gpc/weight.hpp"

namespace gpc {

/// Lambda(t) = sum_a x_a exp(w_a(t) L_a) with L_a = Phi_a - id.
/// Index a runs over 0..d; index a corresponds to MUB basis a.
class MixtureSpec {
public:
    MixtureSpec(int d, RealVector x, std::vector<WeightFunction> w)
        : dim_(d), x_(std::move(x)), w_(std::move(w)) {
        if (d < 2) throw Error(Errc::DimensionTooSmall, "d = " + std::to_string(d));
        if (x_.size() != d + 1 || static_cast<int>(w_.size()) != d + 1)
            throw Error(Errc::DimensionMismatch, "need d+1 = " + std::to_string(d + 1) + " weights and mixing weights");
        for (int a = 0; a <= d; ++a)
            if (!(x_(a) >= 0.0))
                throw Error(Errc::InvalidArgument, "mixing weight x_" + std::to_string(a + 1) + " must be >= 0");
        if (std::abs(x_.sum() - 1.0) > kExactTol)
            throw Error(Errc::NotNormalized, "mixing weights sum to " + std::to_string(x_.sum()));
    }

    /// Convex combination of semigroups, every component with w_a(t) = r t.
    static MixtureSpec semigroup(const RealVector& x, double r) {
        const int d = static_cast<int>(x.size()) - 1;
        return MixtureSpec(d, x, std::vector<WeightFunction>(x.size(), WeightFunction::linear(r)));
    }

    int dim() const noexcept { return dim_; }
    const RealVector& x() const noexcept { return x_; }
    const std::vector<WeightFunction>& weights() const noexcept { return w_; }
    const WeightFunction& weight(int a) const { return w_.at(a); }

    /// True (and sets *rate) when every component is Linear with one common rate.
    bool is_semigroup(double* rate = nullptr) const {
        if (w_.front().kind() != WeightFunction::Kind::Linear) return false;
        const double r = w_.front().rate();
        for (const auto& w : w_)
            if (w.kind() != WeightFunction::Kind::Linear || w.rate() != r) return false;
        if (rate) *rate = r;
        return true;
    }

private:
    int dim_;
    RealVector x_;
    std::vector<WeightFunction> w_;
};

/// Decoherence rates gamma_a(t) of the time-local generator together with the
/// auxiliary vector mu_a(t); gamma_a = (1/d) sum_b mu_b - mu_a.
struct RateVector {
    double t = 0.0;
    RealVector gamma;
    RealVector mu;
};

namespace detail {
inline void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw Error(Errc::NegativeTime, "t = " + std::to_string(t));
}

inline RealVector gamma_from_mu(const RealVector& mu, int d) {
    return RealVector::Constant(mu.size(), mu.sum() / d) - mu;
}
} // namespace detail

/// Eigenvalues of Lambda(t) on the U_a^k sectors:
///   lambda_a = x_a + sum_{b != a} x_b exp(-w_b(t)).
inline RealVector channel_eigenvalues(const MixtureSpec& spec, double t) {
    detail::check_time(t);
    const int d = spec.dim();
    RealVector decay(d + 1);
    for (int b = 0; b <= d; ++b) decay(b) = spec.x()(b) * std::exp(-spec.weight(b).value(t));
    const double total = decay.sum();
    RealVector lambda(d + 1);
    for (int a = 0; a <= d; ++a) lambda(a) = spec.x()(a) + (total - decay(a));
    return lambda;
}

inline ChannelState channel_at(const MixtureSpec& spec, double t) {
    return ChannelState::from_eigenvalues(spec.dim(), channel_eigenvalues(spec, t));
}

/// mu_a = sum_{b != a} x_b w'_b e^{-w_b} / (x_a + sum_{b != a} x_b e^{-w_b}).
///
/// When x_a = 0 numerator and denominator are rescaled by e^{w_min} so that
/// large weights do not underflow the ratio to 0/0.
inline RealVector mu_vector(const MixtureSpec& spec, double t) {
    detail::check_time(t);
    const int d = spec.dim();
    const RealVector& x = spec.x();
    RealVector w(d + 1), dw(d + 1);
    for (int b = 0; b <= d; ++b) {
        w(b) = spec.weight(b).value(t);
        dw(b) = spec.weight(b).derivative(t);
    }

    RealVector mu(d + 1);
    for (int a = 0; a <= d; ++a) {
        double shift = 0.0;
        if (x(a) == 0.0) {
            shift = std::numeric_limits<double>::infinity();
            for (int b = 0; b <= d; ++b)
                if (b != a && x(b) > 0.0) shift = std::min(shift, w(b));
            if (!std::isfinite(shift)) shift = 0.0;
        }
        double num = 0.0;
        double den = (x(a) == 0.0) ? 0.0 : x(a);
        for (int b = 0; b <= d; ++b) {
            if (b == a || x(b) == 0.0) continue;
            const double e = std::exp(shift - w(b));
            num += x(b) * dw(b) * e;
            den += x(b) * e;
        }
        if (!(den >= 1e-300) || !std::isfinite(den) || !std::isfinite(num))
            throw Error(Errc::DegenerateDenominator,
                        "mu_" + std::to_string(a + 1) + " at t = " + std::to_string(t));
        mu(a) = num / den;
    }
    return mu;
}

inline RateVector rates_at(const MixtureSpec& spec, double t) {
    RealVector mu = mu_vector(spec, t);
    RealVector gamma = detail::gamma_from_mu(mu, spec.dim());
    return RateVector{t, std::move(gamma), std::move(mu)};
}

/// Closed form for the convex combination of semigroups with common rate r:
///   mu_a = r (1 - x_a) / (1 + (e^{rt} - 1) x_a).
inline RateVector rates_semigroup(const RealVector& x, double r, double t) {
    detail::check_time(t);
    const int d = static_cast<int>(x.size()) - 1;
    if (d < 2) throw Error(Errc::DimensionTooSmall, "need at least 3 mixing weights");
    if (std::abs(x.sum() - 1.0) > kExactTol || x.minCoeff() < 0.0)
        throw Error(Errc::NotNormalized, "mixing weights must lie on the simplex");
    if (!(r > 0.0)) throw Error(Errc::InvalidArgument, "rate r must be > 0");
    const double growth = std::expm1(r * t);
    RealVector mu(d + 1);
    for (int a = 0; a <= d; ++a) mu(a) = (x(a) == 0.0) ? r : r * (1.0 - x(a)) / (1.0 + growth * x(a));
    RealVector gamma = detail::gamma_from_mu(mu, d);
    return RateVector{t, std::move(gamma), std::move(mu)};
}

/// Uniform mixture x_a = 1/(d+1) with one shared weight w; at a time where
/// w is decreasing every rate gamma_a = w'/(d + e^w) is negative while the
/// channel stays CPTP.
inline MixtureSpec uniform_mixture(int d, const WeightFunction& w) {
    return MixtureSpec(d, RealVector::Constant(d + 1, 1.0 / (d + 1)), std::vector<WeightFunction>(d + 1, w));
}

inline RateVector all_negative_witness(int d, const WeightFunction& w, double t_star) {
    detail::check_time(t_star);
    if (!(w.derivative(t_star) < 0.0))
        throw Error(Errc::PreconditionUnmet, "need w'(t*) < 0, got " + std::to_string(w.derivative(t_star)));
    if (!(w.value(t_star) > 0.0))
        throw Error(Errc::PreconditionUnmet, "need w(t*) > 0, got " + std::to_string(w.value(t_star)));
    return rates_at(uniform_mixture(d, w), t_star);
}

} // namespace gpc
