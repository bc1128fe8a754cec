#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "gpc/channel.hpp"
#include "gpc/errors.hpp"
#include "gpc/linalg.hpp"
#include "gpc/mixture.hpp"
#include "gpc/mub.hpp"

namespace gpc::oracle {

// Dense superoperators act on column-stacked matrices: vec(X)[i + j d] = X(i, j),
// so vec(A X B) = (B^T (x) A) vec(X).

struct Superoperator {
    int dim = 0;
    Matrix matrix;
};

inline CVector vec(const Matrix& x) { return Eigen::Map<const CVector>(x.data(), x.size()); }

inline Matrix unvec(const CVector& v, int d) { return Eigen::Map<const Matrix>(v.data(), d, d); }

inline Matrix apply(const Superoperator& s, const Matrix& x) { return unvec(s.matrix * vec(x), s.dim); }

/// Phi_alpha as a d^2 x d^2 matrix, sum_k P_k^T (x) P_k.
inline Matrix pinching_superop(const MubSet& m, int alpha) {
    const int d = m.dim();
    Matrix s = Matrix::Zero(d * d, d * d);
    for (int k = 0; k < d; ++k) {
        const Matrix& p = m.projector(alpha, k);
        s += Eigen::kroneckerProduct(p.transpose(), p).eval();
    }
    return s;
}

/// Precomputed pinching superoperators for one MUB set.
class PinchingTable {
public:
    explicit PinchingTable(const MubSet& m) : dim_(m.dim()) {
        for (int a = 0; a <= dim_; ++a) phi_.push_back(pinching_superop(m, a));
    }
    int dim() const noexcept { return dim_; }
    const Matrix& phi(int alpha) const { return phi_.at(alpha); }

private:
    int dim_;
    std::vector<Matrix> phi_;
};

inline Superoperator superop_from_channel(const ChannelState& ch, const PinchingTable& table) {
    const int d = ch.dim();
    if (table.dim() != d) throw Error(Errc::DimensionMismatch, "channel and MUB set dimensions differ");
    const double dd = d;
    const RealVector& p = ch.probs();
    Matrix s = ((dd * p(0) - 1.0) / (dd - 1.0)) * Matrix::Identity(d * d, d * d);
    for (int a = 0; a <= d; ++a) s += (dd / (dd - 1.0)) * p(a + 1) * table.phi(a);
    return Superoperator{d, std::move(s)};
}

inline Superoperator superop_from_channel(const ChannelState& ch, const MubSet& m) {
    return superop_from_channel(ch, PinchingTable(m));
}

/// Time-local generator sum_a gamma_a (Phi_a - id).
inline Superoperator generator_superop(const RealVector& gamma, const PinchingTable& table) {
    const int d = table.dim();
    Matrix l = -gamma.sum() * Matrix::Identity(d * d, d * d);
    for (int a = 0; a <= d; ++a) l += gamma(a) * table.phi(a);
    return Superoperator{d, std::move(l)};
}

/// Reshuffle to the Choi matrix: C(i d + a, j d + b) = S(a + b d, i + j d) / d.
inline Matrix choi_from_superop(const Superoperator& s) {
    const int d = s.dim;
    Matrix c(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) c(i * d + a, j * d + b) = s.matrix(a + b * d, i + j * d) / double(d);
    return c;
}

inline double min_choi_eigenvalue(const ChannelState& ch, const PinchingTable& table) {
    return hermitian_eigenvalues(choi_from_superop(superop_from_channel(ch, table))).minCoeff();
}

/// RK4 integration of dLambda/dt = L(t) Lambda from Lambda(0) = id with the
/// rates of `spec`; returns the largest entrywise deviation from the
/// closed-form channel over the step grid.
inline double reintegrate(const MixtureSpec& spec, double t_max, int steps) {
    if (steps < 1000) throw Error(Errc::InvalidArgument, "reintegration needs >= 1000 steps");
    if (!(t_max > 0.0)) throw Error(Errc::InvalidArgument, "t_max must be > 0");
    const int d = spec.dim();
    const PinchingTable table(build_mubs(d));
    const double h = t_max / steps;
    auto gen = [&](double t) { return generator_superop(rates_at(spec, t).gamma, table).matrix; };

    Matrix lambda = Matrix::Identity(d * d, d * d);
    double worst = 0.0;
    for (int s = 0; s < steps; ++s) {
        const double t = s * h;
        const Matrix l0 = gen(t), lh = gen(t + 0.5 * h), l1 = gen(t + h);
        const Matrix k1 = l0 * lambda;
        const Matrix k2 = lh * (lambda + 0.5 * h * k1);
        const Matrix k3 = lh * (lambda + 0.5 * h * k2);
        const Matrix k4 = l1 * (lambda + h * k3);
        lambda += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const Matrix exact = superop_from_channel(channel_at(spec, t + h), table).matrix;
        worst = std::max(worst, (lambda - exact).cwiseAbs().maxCoeff());
    }
    return worst;
}

/// Gamma_a(t) = int_0^t gamma_a by adaptive Gauss-Kronrod quadrature.
inline RealVector integrated_rates(const MixtureSpec& spec, double t) {
    const int d = spec.dim();
    RealVector big_gamma(d + 1);
    for (int a = 0; a <= d; ++a) {
        auto f = [&](double s) { return rates_at(spec, s).gamma(a); };
        double err = 0.0;
        big_gamma(a) = t == 0.0 ? 0.0
                                : boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, t, 20, 1e-13,
                                                                                               &err);
    }
    return big_gamma;
}

/// lambda_a = exp(Gamma_a - sum_b Gamma_b), from integrated rates.
inline RealVector integrated_eigenvalues(const MixtureSpec& spec, double t) {
    const RealVector g = integrated_rates(spec, t);
    return (g.array() - g.sum()).exp().matrix();
}

inline Matrix random_density_matrix(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = cplx(n(rng), n(rng));
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return 0.5 * (rho + rho.adjoint());
}

/// Largest central-difference derivative of ||Lambda(t)(rho1 - rho2)||_1 over
/// random state pairs, h = 1e-4 t_max. Grid times closer than h to zero use
/// a forward difference.
inline double blp_monotonicity_check(const MixtureSpec& spec, int trials, const std::vector<double>& t_grid,
                                     std::uint64_t seed) {
    if (t_grid.empty()) throw Error(Errc::EmptyGrid, "BLP grid is empty");
    const int d = spec.dim();
    const MubSet m = build_mubs(d);
    const double h = 1e-4 * t_grid.back();
    std::vector<ChannelState> lo, hi;
    std::vector<double> width;
    for (const double t : t_grid) {
        const double a = std::max(0.0, t - h);
        lo.push_back(channel_at(spec, a));
        hi.push_back(channel_at(spec, t + h));
        width.push_back(t + h - a);
    }
    std::mt19937_64 rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
        const Matrix diff = random_density_matrix(d, rng) - random_density_matrix(d, rng);
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            const double up = trace_norm(apply_map(hi[i], diff, m));
            const double down = trace_norm(apply_map(lo[i], diff, m));
            worst = std::max(worst, (up - down) / width[i]);
        }
    }
    return worst;
}

/// Smallest Choi eigenvalue of the propagator V(t, s) over all pairs s < t
/// drawn from `grid`.
inline double min_propagator_choi(const MixtureSpec& spec, const std::vector<double>& grid) {
    const int d = spec.dim();
    const PinchingTable table(build_mubs(d));
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i + 1; j < grid.size(); ++j) {
            const RealVector lam = channel_eigenvalues(spec, grid[j]).cwiseQuotient(channel_eigenvalues(spec, grid[i]));
            worst = std::min(worst, min_choi_eigenvalue(ChannelState::from_eigenvalues(d, lam), table));
        }
    return worst;
}

} // namespace gpc::oracle
