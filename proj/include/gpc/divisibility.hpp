#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gpc/channel.hpp"
#include "gpc/errors.hpp"
#include "gpc/linalg.hpp"
#include "gpc/mixture.hpp"

namespace gpc {

// Absolute slack on rate signs; rates here are O(r).
inline constexpr double kRateTol = 1e-12;

struct DivisibilityVerdict {
    bool cp_divisible = false;
    bool p_sufficient = false;
    bool p_necessary = false;
    std::vector<int> eternal_negative_indices; // 0-based
    std::vector<double> t_grid;
};

inline std::vector<double> linear_grid(double start, double stop, int points) {
    if (points < 1) throw Error(Errc::EmptyGrid, "grid needs >= 1 point");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = points == 1 ? start : start + (stop - start) * i / (points - 1);
    return g;
}

inline std::vector<double> log_grid(double start, double stop, int points) {
    if (!(start > 0.0) || !(stop > 0.0)) throw Error(Errc::InvalidArgument, "log grid bounds must be > 0");
    std::vector<double> g = linear_grid(std::log(start), std::log(stop), points);
    for (double& t : g) t = std::exp(t);
    return g;
}

/// Log-spaced grid t in [1e-3/r, 1e3/r], 200 points, used to grid-certify
/// eternal negativity.
inline std::vector<double> eternal_grid(double r) { return log_grid(1e-3 / r, 1e3 / r, 200); }

/// Sufficient P-divisibility test at one time: with k negative rates
/// (k <= (d+1)/2) every negative/positive pair must satisfy
///   [d - 2(k-1)] gamma_pos + [d + 2(k-1)] gamma_neg >= 0.
inline bool sufficient_p_condition(const RealVector& gamma, int d, double tol = kRateTol) {
    std::vector<int> neg, pos;
    for (int a = 0; a <= d; ++a) (gamma(a) < -tol ? neg : pos).push_back(a);
    const int k = static_cast<int>(neg.size());
    if (k == 0) return true;
    if (2 * k > d + 1) return false;
    const double cpos = d - 2.0 * (k - 1), cneg = d + 2.0 * (k - 1);
    for (int a : neg)
        for (int b : pos)
            if (cpos * gamma(b) + cneg * gamma(a) < -tol) return false;
    return true;
}

namespace detail {
inline void check_chain(const DivisibilityVerdict& v) {
    if ((v.cp_divisible && !v.p_sufficient) || (v.p_sufficient && !v.p_necessary))
        throw std::logic_error("divisibility verdict chain cp => p_sufficient => p_necessary violated");
}

inline void check_simplex(const RealVector& x, int d) {
    if (x.size() != d + 1) throw Error(Errc::DimensionMismatch, "expected " + std::to_string(d + 1) + " weights");
    if (x.minCoeff() < 0.0 || std::abs(x.sum() - 1.0) > kExactTol)
        throw Error(Errc::NotNormalized, "point is not on the simplex");
}
} // namespace detail

inline DivisibilityVerdict classify(const MixtureSpec& spec, const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw Error(Errc::EmptyGrid, "classification grid is empty");
    if (!(t_grid.front() > 0.0)) throw Error(Errc::InvalidArgument, "classification grid must start at t > 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw Error(Errc::InvalidArgument, "classification grid must increase");

    const int d = spec.dim();
    DivisibilityVerdict v{true, true, true, {}, t_grid};
    std::vector<bool> always_negative(d + 1, true);
    for (const double t : t_grid) {
        const RateVector rv = rates_at(spec, t);
        if (rv.gamma.minCoeff() < -kRateTol) v.cp_divisible = false;
        if (rv.mu.minCoeff() < -kRateTol) v.p_necessary = false;
        if (!sufficient_p_condition(rv.gamma, d)) v.p_sufficient = false;
        for (int a = 0; a <= d; ++a)
            if (!(rv.gamma(a) < -kRateTol)) always_negative[a] = false;
    }
    for (int a = 0; a <= d; ++a)
        if (always_negative[a]) v.eternal_negative_indices.push_back(a);
    detail::check_chain(v);
    return v;
}

// ---------------------------------------------------------------------------
// Long-time analysis for convex combinations of semigroups.
//
// With E = e^{rt}, mu_a / r = (1 - x_a) / (1 + (E - 1) x_a) equals 1 when
// x_a = 0 and decays as (1/x_a - 1)/E otherwise. The sign of a linear
// combination sum_a c_a mu_a for t -> infinity is therefore decided first by
// the zero-weight components, then by sum_{x_a > 0} c_a (1/x_a - 1). Without
// zero weights the latter is the CP inequality divided by prod x_a.
// ---------------------------------------------------------------------------

namespace detail {
inline int asymptotic_sign(const RealVector& coeff, const RealVector& x) {
    double lead = 0.0, lead_scale = 0.0, next = 0.0, next_scale = 0.0;
    for (int a = 0; a < x.size(); ++a) {
        if (x(a) == 0.0) {
            lead += coeff(a);
            lead_scale += std::abs(coeff(a));
        } else {
            next += coeff(a) * (1.0 / x(a) - 1.0);
            next_scale += std::abs(coeff(a)) * (1.0 / x(a) + 1.0);
        }
    }
    constexpr double rel = 1e-12;
    if (std::abs(lead) > rel * std::max(1.0, lead_scale)) return lead > 0 ? 1 : -1;
    if (std::abs(next) > rel * std::max(1.0, next_scale)) return next > 0 ? 1 : -1;
    return 0;
}

inline RealVector rate_coefficients(int d, int a) {
    RealVector c = RealVector::Ones(d + 1);
    c(a) -= d;
    return c;
}
} // namespace detail

/// Sign of gamma_a(t) for t -> infinity, per index (-1, 0, +1).
inline std::vector<int> asymptotic_rate_signs(const RealVector& x, int d) {
    detail::check_simplex(x, d);
    std::vector<int> s(d + 1);
    for (int a = 0; a <= d; ++a) s[a] = detail::asymptotic_sign(detail::rate_coefficients(d, a), x);
    return s;
}

/// Left-hand side of the CP-region inequality for index a, in polynomial form
///   sum_b prod_{v != b} x_v - d prod_{v != a} x_v - prod_v x_v.
inline double cp_inequality(const RealVector& x, int d, int a) {
    auto prod_except = [&](int skip) {
        double p = 1.0;
        for (int v = 0; v <= d; ++v)
            if (v != skip) p *= x(v);
        return p;
    };
    double s = 0.0;
    for (int b = 0; b <= d; ++b) s += prod_except(b);
    return s - d * prod_except(a) - prod_except(-1);
}

/// CP-divisibility of the semigroup mixture at x (independent of r).
inline bool cp_region_membership(const RealVector& x, int d) {
    for (int s : asymptotic_rate_signs(x, d))
        if (s < 0) return false;
    return true;
}

/// Long-time form of the sufficient P-divisibility condition with k negative
/// rates; negative and positive indices come from the asymptotic sign pattern.
inline bool p_region_membership(const RealVector& x, int d, int k) {
    if (k < 1 || 2 * k > d + 1)
        throw Error(Errc::InvalidK, "k = " + std::to_string(k) + " outside [1, (d+1)/2]");
    const std::vector<int> signs = asymptotic_rate_signs(x, d);
    std::vector<int> neg, pos;
    for (int a = 0; a <= d; ++a) (signs[a] < 0 ? neg : pos).push_back(a);
    if (static_cast<int>(neg.size()) != k)
        throw Error(Errc::InvalidK, "k = " + std::to_string(k) + " but the point has " +
                                       std::to_string(neg.size()) + " asymptotically negative rates");
    const double cneg = d + 2.0 * (k - 1), cpos = d - 2.0 * (k - 1);
    for (int a : neg)
        for (int b : pos) {
            RealVector c = RealVector::Constant(d + 1, 2.0);
            c(a) -= cneg;
            c(b) -= cpos;
            if (detail::asymptotic_sign(c, x) < 0) return false;
        }
    return true;
}

/// Same test with k inferred from the point: k = 0 means CP-divisible.
inline bool p_region_membership(const RealVector& x, int d) {
    const std::vector<int> signs = asymptotic_rate_signs(x, d);
    const int k = static_cast<int>(std::count_if(signs.begin(), signs.end(), [](int s) { return s < 0; }));
    if (k == 0) return true;
    if (2 * k > d + 1) return false;
    return p_region_membership(x, d, k);
}

/// Branch (1..4) of the published d = 3 border parametrization containing
/// (x1, x2, x3); branches are tried in order and the last covers the cube.
inline int boundary_branch_d3(double x1, double x2, double x3) {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(x1) || !unit(x2) || !unit(x3))
        throw Error(Errc::OutOfBranchDomain, "(x1, x2, x3) must lie in [0, 1]^3");
    if (x2 <= x3 && x1 >= x2 * x3 / (-x2 + x3 + x2 * x3)) return 1;
    if (x1 <= x2 * x3 / (x2 + x3 - x2 * x3)) return 2;
    if (x3 <= x2 && x1 >= x2 * x3 / (x2 - x3 + x2 * x3)) return 3;
    return 4;
}

/// x4 on the published d = 3 border for the branch containing (x1, x2, x3);
/// empty when that branch's denominator is not positive.
inline std::optional<double> cp_boundary_d3(double x1, double x2, double x3) {
    const double p = x1 * x2 * x3;
    double den = 0.0;
    switch (boundary_branch_d3(x1, x2, x3)) {
    case 1: den = -x1 * x2 + x1 * x3 - x2 * x3 + 2 * p; break;
    case 2: den = -x1 * x2 - x1 * x3 + x2 * x3 + 2 * p; break;
    case 3: den = x1 * x2 - x1 * x3 - x2 * x3 + 2 * p; break;
    default: den = x1 * x2 + x1 * x3 + x2 * x3 - 2 * p; break;
    }
    if (!(den > 0.0)) return std::nullopt;
    const double x4 = p / den;
    if (!std::isfinite(x4)) return std::nullopt;
    return x4;
}

/// Orthonormal (Helmert) simplex embedding:
///   x'_a = [a x_{a+1} - sum_{b <= a} x_b] / sqrt(a (a+1)),  a = 1..d,
///   x'_{d+1} = 1/sqrt(d+1) on the simplex.
inline RealVector simplex_coords(const RealVector& x) {
    const int n = static_cast<int>(x.size());
    RealVector c(n);
    double partial = 0.0;
    for (int a = 1; a < n; ++a) {
        partial += x(a - 1);
        c(a - 1) = (a * x(a) - partial) / std::sqrt(static_cast<double>(a) * (a + 1));
    }
    c(n - 1) = x.sum() / std::sqrt(static_cast<double>(n));
    return c;
}

/// Eigenvalues of the propagator V(t, s) = Lambda(t) Lambda(s)^{-1}.
inline RealVector propagator_eigenvalues(const MixtureSpec& spec, double s, double t) {
    if (!(s >= 0.0) || !(t >= s)) throw Error(Errc::InvalidArgument, "need 0 <= s <= t");
    const RealVector ls = channel_eigenvalues(spec, s);
    if (ls.cwiseAbs().minCoeff() < 1e-14)
        throw Error(Errc::SingularIntermediateMap, "Lambda(s) is singular at s = " + std::to_string(s));
    return channel_eigenvalues(spec, t).cwiseQuotient(ls);
}

enum class RegionMode { Cp, PSufficient, PNecessary };

struct RegionPoint {
    RealVector x;
    DivisibilityVerdict verdict;
    RealVector coords;
};

struct RegionGrid {
    int dim = 3;
    int resolution = 0;
    RegionMode mode = RegionMode::Cp;
    std::vector<RegionPoint> points;

    bool in_region(const RegionPoint& p) const {
        switch (mode) {
        case RegionMode::Cp: return p.verdict.cp_divisible;
        case RegionMode::PSufficient: return p.verdict.p_sufficient;
        case RegionMode::PNecessary: return p.verdict.p_necessary;
        }
        return false;
    }
};

/// Verdict for one semigroup-mixture point: CP and sufficient-P membership
/// from the long-time analysis, necessary P condition and eternal negativity
/// on the eternal_grid(r) sample.
inline DivisibilityVerdict classify_point(const RealVector& x, int d, double r) {
    DivisibilityVerdict v;
    v.cp_divisible = cp_region_membership(x, d);
    v.p_sufficient = p_region_membership(x, d);
    v.t_grid = eternal_grid(r);
    v.p_necessary = true;
    std::vector<bool> always_negative(d + 1, true);
    for (const double t : v.t_grid) {
        const RateVector rv = rates_semigroup(x, r, t);
        if (rv.mu.minCoeff() < -kRateTol) v.p_necessary = false;
        for (int a = 0; a <= d; ++a)
            if (!(rv.gamma(a) < -kRateTol)) always_negative[a] = false;
    }
    const std::vector<int> signs = asymptotic_rate_signs(x, d);
    for (int a = 0; a <= d; ++a)
        if (always_negative[a] && signs[a] < 0) v.eternal_negative_indices.push_back(a);
    detail::check_chain(v);
    return v;
}

/// Barycentric grid over the d = 3 simplex, x4 = 1 - x1 - x2 - x3, with
/// (resolution - 1) steps per axis. Points are independent and are split
/// across `threads` workers writing disjoint slots.
inline RegionGrid scan_region(int d, int resolution, RegionMode mode, double r, int threads = 1) {
    if (d != 3) throw Error(Errc::UnsupportedDimension, "region scans are defined for d = 3 only");
    if (resolution < 11) throw Error(Errc::InvalidArgument, "resolution must be >= 11");
    if (!(r > 0.0)) throw Error(Errc::InvalidArgument, "rate r must be > 0");

    const int n = resolution - 1;
    RegionGrid grid{d, resolution, mode, {}};
    for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j)
            for (int k = 0; i + j + k <= n; ++k) {
                RealVector x(4);
                x << double(i) / n, double(j) / n, double(k) / n, double(n - i - j - k) / n;
                grid.points.push_back(RegionPoint{std::move(x), {}, {}});
            }

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            RegionPoint& pt = grid.points[p];
            pt.verdict = classify_point(pt.x, d, r);
            pt.coords = simplex_coords(pt.x);
        }
    };
    const std::size_t total = grid.points.size();
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, total);
    if (workers == 1) {
        work(0, total);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (total + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work, std::min(total, w * chunk), std::min(total, (w + 1) * chunk));
    }
    return grid;
}

} // namespace gpc
