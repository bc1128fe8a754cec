#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gpc/channel.hpp"
#include "gpc/classical.hpp"
#include "gpc/divisibility.hpp"
#include "gpc/fixtures.hpp"
#include "gpc/mixture.hpp"
#include "gpc/mub.hpp"
#include "gpc/oracle.hpp"

namespace gpc {

struct CheckResult {
    std::string check;
    std::string fixture;
    double deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

namespace detail {
inline CheckResult upper_bound_check(std::string check, std::string fixture, double deviation, double tol) {
    return CheckResult{std::move(check), std::move(fixture), deviation, tol, deviation <= tol};
}

inline std::vector<Fixture> verification_fixtures() {
    return {enm_qubit(),  example1(3, 3.0), example2(3, 3.0), example3(3, 3.0),
            example4(3, 2, 3.0), example2(2, 2.0), all_negative_witness_fixture(3)};
}

inline std::string label(const Fixture& f) {
    return f.name + "(d=" + std::to_string(f.spec.dim()) + ")";
}
} // namespace detail

/// Re-derives the closed-form results by independent routes: dense
/// superoperators, master-equation re-integration, quadrature of the rates,
/// Choi positivity, trace-distance monotonicity and classical rate equations.
inline std::vector<CheckResult> run_verification(std::uint64_t seed) {
    std::vector<CheckResult> out;
    const auto fixtures = detail::verification_fixtures();

    for (const Fixture& f : fixtures) {
        const double t_max = 5.0 * f.time_unit;
        out.push_back(detail::upper_bound_check("reintegrate", detail::label(f),
                                                oracle::reintegrate(f.spec, t_max, 5000), 1e-6));

        double quad = 0.0;
        for (const double t : linear_grid(0.1 * t_max, t_max, 5))
            quad = std::max(quad, (oracle::integrated_eigenvalues(f.spec, t) - channel_eigenvalues(f.spec, t))
                                      .cwiseAbs()
                                      .maxCoeff());
        out.push_back(detail::upper_bound_check("integrated-eigenvalues", detail::label(f), quad, 1e-8));

        const oracle::PinchingTable table(build_mubs(f.spec.dim()));
        double choi = 0.0, pneg = 0.0;
        for (const double t : linear_grid(0.0, t_max, 51)) {
            const ChannelState ch = channel_at(f.spec, t);
            choi = std::max(choi, -oracle::min_choi_eigenvalue(ch, table));
            pneg = std::max(pneg, -ch.probs().minCoeff());
        }
        out.push_back(detail::upper_bound_check("choi-psd", detail::label(f), std::max(choi, 0.0), 1e-10));
        out.push_back(detail::upper_bound_check("probabilities-nonnegative", detail::label(f), std::max(pneg, 0.0),
                                                1e-12));

        double r = 0.0;
        if (f.spec.is_semigroup(&r)) {
            double dev = 0.0;
            for (const double t : log_grid(1e-3 / r, 1e2 / r, 60))
                dev = std::max(dev, (rates_at(f.spec, t).gamma - rates_semigroup(f.spec.x(), r, t).gamma)
                                        .cwiseAbs()
                                        .maxCoeff());
            out.push_back(detail::upper_bound_check("rates-closed-form", detail::label(f), dev, 1e-12));

            const int d = f.spec.dim();
            RealVector p0 = RealVector::Zero(d + 2);
            p0(0) = 1.0;
            const auto grid = linear_grid(0.0, t_max, 51);
            double flow = 0.0;
            for (const auto& gen : {markov_generator(f.spec.x(), d, r), mixture_generator(f.spec),
                                    ratedep_generator(f.spec)}) {
                const auto traj = integrate(gen, p0, grid);
                for (std::size_t i = 0; i < grid.size(); ++i)
                    flow = std::max(flow, (traj.p[i] - channel_at(f.spec, grid[i]).probs()).cwiseAbs().maxCoeff());
            }
            out.push_back(detail::upper_bound_check("classical-flow", detail::label(f), flow, 1e-8));
        }
    }

    {
        const Fixture f = enm_qubit();
        const double worst = oracle::blp_monotonicity_check(f.spec, 200, linear_grid(0.05, 5.0, 100), seed);
        out.push_back(detail::upper_bound_check("blp-monotonicity", detail::label(f), std::max(worst, 0.0), 1e-8));
    }

    {
        std::mt19937_64 rng(seed);
        std::gamma_distribution<double> g(1.0, 1.0);
        const double r = 3.0;
        int mismatches = 0;
        for (int i = 0; i < 200; ++i) {
            RealVector x(4);
            for (int a = 0; a < 4; ++a) x(a) = g(rng);
            x /= x.sum();
            x(3) = 1.0 - x(0) - x(1) - x(2);
            const bool member = cp_region_membership(x, 3);
            const bool late = rates_semigroup(x, r, 50.0 / r).gamma.minCoeff() >= 0.0;
            mismatches += member != late;
        }
        out.push_back(detail::upper_bound_check("cp-region-large-t", "random d=3 points", mismatches, 0.0));
    }
    return out;
}

} // namespace gpc
