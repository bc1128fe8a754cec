#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gpc/errors.hpp"
#include "gpc/mixture.hpp"

namespace gpc {

/// A named mixture with the time unit its dynamics are naturally measured in.
struct Fixture {
    std::string name;
    std::string description;
    MixtureSpec spec;
    double time_unit = 1.0;            // 1/r for semigroup mixtures
    std::optional<double> t_star;      // probe time for the all-negative witness
    std::vector<int> expected_eternal; // indices with eternally negative rates
};

/// Qubit mixture (e^{2t L_1} + e^{2t L_2}) / 2: gamma_1 = gamma_2 = 1, gamma_3 = -tanh t.
inline Fixture enm_qubit() {
    RealVector x(3);
    x << 0.5, 0.5, 0.0;
    return Fixture{"enm-qubit", "qubit mixture of two dephasing semigroups, w = 2t",
                   MixtureSpec::semigroup(x, 2.0), 1.0, std::nullopt, {2}};
}

/// x_a = 1/(d+1): gamma_a = r / (d + e^{rt}) >= 0.
inline Fixture example1(int d, double r) {
    return Fixture{"example1", "maximally mixed weights, CP-divisible",
                   MixtureSpec::semigroup(RealVector::Constant(d + 1, 1.0 / (d + 1)), r), 1.0 / r, std::nullopt, {}};
}

/// x_a = 1/d for a <= d, x_{d+1} = 0: one eternally negative rate.
inline Fixture example2(int d, double r) {
    RealVector x = RealVector::Constant(d + 1, 1.0 / d);
    x(d) = 0.0;
    return Fixture{"example2", "one eternally negative rate", MixtureSpec::semigroup(x, r), 1.0 / r, std::nullopt,
                   {d}};
}

/// x_1 = x_2 = 1/2: d-1 identical eternally negative rates.
inline Fixture example3(int d, double r) {
    RealVector x = RealVector::Zero(d + 1);
    x(0) = x(1) = 0.5;
    std::vector<int> neg;
    for (int a = 2; a <= d; ++a) neg.push_back(a);
    return Fixture{"example3", "d-1 identical eternally negative rates", MixtureSpec::semigroup(x, r), 1.0 / r,
                   std::nullopt, neg};
}

/// x_a = 0 for a <= k, 1/(d+1-k) otherwise: k eternally negative rates.
inline Fixture example4(int d, int k, double r) {
    if (k < 1 || k > d - 1) throw Error(Errc::InvalidK, "example4 needs 1 <= k <= d-1, got k = " + std::to_string(k));
    RealVector x = RealVector::Constant(d + 1, 1.0 / (d + 1 - k));
    std::vector<int> neg;
    for (int a = 0; a < k; ++a) {
        x(a) = 0.0;
        neg.push_back(a);
    }
    return Fixture{"example4", "k eternally negative rates", MixtureSpec::semigroup(x, r), 1.0 / r, std::nullopt,
                   neg};
}

inline WeightFunction sin_squared_weight() {
    return WeightFunction::analytic(
        "sin^2(t)", [](double t) { return std::sin(t) * std::sin(t); }, [](double t) { return std::sin(2.0 * t); });
}

/// Uniform mixture with w(t) = sin^2 t; at t* = 2 every rate is negative.
inline Fixture all_negative_witness_fixture(int d = 3) {
    return Fixture{"all-negative-witness", "uniform mixture, w = sin^2 t; all rates negative at t* = 2",
                   uniform_mixture(d, sin_squared_weight()), 1.0, 2.0, {}};
}

inline const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names{"enm-qubit", "example1", "example2",
                                                "example3", "example4", "all-negative-witness"};
    return names;
}

/// Builds a fixture by name; d, r and k are used where the family needs them.
inline Fixture make_fixture(const std::string& name, int d, double r, int k) {
    if (name == "enm-qubit") return enm_qubit();
    if (name == "example1") return example1(d, r);
    if (name == "example2") return example2(d, r);
    if (name == "example3") return example3(d, r);
    if (name == "example4") return example4(d, k, r);
    if (name == "all-negative-witness") return all_negative_witness_fixture(d);
    throw Error(Errc::InvalidArgument, "unknown fixture '" + name + "'");
}

} // namespace gpc
