#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gpc/classical.hpp"
#include "gpc/divisibility.hpp"
#include "gpc/fixtures.hpp"

using namespace gpc;
using Catch::Matchers::WithinAbs;

namespace {

RealVector random_simplex(int n, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    RealVector x(n);
    for (int i = 0; i < n; ++i) x(i) = e(rng);
    return x / x.sum();
}

RealVector closed_form(const RealVector& x, double r, double t) {
    const int d = static_cast<int>(x.size()) - 1;
    const double e = std::exp(-r * t);
    RealVector p(d + 2);
    p(0) = (1.0 + (d - 1) * e) / d;
    p.tail(d + 1) = ((d - 1.0) * (1.0 - e) / d) * x;
    return p;
}

RealVector start(int d) {
    RealVector p = RealVector::Zero(d + 2);
    p(0) = 1.0;
    return p;
}

double worst_vs_closed_form(const ProbabilityTrajectory& traj, const RealVector& x, double r) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.t.size(); ++i)
        worst = std::max(worst, (traj.p[i] - closed_form(x, r, traj.t[i])).cwiseAbs().maxCoeff());
    return worst;
}

double min_offdiagonal(const RealMatrix& g) {
    double m = 1e300;
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j)
            if (i != j) m = std::min(m, g(i, j));
    return m;
}

RealVector vec(std::initializer_list<double> v) {
    RealVector out(v.size());
    int i = 0;
    for (double e : v) out(i++) = e;
    return out;
}

} // namespace

TEST_CASE("flavor names", "[classical]") {
    CHECK(to_string(Flavor::MarkovConstant) == "markov");
    CHECK(to_string(Flavor::MixtureTimeDep) == "mixture");
    CHECK(to_string(Flavor::RateTimeDep) == "ratedep");
}

TEST_CASE("Markov generator: displayed d = 3 and d = 2 matrices", "[classical]") {
    const RealVector x = vec({0.1, 0.2, 0.3, 0.4});
    RealMatrix expected(5, 5);
    expected << -2, 1, 1, 1, 1,
                2 * x(0), -1, 0, 0, 0,
                2 * x(1), 0, -1, 0, 0,
                2 * x(2), 0, 0, -1, 0,
                2 * x(3), 0, 0, 0, -1;
    const ClassicalGenerator g = markov_generator(x, 3);
    CHECK(g.is_constant());
    CHECK(g.states() == 5);
    CHECK(g.flavor() == Flavor::MarkovConstant);
    CHECK((g.at(0.0) - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.at(0.0).colwise().sum().cwiseAbs().maxCoeff() < 1e-15);
    CHECK(min_offdiagonal(g.at(0.0)) >= 0.0);

    const RealVector x2 = vec({0.2, 0.3, 0.5});
    RealMatrix expected2(4, 4);
    expected2 << -1, 1, 1, 1,
                 x2(0), -1, 0, 0,
                 x2(1), 0, -1, 0,
                 x2(2), 0, 0, -1;
    CHECK((markov_generator(x2, 2).at(0.0) - expected2).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((markov_generator(x2, 2, 5.0).at(0.0) - 2.5 * expected2).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(markov_generator(vec({0.5, 0.6, 0.0}), 2), Error);
    CHECK_THROWS_AS(markov_generator(x2, 3), Error);
}

TEST_CASE("Markov flow reproduces the closed-form probabilities", "[classical]") {
    std::mt19937_64 rng(4);
    for (int d : {2, 3, 5}) {
        for (double r : {1.0, double(d), 4.5}) {
            const RealVector x = random_simplex(d + 1, rng);
            const auto grid = linear_grid(0.0, 5.0 / r, 51);
            const ProbabilityTrajectory traj = integrate(markov_generator(x, d, r), start(d), grid);
            INFO("d = " << d << ", r = " << r);
            CHECK(worst_vs_closed_form(traj, x, r) < 1e-8);
            for (const auto& p : traj.p) {
                CHECK_THAT(p.sum(), WithinAbs(1.0, 1e-10));
                CHECK(p.minCoeff() >= -1e-10);
            }
        }
    }
}

TEST_CASE("Markov flow keeps random initial distributions nonnegative", "[classical][property]") {
    std::mt19937_64 rng(10);
    const RealVector x = random_simplex(4, rng);
    const ClassicalGenerator g = markov_generator(x, 3, 2.0);
    const auto grid = linear_grid(0.0, 4.0, 21);
    for (int trial = 0; trial < 100; ++trial) {
        const ProbabilityTrajectory traj = integrate(g, random_simplex(5, rng), grid);
        for (const auto& p : traj.p) {
            CHECK(p.minCoeff() >= -1e-10);
            CHECK_THAT(p.sum(), WithinAbs(1.0, 1e-10));
        }
    }
}

TEST_CASE("stationary distribution of the Markov generator", "[classical]") {
    std::mt19937_64 rng(6);
    for (int d : {2, 3, 5}) {
        const RealVector x = random_simplex(d + 1, rng);
        const RealMatrix g = markov_generator(x, d).at(0.0);
        Eigen::FullPivLU<RealMatrix> lu(g);
        REQUIRE(lu.dimensionOfKernel() == 1);
        RealVector k = lu.kernel().col(0);
        k /= k.sum();
        CHECK_THAT(k(0), WithinAbs(1.0 / d, 1e-12));
        for (int a = 0; a <= d; ++a) CHECK_THAT(k(a + 1), WithinAbs((d - 1.0) * x(a) / d, 1e-12));
        RealVector expected(d + 2);
        expected(0) = 1.0 / d;
        expected.tail(d + 1) = ((d - 1.0) / d) * x;
        CHECK((g * expected).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("RK4 agrees with the matrix exponential for constant generators", "[classical]") {
    const RealVector x = vec({0.15, 0.25, 0.35, 0.25});
    const ClassicalGenerator g = markov_generator(x, 3, 2.2);
    const RealVector p0 = vec({0.3, 0.1, 0.2, 0.2, 0.2});
    const ProbabilityTrajectory traj = integrate(g, p0, {0.5, 1.0});
    CHECK((traj.p.back() - propagate_exact(g, p0, 1.0)).cwiseAbs().maxCoeff() < 1e-9);

    Eigen::EigenSolver<RealMatrix> es(g.at(0.0));
    const Eigen::MatrixXcd v = es.eigenvectors();
    const Eigen::VectorXcd lam = es.eigenvalues();
    const Eigen::VectorXcd evolved = v * (lam.array().exp().matrix().asDiagonal() * v.partialPivLu().solve(p0.cast<cplx>()));
    CHECK((traj.p.back().cast<cplx>() - evolved).cwiseAbs().maxCoeff() < 1e-9);
    CHECK_THROWS_AS(propagate_exact(mixture_generator(example1(3, 1.0).spec), p0, 1.0), Error);
}

TEST_CASE("zero generator keeps the distribution constant", "[classical]") {
    const ClassicalGenerator zero(3, Flavor::MarkovConstant, RealMatrix(RealMatrix::Zero(5, 5)));
    const RealVector p0 = vec({0.2, 0.2, 0.2, 0.2, 0.2});
    for (const auto& p : integrate(zero, p0, linear_grid(0.0, 3.0, 7)).p) CHECK(p == p0);
}

TEST_CASE("integrate validates its input", "[classical]") {
    const ClassicalGenerator g = markov_generator(vec({0.25, 0.25, 0.25, 0.25}), 3);
    CHECK_THROWS_AS(integrate(g, vec({0.5, 0.5, 0.5, 0.0, 0.0}), {1.0}), Error);
    CHECK_THROWS_AS(integrate(g, vec({1.0, 0.0, 0.0, 0.0}), {1.0}), Error);
    CHECK_THROWS_AS(integrate(g, start(3), {}), Error);
    CHECK_THROWS_AS(integrate(g, start(3), {1.0, 0.5}), Error);
    CHECK_THROWS_AS(integrate(g, start(3), {-1.0}), Error);
}

TEST_CASE("mixture generator: general entries and the qubit display", "[classical]") {
    const RealVector x = vec({0.2, 0.3, 0.5});
    const RealVector rates = vec({1.0, 2.0, 3.0});
    std::vector<WeightFunction> w;
    for (int a = 0; a < 3; ++a) w.push_back(WeightFunction::linear(rates(a)));
    const MixtureSpec spec(2, x, w);
    const double big_w = x.dot(rates);
    RealMatrix expected(4, 4);
    expected << -big_w, 2 * rates(0) - big_w, 2 * rates(1) - big_w, 2 * rates(2) - big_w,
                rates(0) * x(0), -(2 - x(0)) * rates(0), rates(0) * x(0), rates(0) * x(0),
                rates(1) * x(1), rates(1) * x(1), -(2 - x(1)) * rates(1), rates(1) * x(1),
                rates(2) * x(2), rates(2) * x(2), rates(2) * x(2), -(2 - x(2)) * rates(2);
    const RealMatrix g = mixture_generator_matrix(spec, 0.4);
    CHECK((g - expected / 2.0).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(g.colwise().sum().cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("mixture generator flow matches the channel probabilities", "[classical]") {
    const RealVector x = vec({0.2, 0.3, 0.1, 0.4});
    std::vector<WeightFunction> w{WeightFunction::linear(1.0), WeightFunction::linear(2.0),
                                  WeightFunction::analytic("t + sin t", [](double t) { return t + std::sin(t); },
                                                           [](double t) { return 1.0 + std::cos(t); }),
                                  WeightFunction::linear(0.7)};
    const MixtureSpec spec(3, x, w);
    const auto grid = linear_grid(0.0, 5.0, 11);
    const ProbabilityTrajectory traj = integrate(mixture_generator(spec), start(3), grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, (traj.p[i] - channel_at(spec, grid[i]).probs()).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-8);
}

TEST_CASE("mixture generator with a shared weight and d = 3", "[classical]") {
    const RealVector x = vec({0.1, 0.2, 0.3, 0.4});
    const double r = 1.7;
    const MixtureSpec spec = MixtureSpec::semigroup(x, r);
    const RealMatrix full = mixture_generator_matrix(spec, 0.3);
    // (w'/3) times the displayed 5x5 pattern, but with first column 2 x_k; the
    // printed first column x_k has column sum -1 and cannot conserve probability.
    RealMatrix reduced(5, 5);
    reduced << -2, 1, 1, 1, 1,
               2 * x(0), -1, 0, 0, 0,
               2 * x(1), 0, -1, 0, 0,
               2 * x(2), 0, 0, -1, 0,
               2 * x(3), 0, 0, 0, -1;
    reduced *= r / 3.0;
    RealMatrix printed = reduced;
    printed.col(0).tail(4) = (r / 3.0) * x;
    CHECK(std::abs(printed.col(0).sum()) > 0.1);
    CHECK(reduced.colwise().sum().cwiseAbs().maxCoeff() < 1e-15);

    // first row agrees literally; the full and reduced forms agree on the simplex flow
    CHECK((full.row(0) - reduced.row(0)).cwiseAbs().maxCoeff() < 1e-15);
    const auto grid = linear_grid(0.0, 4.0, 9);
    const ClassicalGenerator reduced_gen(3, Flavor::MixtureTimeDep, reduced);
    const ProbabilityTrajectory a = integrate(mixture_generator(spec), start(3), grid);
    const ProbabilityTrajectory b = integrate(reduced_gen, start(3), grid);
    CHECK(worst_vs_closed_form(a, x, r) < 1e-8);
    CHECK(worst_vs_closed_form(b, x, r) < 1e-8);
    const ProbabilityTrajectory c = integrate(ClassicalGenerator(3, Flavor::MixtureTimeDep, printed), start(3), grid);
    CHECK(std::abs(c.p.back().sum() - 1.0) > 1e-3);
}

TEST_CASE("mixture generator rejects decreasing weights", "[classical]") {
    const ClassicalGenerator g = mixture_generator(all_negative_witness_fixture().spec);
    CHECK_NOTHROW(g.at(1.0));
    try {
        g.at(2.0);
        FAIL("expected NegativeWeightDerivative");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NegativeWeightDerivative);
    }
}

TEST_CASE("rate-dependent generator: d = 3 display equals the general formula", "[classical]") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 50; ++trial) {
        const RealVector gamma = vec({n(rng), n(rng), n(rng), n(rng)});
        CHECK((ratedep_matrix(gamma, 3) - ratedep_matrix_d3(gamma)).cwiseAbs().maxCoeff() < 1e-14);
        CHECK(ratedep_matrix(gamma, 3).colwise().sum().cwiseAbs().maxCoeff() < 1e-14);
    }
    CHECK_THROWS_AS(ratedep_matrix_d3(vec({1, 2, 3})), Error);
}

TEST_CASE("rate-dependent generator reproduces the closed form", "[classical]") {
    std::mt19937_64 rng(33);
    for (int d : {2, 3, 5}) {
        for (int trial = 0; trial < 3; ++trial) {
            const RealVector x = random_simplex(d + 1, rng);
            const double r = 0.5 + trial;
            const ProbabilityTrajectory traj =
                integrate(ratedep_generator(MixtureSpec::semigroup(x, r)), start(d), linear_grid(0.0, 5.0 / r, 21));
            INFO("d = " << d);
            CHECK(worst_vs_closed_form(traj, x, r) < 1e-8);
        }
    }
    const Fixture f = example2(3, 3.0);
    const ProbabilityTrajectory traj = integrate(ratedep_generator(f.spec), start(3), linear_grid(0.0, 5.0 / 3.0, 21));
    CHECK(worst_vs_closed_form(traj, f.spec.x(), 3.0) < 1e-8);
}

TEST_CASE("rate-dependent generator has negative transition rates for Example 2", "[classical]") {
    const MixtureSpec spec = example2(3, 3.0).spec;
    const ClassicalGenerator g = ratedep_generator(spec);
    for (double t : {0.1, 0.5, 1.0, 3.0}) CHECK(min_offdiagonal(g.at(t)) < 0.0);
    // a single time slice built from a RateVector
    const ClassicalGenerator slice = ratedep_generator(rates_at(spec, 0.5), 3);
    CHECK(slice.is_constant());
    CHECK((slice.at(0.0) - g.at(0.5)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rate-dependent generator signs for Example 1", "[classical]") {
    // gamma_a = r / (d + e^{rt}) > 0, yet gamma_0 - gamma_a - gamma_b = (d - 1) gamma > 0
    // keeps every transition rate nonnegative for d >= 2
    const MixtureSpec spec = example1(3, 3.0).spec;
    const ClassicalGenerator g = ratedep_generator(spec);
    for (double t : linear_grid(0.0, 3.0, 13)) CHECK(min_offdiagonal(g.at(t)) >= 0.0);
}

TEST_CASE("the three flavours agree for semigroup mixtures", "[classical]") {
    std::mt19937_64 rng(44);
    for (int d : {2, 3}) {
        const RealVector x = random_simplex(d + 1, rng);
        const double r = 2.0;
        const MixtureSpec spec = MixtureSpec::semigroup(x, r);
        const auto grid = linear_grid(0.0, 2.5, 11);
        const auto a = integrate(markov_generator(x, d, r), start(d), grid);
        const auto b = integrate(mixture_generator(spec), start(d), grid);
        const auto c = integrate(ratedep_generator(spec), start(d), grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK((a.p[i] - b.p[i]).cwiseAbs().maxCoeff() < 1e-8);
            CHECK((a.p[i] - c.p[i]).cwiseAbs().maxCoeff() < 1e-8);
        }
        CHECK(a.flavor == Flavor::MarkovConstant);
        CHECK(b.flavor == Flavor::MixtureTimeDep);
        CHECK(c.flavor == Flavor::RateTimeDep);
    }
}
