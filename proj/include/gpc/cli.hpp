#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpc/classical.hpp"
#include "gpc/csv.hpp"
#include "gpc/divisibility.hpp"
#include "gpc/errors.hpp"
#include "gpc/fixtures.hpp"
#include "gpc/mixture.hpp"
#include "gpc/mub.hpp"
#include "gpc/verify.hpp"

namespace gpc::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kOracleFailure = 2 };

struct RunConfig {
    std::string subcommand;
    int d = 3;
    std::optional<double> r;
    std::string x;                  // comma list, entries may be fractions "1/3"
    std::vector<std::string> weights; // one shared spec or d+1 specs
    std::string t;                  // start:stop:points[:lin|log]
    std::string output;             // empty = stdout
    std::string format;              // csv | json; empty picks the subcommand default
    std::uint64_t seed = 12345;
    std::string fixture;
    int k = 1;
    int grid = 51;
    std::string mode = "cp";        // cp | p_sufficient | p_necessary
    std::string flavor = "markov";  // markov | mixture | ratedep
    std::string from_file;
    bool members_only = false;
    int threads = 1;
};

inline double parse_number(const std::string& token, const std::string& field) {
    try {
        std::size_t used = 0;
        const auto slash = token.find('/');
        if (slash != std::string::npos) {
            const double num = std::stod(token.substr(0, slash));
            const std::string den_s = token.substr(slash + 1);
            const double den = std::stod(den_s, &used);
            if (used != den_s.size() || den == 0.0) throw std::invalid_argument(token);
            return num / den;
        }
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::logic_error&) {
        throw Error(Errc::InvalidArgument, field + ": cannot parse '" + token + "' as a number");
    }
}

inline RealVector parse_x(const std::string& s) {
    const auto parts = csv::split(s, ',');
    if (parts.empty()) throw Error(Errc::InvalidArgument, "--x: empty list");
    RealVector x(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) x(i) = parse_number(parts[i], "--x");
    return x;
}

/// "linear:r", "pwl:t0,w0;t1,w1;..." or "sin2".
inline WeightFunction parse_weight(const std::string& s) {
    if (s == "sin2") return sin_squared_weight();
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw Error(Errc::InvalidArgument, "--w: expected kind:params, got '" + s + "'");
    const std::string kind = s.substr(0, colon), body = s.substr(colon + 1);
    if (kind == "linear") return WeightFunction::linear(parse_number(body, "--w linear"));
    if (kind == "pwl") {
        std::vector<std::pair<double, double>> knots;
        for (const auto& knot : csv::split(body, ';')) {
            const auto tw = csv::split(knot, ',');
            if (tw.size() != 2) throw Error(Errc::InvalidArgument, "--w pwl: knot '" + knot + "' is not t,w");
            knots.emplace_back(parse_number(tw[0], "--w pwl"), parse_number(tw[1], "--w pwl"));
        }
        return WeightFunction::piecewise_linear(std::move(knots));
    }
    throw Error(Errc::InvalidArgument, "--w: unknown weight kind '" + kind + "'");
}

inline std::vector<double> parse_t_grid(const std::string& s) {
    const auto parts = csv::split(s, ':');
    if (parts.size() != 3 && parts.size() != 4)
        throw Error(Errc::InvalidArgument, "--t: expected start:stop:points[:lin|log], got '" + s + "'");
    const double start = parse_number(parts[0], "--t start"), stop = parse_number(parts[1], "--t stop");
    const double points = parse_number(parts[2], "--t points");
    if (points < 1 || points != static_cast<int>(points))
        throw Error(Errc::InvalidArgument, "--t: points must be a positive integer");
    if (!(stop >= start)) throw Error(Errc::InvalidArgument, "--t: stop must be >= start");
    const std::string spacing = parts.size() == 4 ? parts[3] : "lin";
    if (spacing == "lin") return linear_grid(start, stop, static_cast<int>(points));
    if (spacing == "log") return log_grid(start, stop, static_cast<int>(points));
    throw Error(Errc::InvalidArgument, "--t: spacing must be lin or log");
}

struct Problem {
    MixtureSpec spec;
    std::string label;
    double time_unit = 1.0;
};

inline double rate_of(const RunConfig& c) { return c.r.value_or(static_cast<double>(c.d)); }

inline Problem build_problem(const RunConfig& c) {
    if (!c.fixture.empty()) {
        Fixture f = make_fixture(c.fixture, c.d, rate_of(c), c.k);
        return Problem{f.spec, f.name, f.time_unit};
    }
    if (c.x.empty()) throw Error(Errc::InvalidArgument, "either --fixture or --x is required");
    const RealVector x = parse_x(c.x);
    const int d = static_cast<int>(x.size()) - 1;
    if (d != c.d)
        throw Error(Errc::DimensionMismatch,
                    "--x has " + std::to_string(x.size()) + " entries but --d " + std::to_string(c.d) +
                        " needs " + std::to_string(c.d + 1));
    if (c.weights.empty()) return Problem{MixtureSpec::semigroup(x, rate_of(c)), "custom", 1.0 / rate_of(c)};
    std::vector<WeightFunction> w;
    if (c.weights.size() == 1) {
        w.assign(d + 1, parse_weight(c.weights.front()));
    } else if (static_cast<int>(c.weights.size()) == d + 1) {
        for (const auto& s : c.weights) w.push_back(parse_weight(s));
    } else {
        throw Error(Errc::DimensionMismatch, "--w must be given once or d+1 times");
    }
    return Problem{MixtureSpec(d, x, std::move(w)), "custom", 1.0};
}

inline std::vector<double> time_grid(const RunConfig& c, const std::vector<double>& fallback) {
    if (!c.from_file.empty()) return csv::read_file(c.from_file).column("t");
    if (!c.t.empty()) return parse_t_grid(c.t);
    return fallback;
}

inline void check_format(const RunConfig& c) {
    if (c.format != "csv" && c.format != "json")
        throw Error(Errc::InvalidArgument, "--format must be csv or json, got '" + c.format + "'");
}

inline std::string header_list(const std::string& prefix, int from, int to) {
    std::string h;
    for (int i = from; i <= to; ++i) h += "," + prefix + std::to_string(i);
    return h;
}

inline int cmd_fixtures(const RunConfig& c, std::ostream& out) {
    const double r = rate_of(c);
    std::vector<Fixture> all;
    for (const auto& name : fixture_names()) all.push_back(make_fixture(name, c.d, r, c.k));
    if (c.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& f : all) {
            std::vector<double> x(f.spec.x().data(), f.spec.x().data() + f.spec.x().size());
            arr.push_back({{"name", f.name}, {"description", f.description}, {"d", f.spec.dim()}, {"x", x}});
        }
        out << arr.dump(2) << '\n';
    } else {
        out << "name,d,x,description\n";
        for (const auto& f : all) {
            std::string xs;
            for (int a = 0; a < f.spec.x().size(); ++a) xs += (a ? ";" : "") + csv::format(f.spec.x()(a));
            out << f.name << ',' << f.spec.dim() << ',' << xs << ',' << f.description << '\n';
        }
    }
    return kOk;
}

inline int cmd_rates(const RunConfig& c, std::ostream& out) {
    const Problem p = build_problem(c);
    const int d = p.spec.dim();
    const auto grid = time_grid(c, linear_grid(0.0, 5.0 * p.time_unit, 101));
    for (const auto& w : p.spec.weights()) w.validate_on(grid);
    if (c.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const double t : grid) {
            const RateVector rv = rates_at(p.spec, t);
            arr.push_back({{"t", t},
                           {"gamma", std::vector<double>(rv.gamma.data(), rv.gamma.data() + d + 1)},
                           {"mu", std::vector<double>(rv.mu.data(), rv.mu.data() + d + 1)}});
        }
        out << arr.dump(2) << '\n';
        return kOk;
    }
    out << 't' << header_list("gamma_", 1, d + 1) << header_list("mu_", 1, d + 1) << '\n';
    for (const double t : grid) {
        const RateVector rv = rates_at(p.spec, t);
        out << csv::format(t);
        for (int a = 0; a <= d; ++a) out << ',' << csv::format(rv.gamma(a));
        for (int a = 0; a <= d; ++a) out << ',' << csv::format(rv.mu(a));
        out << '\n';
    }
    return kOk;
}

inline nlohmann::json verdict_json(const DivisibilityVerdict& v) {
    std::vector<int> idx;
    for (int a : v.eternal_negative_indices) idx.push_back(a + 1);
    return {{"cp_divisible", v.cp_divisible},
            {"p_sufficient", v.p_sufficient},
            {"p_necessary", v.p_necessary},
            {"eternal_negative_indices", idx},
            {"t_grid", {{"start", v.t_grid.front()}, {"stop", v.t_grid.back()}, {"points", v.t_grid.size()}}}};
}

inline int cmd_classify(const RunConfig& c, std::ostream& out) {
    const Problem p = build_problem(c);
    double r = 0.0;
    const bool semigroup = p.spec.is_semigroup(&r);
    const auto grid = time_grid(c, semigroup ? eternal_grid(r) : log_grid(1e-3, 1e3, 200));
    for (const auto& w : p.spec.weights()) w.validate_on(grid);
    const DivisibilityVerdict v = classify(p.spec, grid);
    nlohmann::json j = verdict_json(v);
    j["fixture"] = p.label;
    j["d"] = p.spec.dim();
    if (semigroup) {
        j["cp_region_member"] = cp_region_membership(p.spec.x(), p.spec.dim());
        j["p_region_member"] = p_region_membership(p.spec.x(), p.spec.dim());
        std::vector<int> signs = asymptotic_rate_signs(p.spec.x(), p.spec.dim());
        j["asymptotic_rate_signs"] = signs;
    }
    if (c.format == "csv") {
        out << "cp_divisible,p_sufficient,p_necessary,eternal_negative_indices\n";
        std::string idx;
        for (int a : v.eternal_negative_indices) idx += (idx.empty() ? "" : ";") + std::to_string(a + 1);
        out << v.cp_divisible << ',' << v.p_sufficient << ',' << v.p_necessary << ',' << idx << '\n';
    } else {
        out << j.dump(2) << '\n';
    }
    return kOk;
}

inline RegionMode parse_mode(const std::string& m) {
    if (m == "cp") return RegionMode::Cp;
    if (m == "p_sufficient" || m == "p_suf") return RegionMode::PSufficient;
    if (m == "p_necessary" || m == "p_nec") return RegionMode::PNecessary;
    throw Error(Errc::InvalidArgument, "--mode must be cp, p_sufficient or p_necessary");
}

/// Column order x1,x2,x3,x4,xp1,xp2,xp3,cp,p_suf,p_nec is a compatibility contract.
inline void write_region_row(std::ostream& out, const RegionPoint& pt) {
    for (int a = 0; a < 4; ++a) out << csv::format(pt.x(a)) << ',';
    for (int a = 0; a < 3; ++a) out << csv::format(pt.coords(a)) << ',';
    out << int(pt.verdict.cp_divisible) << ',' << int(pt.verdict.p_sufficient) << ','
        << int(pt.verdict.p_necessary) << '\n';
}

inline int cmd_region(const RunConfig& c, std::ostream& out) {
    const RegionMode mode = parse_mode(c.mode);
    const double r = rate_of(c);
    RegionGrid grid;
    if (!c.from_file.empty()) {
        if (c.d != 3) throw Error(Errc::UnsupportedDimension, "region scans are defined for d = 3 only");
        const csv::Table table = csv::read_file(c.from_file);
        const auto x1 = table.column("x1"), x2 = table.column("x2"), x3 = table.column("x3"), x4 = table.column("x4");
        grid = RegionGrid{3, 0, mode, {}};
        for (std::size_t i = 0; i < x1.size(); ++i) {
            RealVector x(4);
            x << x1[i], x2[i], x3[i], x4[i];
            grid.points.push_back(RegionPoint{x, classify_point(x, 3, r), simplex_coords(x)});
        }
    } else {
        grid = scan_region(c.d, c.grid, mode, r, c.threads);
    }
    out << "x1,x2,x3,x4,xp1,xp2,xp3,cp,p_suf,p_nec\n";
    for (const auto& pt : grid.points)
        if (!c.members_only || grid.in_region(pt)) write_region_row(out, pt);
    return kOk;
}

inline Flavor parse_flavor(const std::string& f) {
    if (f == "markov") return Flavor::MarkovConstant;
    if (f == "mixture") return Flavor::MixtureTimeDep;
    if (f == "ratedep") return Flavor::RateTimeDep;
    throw Error(Errc::InvalidArgument, "--flavor must be markov, mixture or ratedep");
}

inline int cmd_simulate(const RunConfig& c, std::ostream& out) {
    const Problem p = build_problem(c);
    const int d = p.spec.dim();
    const Flavor flavor = parse_flavor(c.flavor);
    const auto grid = time_grid(c, linear_grid(0.0, 5.0 * p.time_unit, 101));
    ClassicalGenerator gen = [&] {
        switch (flavor) {
        case Flavor::MarkovConstant: {
            double r = 0.0;
            if (!p.spec.is_semigroup(&r))
                throw Error(Errc::InvalidArgument, "markov flavor needs a semigroup mixture (linear weights)");
            return markov_generator(p.spec.x(), d, r);
        }
        case Flavor::MixtureTimeDep: return mixture_generator(p.spec);
        case Flavor::RateTimeDep: break;
        }
        return ratedep_generator(p.spec);
    }();
    RealVector p0 = RealVector::Zero(d + 2);
    p0(0) = 1.0;
    const ProbabilityTrajectory traj = integrate(gen, p0, grid);
    out << 't' << header_list("p_", 0, d + 1) << ",flavor\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        out << csv::format(traj.t[i]);
        for (int a = 0; a < d + 2; ++a) out << ',' << csv::format(traj.p[i](a));
        out << ',' << to_string(traj.flavor) << '\n';
    }
    return kOk;
}

inline int cmd_verify(const RunConfig& c, std::ostream& out) {
    const auto results = run_verification(c.seed);
    nlohmann::json arr = nlohmann::json::array();
    bool ok = true;
    for (const auto& r : results) {
        arr.push_back({{"check", r.check},
                       {"fixture", r.fixture},
                       {"deviation", r.deviation},
                       {"tolerance", r.tolerance},
                       {"pass", r.pass}});
        ok = ok && r.pass;
    }
    out << arr.dump(2) << '\n';
    return ok ? kOk : kOracleFailure;
}

inline int cmd_mub(const RunConfig& c, std::ostream& out) {
    const MubSet m = build_mubs(c.d);
    nlohmann::json bases = nlohmann::json::array();
    for (int a = 0; a < m.basis_count(); ++a) {
        nlohmann::json vectors = nlohmann::json::array();
        for (int k = 0; k < m.dim(); ++k) {
            nlohmann::json amps = nlohmann::json::array();
            for (int j = 0; j < m.dim(); ++j) amps.push_back({m.vector(a, k)(j).real(), m.vector(a, k)(j).imag()});
            vectors.push_back(amps);
        }
        bases.push_back(vectors);
    }
    out << nlohmann::json{{"d", m.dim()}, {"bases", bases}}.dump(2) << '\n';
    return kOk;
}

/// Runs one subcommand. Validation problems are reported on `err` with exit
/// code 1; a failing oracle check in `verify` returns 2.
inline int run(RunConfig c, std::ostream& out, std::ostream& err) {
    try {
        if (c.format.empty())
            c.format = (c.subcommand == "classify" || c.subcommand == "verify" || c.subcommand == "mub") ? "json" : "csv";
        check_format(c);
        if (c.subcommand == "fixtures") return cmd_fixtures(c, out);
        if (c.subcommand == "rates") return cmd_rates(c, out);
        if (c.subcommand == "classify") return cmd_classify(c, out);
        if (c.subcommand == "region") return cmd_region(c, out);
        if (c.subcommand == "simulate-classical") return cmd_simulate(c, out);
        if (c.subcommand == "verify") return cmd_verify(c, out);
        if (c.subcommand == "mub") return cmd_mub(c, out);
        err << "error: unknown subcommand '" << c.subcommand << "'\n";
        return kValidationError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    }
}

/// Parallelism cap from GPC_THREADS (default 1).
inline int threads_from_env() {
    const char* v = std::getenv("GPC_THREADS");
    if (!v) return 1;
    const int n = std::atoi(v);
    return n > 0 ? n : 1;
}

} // namespace gpc::cli
