#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gpc/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generalized Pauli channels: rates, divisibility regions and classical simulation"};
    app.require_subcommand(1);

    gpc::cli::RunConfig cfg;
    cfg.threads = gpc::cli::threads_from_env();
    double r = 0.0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--d", cfg.d, "Prime dimension")->capture_default_str();
        sub->add_option("--r", r, "Rate constant (defaults to d)");
        sub->add_option("--format", cfg.format, "csv or json");
        sub->add_option("-o,--output", cfg.output, "Output file (stdout if omitted)");
    };
    auto problem = [&](CLI::App* sub) {
        sub->add_option("--fixture", cfg.fixture, "Named fixture (see `fixtures`)");
        sub->add_option("--k", cfg.k, "Parameter k for example4")->capture_default_str();
        sub->add_option("--x", cfg.x, "Mixture weights x_1..x_{d+1}, comma separated");
        sub->add_option("--w", cfg.weights, "Weight function spec: linear:r, pwl:t,w;... or sin2");
        sub->add_option("--t", cfg.t, "Time grid start:stop:points[:lin|log]");
        sub->add_option("--from-file", cfg.from_file, "Take the grid from a previous output file");
    };

    auto* fixtures = app.add_subcommand("fixtures", "List named fixtures");
    common(fixtures);
    fixtures->add_option("--k", cfg.k, "Parameter k for example4");

    auto* rates = app.add_subcommand("rates", "Tabulate decoherence rates gamma and mu");
    common(rates);
    problem(rates);

    auto* classify = app.add_subcommand("classify", "Divisibility verdict for a mixture");
    common(classify);
    problem(classify);

    auto* region = app.add_subcommand("region", "Scan the d = 3 simplex");
    common(region);
    region->add_option("--grid", cfg.grid, "Points per simplex edge (>= 11)")->capture_default_str();
    region->add_option("--mode", cfg.mode, "cp, p_sufficient or p_necessary")->capture_default_str();
    region->add_flag("--members-only", cfg.members_only, "Emit only points inside the region");
    region->add_option("--threads", cfg.threads, "Worker threads (default GPC_THREADS or 1)");
    region->add_option("--from-file", cfg.from_file, "Re-evaluate the x columns of a previous scan");

    auto* simulate = app.add_subcommand("simulate-classical", "Integrate a classical (d+2)-state model");
    common(simulate);
    problem(simulate);
    simulate->add_option("--flavor", cfg.flavor, "markov, mixture or ratedep")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "Run the numerical oracle suite");
    verify->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
    verify->add_option("-o,--output", cfg.output, "Output file (stdout if omitted)");

    auto* mub = app.add_subcommand("mub", "Dump the mutually unbiased bases");
    mub->add_option("--d", cfg.d, "Prime dimension")->capture_default_str();
    mub->add_option("-o,--output", cfg.output, "Output file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : gpc::cli::kValidationError;
    }

    CLI::App* chosen = app.get_subcommands().front();
    cfg.subcommand = chosen->get_name();
    if (auto* opt = chosen->get_option_no_throw("--r"); opt && opt->count() > 0) cfg.r = r;

    if (cfg.output.empty()) return gpc::cli::run(cfg, std::cout, std::cerr);
    std::ofstream file(cfg.output);
    if (!file) {
        std::cerr << "error: cannot open " << cfg.output << " for writing\n";
        return gpc::cli::kValidationError;
    }
    return gpc::cli::run(cfg, file, std::cerr);
}
