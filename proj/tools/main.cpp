// torsplit command line front end.
//
//   torsplit evolve <config>   write trajectory snapshots + diagnostics CSV
//   torsplit study  <config>   write convergence report CSVs + plot script
//   torsplit admit  <config>   write an admissibility report
//
// Flags: --out <dir>, --threads <n>, --seed <k> (override the config).
// Exit codes: 0 success, 2 validation, 3 guard trip, 4 reference certificate.

#include <clocale>

#include <CLI11.hpp>

#include "torsplit/runner.hpp"

int main(int argc, char** argv) {
    std::setlocale(LC_NUMERIC, "C");  // dot decimal separator in every artifact

    CLI::App app{"pseudo-spectral operator-splitting solvers for active scalar equations on the torus"};
    app.require_subcommand(1);

    std::string config_path;
    torsplit::RunOptions opt;
    long seed = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "experiment config file")->required();
        sub->add_option("--out", opt.out_dir, "output directory (overrides output.dir)");
        sub->add_option("--threads", opt.threads, "parallel study rows")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "override the configured random seed")->each([&](const std::string&) {
            seed_set = true;
        });
    };

    CLI::App* evolve = app.add_subcommand("evolve", "run one splitting evolution");
    CLI::App* study = app.add_subcommand("study", "run a convergence-rate study");
    CLI::App* admit = app.add_subcommand("admit", "audit operator admissibility");
    add_common(evolve);
    add_common(study);
    add_common(admit);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : torsplit::exit_validation;  // --help stays 0, usage errors are validation failures
    }
    if (seed_set) opt.seed = static_cast<std::uint64_t>(seed);

    const std::string command = app.get_subcommands().front()->get_name();
    return torsplit::run_from_file(config_path, command, opt);
}
