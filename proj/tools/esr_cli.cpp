#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "esr/engine.hpp"
#include "esr/version.hpp"

namespace {

// exit codes: 0 success, 2 config invalid, 3 numerical failure, 4 I/O
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::string out_dir;
    std::string format = "text";
};

void print_csv(const esr::RunReport& report) {
    for (const esr::CsvTable& table : report.tables) {
        std::cout << "# " << table.name << "\n" << table.header << "\n";
        for (const std::string& row : table.rows) std::cout << row << "\n";
    }
}

int emit(const esr::RunReport& report, const Options& opt) {
    if (opt.format == "csv") print_csv(report);
    else std::cout << report.text;
    if (!opt.out_dir.empty()) esr::write_report(report, opt.out_dir);
    return report.numerical_failure ? kExitNumerical : kExitOk;
}

esr::ScenarioConfig load(const Options& opt) {
    esr::ScenarioConfig cfg = esr::load_config(opt.config_path, opt.seed);
    if (opt.samples) cfg.samples = *opt.samples;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"esr: numerical engine for generalized observables with a no-registration outcome"};
    app.set_version_flag("--version", std::string("esr ") + esr::kToolVersion);
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* cmd, bool with_samples) {
        cmd->add_option("--config", opt.config_path, "scenario config file (JSON)")->required();
        cmd->add_option("--seed", opt.seed, "override the config / ESR_SEED seed");
        if (with_samples) cmd->add_option("--samples", opt.samples, "override the sample count");
        cmd->add_option("--out-dir", opt.out_dir, "write report.txt and CSV side files here");
        cmd->add_option("--format", opt.format, "stdout format")
            ->check(CLI::IsMember({"text", "csv"}));
    };

    CLI::App* validate = app.add_subcommand("validate", "parse and validate a config");
    add_common(validate, false);
    CLI::App* analytic = app.add_subcommand("run-analytic", "exact probabilities and checks");
    add_common(analytic, false);
    CLI::App* mc = app.add_subcommand("run-mc", "seeded Monte Carlo verification");
    add_common(mc, true);
    CLI::App* sweep = app.add_subcommand("bchsh-sweep", "modified BCHSH over a detection grid");
    add_common(sweep, false);
    CLI::App* bound = app.add_subcommand("bound-search", "detection-efficiency ceiling");
    add_common(bound, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            const esr::ScenarioConfig cfg = load(opt);
            std::cout << "config OK\n";
            std::cout << "hash: " << cfg.config_hash << "\n";
            std::cout << "seed: " << cfg.seed << " (source: " << cfg.seed_source << ")\n";
            std::cout << "states: " << cfg.states.size() << ", observables: " << cfg.observables.size()
                      << ", protocols: " << cfg.protocols.size()
                      << ", scenario: " << (cfg.scenario ? "yes" : "no") << "\n";
            return kExitOk;
        }
        if (analytic->parsed()) return emit(esr::run_analytic(load(opt)), opt);
        if (mc->parsed()) return emit(esr::run_monte_carlo(load(opt)), opt);
        if (sweep->parsed()) return emit(esr::run_bchsh_sweep(load(opt)), opt);
        if (bound->parsed()) return emit(esr::run_bound_search(load(opt)), opt);
    } catch (const esr::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const esr::io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const esr::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
