// ferropuf: behavioral simulator and analysis bench for a reconfigurable
// FeFET strong PUF, with a logistic-regression modeling-attack harness.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ferropuf/errors.hpp"
#include "ferropuf/experiments.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Experiment config file");
    cmd->add_option("--seed", opts.seed, "Root seed override");
    cmd->add_option("--out", opts.out_dir, "Output directory");
}

ferropuf::ExperimentConfig resolve_config(CommonOpts& opts) {
    ferropuf::ExperimentConfig cfg;
    if (!opts.config_path.empty()) cfg = ferropuf::load_config_file(opts.config_path);
    // Environment overrides are limited to the seed and the output directory.
    if (const char* env_seed = std::getenv("FERROPUF_SEED")) cfg.seed = std::stoull(env_seed);
    if (const char* env_out = std::getenv("FERROPUF_OUT")) opts.out_dir = env_out;
    if (opts.seed) cfg.seed = *opts.seed;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FeFET strong-PUF simulator and security-analysis bench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ferropuf::kToolVersion);

    CommonOpts reg_opts, met_opts, sweep_opts, attack_opts, crp_opts;
    std::string sweep_axis;

    CLI::App* reg = app.add_subcommand("register", "Run the registration protocol");
    add_common(reg, reg_opts);
    CLI::App* met = app.add_subcommand("metrics", "Compute the PUF quality metrics");
    add_common(met, met_opts);
    CLI::App* swp = app.add_subcommand("sweep", "Robustness sweep over one axis");
    add_common(swp, sweep_opts);
    swp->add_option("--axis", sweep_axis,
                    "pulse | temperature | size | sigma_c | challenge_length")
        ->required();
    CLI::App* atk = app.add_subcommand("attack", "Logistic-regression modeling attack");
    add_common(atk, attack_opts);
    CLI::App* gen = app.add_subcommand("gen-crps", "Generate a challenge-response-pair file");
    add_common(gen, crp_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (reg->parsed()) {
            auto cfg = resolve_config(reg_opts);
            ferropuf::cmd_register(cfg, reg_opts.out_dir);
            std::cout << "registration outputs written to " << reg_opts.out_dir << "\n";
        } else if (met->parsed()) {
            auto cfg = resolve_config(met_opts);
            const auto report = ferropuf::cmd_metrics(cfg, met_opts.out_dir);
            std::cout << report.to_key_value();
        } else if (swp->parsed()) {
            auto cfg = resolve_config(sweep_opts);
            ferropuf::cmd_sweep(cfg, sweep_axis, sweep_opts.out_dir);
            std::cout << "sweep outputs written to " << sweep_opts.out_dir << "\n";
        } else if (atk->parsed()) {
            auto cfg = resolve_config(attack_opts);
            ferropuf::cmd_attack(cfg, attack_opts.out_dir);
            std::cout << "attack outputs written to " << attack_opts.out_dir << "\n";
        } else if (gen->parsed()) {
            auto cfg = resolve_config(crp_opts);
            const auto set = ferropuf::cmd_gen_crps(cfg, crp_opts.out_dir);
            std::cout << "wrote " << set.size() << " CRPs to " << crp_opts.out_dir << "\n";
        }
    } catch (const ferropuf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
