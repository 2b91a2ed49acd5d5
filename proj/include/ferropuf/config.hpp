#ifndef FERROPUF_CONFIG_HPP
#define FERROPUF_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ferropuf/attack.hpp"
#include "ferropuf/crp.hpp"
#include "ferropuf/device.hpp"
#include "ferropuf/puf.hpp"

namespace ferropuf {

/// Experiment settings parsed from the sectioned plain-text config file.
/// Every field has a default; unknown sections, keys or out-of-range values
/// raise ConfigError before any computation starts.
struct ExperimentConfig {
    std::uint64_t seed = 1;

    DeviceParams device;
    WriteConfig write;
    std::string size_profile = "500x500";

    struct ArraySection {
        int n = 27;
        int m = 1;
        double sigma_c = 0.01;
        double offset_rel = 0.005;
        double vdd = 0.5;
        double read_gate = 0.9;
    } array;

    struct ExperimentSection {
        int challenges = 100;
        int registrations = 100;
        int reconfigurations = 10;
        int repeats = 1000;
        int histogram_bins = 20;
        // Sweep axes and the per-axis-value protocol size.
        std::vector<double> sweep_pulses = {2.8, 3.2, 3.6};
        std::vector<double> sweep_temperatures = {25.0, 55.0, 85.0};
        std::vector<std::string> sweep_sizes = {"500x500", "200x200", "200x100"};
        std::vector<double> sweep_sigma_c = {0.0, 0.01, 0.05};
        std::vector<int> sweep_lengths = {17, 27, 41, 65};
        int sweep_rows = 8;
        int sweep_registrations = 40;
        int sweep_challenges = 150;
    } experiment;

    struct AttackSection {
        RpropConfig rprop;
        int n = 27;
        std::vector<int> k_values = {1, 2, 3};
        std::vector<int> train_sizes = {250, 500, 1000, 2000, 4000, 8000};
        std::vector<int> n_values;  // optional challenge-length sweep
        int test_size = 10000;
        int trials = 1;
        std::vector<PufKind> targets = {PufKind::proposed, PufKind::arbiter};
        int threads = 1;
    } attack;

    struct CrpSection {
        PufKind kind = PufKind::proposed;
        int k = 1;
        int count = 10000;
    } crp;

    /// Device params with the size profile applied.
    DeviceParams effective_device_params() const;

    /// Range checks across all sections; throws ConfigError.
    void validate() const;

    /// Full snapshot in the config file syntax (round-trips through parse).
    std::string to_text() const;
};

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& source_name = "<config>");
ExperimentConfig load_config_file(const std::filesystem::path& path);

}  // namespace ferropuf

#endif
