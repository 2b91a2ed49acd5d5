#ifndef FERROPUF_EXPERIMENTS_HPP
#define FERROPUF_EXPERIMENTS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "ferropuf/config.hpp"
#include "ferropuf/metrics.hpp"

namespace ferropuf {

inline constexpr const char* kToolVersion = "0.1.0";

/// Whole-file atomic write (temp file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Files written by one command, recorded into the run manifest.
struct RunOutputs {
    std::vector<std::filesystem::path> files;

    void add(const std::filesystem::path& p) { files.push_back(p); }
};

/// Emits manifest.json next to the outputs: config snapshot, seed, tool
/// version, file list and wall-clock. Re-running the same config and seed
/// reproduces every listed output byte for byte.
void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                    const ExperimentConfig& cfg, const RunOutputs& outputs,
                    double wall_clock_seconds);

/// `register`: runs the registration protocol `registrations` times on the
/// configured array; writes one delta-Vx dump per registration plus the
/// state-pattern file.
void cmd_register(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// `metrics`: the full response-statistics protocol (registrations x
/// challenges matrix, reconfiguration analysis, reliability, flips).
MetricsReport cmd_metrics(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// One sweep point of `sweep`, long-format rows (axis, value, statistic).
struct SweepRow {
    std::string axis;
    std::string value;
    std::string statistic;
    double result = 0.0;
};

/// `sweep`: metrics plus flip chance per axis value.
/// Axes: pulse | temperature | size | sigma_c | challenge_length.
std::vector<SweepRow> cmd_sweep(const ExperimentConfig& cfg, const std::string& axis,
                                const std::filesystem::path& out_dir);

/// `attack`: accuracy map (and length sweep when n_values is set) for every
/// configured target; per-cell fragment files make interrupted sweeps
/// resumable (existing cells are skipped).
std::vector<AttackCell> cmd_attack(const ExperimentConfig& cfg,
                                   const std::filesystem::path& out_dir);

/// `gen-crps`: writes one CRP file from the [crp] section.
CrpSet cmd_gen_crps(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace ferropuf

#endif
