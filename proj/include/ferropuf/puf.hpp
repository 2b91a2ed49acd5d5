#ifndef FERROPUF_PUF_HPP
#define FERROPUF_PUF_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ferropuf/device.hpp"
#include "ferropuf/rng.hpp"

namespace ferropuf {

/// Challenge bits, most-significant cell first.
using Challenge = std::vector<std::uint8_t>;
using BitVector = std::vector<std::uint8_t>;

Challenge random_challenge(int n, RngStream& rng);
std::vector<Challenge> random_challenges(int n, int count, RngStream& rng);

/// Relative per-capacitor deviation used for the Monte-Carlo weight draws.
struct CapMismatchModel {
    double sigma_c = 0.0;
};

/// Comparator threshold model: reference is 0.5*VDD plus a static offset
/// drawn once per row, uniform in +-offset_rel*VDD.
struct SenseConfig {
    double offset_rel = 0.005;
    double read_gate = 0.9;  // V, nominal read gate bias between split Vth levels
};

/// Weak-write operating point used during registration.
struct WriteConfig {
    double pulse_amplitude = 2.8;  // V
    double temperature_c = 25.0;   // degC
};

/// Normalized capacitor weights w_i = (1+d_i)/sum(1+d_j) with
/// d_j ~ Normal(0, sigma_c^2); factors are clamped positive and clamp
/// events are counted into *clamp_count when given.
Eigen::VectorXd sample_cap_weights(int n, const CapMismatchModel& model, RngStream& rng,
                                   int* clamp_count = nullptr);

/// Two FeFETs sharing the cell node; `state` is set by registration.
struct PufCell {
    FeFetDevice t1;
    FeFetDevice t2;
    std::optional<int> state;

    PufCell(const DeviceParams& params, RngStream& rng)
        : t1(params, rng), t2(params, rng) {}
};

/// Per-cell registration outcome.
struct CellRegistration {
    double vx_cycle1 = 0.0;
    double vx_cycle2 = 0.0;
    int state = 0;
    int tie_resamples = 0;
    bool degenerate = false;
};

/// Per-row registration record: the two measured Vx cycles, their
/// difference, and the resulting state pattern.
struct RegistrationRecord {
    Eigen::VectorXd vx_cycle1;
    Eigen::VectorXd vx_cycle2;
    Eigen::VectorXd delta_vx;
    BitVector states;
    int tie_resamples = 0;
    bool degenerate = false;
};

/// Registration of a single cell.
///
/// Stages 1 and 2 each erase both FeFETs, weak-write T1 and read its node
/// voltage at the challenge rail. Stage 3 compares the two cycles
/// (delta > 0 -> state 1) and splits the cell: the registered state is
/// frozen by rewriting the pair to opposite saturated Vth states. An exact
/// tie re-runs stages 1-2 (at most `max_tie_resamples` times, then state 0
/// with the degenerate flag set; only reachable with sigma_c2c == 0).
CellRegistration register_cell(PufCell& cell, const WriteConfig& write_cfg, double vdd,
                               double read_gate, RngStream& rng, int max_tie_resamples = 8);

/// Cell node voltage for a registered cell under a challenge bit: the split
/// devices are read with the challenge rail on T2 and its complement on T1,
/// which realizes Vx ~= vdd * (state XOR challenge) up to the logistic
/// residue of the off device. Throws std::logic_error before registration.
double cell_vx(const PufCell& cell, int challenge_bit, double vdd, double read_gate);

/// A row of N cells coupled through capacitors; one response bit per challenge.
class PufRow {
public:
    /// Builds the row: constructs 2N devices (D2D draws), samples the static
    /// capacitor weights and the static sense offset.
    PufRow(int n, const DeviceParams& params, const CapMismatchModel& mismatch,
           const SenseConfig& sense, double vdd, RngStream& rng);

    int size() const { return static_cast<int>(cells_.size()); }
    double vdd() const { return vdd_; }
    double read_gate() const { return read_gate_; }
    double sense_offset() const { return sense_offset_; }
    const Eigen::VectorXd& cap_weights() const { return cap_weights_; }
    const std::vector<PufCell>& cells() const { return cells_; }
    bool registered() const { return registered_; }

    /// Registered state bits. Throws std::logic_error before registration.
    const BitVector& states() const;

    /// Runs register_cell over every cell; repeatable (stage 4 of the
    /// workflow re-runs it for reconfiguration).
    RegistrationRecord register_cells(const WriteConfig& write_cfg, RngStream& rng);

    /// Capacitively weighted average of the cell node voltages.
    /// Throws std::invalid_argument on challenge length mismatch.
    double vsum(const Challenge& challenge) const;

    /// Comparator: 1 iff vsum > 0.5*vdd + sense_offset (strict; a tie gives
    /// 0 and increments *tie_count when given).
    int response_bit(const Challenge& challenge, int* tie_count = nullptr) const;

private:
    std::vector<PufCell> cells_;
    Eigen::VectorXd cap_weights_;
    double sense_offset_;
    double vdd_;
    double read_gate_;
    bool registered_ = false;
    BitVector states_;
};

/// Response under ideal weights (1/N each) and zero offset; pure function
/// of states and challenge with the same strict-inequality tie rule.
int ground_truth_bit(const BitVector& states, const Challenge& challenge);

/// All rows share N and VDD.
class PufArray {
public:
    PufArray(int rows, int n, const DeviceParams& params, const CapMismatchModel& mismatch,
             const SenseConfig& sense, double vdd, RngStream& rng);

    int rows() const { return static_cast<int>(rows_.size()); }
    double vdd() const { return vdd_; }
    PufRow& row(int m) { return rows_[m]; }
    const PufRow& row(int m) const { return rows_[m]; }

    /// Registers every row (independent per-row streams).
    std::vector<RegistrationRecord> register_cells(const WriteConfig& write_cfg, RngStream& rng);

    /// Stage 4: re-runs the registration, freezing fresh states.
    std::vector<RegistrationRecord> reconfigure(const WriteConfig& write_cfg, RngStream& rng) {
        return register_cells(write_cfg, rng);
    }

private:
    std::vector<PufRow> rows_;
    double vdd_;
};

/// Response bits of one row over a challenge list.
BitVector response_vector(const PufRow& row, std::span<const Challenge> challenges,
                          int* tie_count = nullptr);

/// (n,k)-XOR group: per challenge, XOR of the k row bits.
BitVector response_vector_xor(std::span<const PufRow* const> rows,
                              std::span<const Challenge> challenges, int* tie_count = nullptr);

}  // namespace ferropuf

#endif
