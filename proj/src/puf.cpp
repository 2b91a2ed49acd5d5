#include "ferropuf/puf.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ferropuf {

Challenge random_challenge(int n, RngStream& rng) {
    Challenge c(static_cast<std::size_t>(n));
    for (auto& b : c) b = static_cast<std::uint8_t>(rng.bit());
    return c;
}

std::vector<Challenge> random_challenges(int n, int count, RngStream& rng) {
    std::vector<Challenge> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(random_challenge(n, rng));
    return out;
}

Eigen::VectorXd sample_cap_weights(int n, const CapMismatchModel& model, RngStream& rng,
                                   int* clamp_count) {
    if (n < 1) throw std::invalid_argument("cap weights need n >= 1");
    Eigen::VectorXd factors(n);
    int clamps = 0;
    for (int i = 0; i < n; ++i) {
        double f = 1.0 + (model.sigma_c > 0.0 ? rng.normal(0.0, model.sigma_c) : 0.0);
        if (f <= 0.0) {
            f = 1e-6;
            ++clamps;
        }
        factors[i] = f;
    }
    if (clamp_count) *clamp_count += clamps;
    return factors / factors.sum();
}

CellRegistration register_cell(PufCell& cell, const WriteConfig& write_cfg, double vdd,
                               double read_gate, RngStream& rng, int max_tie_resamples) {
    CellRegistration reg;
    for (int attempt = 0;; ++attempt) {
        // Stage 1: reset both, weak-write T1, measure Vx at the challenge rail.
        cell.t1.erase();
        cell.t2.erase();
        cell.t1.write_weak(write_cfg.pulse_amplitude, write_cfg.temperature_c, rng);
        reg.vx_cycle1 = cell.t1.read_vx(read_gate, vdd);
        // Stage 2: identical repeat.
        cell.t1.erase();
        cell.t2.erase();
        cell.t1.write_weak(write_cfg.pulse_amplitude, write_cfg.temperature_c, rng);
        reg.vx_cycle2 = cell.t1.read_vx(read_gate, vdd);

        if (reg.vx_cycle2 > reg.vx_cycle1) {
            reg.state = 1;
            break;
        }
        if (reg.vx_cycle2 < reg.vx_cycle1) {
            reg.state = 0;
            break;
        }
        if (attempt >= max_tie_resamples) {
            // Impossible with continuous write noise; signals sigma_c2c == 0.
            reg.state = 0;
            reg.degenerate = true;
            break;
        }
        ++reg.tie_resamples;
    }

    // Stage 3 split: freeze the state by saturating the pair.
    if (reg.state == 0) {
        cell.t1.erase();
        cell.t2.program_strong();
    } else {
        cell.t1.program_strong();
        cell.t2.erase();
    }
    cell.state = reg.state;
    return reg;
}

double cell_vx(const PufCell& cell, int challenge_bit, double vdd, double read_gate) {
    if (!cell.state.has_value()) throw std::logic_error("cell_vx on unregistered cell");
    const double rail_t1 = challenge_bit ? 0.0 : vdd;
    const double rail_t2 = challenge_bit ? vdd : 0.0;
    return cell.t1.read_vx(read_gate, rail_t1) + cell.t2.read_vx(read_gate, rail_t2);
}

PufRow::PufRow(int n, const DeviceParams& params, const CapMismatchModel& mismatch,
               const SenseConfig& sense, double vdd, RngStream& rng)
    : sense_offset_(0.0), vdd_(vdd), read_gate_(sense.read_gate) {
    if (n < 1) throw std::invalid_argument("row needs at least one cell");
    cells_.reserve(static_cast<std::size_t>(n));
    RngStream dev_rng = rng.child("devices");
    for (int i = 0; i < n; ++i) {
        RngStream cell_rng = dev_rng.child("cell", static_cast<std::uint64_t>(i));
        cells_.emplace_back(params, cell_rng);
    }
    RngStream cap_rng = rng.child("caps");
    cap_weights_ = sample_cap_weights(n, mismatch, cap_rng);
    RngStream sense_rng = rng.child("sense");
    sense_offset_ = sense.offset_rel > 0.0
                        ? sense_rng.uniform(-sense.offset_rel * vdd, sense.offset_rel * vdd)
                        : 0.0;
}

const BitVector& PufRow::states() const {
    if (!registered_) throw std::logic_error("row not registered");
    return states_;
}

RegistrationRecord PufRow::register_cells(const WriteConfig& write_cfg, RngStream& rng) {
    const int n = size();
    RegistrationRecord rec;
    rec.vx_cycle1.resize(n);
    rec.vx_cycle2.resize(n);
    rec.delta_vx.resize(n);
    rec.states.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        RngStream cell_rng = rng.child("cell", static_cast<std::uint64_t>(i));
        CellRegistration cr =
            register_cell(cells_[static_cast<std::size_t>(i)], write_cfg, vdd_, read_gate_, cell_rng);
        rec.vx_cycle1[i] = cr.vx_cycle1;
        rec.vx_cycle2[i] = cr.vx_cycle2;
        rec.delta_vx[i] = cr.vx_cycle2 - cr.vx_cycle1;
        rec.states[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(cr.state);
        rec.tie_resamples += cr.tie_resamples;
        rec.degenerate = rec.degenerate || cr.degenerate;
    }
    states_ = rec.states;
    registered_ = true;
    return rec;
}

double PufRow::vsum(const Challenge& challenge) const {
    if (static_cast<int>(challenge.size()) != size()) {
        std::ostringstream msg;
        msg << "challenge length " << challenge.size() << " != row size " << size();
        throw std::invalid_argument(msg.str());
    }
    if (!registered_) throw std::logic_error("row not registered");
    double acc = 0.0;
    for (int i = 0; i < size(); ++i) {
        acc += cap_weights_[i] * cell_vx(cells_[static_cast<std::size_t>(i)],
                                         challenge[static_cast<std::size_t>(i)], vdd_, read_gate_);
    }
    return acc;
}

int PufRow::response_bit(const Challenge& challenge, int* tie_count) const {
    const double v = vsum(challenge);
    const double threshold = 0.5 * vdd_ + sense_offset_;
    if (v == threshold && tie_count) ++*tie_count;
    return v > threshold ? 1 : 0;
}

int ground_truth_bit(const BitVector& states, const Challenge& challenge) {
    if (states.size() != challenge.size())
        throw std::invalid_argument("state/challenge length mismatch");
    int hits = 0;
    for (std::size_t i = 0; i < states.size(); ++i) hits += states[i] ^ challenge[i];
    // Ideal weights: vsum = (hits/N)*vdd; strict comparison against vdd/2.
    return 2 * hits > static_cast<int>(states.size()) ? 1 : 0;
}

PufArray::PufArray(int rows, int n, const DeviceParams& params, const CapMismatchModel& mismatch,
                   const SenseConfig& sense, double vdd, RngStream& rng)
    : vdd_(vdd) {
    if (rows < 1) throw std::invalid_argument("array needs at least one row");
    rows_.reserve(static_cast<std::size_t>(rows));
    for (int m = 0; m < rows; ++m) {
        RngStream row_rng = rng.child("row", static_cast<std::uint64_t>(m));
        rows_.emplace_back(n, params, mismatch, sense, vdd, row_rng);
    }
}

std::vector<RegistrationRecord> PufArray::register_cells(const WriteConfig& write_cfg,
                                                         RngStream& rng) {
    std::vector<RegistrationRecord> records;
    records.reserve(rows_.size());
    for (std::size_t m = 0; m < rows_.size(); ++m) {
        RngStream row_rng = rng.child("row", static_cast<std::uint64_t>(m));
        records.push_back(rows_[m].register_cells(write_cfg, row_rng));
    }
    return records;
}

BitVector response_vector(const PufRow& row, std::span<const Challenge> challenges,
                          int* tie_count) {
    BitVector bits(challenges.size());
    for (std::size_t i = 0; i < challenges.size(); ++i)
        bits[i] = static_cast<std::uint8_t>(row.response_bit(challenges[i], tie_count));
    return bits;
}

BitVector response_vector_xor(std::span<const PufRow* const> rows,
                              std::span<const Challenge> challenges, int* tie_count) {
    if (rows.empty()) throw std::invalid_argument("XOR group needs at least one row");
    BitVector bits(challenges.size(), 0);
    for (const PufRow* row : rows) {
        for (std::size_t i = 0; i < challenges.size(); ++i)
            bits[i] ^= static_cast<std::uint8_t>(row->response_bit(challenges[i], tie_count));
    }
    return bits;
}

}  // namespace ferropuf
