#ifndef FERROPUF_METRICS_HPP
#define FERROPUF_METRICS_HPP

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ferropuf/puf.hpp"

namespace ferropuf {

/// Rectangular collection of response vectors with provenance labels
/// (instance / reconfiguration / repeat ids). One row per response vector.
struct ResponseMatrix {
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> bits;
    std::vector<std::string> labels;

    int rows() const { return static_cast<int>(bits.rows()); }
    int length() const { return static_cast<int>(bits.cols()); }

    void append(const BitVector& response, std::string label);
};

/// Fraction of 1-bits. Throws std::invalid_argument on an empty matrix.
double hamming_weight(const ResponseMatrix& m);

/// Per-bit-position binary entropy of the column means; needs >= 2 rows.
Eigen::VectorXd bitwise_entropy(const ResponseMatrix& m);

/// Binary entropy H(p); 0 at p in {0,1}.
double binary_entropy(double p);

struct HdStats {
    double mean = 0.0;
    double stddev = 0.0;
    Eigen::VectorXi histogram;  // uniform bins on [0,1]
    int bins = 0;
};

/// Normalized Hamming distance over all unordered row pairs.
HdStats hd_inter(const ResponseMatrix& m, int bins = 20);

/// Rowwise normalized HD between matched rows of two same-shape matrices
/// from different reconfigurations. Returns (mean, stddev).
std::pair<double, double> hd_reconfigure(const ResponseMatrix& before, const ResponseMatrix& after);

/// Aggregate over all unordered pairs of reconfigurations.
std::pair<double, double> hd_reconfigure(std::span<const ResponseMatrix> reconfigurations);

/// Pearson correlation between rows (bits as 0/1 reals). Zero-variance rows
/// yield NaN entries: degenerate, reported rather than zeroed.
struct CorrelationSummary {
    Eigen::MatrixXd matrix;
    double max_offdiag_abs = 0.0;  // over defined entries only
    int degenerate_rows = 0;
};
CorrelationSummary correlation_matrix(const ResponseMatrix& m);

/// Fraction of (challenge, repeat) bits differing from the first repeat,
/// with `regenerate` producing one full response vector per call.
double reliability_bit_error_rate(const std::function<BitVector()>& regenerate, int repeats);

/// Convenience: repeats response generation on a frozen registered row.
double reliability_bit_error_rate(const PufRow& row, std::span<const Challenge> challenges,
                                  int repeats);

/// Static flips: challenges where the analog response differs from the
/// ideal-weight zero-offset ground truth. The flipped set is a fixed
/// property of the registered row, not a temporal error.
struct FlipReport {
    double fraction = 0.0;
    std::vector<int> flipped_challenges;
};
FlipReport flip_chance(const PufRow& row, std::span<const Challenge> challenges);

/// Flat summary emitted by the experiment controller.
struct MetricsReport {
    double hw = 0.0;
    Eigen::VectorXd entropy_per_bit;
    double hd_inter_mean = 0.0;
    double hd_inter_std = 0.0;
    double hd_reconf_mean = 0.0;
    double hd_reconf_std = 0.0;
    double corr_max_offdiag = 0.0;
    int corr_degenerate_rows = 0;
    double reliability_bit_error_rate = 0.0;
    double flip_chance = 0.0;
    int tie_count = 0;
    std::string hd_mode;  // "across-registrations" or "across-instances"

    /// One `key=value` line per statistic.
    std::string to_key_value() const;
    /// Machine-readable JSON document.
    std::string to_json() const;
};

}  // namespace ferropuf

#endif
