#include "ferropuf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ferropuf {

void ResponseMatrix::append(const BitVector& response, std::string label) {
    const int len = static_cast<int>(response.size());
    if (bits.rows() > 0 && len != length())
        throw std::invalid_argument("response length mismatch in ResponseMatrix");
    bits.conservativeResize(bits.rows() + 1, len);
    for (int j = 0; j < len; ++j) bits(bits.rows() - 1, j) = response[static_cast<std::size_t>(j)];
    labels.push_back(std::move(label));
}

double hamming_weight(const ResponseMatrix& m) {
    if (m.rows() == 0 || m.length() == 0) throw std::invalid_argument("empty response matrix");
    return m.bits.cast<double>().mean();
}

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

Eigen::VectorXd bitwise_entropy(const ResponseMatrix& m) {
    if (m.rows() < 2) throw std::invalid_argument("bitwise entropy needs >= 2 rows");
    Eigen::VectorXd h(m.length());
    const Eigen::VectorXd p = m.bits.cast<double>().colwise().mean();
    for (int j = 0; j < m.length(); ++j) h[j] = binary_entropy(p[j]);
    return h;
}

namespace {

double normalized_hd(const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& bits,
                     int a, int b) {
    int diff = 0;
    for (int j = 0; j < bits.cols(); ++j) diff += bits(a, j) != bits(b, j);
    return static_cast<double>(diff) / static_cast<double>(bits.cols());
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return {mean, xs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0};
}

}  // namespace

HdStats hd_inter(const ResponseMatrix& m, int bins) {
    if (m.rows() < 2) throw std::invalid_argument("hd_inter needs >= 2 rows");
    if (bins < 1) throw std::invalid_argument("hd_inter needs >= 1 bin");
    std::vector<double> hds;
    hds.reserve(static_cast<std::size_t>(m.rows()) * (m.rows() - 1) / 2);
    for (int a = 0; a < m.rows(); ++a)
        for (int b = a + 1; b < m.rows(); ++b) hds.push_back(normalized_hd(m.bits, a, b));

    HdStats stats;
    stats.bins = bins;
    stats.histogram = Eigen::VectorXi::Zero(bins);
    for (double hd : hds) {
        int bin = static_cast<int>(hd * bins);
        if (bin == bins) bin = bins - 1;  // hd == 1.0 lands in the top bin
        ++stats.histogram[bin];
    }
    std::tie(stats.mean, stats.stddev) = mean_std(hds);
    return stats;
}

std::pair<double, double> hd_reconfigure(const ResponseMatrix& before,
                                         const ResponseMatrix& after) {
    if (before.rows() != after.rows() || before.length() != after.length())
        throw std::invalid_argument("reconfiguration matrices must have the same shape");
    std::vector<double> hds;
    hds.reserve(static_cast<std::size_t>(before.rows()));
    for (int r = 0; r < before.rows(); ++r) {
        int diff = 0;
        for (int j = 0; j < before.length(); ++j) diff += before.bits(r, j) != after.bits(r, j);
        hds.push_back(static_cast<double>(diff) / before.length());
    }
    return mean_std(hds);
}

std::pair<double, double> hd_reconfigure(std::span<const ResponseMatrix> reconfigurations) {
    if (reconfigurations.size() < 2)
        throw std::invalid_argument("need >= 2 reconfigurations");
    std::vector<double> hds;
    for (std::size_t a = 0; a < reconfigurations.size(); ++a) {
        for (std::size_t b = a + 1; b < reconfigurations.size(); ++b) {
            const auto& ma = reconfigurations[a];
            const auto& mb = reconfigurations[b];
            if (ma.rows() != mb.rows() || ma.length() != mb.length())
                throw std::invalid_argument("reconfiguration matrices must have the same shape");
            for (int r = 0; r < ma.rows(); ++r) {
                int diff = 0;
                for (int j = 0; j < ma.length(); ++j) diff += ma.bits(r, j) != mb.bits(r, j);
                hds.push_back(static_cast<double>(diff) / ma.length());
            }
        }
    }
    return mean_std(hds);
}

CorrelationSummary correlation_matrix(const ResponseMatrix& m) {
    if (m.rows() < 2) throw std::invalid_argument("correlation needs >= 2 rows");
    const int r = m.rows();
    const Eigen::MatrixXd x = m.bits.cast<double>();
    const Eigen::VectorXd mean = x.rowwise().mean();
    const Eigen::MatrixXd centered = x.colwise() - mean;
    const Eigen::VectorXd norm = centered.rowwise().norm();

    CorrelationSummary summary;
    summary.matrix.resize(r, r);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int a = 0; a < r; ++a) {
        if (norm[a] == 0.0) ++summary.degenerate_rows;
        for (int b = 0; b < r; ++b) {
            if (norm[a] == 0.0 || norm[b] == 0.0) {
                summary.matrix(a, b) = nan;
            } else {
                summary.matrix(a, b) = centered.row(a).dot(centered.row(b)) / (norm[a] * norm[b]);
            }
        }
    }
    double maxod = 0.0;
    for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b)
            if (a != b && !std::isnan(summary.matrix(a, b)))
                maxod = std::max(maxod, std::abs(summary.matrix(a, b)));
    summary.max_offdiag_abs = maxod;
    return summary;
}

double reliability_bit_error_rate(const std::function<BitVector()>& regenerate, int repeats) {
    if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    const BitVector reference = regenerate();
    if (repeats == 1) return 0.0;
    long long errors = 0;
    long long total = 0;
    for (int rep = 1; rep < repeats; ++rep) {
        const BitVector again = regenerate();
        if (again.size() != reference.size())
            throw std::invalid_argument("regenerated response length changed");
        for (std::size_t i = 0; i < reference.size(); ++i) errors += again[i] != reference[i];
        total += static_cast<long long>(reference.size());
    }
    return total > 0 ? static_cast<double>(errors) / static_cast<double>(total) : 0.0;
}

double reliability_bit_error_rate(const PufRow& row, std::span<const Challenge> challenges,
                                  int repeats) {
    return reliability_bit_error_rate([&] { return response_vector(row, challenges); }, repeats);
}

FlipReport flip_chance(const PufRow& row, std::span<const Challenge> challenges) {
    FlipReport report;
    if (challenges.empty()) throw std::invalid_argument("flip_chance needs challenges");
    const BitVector& states = row.states();
    for (std::size_t i = 0; i < challenges.size(); ++i) {
        if (row.response_bit(challenges[i]) != ground_truth_bit(states, challenges[i]))
            report.flipped_challenges.push_back(static_cast<int>(i));
    }
    report.fraction =
        static_cast<double>(report.flipped_challenges.size()) / static_cast<double>(challenges.size());
    return report;
}

std::string MetricsReport::to_key_value() const {
    std::ostringstream out;
    out.precision(10);
    out << "hw=" << hw << "\n";
    out << "hd_inter_mean=" << hd_inter_mean << "\n";
    out << "hd_inter_std=" << hd_inter_std << "\n";
    out << "hd_reconf_mean=" << hd_reconf_mean << "\n";
    out << "hd_reconf_std=" << hd_reconf_std << "\n";
    out << "corr_max_offdiag=" << corr_max_offdiag << "\n";
    out << "corr_degenerate_rows=" << corr_degenerate_rows << "\n";
    out << "reliability_bit_error_rate=" << reliability_bit_error_rate << "\n";
    out << "flip_chance=" << flip_chance << "\n";
    out << "tie_count=" << tie_count << "\n";
    out << "hd_mode=" << hd_mode << "\n";
    out << "entropy_min=" << (entropy_per_bit.size() ? entropy_per_bit.minCoeff() : 0.0) << "\n";
    out << "entropy_mean=" << (entropy_per_bit.size() ? entropy_per_bit.mean() : 0.0) << "\n";
    for (int j = 0; j < entropy_per_bit.size(); ++j)
        out << "entropy_bit_" << j << "=" << entropy_per_bit[j] << "\n";
    return out.str();
}

std::string MetricsReport::to_json() const {
    nlohmann::json j;
    j["hw"] = hw;
    j["hd_inter_mean"] = hd_inter_mean;
    j["hd_inter_std"] = hd_inter_std;
    j["hd_reconf_mean"] = hd_reconf_mean;
    j["hd_reconf_std"] = hd_reconf_std;
    j["corr_max_offdiag"] = corr_max_offdiag;
    j["corr_degenerate_rows"] = corr_degenerate_rows;
    j["reliability_bit_error_rate"] = reliability_bit_error_rate;
    j["flip_chance"] = flip_chance;
    j["tie_count"] = tie_count;
    j["hd_mode"] = hd_mode;
    j["entropy_per_bit"] = std::vector<double>(entropy_per_bit.data(),
                                               entropy_per_bit.data() + entropy_per_bit.size());
    return j.dump(2) + "\n";
}

}  // namespace ferropuf
