#ifndef FERROPUF_ATTACK_HPP
#define FERROPUF_ATTACK_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ferropuf/crp.hpp"
#include "ferropuf/rng.hpp"

namespace ferropuf {

/// Challenge-to-feature transforms, both of output dimension n+1
/// (constant bias appended).
enum class FeatureKind {
    proposed_direct,  // x_i = 1 - 2*c_i
    arbiter_parity,   // Phi_i = prod_{j>=i} (1 - 2*c_j)
};

FeatureKind feature_kind_for(PufKind kind);

Eigen::VectorXd feature_map(const Challenge& challenge, FeatureKind kind);

/// One row per challenge.
Eigen::MatrixXd feature_matrix(std::span<const Challenge> challenges, FeatureKind kind);

/// k arm weight vectors of an (n,k)-XOR linear threshold model.
///
/// Sign convention: the model score is t = prod_j (w_j . Phi) and a stored
/// response bit b maps to the sign target 1-2b, i.e. t < 0 predicts bit 1.
/// This matches the row comparator, where bit 1 corresponds to
/// sum_i s_i x_i < 0 in +-1 encoding.
struct XorModel {
    Eigen::MatrixXd arms;  // k x (n+1)

    int k() const { return static_cast<int>(arms.rows()); }
    int dim() const { return static_cast<int>(arms.cols()); }
};

/// Product of the arm scores.
double sign_score(const XorModel& model, const Eigen::VectorXd& features);

/// Model probability that the response bit is 1: logistic(-t).
double predict_probability(const XorModel& model, const Eigen::VectorXd& features);

/// Hard decision: 1 iff the sign score is negative.
int predict_bit(const XorModel& model, const Eigen::VectorXd& features);

/// Mean cross-entropy of the XOR logistic model over a batch, and its
/// gradient with respect to every arm weight
/// (dt/dw_j = prod_{m != j}(w_m . Phi) * Phi).
std::pair<double, Eigen::MatrixXd> loss_and_gradient(const XorModel& model,
                                                     const Eigen::MatrixXd& features,
                                                     const BitVector& labels);

/// Resilient-backpropagation settings (the RProp- variant: multiplicative
/// per-weight step adaptation with gradient zeroing on a sign flip).
struct RpropConfig {
    double eta_plus = 1.2;
    double eta_minus = 0.5;
    double delta_init = 0.1;
    double delta_min = 1e-6;
    double delta_max = 50.0;
    int max_epochs = 2000;
    int convergence_window = 50;  // epochs with no training-accuracy improvement
    int restarts = 10;

    void validate() const;
};

struct TrainReport {
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    int epochs_used = 0;
    int restart_index_chosen = 0;
    int training_set_size = 0;
    int k = 0;
    int n = 0;
};

/// Full-batch RProp over `restarts` independent Normal(0,1) initializations;
/// the model with the highest training accuracy wins (lowest restart index
/// on ties). `threads` parallelizes restarts; results do not depend on it.
std::pair<XorModel, TrainReport> train_rprop(const CrpSet& train, int k, const RpropConfig& cfg,
                                             RngStream& rng, int threads = 1);

/// Fraction of correctly predicted bits.
double evaluate(const XorModel& model, const CrpSet& test);

/// One sweep cell of the prediction-accuracy maps.
struct AttackCell {
    PufKind kind = PufKind::proposed;
    int n = 0;
    int k = 0;
    int train_size = 0;
    int trial = 0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    int epochs_used = 0;
};

struct AttackGrid {
    PufKind kind = PufKind::proposed;
    int n = 27;
    std::vector<int> k_values = {1, 2, 3};
    std::vector<int> train_sizes = {250, 500, 1000, 2000, 4000, 8000};
    int test_size = 10000;
    int trials = 1;
};

/// Instance parameters for proposed-PUF CRP generation.
struct ProposedTargetConfig {
    DeviceParams device;
    WriteConfig write;
    CapMismatchModel mismatch;
    SenseConfig sense;
    double vdd = 0.5;
};

/// Runs one attack cell end to end: builds a fresh target instance from the
/// cell-derived stream, draws train/test CRPs, trains and evaluates.
AttackCell run_attack_cell(const AttackGrid& grid, const ProposedTargetConfig& target,
                           const RpropConfig& cfg, int k, int train_size, int trial,
                           const RngStream& root, int threads = 1);

/// Accuracy map over (k, train_size, trial); rows ordered by the grid.
std::vector<AttackCell> accuracy_map(const AttackGrid& grid, const ProposedTargetConfig& target,
                                     const RpropConfig& cfg, const RngStream& root,
                                     int threads = 1);

/// Accuracy map over challenge lengths (same cell layout, n varying).
std::vector<AttackCell> length_sweep(const AttackGrid& grid, std::span<const int> n_values,
                                     const ProposedTargetConfig& target, const RpropConfig& cfg,
                                     const RngStream& root, int threads = 1);

/// CSV with header (kind,n,k,train_size,trial,train_acc,test_acc,epochs).
std::string attack_cells_csv(std::span<const AttackCell> cells);

}  // namespace ferropuf

#endif
