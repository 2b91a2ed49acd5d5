#include "ferropuf/attack.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ferropuf {

FeatureKind feature_kind_for(PufKind kind) {
    return kind == PufKind::proposed ? FeatureKind::proposed_direct : FeatureKind::arbiter_parity;
}

Eigen::VectorXd feature_map(const Challenge& challenge, FeatureKind kind) {
    const int n = static_cast<int>(challenge.size());
    if (kind == FeatureKind::arbiter_parity) return parity_transform(challenge);
    Eigen::VectorXd x(n + 1);
    for (int i = 0; i < n; ++i) x[i] = 1.0 - 2.0 * challenge[static_cast<std::size_t>(i)];
    x[n] = 1.0;
    return x;
}

Eigen::MatrixXd feature_matrix(std::span<const Challenge> challenges, FeatureKind kind) {
    if (challenges.empty()) throw std::invalid_argument("empty challenge list");
    const int n = static_cast<int>(challenges.front().size());
    Eigen::MatrixXd phi(static_cast<int>(challenges.size()), n + 1);
    for (std::size_t i = 0; i < challenges.size(); ++i)
        phi.row(static_cast<int>(i)) = feature_map(challenges[i], kind).transpose();
    return phi;
}

double sign_score(const XorModel& model, const Eigen::VectorXd& features) {
    if (features.size() != model.dim()) throw std::invalid_argument("feature dimension mismatch");
    double t = 1.0;
    for (int j = 0; j < model.k(); ++j) t *= model.arms.row(j).dot(features);
    return t;
}

double predict_probability(const XorModel& model, const Eigen::VectorXd& features) {
    return logistic(-sign_score(model, features));
}

int predict_bit(const XorModel& model, const Eigen::VectorXd& features) {
    return sign_score(model, features) < 0.0 ? 1 : 0;
}

void RpropConfig::validate() const {
    if (!(0.0 < eta_minus && eta_minus < 1.0 && 1.0 < eta_plus))
        throw std::invalid_argument("rprop: need 0 < eta_minus < 1 < eta_plus");
    if (!(0.0 < delta_min && delta_min < delta_init && delta_init < delta_max))
        throw std::invalid_argument("rprop: need delta_min < delta_init < delta_max");
    if (max_epochs < 1 || convergence_window < 1 || restarts < 1)
        throw std::invalid_argument("rprop: epochs, window and restarts must be >= 1");
}

namespace {

inline double softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

// Per-arm scores, total product and leave-one-out products for a batch.
struct BatchScores {
    Eigen::ArrayXXd loo;   // B x k, prod_{m != j} d_m
    Eigen::ArrayXd total;  // B
};

BatchScores batch_scores(const Eigen::MatrixXd& arm_dots) {
    const int b = static_cast<int>(arm_dots.rows());
    const int k = static_cast<int>(arm_dots.cols());
    Eigen::ArrayXXd prefix = Eigen::ArrayXXd::Ones(b, k + 1);
    Eigen::ArrayXXd suffix = Eigen::ArrayXXd::Ones(b, k + 1);
    for (int j = 0; j < k; ++j) prefix.col(j + 1) = prefix.col(j) * arm_dots.col(j).array();
    for (int j = k - 1; j >= 0; --j) suffix.col(j) = suffix.col(j + 1) * arm_dots.col(j).array();
    BatchScores s;
    s.loo.resize(b, k);
    for (int j = 0; j < k; ++j) s.loo.col(j) = prefix.col(j) * suffix.col(j + 1);
    s.total = prefix.col(k);
    return s;
}

// Stored bits map to sign targets 1-2b; p(sign=+1) = logistic(t), so the
// encoded 0/1 label for the logistic loss is 1-b.
Eigen::ArrayXd encoded_labels(const BitVector& bits) {
    Eigen::ArrayXd y(static_cast<int>(bits.size()));
    for (std::size_t i = 0; i < bits.size(); ++i) y[static_cast<int>(i)] = 1.0 - bits[i];
    return y;
}

double training_accuracy(const Eigen::ArrayXd& total, const BitVector& labels) {
    int correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int pred = total[static_cast<int>(i)] < 0.0 ? 1 : 0;
        correct += pred == labels[i];
    }
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

struct RestartResult {
    Eigen::MatrixXd weights;
    double train_accuracy = -1.0;
    int epochs_used = 0;
};

RestartResult run_restart(const Eigen::MatrixXd& phi, const BitVector& labels,
                          const Eigen::ArrayXd& yenc, int k, const RpropConfig& cfg,
                          RngStream rng) {
    const int dim = static_cast<int>(phi.cols());
    const double batch = static_cast<double>(phi.rows());

    Eigen::MatrixXd w(k, dim);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < dim; ++i) w(j, i) = rng.normal(0.0, 1.0);

    Eigen::MatrixXd step = Eigen::MatrixXd::Constant(k, dim, cfg.delta_init);
    Eigen::MatrixXd grad_prev = Eigen::MatrixXd::Zero(k, dim);

    RestartResult result;
    result.weights = w;
    int since_improvement = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const Eigen::MatrixXd arm_dots = phi * w.transpose();
        const BatchScores scores = batch_scores(arm_dots);

        const Eigen::ArrayXd residual =
            scores.total.unaryExpr([](double t) { return logistic(t); }) - yenc;
        Eigen::MatrixXd grad(k, dim);
        for (int j = 0; j < k; ++j)
            grad.row(j) = (phi.transpose() * (residual * scores.loo.col(j)).matrix()).transpose() / batch;

        // RProp-: grow the step on a stable gradient sign, shrink and zero
        // the gradient on a flip, then move each weight by its own step.
        for (int j = 0; j < k; ++j) {
            for (int i = 0; i < dim; ++i) {
                const double s = grad(j, i) * grad_prev(j, i);
                if (s > 0.0) {
                    step(j, i) = std::min(step(j, i) * cfg.eta_plus, cfg.delta_max);
                } else if (s < 0.0) {
                    step(j, i) = std::max(step(j, i) * cfg.eta_minus, cfg.delta_min);
                    grad(j, i) = 0.0;
                }
                if (grad(j, i) > 0.0) w(j, i) -= step(j, i);
                else if (grad(j, i) < 0.0) w(j, i) += step(j, i);
            }
        }
        grad_prev = grad;

        const double acc = training_accuracy(scores.total, labels);
        result.epochs_used = epoch;
        if (acc > result.train_accuracy) {
            result.train_accuracy = acc;
            result.weights = w;
            since_improvement = 0;
        } else if (++since_improvement >= cfg.convergence_window) {
            break;
        }
    }
    return result;
}

}  // namespace

std::pair<double, Eigen::MatrixXd> loss_and_gradient(const XorModel& model,
                                                     const Eigen::MatrixXd& features,
                                                     const BitVector& labels) {
    if (static_cast<std::size_t>(features.rows()) != labels.size())
        throw std::invalid_argument("feature/label count mismatch");
    if (features.cols() != model.dim()) throw std::invalid_argument("feature dimension mismatch");
    const double batch = static_cast<double>(features.rows());
    const int k = model.k();

    const Eigen::MatrixXd arm_dots = features * model.arms.transpose();
    const BatchScores scores = batch_scores(arm_dots);
    const Eigen::ArrayXd yenc = encoded_labels(labels);

    // Cross-entropy: yenc*softplus(-t) + (1-yenc)*softplus(t), averaged.
    double loss = 0.0;
    for (int i = 0; i < scores.total.size(); ++i) {
        const double t = scores.total[i];
        loss += yenc[i] * softplus(-t) + (1.0 - yenc[i]) * softplus(t);
    }
    loss /= batch;

    const Eigen::ArrayXd residual =
        scores.total.unaryExpr([](double t) { return logistic(t); }) - yenc;
    Eigen::MatrixXd grad(k, model.dim());
    for (int j = 0; j < k; ++j)
        grad.row(j) =
            (features.transpose() * (residual * scores.loo.col(j)).matrix()).transpose() / batch;
    return {loss, grad};
}

std::pair<XorModel, TrainReport> train_rprop(const CrpSet& train, int k, const RpropConfig& cfg,
                                             RngStream& rng, int threads) {
    cfg.validate();
    if (train.size() < 1) throw std::invalid_argument("empty training set");
    if (k < 1) throw std::invalid_argument("k must be >= 1");

    const Eigen::MatrixXd phi = feature_matrix(train.challenges, feature_kind_for(train.kind));
    const Eigen::ArrayXd yenc = encoded_labels(train.responses);

    std::vector<RestartResult> results(static_cast<std::size_t>(cfg.restarts));
    const int workers = std::max(1, std::min(threads, cfg.restarts));
    auto work = [&](int tid) {
        for (int r = tid; r < cfg.restarts; r += workers) {
            results[static_cast<std::size_t>(r)] =
                run_restart(phi, train.responses, yenc, k, cfg,
                            rng.child("restart", static_cast<std::uint64_t>(r)));
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int tid = 0; tid < workers; ++tid) pool.emplace_back(work, tid);
        for (auto& t : pool) t.join();
    }

    int best = 0;
    for (int r = 1; r < cfg.restarts; ++r)
        if (results[static_cast<std::size_t>(r)].train_accuracy >
            results[static_cast<std::size_t>(best)].train_accuracy)
            best = r;

    XorModel model{results[static_cast<std::size_t>(best)].weights};
    TrainReport report;
    report.train_accuracy = results[static_cast<std::size_t>(best)].train_accuracy;
    report.epochs_used = results[static_cast<std::size_t>(best)].epochs_used;
    report.restart_index_chosen = best;
    report.training_set_size = train.size();
    report.k = k;
    report.n = train.n;
    return {model, report};
}

double evaluate(const XorModel& model, const CrpSet& test) {
    if (test.size() < 1) throw std::invalid_argument("empty test set");
    const Eigen::MatrixXd phi = feature_matrix(test.challenges, feature_kind_for(test.kind));
    const Eigen::MatrixXd arm_dots = phi * model.arms.transpose();
    const BatchScores scores = batch_scores(arm_dots);
    return training_accuracy(scores.total, test.responses);
}

AttackCell run_attack_cell(const AttackGrid& grid, const ProposedTargetConfig& target,
                           const RpropConfig& cfg, int k, int train_size, int trial,
                           const RngStream& root, int threads) {
    RngStream cell = root.child("attack-cell")
                         .child(to_string(grid.kind))
                         .child("n", static_cast<std::uint64_t>(grid.n))
                         .child("k", static_cast<std::uint64_t>(k))
                         .child("size", static_cast<std::uint64_t>(train_size))
                         .child("trial", static_cast<std::uint64_t>(trial));

    CrpSet train_set;
    CrpSet test_set;
    RngStream train_rng = cell.child("train-crps");
    RngStream test_rng = cell.child("test-crps");
    if (grid.kind == PufKind::arbiter) {
        RngStream inst = cell.child("instance");
        const ArbiterPuf puf(grid.n, k, inst);
        train_set = crp_generate(puf, train_size, train_rng);
        test_set = crp_generate(puf, grid.test_size, test_rng);
    } else {
        RngStream inst = cell.child("instance");
        std::vector<PufRow> rows;
        rows.reserve(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) {
            RngStream row_rng = inst.child("row", static_cast<std::uint64_t>(j));
            rows.emplace_back(grid.n, target.device, target.mismatch, target.sense, target.vdd,
                              row_rng);
            RngStream reg_rng = inst.child("register", static_cast<std::uint64_t>(j));
            rows.back().register_cells(target.write, reg_rng);
        }
        std::vector<const PufRow*> ptrs;
        for (const auto& row : rows) ptrs.push_back(&row);
        train_set = crp_generate(std::span<const PufRow* const>(ptrs), train_size, train_rng);
        test_set = crp_generate(std::span<const PufRow* const>(ptrs), grid.test_size, test_rng);
    }

    RngStream trainer_rng = cell.child("trainer");
    auto [model, report] = train_rprop(train_set, k, cfg, trainer_rng, threads);

    AttackCell out;
    out.kind = grid.kind;
    out.n = grid.n;
    out.k = k;
    out.train_size = train_size;
    out.trial = trial;
    out.train_accuracy = report.train_accuracy;
    out.test_accuracy = evaluate(model, test_set);
    out.epochs_used = report.epochs_used;
    return out;
}

std::vector<AttackCell> accuracy_map(const AttackGrid& grid, const ProposedTargetConfig& target,
                                     const RpropConfig& cfg, const RngStream& root, int threads) {
    if (grid.k_values.empty() || grid.train_sizes.empty())
        throw std::invalid_argument("attack grid must be nonempty");
    for (int k : grid.k_values)
        if (k < 1) throw std::invalid_argument("attack grid: k must be >= 1");
    std::vector<AttackCell> cells;
    for (int k : grid.k_values)
        for (int size : grid.train_sizes)
            for (int trial = 0; trial < grid.trials; ++trial)
                cells.push_back(run_attack_cell(grid, target, cfg, k, size, trial, root, threads));
    return cells;
}

std::vector<AttackCell> length_sweep(const AttackGrid& grid, std::span<const int> n_values,
                                     const ProposedTargetConfig& target, const RpropConfig& cfg,
                                     const RngStream& root, int threads) {
    if (n_values.empty()) throw std::invalid_argument("length sweep needs n values");
    std::vector<AttackCell> cells;
    for (int n : n_values) {
        AttackGrid g = grid;
        g.n = n;
        auto part = accuracy_map(g, target, cfg, root, threads);
        cells.insert(cells.end(), part.begin(), part.end());
    }
    return cells;
}

std::string attack_cells_csv(std::span<const AttackCell> cells) {
    std::ostringstream out;
    out.precision(6);
    out << "kind,n,k,train_size,trial,train_acc,test_acc,epochs\n";
    for (const auto& c : cells) {
        out << to_string(c.kind) << ',' << c.n << ',' << c.k << ',' << c.train_size << ','
            << c.trial << ',' << c.train_accuracy << ',' << c.test_accuracy << ','
            << c.epochs_used << "\n";
    }
    return out.str();
}

}  // namespace ferropuf
