// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "ferropuf/experiments.hpp"
#include "ferropuf/metrics.hpp"

using namespace ferropuf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Protocol {
    ResponseMatrix responses;
    double wall_seconds = 0.0;
};

// 100 registrations x 100 random 27-bit challenges at the default config.
Protocol run_uniformity_protocol(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RngStream root(cfg.seed);
    const DeviceParams dp = cfg.effective_device_params();
    RngStream array_rng = root.child("array");
    PufArray array(1, cfg.array.n, dp, CapMismatchModel{cfg.array.sigma_c},
                   SenseConfig{cfg.array.offset_rel, cfg.array.read_gate}, cfg.array.vdd,
                   array_rng);
    RngStream ch_rng = root.child("challenges");
    const auto challenges = random_challenges(cfg.array.n, cfg.experiment.challenges, ch_rng);
    Protocol p;
    for (int g = 0; g < cfg.experiment.registrations; ++g) {
        RngStream reg = root.child("registration", static_cast<std::uint64_t>(g));
        array.register_cells(cfg.write, reg);
        p.responses.append(response_vector(array.row(0), challenges),
                           "registration-" + std::to_string(g));
    }
    p.wall_seconds = seconds_since(t0);
    return p;
}

char buffer[512];

template <typename... Args>
std::string format(const char* fmt, Args... args) {
    std::snprintf(buffer, sizeof(buffer), fmt, args...);
    return buffer;
}

}  // namespace

static Outcome criterion_1_uniformity(const Protocol& p) {
    const double hw = hamming_weight(p.responses);
    const bool pass = std::abs(hw - 0.5) <= 0.015 && p.wall_seconds < 30.0;
    return {pass, format("HW=%.4f (target 0.500+-0.015), %.1fs (<30s)", hw, p.wall_seconds)};
}

static Outcome criterion_2_entropy(const Protocol& p) {
    const Eigen::VectorXd h = bitwise_entropy(p.responses);
    int good = 0;
    for (int j = 0; j < h.size(); ++j) good += h[j] > 0.9;
    const double frac = static_cast<double>(good) / h.size();
    return {frac >= 0.95, format("%.0f%% of bit positions have entropy > 0.9 (need >= 95%%)",
                                 100.0 * frac)};
}

static Outcome criterion_3_uniqueness(const Protocol& p) {
    const HdStats hd = hd_inter(p.responses);
    const bool pass = std::abs(hd.mean - 0.5) <= 0.03 && hd.stddev >= 0.04 && hd.stddev <= 0.12;
    return {pass, format("HD_inter mean=%.4f (0.50+-0.03), std=%.4f ([0.04,0.12])", hd.mean,
                         hd.stddev)};
}

static Outcome criterion_4_reconfigurability(const ExperimentConfig& cfg) {
    RngStream root = RngStream(cfg.seed).child("c4");
    const DeviceParams dp = cfg.effective_device_params();
    const int reps = 40;
    int corr_ok = 0;
    double first_hd_mean = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        RngStream rep_rng = root.child("rep", static_cast<std::uint64_t>(rep));
        RngStream array_rng = rep_rng.child("array");
        PufArray array(1, cfg.array.n, dp, CapMismatchModel{cfg.array.sigma_c},
                       SenseConfig{cfg.array.offset_rel, cfg.array.read_gate}, cfg.array.vdd,
                       array_rng);
        RngStream ch_rng = rep_rng.child("challenges");
        const auto challenges = random_challenges(cfg.array.n, 100, ch_rng);
        ResponseMatrix rows;
        for (int r = 0; r < 10; ++r) {
            RngStream reg = rep_rng.child("reconfiguration", static_cast<std::uint64_t>(r));
            array.reconfigure(cfg.write, reg);
            rows.append(response_vector(array.row(0), challenges), "reconf-" + std::to_string(r));
        }
        if (rep == 0) first_hd_mean = hd_inter(rows).mean;
        corr_ok += correlation_matrix(rows).max_offdiag_abs < 0.3;
    }
    const double frac = static_cast<double>(corr_ok) / reps;
    const bool hd_pass = std::abs(first_hd_mean - 0.5) <= 0.04;
    const bool corr_pass = frac >= 0.95;
    return {hd_pass && corr_pass,
            format("reconfigure-HD mean=%.4f (0.50+-0.04); max|corr|<0.3 in %.0f%% of %d "
                   "repetitions (need >= 95%%)",
                   first_hd_mean, 100.0 * frac, reps)};
}

static Outcome criterion_5_reliability(const ExperimentConfig& cfg) {
    RngStream root = RngStream(cfg.seed).child("c5");
    const DeviceParams dp = cfg.effective_device_params();
    bool pass = true;
    std::ostringstream detail;
    int idx = 0;
    for (double sigma_c : {0.0, 0.01, 0.05}) {
        RngStream sub = root.child("sigma", static_cast<std::uint64_t>(idx++));
        RngStream array_rng = sub.child("array");
        PufArray array(1, cfg.array.n, dp, CapMismatchModel{sigma_c},
                       SenseConfig{0.005, cfg.array.read_gate}, cfg.array.vdd, array_rng);
        RngStream reg = sub.child("registration");
        array.register_cells(cfg.write, reg);
        RngStream ch_rng = sub.child("challenges");
        const auto challenges = random_challenges(cfg.array.n, 100, ch_rng);
        const double ber = reliability_bit_error_rate(array.row(0), challenges, 1000);
        const FlipReport flips_a = flip_chance(array.row(0), challenges);
        const FlipReport flips_b = flip_chance(array.row(0), challenges);
        const bool ok = ber == 0.0 && flips_a.flipped_challenges == flips_b.flipped_challenges;
        pass = pass && ok;
        detail << "sigma_c=" << sigma_c << ": BER=" << ber << " flips=" << flips_a.fraction
               << (ok ? " " : " (FAIL) ");
    }
    return {pass, detail.str() + "(need BER exactly 0, static flip sets)"};
}

static Outcome criterion_6_robustness(const ExperimentConfig& cfg, const fs::path& out_dir) {
    bool pass = true;
    std::ostringstream detail;
    for (const std::string axis : {"pulse", "temperature", "size"}) {
        const auto rows = cmd_sweep(cfg, axis, out_dir / ("sweep_" + axis));
        for (const auto& row : rows) {
            if (row.statistic != "hd_inter_mean") continue;
            const bool ok = std::abs(row.result - 0.5) <= 0.03;
            pass = pass && ok;
            detail << axis << "=" << row.value << ": HD=" << format("%.3f", row.result)
                   << (ok ? " " : " (FAIL) ");
        }
    }
    return {pass, detail.str() + "(all need 0.50+-0.03)"};
}

static Outcome criterion_7_challenge_length(ExperimentConfig cfg, const fs::path& out_dir) {
    cfg.array.sigma_c = 0.05;  // fixed mismatch for the length scaling check
    const auto rows = cmd_sweep(cfg, "challenge_length", out_dir / "sweep_length");
    std::vector<double> flips;
    bool hd_pass = true;
    std::ostringstream detail;
    for (const auto& row : rows) {
        if (row.statistic == "flip_chance") {
            flips.push_back(row.result);
            detail << "N=" << row.value << ": flip=" << format("%.4f", row.result) << " ";
        } else if (row.statistic == "hd_inter_mean") {
            hd_pass = hd_pass && std::abs(row.result - 0.5) <= 0.03;
        }
    }
    bool monotone = true;
    for (std::size_t i = 1; i < flips.size(); ++i) monotone = monotone && flips[i] >= flips[i - 1];
    return {monotone && hd_pass,
            detail.str() + format("(flip non-decreasing: %s, HD within 0.50+-0.03: %s)",
                                  monotone ? "yes" : "no", hd_pass ? "yes" : "no")};
}

static Outcome criterion_8_attack(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RngStream root = RngStream(cfg.seed).child("c8");

    ProposedTargetConfig target;
    target.device = cfg.effective_device_params();
    target.write = cfg.write;
    target.mismatch = CapMismatchModel{cfg.array.sigma_c};
    target.sense = SenseConfig{cfg.array.offset_rel, cfg.array.read_gate};
    target.vdd = cfg.array.vdd;

    const std::vector<int> sizes = {64, 128, 256, 512, 1024, 2048, 4096};
    std::map<std::pair<std::string, int>, int> threshold90;
    bool k1_95 = true;
    std::ostringstream detail;
    bool pass = true;

    for (PufKind kind : {PufKind::proposed, PufKind::arbiter}) {
        for (int k : {1, 2, 3}) {
            AttackGrid grid;
            grid.kind = kind;
            grid.n = 27;
            grid.test_size = 10000;
            int thr = -1;
            bool reached95 = false;
            for (int size : sizes) {
                const AttackCell cell =
                    run_attack_cell(grid, target, cfg.attack.rprop, k, size, 0, root, 1);
                if (thr < 0 && cell.test_accuracy > 0.90) thr = size;
                if (cell.test_accuracy > 0.95) {
                    reached95 = true;
                    break;
                }
            }
            threshold90[{to_string(kind), k}] = thr;
            if (k == 1) k1_95 = k1_95 && reached95 && thr > 0 && thr <= 5000;
            detail << to_string(kind) << " k=" << k << ": thr90=" << thr << " ";
            pass = pass && thr > 0;
        }
    }

    for (const std::string kind : {"proposed", "arbiter"}) {
        const int t1 = threshold90[{kind, 1}];
        const int t2 = threshold90[{kind, 2}];
        const int t3 = threshold90[{kind, 3}];
        pass = pass && t1 > 0 && t2 > t1 && t3 > t2;
    }
    for (int k : {1, 2, 3}) {
        const int tp = threshold90[{"proposed", k}];
        const int ta = threshold90[{"arbiter", k}];
        if (tp > 0 && ta > 0) {
            const double ratio = tp > ta ? static_cast<double>(tp) / ta
                                         : static_cast<double>(ta) / tp;
            pass = pass && ratio <= 4.0;
        } else {
            pass = false;
        }
    }
    pass = pass && k1_95;
    const double wall = seconds_since(t0);
    pass = pass && wall < 600.0;
    return {pass, detail.str() + format("k=1>95%%@<=5000: %s; %.0fs (<600s)",
                                        k1_95 ? "yes" : "no", wall)};
}

static Outcome criterion_9_properties(const ExperimentConfig& cfg, const fs::path& out_dir) {
    bool pass = true;
    std::ostringstream detail;

    // gradient vs central finite differences
    {
        RngStream rng(901);
        RngStream inst = rng.child("instance");
        const ArbiterPuf puf(8, 3, inst);
        RngStream gen = rng.child("crps");
        const CrpSet set = crp_generate(puf, 80, gen);
        const Eigen::MatrixXd phi = feature_matrix(set.challenges, FeatureKind::arbiter_parity);
        double worst = 0.0;
        for (int point = 0; point < 20; ++point) {
            XorModel model;
            model.arms.resize(3, 9);
            for (int j = 0; j < 3; ++j)
                for (int i = 0; i < 9; ++i) model.arms(j, i) = rng.normal(0.0, 1.0);
            const auto [loss, grad] = loss_and_gradient(model, phi, set.responses);
            (void)loss;
            const double h = 1e-5;
            for (int j = 0; j < 3; ++j) {
                for (int i = 0; i < 9; i += 2) {
                    XorModel up = model;
                    XorModel dn = model;
                    up.arms(j, i) += h;
                    dn.arms(j, i) -= h;
                    const double fd = (loss_and_gradient(up, phi, set.responses).first -
                                       loss_and_gradient(dn, phi, set.responses).first) /
                                      (2.0 * h);
                    worst = std::max(worst, std::abs(fd - grad(j, i)) /
                                                std::max(1.0, std::abs(grad(j, i))));
                }
            }
        }
        pass = pass && worst < 1e-5;
        detail << "grad-FD max rel err=" << format("%.1e", worst) << " ";
    }

    // XOR table of the split cell, exhaustive
    {
        DeviceParams params;
        RngStream rng(902);
        bool ok = true;
        for (int state = 0; state <= 1; ++state) {
            PufCell cell(params, rng);
            if (state == 0) {
                cell.t1.erase();
                cell.t2.program_strong();
            } else {
                cell.t1.program_strong();
                cell.t2.erase();
            }
            cell.state = state;
            for (int c = 0; c <= 1; ++c) {
                const double vx = cell_vx(cell, c, 0.5, 0.9);
                ok = ok && std::abs(vx - 0.5 * (state ^ c)) < 0.005;
            }
        }
        pass = pass && ok;
        detail << "XOR-table: " << (ok ? "ok " : "FAIL ");
    }

    // linear-model equivalence, brute force for odd N <= 9
    {
        bool ok = true;
        for (int n : {3, 5, 7, 9}) {
            RngStream rng(903 + static_cast<std::uint64_t>(n));
            const Challenge states = random_challenge(n, rng);
            for (unsigned cm = 0; cm < (1u << n); ++cm) {
                Challenge c(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = (cm >> i) & 1u;
                int dot = 0;
                for (int i = 0; i < n; ++i)
                    dot += (1 - 2 * states[static_cast<std::size_t>(i)]) *
                           (1 - 2 * c[static_cast<std::size_t>(i)]);
                ok = ok && ground_truth_bit(BitVector(states.begin(), states.end()), c) ==
                               (dot < 0 ? 1 : 0);
            }
        }
        pass = pass && ok;
        detail << "linear-equivalence: " << (ok ? "ok " : "FAIL ");
    }

    // parity-transform hand values
    {
        Challenge c = {1, 0, 1};
        const Eigen::VectorXd phi = parity_transform(c);
        const bool ok = phi.size() == 4 && phi[0] == 1.0 && phi[1] == -1.0 && phi[2] == -1.0 &&
                        phi[3] == 1.0;
        pass = pass && ok;
        detail << "parity: " << (ok ? "ok " : "FAIL ");
    }

    // determinism across parallelism levels and runs
    {
        ProposedTargetConfig target;
        target.device = cfg.effective_device_params();
        target.write = cfg.write;
        target.mismatch = CapMismatchModel{cfg.array.sigma_c};
        target.sense = SenseConfig{cfg.array.offset_rel, cfg.array.read_gate};
        target.vdd = cfg.array.vdd;
        AttackGrid grid;
        grid.kind = PufKind::arbiter;
        grid.n = 10;
        grid.test_size = 500;
        RpropConfig rp = cfg.attack.rprop;
        rp.max_epochs = 300;
        const AttackCell a = run_attack_cell(grid, target, rp, 2, 200, 0, RngStream(904), 1);
        const AttackCell b = run_attack_cell(grid, target, rp, 2, 200, 0, RngStream(904), 4);
        const std::vector<AttackCell> ca = {a};
        const std::vector<AttackCell> cb = {b};
        bool ok = attack_cells_csv(ca) == attack_cells_csv(cb);

        ExperimentConfig small = cfg;
        small.experiment.registrations = 3;
        small.experiment.challenges = 10;
        cmd_register(small, out_dir / "det_a");
        cmd_register(small, out_dir / "det_b");
        auto slurp = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream buf;
            buf << in.rdbuf();
            return buf.str();
        };
        ok = ok && slurp(out_dir / "det_a" / "state_pattern.csv") ==
                       slurp(out_dir / "det_b" / "state_pattern.csv");
        pass = pass && ok;
        detail << "determinism: " << (ok ? "ok" : "FAIL");
    }

    return {pass, detail.str()};
}

int main() {
    ExperimentConfig cfg;  // spec defaults
    cfg.seed = 1;

    const fs::path out_dir = fs::temp_directory_path() / "ferropuf_acceptance";
    fs::remove_all(out_dir);
    fs::create_directories(out_dir);

    const Protocol protocol = run_uniformity_protocol(cfg);

    std::vector<std::pair<std::string, Outcome>> results;
    results.emplace_back("1 uniformity", criterion_1_uniformity(protocol));
    results.emplace_back("2 bitwise entropy", criterion_2_entropy(protocol));
    results.emplace_back("3 uniqueness", criterion_3_uniqueness(protocol));
    results.emplace_back("4 reconfigurability", criterion_4_reconfigurability(cfg));
    results.emplace_back("5 reliability", criterion_5_reliability(cfg));
    results.emplace_back("6 robustness sweeps", criterion_6_robustness(cfg, out_dir));
    results.emplace_back("7 challenge-length scaling", criterion_7_challenge_length(cfg, out_dir));
    results.emplace_back("8 attack equivalence", criterion_8_attack(cfg));
    results.emplace_back("9 property suites", criterion_9_properties(cfg, out_dir));

    int failures = 0;
    for (const auto& [name, outcome] : results) {
        std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << "criterion " << name << ": "
                  << outcome.detail << "\n";
        failures += !outcome.pass;
    }
    fs::remove_all(out_dir);
    return failures;
}
