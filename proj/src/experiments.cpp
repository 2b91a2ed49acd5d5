#include "ferropuf/experiments.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ferropuf/errors.hpp"

namespace ferropuf {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const ExperimentConfig& cfg, const RunOutputs& outputs,
                    double wall_clock_seconds) {
    nlohmann::json j;
    j["command"] = command;
    j["tool_version"] = kToolVersion;
    j["seed"] = cfg.seed;
    j["config"] = cfg.to_text();
    j["wall_clock_seconds"] = wall_clock_seconds;
    std::vector<std::string> names;
    for (const auto& f : outputs.files) names.push_back(f.filename().string());
    j["outputs"] = names;
    write_file_atomic(out_dir / "manifest.json", j.dump(2) + "\n");
}

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

PufArray build_array(const ExperimentConfig& cfg, const RngStream& root, int rows, int n) {
    const DeviceParams dp = cfg.effective_device_params();
    const CapMismatchModel mismatch{cfg.array.sigma_c};
    const SenseConfig sense{cfg.array.offset_rel, cfg.array.read_gate};
    RngStream array_rng = root.child("array");
    return PufArray(rows, n, dp, mismatch, sense, cfg.array.vdd, array_rng);
}

std::string registration_dump_csv(const std::vector<RegistrationRecord>& records) {
    std::ostringstream out;
    out.precision(10);
    out << "cell_index,vx1,vx2,delta_vx,state\n";
    int cell_index = 0;
    for (const auto& rec : records) {
        for (int i = 0; i < rec.vx_cycle1.size(); ++i, ++cell_index) {
            out << cell_index << ',' << rec.vx_cycle1[i] << ',' << rec.vx_cycle2[i] << ','
                << rec.delta_vx[i] << ',' << static_cast<int>(rec.states[static_cast<std::size_t>(i)])
                << "\n";
        }
    }
    return out.str();
}

std::string bits_to_string(const BitVector& bits) {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i) s[i] = static_cast<char>('0' + bits[i]);
    return s;
}

std::string histogram_csv(const HdStats& stats) {
    std::ostringstream out;
    out.precision(10);
    out << "bin_low,bin_high,count\n";
    for (int b = 0; b < stats.bins; ++b) {
        out << static_cast<double>(b) / stats.bins << ','
            << static_cast<double>(b + 1) / stats.bins << ',' << stats.histogram[b] << "\n";
    }
    return out.str();
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
    std::ostringstream out;
    out.precision(10);
    for (int a = 0; a < m.rows(); ++a) {
        for (int b = 0; b < m.cols(); ++b) {
            if (b) out << ',';
            out << m(a, b);
        }
        out << "\n";
    }
    return out.str();
}

struct ProtocolResult {
    MetricsReport report;
    HdStats hd;
    Eigen::MatrixXd reconf_corr;
};

// The shared measurement protocol: `registrations` complete registrations of
// the array answering one fixed challenge set (the across-registrations
// uniqueness design), then `reconfigurations` further cycles for the
// reconfigurability statistics, then reliability and flip analysis on the
// final frozen state.
ProtocolResult run_protocol(const ExperimentConfig& cfg, const RngStream& root, int rows, int n,
                            int registrations, int reconfigurations, int challenge_count,
                            int repeats) {
    ProtocolResult out;
    PufArray array = build_array(cfg, root, rows, n);
    RngStream ch_rng = root.child("challenges");
    const std::vector<Challenge> challenges = random_challenges(n, challenge_count, ch_rng);

    int tie_count = 0;
    ResponseMatrix responses;
    double flip_sum = 0.0;
    int flip_rows = 0;
    for (int g = 0; g < registrations; ++g) {
        RngStream reg_rng = root.child("registration", static_cast<std::uint64_t>(g));
        array.register_cells(cfg.write, reg_rng);
        responses.append(response_vector(array.row(0), challenges, &tie_count),
                         "registration-" + std::to_string(g));
        for (int m = 0; m < array.rows(); ++m) {
            flip_sum += flip_chance(array.row(m), challenges).fraction;
            ++flip_rows;
        }
    }

    std::vector<ResponseMatrix> reconf_sets;
    for (int r = 0; r < reconfigurations; ++r) {
        RngStream rec_rng = root.child("reconfiguration", static_cast<std::uint64_t>(r));
        array.reconfigure(cfg.write, rec_rng);
        ResponseMatrix snapshot;
        for (int m = 0; m < array.rows(); ++m) {
            snapshot.append(response_vector(array.row(m), challenges, &tie_count),
                            "reconf-" + std::to_string(r) + "-row-" + std::to_string(m));
        }
        reconf_sets.push_back(std::move(snapshot));
    }
    ResponseMatrix reconf_row0;
    for (std::size_t r = 0; r < reconf_sets.size(); ++r) {
        BitVector bits(static_cast<std::size_t>(reconf_sets[r].bits.cols()));
        for (int j = 0; j < reconf_sets[r].bits.cols(); ++j)
            bits[static_cast<std::size_t>(j)] = reconf_sets[r].bits(0, j);
        reconf_row0.append(bits, "reconf-" + std::to_string(r));
    }

    MetricsReport& rep = out.report;
    rep.hw = hamming_weight(responses);
    rep.entropy_per_bit = bitwise_entropy(responses);
    out.hd = hd_inter(responses, cfg.experiment.histogram_bins);
    rep.hd_inter_mean = out.hd.mean;
    rep.hd_inter_std = out.hd.stddev;
    std::tie(rep.hd_reconf_mean, rep.hd_reconf_std) =
        hd_reconfigure(std::span<const ResponseMatrix>(reconf_sets));
    const CorrelationSummary corr = correlation_matrix(reconf_row0);
    rep.corr_max_offdiag = corr.max_offdiag_abs;
    rep.corr_degenerate_rows = corr.degenerate_rows;
    out.reconf_corr = corr.matrix;
    rep.reliability_bit_error_rate =
        reliability_bit_error_rate(array.row(0), challenges, repeats);
    rep.flip_chance = flip_rows > 0 ? flip_sum / flip_rows : 0.0;
    rep.tie_count = tie_count;
    rep.hd_mode = "across-registrations";
    return out;
}

}  // namespace

void cmd_register(const ExperimentConfig& cfg, const fs::path& out_dir) {
    Timer timer;
    fs::create_directories(out_dir);
    RngStream root(cfg.seed);
    PufArray array = build_array(cfg, root, cfg.array.m, cfg.array.n);

    RunOutputs outputs;
    std::ostringstream pattern;
    pattern << "registration,row,states\n";
    for (int g = 0; g < cfg.experiment.registrations; ++g) {
        RngStream reg_rng = root.child("registration", static_cast<std::uint64_t>(g));
        const auto records = array.register_cells(cfg.write, reg_rng);
        std::ostringstream name;
        name << "registration_" << std::setw(3) << std::setfill('0') << g << ".csv";
        const fs::path dump = out_dir / name.str();
        write_file_atomic(dump, registration_dump_csv(records));
        outputs.add(dump);
        for (std::size_t m = 0; m < records.size(); ++m)
            pattern << g << ',' << m << ',' << bits_to_string(records[m].states) << "\n";
    }
    const fs::path pattern_path = out_dir / "state_pattern.csv";
    write_file_atomic(pattern_path, pattern.str());
    outputs.add(pattern_path);
    write_manifest(out_dir, "register", cfg, outputs, timer.seconds());
}

MetricsReport cmd_metrics(const ExperimentConfig& cfg, const fs::path& out_dir) {
    Timer timer;
    fs::create_directories(out_dir);
    RngStream root(cfg.seed);
    const ProtocolResult result =
        run_protocol(cfg, root, cfg.array.m, cfg.array.n, cfg.experiment.registrations,
                     cfg.experiment.reconfigurations, cfg.experiment.challenges,
                     cfg.experiment.repeats);

    RunOutputs outputs;
    const fs::path txt = out_dir / "metrics_report.txt";
    write_file_atomic(txt, result.report.to_key_value());
    outputs.add(txt);
    const fs::path json = out_dir / "metrics_report.json";
    write_file_atomic(json, result.report.to_json());
    outputs.add(json);
    const fs::path hist = out_dir / "hd_inter_hist.csv";
    write_file_atomic(hist, histogram_csv(result.hd));
    outputs.add(hist);
    const fs::path corr = out_dir / "reconf_correlation.csv";
    write_file_atomic(corr, matrix_csv(result.reconf_corr));
    outputs.add(corr);
    write_manifest(out_dir, "metrics", cfg, outputs, timer.seconds());
    return result.report;
}

std::vector<SweepRow> cmd_sweep(const ExperimentConfig& cfg, const std::string& axis,
                                const fs::path& out_dir) {
    Timer timer;
    fs::create_directories(out_dir);

    struct Point {
        std::string value;
        ExperimentConfig cfg;
    };
    std::vector<Point> points;
    auto fmt = [](double x) {
        std::ostringstream s;
        s.precision(10);
        s << x;
        return s.str();
    };
    if (axis == "pulse") {
        for (double v : cfg.experiment.sweep_pulses) {
            Point p{fmt(v), cfg};
            p.cfg.write.pulse_amplitude = v;
            points.push_back(std::move(p));
        }
    } else if (axis == "temperature") {
        for (double v : cfg.experiment.sweep_temperatures) {
            Point p{fmt(v), cfg};
            p.cfg.write.temperature_c = v;
            points.push_back(std::move(p));
        }
    } else if (axis == "size") {
        for (const std::string& v : cfg.experiment.sweep_sizes) {
            Point p{v, cfg};
            p.cfg.size_profile = v;
            points.push_back(std::move(p));
        }
    } else if (axis == "sigma_c") {
        for (double v : cfg.experiment.sweep_sigma_c) {
            Point p{fmt(v), cfg};
            p.cfg.array.sigma_c = v;
            points.push_back(std::move(p));
        }
    } else if (axis == "challenge_length") {
        for (int v : cfg.experiment.sweep_lengths) {
            Point p{std::to_string(v), cfg};
            p.cfg.array.n = v;
            points.push_back(std::move(p));
        }
    } else {
        throw ConfigError("unknown sweep axis '" + axis + "'");
    }
    if (points.empty()) throw ConfigError("sweep axis '" + axis + "' has no values");

    RngStream root(cfg.seed);
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& point = points[i];
        RngStream point_rng = root.child("sweep-" + axis, static_cast<std::uint64_t>(i));
        const ProtocolResult r = run_protocol(
            point.cfg, point_rng, cfg.experiment.sweep_rows, point.cfg.array.n,
            cfg.experiment.sweep_registrations, cfg.experiment.reconfigurations,
            cfg.experiment.sweep_challenges, std::min(cfg.experiment.repeats, 100));
        const MetricsReport& m = r.report;
        auto add = [&](const std::string& stat, double value) {
            rows.push_back({axis, point.value, stat, value});
        };
        add("hw", m.hw);
        add("entropy_min", m.entropy_per_bit.minCoeff());
        add("entropy_mean", m.entropy_per_bit.mean());
        add("hd_inter_mean", m.hd_inter_mean);
        add("hd_inter_std", m.hd_inter_std);
        add("hd_reconf_mean", m.hd_reconf_mean);
        add("hd_reconf_std", m.hd_reconf_std);
        add("corr_max_offdiag", m.corr_max_offdiag);
        add("reliability_bit_error_rate", m.reliability_bit_error_rate);
        add("flip_chance", m.flip_chance);
        add("tie_count", static_cast<double>(m.tie_count));
    }

    std::ostringstream csv;
    csv.precision(10);
    csv << "axis,value,statistic,result\n";
    for (const auto& row : rows)
        csv << row.axis << ',' << row.value << ',' << row.statistic << ',' << row.result << "\n";
    RunOutputs outputs;
    const fs::path path = out_dir / ("sweep_" + axis + ".csv");
    write_file_atomic(path, csv.str());
    outputs.add(path);
    write_manifest(out_dir, "sweep " + axis, cfg, outputs, timer.seconds());
    return rows;
}

namespace {

fs::path cell_fragment_path(const fs::path& dir, const AttackCell& cell) {
    std::ostringstream name;
    name << to_string(cell.kind) << "_n" << cell.n << "_k" << cell.k << "_s" << cell.train_size
         << "_t" << cell.trial << ".csv";
    return dir / name.str();
}

AttackCell parse_cell_fragment(const std::string& line) {
    std::istringstream in(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (fields.size() != 8) throw std::runtime_error("malformed attack cell fragment");
    AttackCell cell;
    cell.kind = puf_kind_from_string(fields[0]);
    cell.n = std::stoi(fields[1]);
    cell.k = std::stoi(fields[2]);
    cell.train_size = std::stoi(fields[3]);
    cell.trial = std::stoi(fields[4]);
    cell.train_accuracy = std::stod(fields[5]);
    cell.test_accuracy = std::stod(fields[6]);
    cell.epochs_used = std::stoi(fields[7]);
    return cell;
}

std::string cell_fragment_line(const AttackCell& c) {
    std::ostringstream out;
    out.precision(6);
    out << to_string(c.kind) << ',' << c.n << ',' << c.k << ',' << c.train_size << ',' << c.trial
        << ',' << c.train_accuracy << ',' << c.test_accuracy << ',' << c.epochs_used << "\n";
    return out.str();
}

}  // namespace

std::vector<AttackCell> cmd_attack(const ExperimentConfig& cfg, const fs::path& out_dir) {
    Timer timer;
    fs::create_directories(out_dir);
    const fs::path cell_dir = out_dir / "attack_cells";
    fs::create_directories(cell_dir);

    ProposedTargetConfig target;
    target.device = cfg.effective_device_params();
    target.write = cfg.write;
    target.mismatch = CapMismatchModel{cfg.array.sigma_c};
    target.sense = SenseConfig{cfg.array.offset_rel, cfg.array.read_gate};
    target.vdd = cfg.array.vdd;

    RngStream root(cfg.seed);
    RngStream attack_root = root.child("attack");

    auto run_cells = [&](const AttackGrid& grid) {
        std::vector<AttackCell> cells;
        for (int k : grid.k_values) {
            for (int size : grid.train_sizes) {
                for (int trial = 0; trial < grid.trials; ++trial) {
                    AttackCell probe;
                    probe.kind = grid.kind;
                    probe.n = grid.n;
                    probe.k = k;
                    probe.train_size = size;
                    probe.trial = trial;
                    const fs::path frag = cell_fragment_path(cell_dir, probe);
                    if (fs::exists(frag)) {
                        std::ifstream in(frag);
                        std::string line;
                        std::getline(in, line);
                        cells.push_back(parse_cell_fragment(line));
                        continue;
                    }
                    const AttackCell cell = run_attack_cell(grid, target, cfg.attack.rprop, k,
                                                            size, trial, attack_root,
                                                            cfg.attack.threads);
                    write_file_atomic(frag, cell_fragment_line(cell));
                    cells.push_back(cell);
                }
            }
        }
        return cells;
    };

    RunOutputs outputs;
    std::vector<AttackCell> all;
    std::vector<AttackCell> map_cells;
    for (PufKind kind : cfg.attack.targets) {
        AttackGrid grid;
        grid.kind = kind;
        grid.n = cfg.attack.n;
        grid.k_values = cfg.attack.k_values;
        grid.train_sizes = cfg.attack.train_sizes;
        grid.test_size = cfg.attack.test_size;
        grid.trials = cfg.attack.trials;
        auto cells = run_cells(grid);
        map_cells.insert(map_cells.end(), cells.begin(), cells.end());
    }
    const fs::path map_path = out_dir / "accuracy_map.csv";
    write_file_atomic(map_path, attack_cells_csv(map_cells));
    outputs.add(map_path);
    all = map_cells;

    if (!cfg.attack.n_values.empty()) {
        std::vector<AttackCell> length_cells;
        for (PufKind kind : cfg.attack.targets) {
            for (int n : cfg.attack.n_values) {
                AttackGrid grid;
                grid.kind = kind;
                grid.n = n;
                grid.k_values = cfg.attack.k_values;
                grid.train_sizes = cfg.attack.train_sizes;
                grid.test_size = cfg.attack.test_size;
                grid.trials = cfg.attack.trials;
                auto cells = run_cells(grid);
                length_cells.insert(length_cells.end(), cells.begin(), cells.end());
            }
        }
        const fs::path len_path = out_dir / "length_sweep.csv";
        write_file_atomic(len_path, attack_cells_csv(length_cells));
        outputs.add(len_path);
        all.insert(all.end(), length_cells.begin(), length_cells.end());
    }

    write_manifest(out_dir, "attack", cfg, outputs, timer.seconds());
    return all;
}

CrpSet cmd_gen_crps(const ExperimentConfig& cfg, const fs::path& out_dir) {
    Timer timer;
    fs::create_directories(out_dir);
    RngStream root(cfg.seed);
    RngStream crp_rng = root.child("crps");

    CrpSet set;
    if (cfg.crp.kind == PufKind::arbiter) {
        RngStream inst = root.child("instance");
        const ArbiterPuf puf(cfg.array.n, cfg.crp.k, inst);
        set = crp_generate(puf, cfg.crp.count, crp_rng);
    } else {
        RngStream inst = root.child("instance");
        const DeviceParams dp = cfg.effective_device_params();
        const CapMismatchModel mismatch{cfg.array.sigma_c};
        const SenseConfig sense{cfg.array.offset_rel, cfg.array.read_gate};
        std::vector<PufRow> rows;
        rows.reserve(static_cast<std::size_t>(cfg.crp.k));
        for (int j = 0; j < cfg.crp.k; ++j) {
            RngStream row_rng = inst.child("row", static_cast<std::uint64_t>(j));
            rows.emplace_back(cfg.array.n, dp, mismatch, sense, cfg.array.vdd, row_rng);
            RngStream reg_rng = inst.child("register", static_cast<std::uint64_t>(j));
            rows.back().register_cells(cfg.write, reg_rng);
        }
        std::vector<const PufRow*> ptrs;
        for (const auto& row : rows) ptrs.push_back(&row);
        set = crp_generate(std::span<const PufRow* const>(ptrs), cfg.crp.count, crp_rng);
    }

    RunOutputs outputs;
    const fs::path path = out_dir / "crps.txt";
    write_file_atomic(path, serialize_crps(set));
    outputs.add(path);
    write_manifest(out_dir, "gen-crps", cfg, outputs, timer.seconds());
    return set;
}

}  // namespace ferropuf
