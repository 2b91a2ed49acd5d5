#include "ferropuf/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ferropuf/errors.hpp"

namespace ferropuf {

DeviceParams ExperimentConfig::effective_device_params() const {
    return apply_size_profile(device, size_profile);
}

void ExperimentConfig::validate() const {
    try {
        device.validate();
        attack.rprop.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    apply_size_profile(device, size_profile);  // rejects unknown profile names
    std::ostringstream bad;
    if (array.n < 1) bad << "array.n must be >= 1; ";
    if (array.m < 1) bad << "array.m must be >= 1; ";
    if (array.sigma_c < 0.0) bad << "array.sigma_c must be >= 0; ";
    if (array.offset_rel < 0.0) bad << "array.offset_rel must be >= 0; ";
    if (array.vdd <= 0.0) bad << "array.vdd must be > 0; ";
    if (experiment.challenges < 1) bad << "experiment.challenges must be >= 1; ";
    if (experiment.registrations < 1) bad << "experiment.registrations must be >= 1; ";
    if (experiment.reconfigurations < 2) bad << "experiment.reconfigurations must be >= 2; ";
    if (experiment.repeats < 1) bad << "experiment.repeats must be >= 1; ";
    if (experiment.histogram_bins < 1) bad << "experiment.histogram_bins must be >= 1; ";
    if (experiment.sweep_rows < 1) bad << "experiment.sweep_rows must be >= 1; ";
    if (experiment.sweep_registrations < 2) bad << "experiment.sweep_registrations must be >= 2; ";
    if (experiment.sweep_challenges < 1) bad << "experiment.sweep_challenges must be >= 1; ";
    if (attack.n < 1) bad << "attack.n must be >= 1; ";
    if (attack.test_size < 1) bad << "attack.test_size must be >= 1; ";
    if (attack.trials < 1) bad << "attack.trials must be >= 1; ";
    if (attack.threads < 1) bad << "attack.threads must be >= 1; ";
    if (attack.k_values.empty()) bad << "attack.k_values must be nonempty; ";
    for (int k : attack.k_values)
        if (k < 1) bad << "attack.k_values entries must be >= 1; ";
    if (attack.train_sizes.empty()) bad << "attack.train_sizes must be nonempty; ";
    for (int s : attack.train_sizes)
        if (s < 1) bad << "attack.train_sizes entries must be >= 1; ";
    if (attack.targets.empty()) bad << "attack.targets must be nonempty; ";
    if (crp.k < 1) bad << "crp.k must be >= 1; ";
    if (crp.count < 1) bad << "crp.count must be >= 1; ";
    for (const auto& s : experiment.sweep_sizes) apply_size_profile(device, s);
    if (!bad.str().empty()) throw ConfigError("config: " + bad.str());
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
    std::ostringstream out;
    out.precision(12);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out << ',';
        out << xs[i];
    }
    return out.str();
}

struct Parser {
    std::string source;
    int lineno = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(source + ":" + std::to_string(lineno) + ": " + msg);
    }

    double num(const std::string& v) const {
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) fail("trailing characters in number '" + v + "'");
            return x;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            fail("invalid number '" + v + "'");
        }
    }

    int integer(const std::string& v) const {
        const double x = num(v);
        const int i = static_cast<int>(x);
        if (static_cast<double>(i) != x) fail("expected integer, got '" + v + "'");
        return i;
    }

    std::uint64_t u64(const std::string& v) const {
        try {
            std::size_t pos = 0;
            const std::uint64_t x = std::stoull(v, &pos);
            if (pos != v.size()) fail("trailing characters in seed '" + v + "'");
            return x;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            fail("invalid unsigned value '" + v + "'");
        }
    }
};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& source_name) {
    ExperimentConfig cfg;
    Parser p{source_name};
    std::istringstream in(text);
    std::string raw;
    std::string section;

    while (std::getline(in, raw)) {
        ++p.lineno;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') p.fail("unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "device" && section != "array" && section != "experiment" &&
                section != "attack" && section != "crp")
                p.fail("unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) p.fail("empty key");
        if (value.empty()) p.fail("empty value for key '" + key + "'");

        if (section.empty()) {
            if (key == "seed") cfg.seed = p.u64(value);
            else p.fail("unknown top-level key '" + key + "'");
        } else if (section == "device") {
            auto& d = cfg.device;
            if (key == "vth_erased") d.vth_erased = p.num(value);
            else if (key == "vth_programmed") d.vth_programmed = p.num(value);
            else if (key == "weak_mean_base") d.weak_mean_base = p.num(value);
            else if (key == "amplitude_slope") d.amplitude_slope = p.num(value);
            else if (key == "temp_slope") d.temp_slope = p.num(value);
            else if (key == "sigma_d2d") d.sigma_d2d = p.num(value);
            else if (key == "sigma_c2c") d.sigma_c2c = p.num(value);
            else if (key == "read_slope") d.read_slope = p.num(value);
            else if (key == "weak_pulse_min") d.weak_pulse_min = p.num(value);
            else if (key == "weak_pulse_max") d.weak_pulse_max = p.num(value);
            else if (key == "pulse_amplitude") cfg.write.pulse_amplitude = p.num(value);
            else if (key == "temperature") cfg.write.temperature_c = p.num(value);
            else if (key == "size_profile") cfg.size_profile = value;
            else p.fail("unknown key '" + key + "' in [device]");
        } else if (section == "array") {
            auto& a = cfg.array;
            if (key == "n") a.n = p.integer(value);
            else if (key == "m") a.m = p.integer(value);
            else if (key == "sigma_c") a.sigma_c = p.num(value);
            else if (key == "offset_rel") a.offset_rel = p.num(value);
            else if (key == "vdd") a.vdd = p.num(value);
            else if (key == "read_gate") a.read_gate = p.num(value);
            else p.fail("unknown key '" + key + "' in [array]");
        } else if (section == "experiment") {
            auto& e = cfg.experiment;
            if (key == "challenges") e.challenges = p.integer(value);
            else if (key == "registrations") e.registrations = p.integer(value);
            else if (key == "reconfigurations") e.reconfigurations = p.integer(value);
            else if (key == "repeats") e.repeats = p.integer(value);
            else if (key == "histogram_bins") e.histogram_bins = p.integer(value);
            else if (key == "sweep_pulses") {
                e.sweep_pulses.clear();
                for (const auto& v : split_list(value)) e.sweep_pulses.push_back(p.num(v));
            } else if (key == "sweep_temperatures") {
                e.sweep_temperatures.clear();
                for (const auto& v : split_list(value)) e.sweep_temperatures.push_back(p.num(v));
            } else if (key == "sweep_sizes") {
                e.sweep_sizes = split_list(value);
            } else if (key == "sweep_sigma_c") {
                e.sweep_sigma_c.clear();
                for (const auto& v : split_list(value)) e.sweep_sigma_c.push_back(p.num(v));
            } else if (key == "sweep_lengths") {
                e.sweep_lengths.clear();
                for (const auto& v : split_list(value)) e.sweep_lengths.push_back(p.integer(v));
            } else if (key == "sweep_rows") e.sweep_rows = p.integer(value);
            else if (key == "sweep_registrations") e.sweep_registrations = p.integer(value);
            else if (key == "sweep_challenges") e.sweep_challenges = p.integer(value);
            else p.fail("unknown key '" + key + "' in [experiment]");
        } else if (section == "attack") {
            auto& a = cfg.attack;
            if (key == "eta_plus") a.rprop.eta_plus = p.num(value);
            else if (key == "eta_minus") a.rprop.eta_minus = p.num(value);
            else if (key == "delta_init") a.rprop.delta_init = p.num(value);
            else if (key == "delta_min") a.rprop.delta_min = p.num(value);
            else if (key == "delta_max") a.rprop.delta_max = p.num(value);
            else if (key == "max_epochs") a.rprop.max_epochs = p.integer(value);
            else if (key == "convergence_window") a.rprop.convergence_window = p.integer(value);
            else if (key == "restarts") a.rprop.restarts = p.integer(value);
            else if (key == "n") a.n = p.integer(value);
            else if (key == "k_values") {
                a.k_values.clear();
                for (const auto& v : split_list(value)) a.k_values.push_back(p.integer(v));
            } else if (key == "train_sizes") {
                a.train_sizes.clear();
                for (const auto& v : split_list(value)) a.train_sizes.push_back(p.integer(v));
            } else if (key == "n_values") {
                a.n_values.clear();
                for (const auto& v : split_list(value)) a.n_values.push_back(p.integer(v));
            } else if (key == "test_size") a.test_size = p.integer(value);
            else if (key == "trials") a.trials = p.integer(value);
            else if (key == "threads") a.threads = p.integer(value);
            else if (key == "targets") {
                a.targets.clear();
                for (const auto& v : split_list(value)) {
                    try {
                        a.targets.push_back(puf_kind_from_string(v));
                    } catch (const std::exception&) {
                        p.fail("unknown attack target '" + v + "'");
                    }
                }
            } else p.fail("unknown key '" + key + "' in [attack]");
        } else if (section == "crp") {
            auto& c = cfg.crp;
            if (key == "kind") {
                try {
                    c.kind = puf_kind_from_string(value);
                } catch (const std::exception&) {
                    p.fail("unknown crp kind '" + value + "'");
                }
            } else if (key == "k") c.k = p.integer(value);
            else if (key == "count") c.count = p.integer(value);
            else p.fail("unknown key '" + key + "' in [crp]");
        }
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream out;
    out.precision(12);
    out << "seed = " << seed << "\n\n";
    out << "[device]\n";
    out << "vth_erased = " << device.vth_erased << "\n";
    out << "vth_programmed = " << device.vth_programmed << "\n";
    out << "weak_mean_base = " << device.weak_mean_base << "\n";
    out << "amplitude_slope = " << device.amplitude_slope << "\n";
    out << "temp_slope = " << device.temp_slope << "\n";
    out << "sigma_d2d = " << device.sigma_d2d << "\n";
    out << "sigma_c2c = " << device.sigma_c2c << "\n";
    out << "read_slope = " << device.read_slope << "\n";
    out << "weak_pulse_min = " << device.weak_pulse_min << "\n";
    out << "weak_pulse_max = " << device.weak_pulse_max << "\n";
    out << "pulse_amplitude = " << write.pulse_amplitude << "\n";
    out << "temperature = " << write.temperature_c << "\n";
    out << "size_profile = " << size_profile << "\n\n";
    out << "[array]\n";
    out << "n = " << array.n << "\n";
    out << "m = " << array.m << "\n";
    out << "sigma_c = " << array.sigma_c << "\n";
    out << "offset_rel = " << array.offset_rel << "\n";
    out << "vdd = " << array.vdd << "\n";
    out << "read_gate = " << array.read_gate << "\n\n";
    out << "[experiment]\n";
    out << "challenges = " << experiment.challenges << "\n";
    out << "registrations = " << experiment.registrations << "\n";
    out << "reconfigurations = " << experiment.reconfigurations << "\n";
    out << "repeats = " << experiment.repeats << "\n";
    out << "histogram_bins = " << experiment.histogram_bins << "\n";
    out << "sweep_pulses = " << join(experiment.sweep_pulses) << "\n";
    out << "sweep_temperatures = " << join(experiment.sweep_temperatures) << "\n";
    out << "sweep_sizes = " << join(experiment.sweep_sizes) << "\n";
    out << "sweep_sigma_c = " << join(experiment.sweep_sigma_c) << "\n";
    out << "sweep_lengths = " << join(experiment.sweep_lengths) << "\n";
    out << "sweep_rows = " << experiment.sweep_rows << "\n";
    out << "sweep_registrations = " << experiment.sweep_registrations << "\n";
    out << "sweep_challenges = " << experiment.sweep_challenges << "\n\n";
    out << "[attack]\n";
    out << "eta_plus = " << attack.rprop.eta_plus << "\n";
    out << "eta_minus = " << attack.rprop.eta_minus << "\n";
    out << "delta_init = " << attack.rprop.delta_init << "\n";
    out << "delta_min = " << attack.rprop.delta_min << "\n";
    out << "delta_max = " << attack.rprop.delta_max << "\n";
    out << "max_epochs = " << attack.rprop.max_epochs << "\n";
    out << "convergence_window = " << attack.rprop.convergence_window << "\n";
    out << "restarts = " << attack.rprop.restarts << "\n";
    out << "n = " << attack.n << "\n";
    out << "k_values = " << join(attack.k_values) << "\n";
    out << "train_sizes = " << join(attack.train_sizes) << "\n";
    if (!attack.n_values.empty()) out << "n_values = " << join(attack.n_values) << "\n";
    out << "test_size = " << attack.test_size << "\n";
    out << "trials = " << attack.trials << "\n";
    out << "threads = " << attack.threads << "\n";
    {
        std::vector<std::string> names;
        for (PufKind kind : attack.targets) names.push_back(to_string(kind));
        out << "targets = " << join(names) << "\n";
    }
    out << "\n[crp]\n";
    out << "kind = " << to_string(crp.kind) << "\n";
    out << "k = " << crp.k << "\n";
    out << "count = " << crp.count << "\n";
    return out.str();
}

}  // namespace ferropuf
