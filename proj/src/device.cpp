#include "ferropuf/device.hpp"

#include <cmath>
#include <sstream>

#include "ferropuf/errors.hpp"

namespace ferropuf {

double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    return 1.0 - 1.0 / (1.0 + std::exp(z));
}

void DeviceParams::validate() const {
    std::ostringstream bad;
    if (!(vth_erased > weak_mean_base && weak_mean_base > vth_programmed))
        bad << "require vth_erased > weak_mean_base > vth_programmed; ";
    if (!(sigma_d2d >= 0.0)) bad << "sigma_d2d must be >= 0; ";
    if (!(sigma_c2c >= 0.0)) bad << "sigma_c2c must be >= 0; ";
    if (!(read_slope > 0.0)) bad << "read_slope must be > 0; ";
    if (!(amplitude_slope > 0.0)) bad << "amplitude_slope must be > 0; ";
    if (!(weak_pulse_min <= weak_pulse_max)) bad << "weak pulse window inverted; ";
    if (!bad.str().empty()) throw ConfigError("device params: " + bad.str());
}

const std::vector<SizeProfile>& size_profiles() {
    static const std::vector<SizeProfile> profiles = {
        {"500x500", 1.0},
        {"200x200", 1.2},
        {"200x100", 1.4},
    };
    return profiles;
}

DeviceParams apply_size_profile(const DeviceParams& params, const std::string& profile_name) {
    for (const auto& p : size_profiles()) {
        if (p.name == profile_name) {
            DeviceParams scaled = params;
            scaled.sigma_c2c *= p.c2c_scale;
            return scaled;
        }
    }
    throw ConfigError("unknown size profile '" + profile_name + "'");
}

FeFetDevice::FeFetDevice(const DeviceParams& params, RngStream& rng) : params_(params) {
    params_.validate();
    d2d_offset_ = params_.sigma_d2d > 0.0 ? rng.normal(0.0, params_.sigma_d2d) : 0.0;
    vth_ = params_.vth_erased;
}

void FeFetDevice::write_weak(double pulse_amplitude, double temperature_c, RngStream& rng) {
    if (pulse_amplitude < params_.weak_pulse_min || pulse_amplitude > params_.weak_pulse_max) {
        std::ostringstream msg;
        msg << "weak-write amplitude " << pulse_amplitude << " V outside ["
            << params_.weak_pulse_min << ", " << params_.weak_pulse_max << "] V";
        throw std::domain_error(msg.str());
    }
    const double mean = params_.weak_mean_base
                        - params_.amplitude_slope * (pulse_amplitude - params_.reference_pulse)
                        - params_.temp_slope * (temperature_c - params_.reference_temp)
                        + d2d_offset_;
    const double noise = params_.sigma_c2c > 0.0 ? rng.normal(0.0, params_.sigma_c2c) : 0.0;
    vth_ = mean + noise;
}

double FeFetDevice::read_vx(double gate_voltage, double source_voltage) const {
    return source_voltage * logistic((gate_voltage - vth_) / params_.read_slope);
}

}  // namespace ferropuf
