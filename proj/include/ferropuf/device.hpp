#ifndef FERROPUF_DEVICE_HPP
#define FERROPUF_DEVICE_HPP

#include <string>
#include <vector>

#include "ferropuf/rng.hpp"

namespace ferropuf {

/// Logistic with the negative branch computed as 1 - logistic(|z|), so that
/// logistic(-z) == 1 - logistic(z) holds exactly in floating point.
double logistic(double z);

/// Behavioral parameters of the stochastic FeFET threshold-voltage model.
///
/// A weak write lands the threshold at
///   weak_mean_base - amplitude_slope*(pulse - reference_pulse)
///                  - temp_slope*(temp - reference_temp)
///                  + d2d_offset + Normal(0, sigma_c2c^2)
/// while erase / strong program reset it to the fixed rail values. Reads go
/// through a logistic transfer curve of softness read_slope.
struct DeviceParams {
    double vth_erased = 1.6;       // V, high-Vth state after erase
    double vth_programmed = 0.2;   // V, low-Vth state after strong program
    double weak_mean_base = 0.7;   // V, population mean at the reference pulse
    double amplitude_slope = 0.375;  // V per V of extra pulse amplitude
    double temp_slope = 0.002;       // V per degC above the reference
    double sigma_d2d = 0.20;       // V, std of the per-device mean offset
    double sigma_c2c = 0.05;       // V, std of the per-cycle write noise
    double read_slope = 0.05;      // V, softness of the read transfer curve

    double weak_pulse_min = 2.8;   // V, weak-write amplitude window
    double weak_pulse_max = 3.6;
    double reference_pulse = 2.8;  // V
    double reference_temp = 25.0;  // degC

    /// Throws ConfigError when the invariants do not hold
    /// (vth_erased > weak_mean_base > vth_programmed, positive sigmas/slopes).
    void validate() const;
};

/// Named device-size preset; smaller devices keep more C2C variation.
struct SizeProfile {
    std::string name;
    double c2c_scale = 1.0;
};

/// The three geometries characterized on the test arrays.
const std::vector<SizeProfile>& size_profiles();

/// Looks up a profile by name and returns params with sigma_c2c scaled.
/// Throws ConfigError for an unknown profile name.
DeviceParams apply_size_profile(const DeviceParams& params, const std::string& profile_name);

/// One FeFET with a device-specific mean offset (sampled once, immutable)
/// and a mutable threshold voltage.
class FeFetDevice {
public:
    /// Samples d2d_offset ~ Normal(0, sigma_d2d^2) and starts erased.
    FeFetDevice(const DeviceParams& params, RngStream& rng);

    void erase() { vth_ = params_.vth_erased; }
    void program_strong() { vth_ = params_.vth_programmed; }

    /// Weak write: fresh C2C sample on every call. Throws std::domain_error
    /// when the pulse amplitude falls outside the weak window.
    void write_weak(double pulse_amplitude, double temperature_c, RngStream& rng);

    /// Node voltage under a gate bias and a source rail:
    ///   Vx = source * logistic((gate - vth) / read_slope).
    /// Pure; monotone increasing in gate voltage, decreasing in vth.
    double read_vx(double gate_voltage, double source_voltage) const;

    double vth() const { return vth_; }
    double d2d_offset() const { return d2d_offset_; }
    const DeviceParams& params() const { return params_; }

private:
    DeviceParams params_;
    double d2d_offset_;
    double vth_;
};

}  // namespace ferropuf

#endif
