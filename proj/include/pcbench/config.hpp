/**
 * @file config.hpp
 * @brief Run configuration: strict JSON ingestion, defaults and echo.
 *
 * Values are held in document units (temperatures in degrees Celsius) so an
 * echoed document reloads to an identical RunConfig. The accessor methods
 * build the kelvin-based model objects. Unknown keys are rejected.
 */
#pragma once

#include "pcbench/aging.hpp"
#include "pcbench/cycling.hpp"
#include "pcbench/device_model.hpp"
#include "pcbench/losses.hpp"
#include "pcbench/thermal_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pcbench::io {

/// Bench defaults. The thermal resistance and gate pulse rate are the values
/// calibrated against the reference amplitude table (see configs/amplitude_table.json).
inline constexpr double kDefaultRThetaJa = 88.405;  // K/W
inline constexpr double kDefaultTau = 0.25;       // s
inline constexpr double kDefaultFsw = 180.985e3;  // Hz

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field_path, const std::string& reason)
        : std::runtime_error("config: " + field_path + ": " + reason), path_(std::move(field_path)) {}

    [[nodiscard]] const std::string& field_path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Device card. Either `k` or the full geometry (mu, w_channel, l_channel, c_ox).
struct DeviceCard {
    std::optional<double> k;
    std::optional<double> mu;
    std::optional<double> w_channel;
    std::optional<double> l_channel;
    std::optional<double> c_ox;
    double v_t = 0.0;
    double t_ref = 25.0;  ///< degC
    double mu_exponent = 2.5;
    double vt_slope = -5e-3;

    [[nodiscard]] device::DeviceModel model() const;

    bool operator==(const DeviceCard&) const = default;
};

struct ThermalSection {
    double t_c = 25.0;  ///< degC
    std::vector<thermal::Stage> stages{{kDefaultRThetaJa, kDefaultTau}};

    [[nodiscard]] thermal::ThermalNetwork network() const;

    bool operator==(const ThermalSection&) const = default;
};

struct CyclingSection {
    double v_dc = 50.0;
    std::optional<double> i_pulse;
    std::optional<double> r_load;
    double v_gs = 20.0;
    double t_j_max = 175.0;  ///< degC
    double f_sw = kDefaultFsw;
    std::uint64_t n_cycles = 1000;
    double period = 2.0;
    double duty = 0.5;
    std::uint64_t n_devices = 2;
    cycling::Mode mode = cycling::Mode::ProposedComplementary;

    bool operator==(const CyclingSection&) const = default;
};

struct AgingSection {
    aging::DegradationParams degradation;
    aging::ClampConfig clamp;
    aging::FailureCriterion failure;
    bool electrical_feedback = true;

    bool operator==(const AgingSection&) const = default;
};

struct IvSweepSection {
    std::vector<double> v_gs{10.0, 12.0, 14.0, 16.0, 18.0, 20.0};
    std::vector<double> v_ds;  ///< resolved grid
    double t_j = 25.0;         ///< degC

    bool operator==(const IvSweepSection&) const = default;
};

struct SweepSection {
    std::vector<double> t_c;       ///< degC
    std::vector<double> delta_tj;  ///< K

    bool operator==(const SweepSection&) const = default;
};

struct LifetimeSection {
    std::vector<aging::LifetimePoint> points;
    std::optional<std::string> points_csv;
    double noise = 0.0;  ///< lognormal sigma applied with --seed

    bool operator==(const LifetimeSection&) const = default;
};

struct FitDeviceSection {
    std::optional<std::string> iv_points_csv;
    double noise = 0.0;  ///< relative multiplicative noise applied with --seed
    double t_ref = 25.0; ///< degC

    bool operator==(const FitDeviceSection&) const = default;
};

struct RunConfig {
    DeviceCard device;
    ThermalSection thermal;
    losses::DptConfig dpt;
    CyclingSection cycling;
    AgingSection aging;
    IvSweepSection iv_sweep;
    SweepSection sweep;
    LifetimeSection lifetime;
    FitDeviceSection fit_device;
    std::string output_dir = "out";

    [[nodiscard]] device::DeviceModel device_model() const { return device.model(); }
    [[nodiscard]] thermal::ThermalNetwork thermal_network() const { return thermal.network(); }
    /// Cycling parameters in kelvin, with DPT reference energies and
    /// i_pulse resolved from r_load when needed (0 when neither is set).
    [[nodiscard]] cycling::TestConfig test_config() const;
    [[nodiscard]] cycling::PulseSchedule schedule() const;
    [[nodiscard]] cycling::AgingModel aging_model() const;

    bool operator==(const RunConfig&) const = default;
};

/// Parses and validates a configuration document. Relative file references
/// (a device card given as a path, CSV inputs) resolve against base_dir.
[[nodiscard]] RunConfig load_config(std::string_view text, const std::filesystem::path& base_dir = {});
[[nodiscard]] RunConfig load_config_file(const std::filesystem::path& path);

/// Fully resolved document; load_config(echo(c)) == c.
[[nodiscard]] nlohmann::ordered_json echo(const RunConfig& config);

/// Device card document, as read by the `device` section.
[[nodiscard]] nlohmann::ordered_json device_card_json(const DeviceCard& card);

}  // namespace pcbench::io
