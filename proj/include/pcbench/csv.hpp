/**
 * @file csv.hpp
 * @brief Fixed-schema CSV export and import.
 *
 * Numbers are written in the shortest form that round-trips to the same
 * double, so files are byte-stable and values read back exactly.
 */
#pragma once

#include "pcbench/aging.hpp"
#include "pcbench/cycle_record.hpp"
#include "pcbench/cycling.hpp"
#include "pcbench/device_model.hpp"
#include "pcbench/losses.hpp"

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pcbench::io {

inline constexpr std::string_view kIvHeader = "vgs_V,vds_V,id_A,region";
inline constexpr std::string_view kDptHeader = "t_s,v_ds_V,i_d_A";
inline constexpr std::string_view kRecordsHeader = "cycle,tj_peak_C,tj_min_C,delta_tj_K,rds_on_ohm,vds_on_V,valid";
inline constexpr std::string_view kAmplitudeHeader = "tc_C,i_pulse_A";
inline constexpr std::string_view kTraceHeader = "t_s,tj_C";
inline constexpr std::string_view kLifetimeHeader = "delta_tj_K,nf_cycles";
inline constexpr std::string_view kIvPointsHeader = "vgs_V,vds_V,id_A,tj_C";

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[nodiscard]] std::string format_number(double v);

struct IvRow {
    double v_gs;
    double v_ds;
    double i_d;
    device::Region region;
};

[[nodiscard]] std::string iv_sweep_csv(std::span<const IvRow> rows);
[[nodiscard]] std::string dpt_waveform_csv(std::span<const losses::WaveformSample> samples);
[[nodiscard]] std::string records_csv(std::span<const CycleRecord> records);
[[nodiscard]] std::string amplitude_csv(std::span<const cycling::AmplitudeSolution> rows);
[[nodiscard]] std::string trace_csv(std::span<const cycling::TracePoint> trace);
[[nodiscard]] std::string lifetime_csv(std::span<const aging::LifetimePoint> points);

/// Parses `delta_tj_K,nf_cycles`. Throws IoError on a bad header or row.
[[nodiscard]] std::vector<aging::LifetimePoint> parse_lifetime_csv(std::string_view text);
/// Parses `vgs_V,vds_V,id_A,tj_C` into kelvin-based IV points.
[[nodiscard]] std::vector<device::IvPoint> parse_iv_points_csv(std::string_view text);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace pcbench::io
