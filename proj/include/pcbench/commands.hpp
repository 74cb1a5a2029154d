/**
 * @file commands.hpp
 * @brief Run orchestration behind the CLI subcommands.
 *
 * Every command writes its outputs under CommandOptions::out_dir and returns
 * the run summary that it also writes to summary.json. All outputs are
 * byte-stable for a given config (and seed); wall-clock timing is left to the
 * caller so it never enters a file.
 */
#pragma once

#include "pcbench/config.hpp"
#include "pcbench/csv.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace pcbench::io {

inline constexpr std::string_view kToolName = "pcbench";
inline constexpr std::string_view kToolVersion = "0.1.0";

struct CommandOptions {
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;  ///< enables configured noise in the fit commands
};

using Summary = nlohmann::ordered_json;

[[nodiscard]] Summary make_summary(std::string_view command, const RunConfig& cfg, Summary results);

/// Writes records.csv, tj_trace.csv and summary.json into dir.
void run_report(const std::filesystem::path& dir, std::span<const CycleRecord> records,
                std::span<const cycling::TracePoint> trace, const Summary& summary);

[[nodiscard]] std::vector<IvRow> iv_sweep_rows(const RunConfig& cfg);

Summary run_iv_sweep(const RunConfig& cfg, const CommandOptions& opts);
Summary run_dpt(const RunConfig& cfg, const CommandOptions& opts);
Summary run_cycle(const RunConfig& cfg, const CommandOptions& opts);
Summary run_solve_amplitude(const RunConfig& cfg, const CommandOptions& opts);
Summary run_sweep(const RunConfig& cfg, const CommandOptions& opts);
Summary run_fit_lifetime(const RunConfig& cfg, const CommandOptions& opts);
Summary run_fit_device(const RunConfig& cfg, const CommandOptions& opts);

}  // namespace pcbench::io
