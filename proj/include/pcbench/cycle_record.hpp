#pragma once

#include <cstddef>

namespace pcbench {

/// Per-cycle telemetry emitted by the cycling engine. Temperatures in kelvin.
struct CycleRecord {
    std::size_t cycle_index = 0;  ///< 1-based
    double t_j_peak = 0.0;
    double t_j_min = 0.0;
    double delta_t_j = 0.0;         ///< t_j_peak - t_j_min
    double r_ds_on = 0.0;           ///< aged on-resistance at the case-temperature reference, after this cycle
    double v_ds_on_measured = 0.0;  ///< clamp-circuit reading at i_pulse
    bool valid = true;              ///< false iff t_j_peak > t_j_max

    bool operator==(const CycleRecord&) const = default;
};

}  // namespace pcbench
