#include "pcbench/aging.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

namespace pcbench::aging {

void DegradationParams::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("aging: alpha must be > 0");
    if (!(n0 > 0.0)) throw std::invalid_argument("aging: n0 must be > 0");
    if (!(beta > 1.0)) throw std::invalid_argument("aging: beta must be > 1");
    if (!(delta_t_ref > 0.0)) throw std::invalid_argument("aging: delta_t_ref must be > 0");
    if (!(m > 0.0)) throw std::invalid_argument("aging: m must be > 0");
}

void ClampConfig::validate() const {
    if (!(v_clamp > 0.0)) throw std::invalid_argument("aging: v_clamp must be > 0");
    if (!std::isfinite(v_offset)) throw std::invalid_argument("aging: v_offset must be finite");
}

void FailureCriterion::validate() const {
    if (!(threshold > 0.0)) throw std::invalid_argument("aging: threshold must be > 0");
}

double rds_multiplier(const DegradationParams& params, double n_effective) {
    if (!(n_effective >= 0.0)) throw std::invalid_argument("rds_multiplier: n_effective must be >= 0");
    if (n_effective == 0.0) return 1.0;
    return 1.0 + params.alpha * std::pow(n_effective / params.n0, params.beta);
}

AgingState accumulate_damage(const AgingState& state, const DegradationParams& params, double delta_t_j) {
    if (!(delta_t_j >= 0.0)) throw std::invalid_argument("accumulate_damage: delta_t_j must be >= 0");
    if (delta_t_j == 0.0) return state;
    const double increment = std::pow(delta_t_j / params.delta_t_ref, params.m);
    AgingState next;
    next.n_effective = state.n_effective + increment;
    next.r_multiplier = rds_multiplier(params, next.n_effective);
    return next;
}

AgingState apply_record(const AgingState& state, const DegradationParams& params, const CycleRecord& record) {
    return record.valid ? accumulate_damage(state, params, record.delta_t_j) : state;
}

double vds_on_measured(double v_ds_actual, const ClampConfig& clamp) {
    if (!(v_ds_actual >= 0.0)) throw std::invalid_argument("vds_on_measured: v_ds must be >= 0");
    return std::min(v_ds_actual + clamp.v_offset, clamp.v_clamp);
}

std::optional<std::size_t> cycles_to_failure(std::span<const CycleRecord> records,
                                             const FailureCriterion& criterion) {
    std::optional<double> initial;
    for (const auto& r : records) {
        if (!r.valid) continue;
        if (!initial) initial = r.r_ds_on;
        if (r.r_ds_on >= (1.0 + criterion.threshold) * *initial) return r.cycle_index;
    }
    return std::nullopt;
}

double CoffinMansonFit::cycles_at(double delta_t_j) const {
    return coefficient * std::pow(delta_t_j, -exponent);
}

CoffinMansonFit fit_coffin_manson(std::span<const LifetimePoint> points) {
    std::set<double> swings;
    for (const auto& p : points) {
        if (!(p.delta_t_j > 0.0) || !(p.n_f > 0.0) || !std::isfinite(p.delta_t_j) || !std::isfinite(p.n_f)) {
            throw std::invalid_argument("fit_coffin_manson: delta_t_j and n_f must be positive and finite");
        }
        swings.insert(p.delta_t_j);
    }
    if (swings.size() < 2) throw std::invalid_argument("fit_coffin_manson: need at least two distinct swings");

    const auto n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += std::log(p.delta_t_j);
        my += std::log(p.n_f);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& p : points) {
        const double dx = std::log(p.delta_t_j) - mx;
        const double dy = std::log(p.n_f) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    const double ss_res = std::max(0.0, syy - slope * sxy);
    const double r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return {std::exp(intercept), -slope, r2};
}

}  // namespace pcbench::aging
