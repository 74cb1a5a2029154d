#include "pcbench/thermal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pcbench::thermal {

ThermalNetwork::ThermalNetwork(std::vector<Stage> stages, double t_case)
    : stages_(std::move(stages)), t_case_(t_case) {
    if (stages_.empty()) throw std::invalid_argument("thermal network needs at least one stage");
    for (const auto& s : stages_) {
        if (!(s.r_theta > 0.0) || !std::isfinite(s.r_theta)) {
            throw std::invalid_argument("thermal stage r_theta must be > 0");
        }
        if (!(s.tau > 0.0) || !std::isfinite(s.tau)) throw std::invalid_argument("thermal stage tau must be > 0");
    }
    if (!(t_case_ > 0.0)) throw std::invalid_argument("case temperature must be > 0 K");
}

double ThermalNetwork::min_tau() const noexcept {
    return std::min_element(stages_.begin(), stages_.end(), [](auto& a, auto& b) { return a.tau < b.tau; })->tau;
}

double ThermalNetwork::max_tau() const noexcept {
    return std::max_element(stages_.begin(), stages_.end(), [](auto& a, auto& b) { return a.tau < b.tau; })->tau;
}

ThermalNetwork ThermalNetwork::with_total_resistance(double r_theta_ja) const {
    const double scale = r_theta_ja / network_total_resistance(*this);
    auto scaled = stages_;
    for (auto& s : scaled) s.r_theta *= scale;
    return {std::move(scaled), t_case_};
}

double steady_state_tj(double t_c, double p_cond, double p_switch, double r_theta_ja) {
    if (!(r_theta_ja > 0.0)) throw std::invalid_argument("steady_state_tj: r_theta_ja must be > 0");
    if (p_cond < 0.0 || p_switch < 0.0) throw std::invalid_argument("steady_state_tj: powers must be >= 0");
    return t_c + (p_cond + p_switch) * r_theta_ja;
}

double network_total_resistance(const ThermalNetwork& network) noexcept {
    const auto st = network.stages();
    return std::accumulate(st.begin(), st.end(), 0.0, [](double acc, const Stage& s) { return acc + s.r_theta; });
}

ThermalState thermal_step(const ThermalNetwork& network, const ThermalState& state, double power, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("thermal_step: dt must be > 0");
    if (!(power >= 0.0)) throw std::invalid_argument("thermal_step: power must be >= 0");
    if (state.stage_rises.size() != network.size()) {
        throw std::invalid_argument("thermal_step: state does not match network");
    }
    ThermalState next = state;
    double total = 0.0;
    const auto st = network.stages();
    for (std::size_t i = 0; i < st.size(); ++i) {
        const double x = dt / st[i].tau;
        const double target = power * st[i].r_theta;
        next.stage_rises[i] = state.stage_rises[i] * std::exp(-x) - target * std::expm1(-x);
        total += next.stage_rises[i];
    }
    next.t_j = network.t_case() + total;
    return next;
}

FixedStep::FixedStep(const ThermalNetwork& network, double dt) : dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("FixedStep: dt must be > 0");
    for (const auto& s : network.stages()) {
        const double x = dt / s.tau;
        decay_.push_back(std::exp(-x));
        gain_.push_back(-s.r_theta * std::expm1(-x));
    }
}

double FixedStep::advance(std::span<double> rises, double power) const noexcept {
    double total = 0.0;
    for (std::size_t i = 0; i < rises.size(); ++i) {
        rises[i] = rises[i] * decay_[i] + power * gain_[i];
        total += rises[i];
    }
    return total;
}

}  // namespace pcbench::thermal
