#include "pcbench/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pcbench::losses {

void DptConfig::validate() const {
    if (!(v_dc > 0.0)) throw std::invalid_argument("dpt: v_dc must be > 0");
    if (!(inductance > 0.0)) throw std::invalid_argument("dpt: inductance must be > 0");
    if (!(first_pulse > 0.0)) throw std::invalid_argument("dpt: first_pulse must be > 0");
    if (!(t_rise >= 0.0)) throw std::invalid_argument("dpt: t_rise must be >= 0");
    if (!(t_fall >= 0.0)) throw std::invalid_argument("dpt: t_fall must be >= 0");
    if (!(off_time > 0.0)) throw std::invalid_argument("dpt: off_time must be > 0");
    if (!(second_pulse > 0.0)) throw std::invalid_argument("dpt: second_pulse must be > 0");
    if (!(current_limit > 0.0)) throw std::invalid_argument("dpt: current_limit must be > 0");
}

double conduction_loss(double i_d, double r_ds_on) {
    if (!(r_ds_on > 0.0)) throw std::invalid_argument("conduction_loss: r_ds_on must be > 0");
    return i_d * i_d * r_ds_on;
}

double switching_loss(const SwitchingEnergies& energies, double f_sw) {
    if (!(f_sw >= 0.0)) throw std::invalid_argument("switching_loss: f_sw must be >= 0");
    return (energies.e_on + energies.e_off) * f_sw;
}

SwitchingEnergies scale_energies(const SwitchingEnergies& ref, double v_dc, double i_d) {
    if (ref.i_test <= 0.0 || ref.v_dc <= 0.0) return {0.0, 0.0, i_d, v_dc};
    const double s = (v_dc / ref.v_dc) * (i_d / ref.i_test);
    return {ref.e_on * s, ref.e_off * s, i_d, v_dc};
}

double integrate_energy(std::span<const WaveformSample> samples) noexcept {
    double e = 0.0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double p0 = samples[i - 1].v_ds * samples[i - 1].i_d;
        const double p1 = samples[i].v_ds * samples[i].i_d;
        e += 0.5 * (p0 + p1) * (samples[i].t - samples[i - 1].t);
    }
    return e;
}

namespace {

// Hard-switch transition starting at t0. `turn_on` selects which quantity moves first.
void append_transition(std::vector<WaveformSample>& out, double t0, double duration, double v, double i,
                       bool turn_on, std::size_t n) {
    for (std::size_t j = 0; j <= n; ++j) {
        const double s = static_cast<double>(j) / static_cast<double>(n);
        const double first = std::min(1.0, 2.0 * s);          // progress of first half
        const double second = std::max(0.0, 2.0 * s - 1.0);   // progress of second half
        WaveformSample w{t0 + s * duration, 0.0, 0.0};
        if (turn_on) {
            w.i_d = i * first;           // current commutates from the diode
            w.v_ds = v * (1.0 - second); // then voltage collapses
        } else {
            w.v_ds = v * first;          // voltage rises at full current
            w.i_d = i * (1.0 - second);  // then current commutates to the diode
        }
        out.push_back(w);
    }
}

}  // namespace

DptResult dpt_energies(const DptConfig& cfg, std::size_t samples_per_transition) {
    cfg.validate();
    const std::size_t n = std::max<std::size_t>(2, samples_per_transition + (samples_per_transition % 2));

    const double i_test = cfg.v_dc * cfg.first_pulse / cfg.inductance;
    if (i_test > cfg.current_limit) {
        throw std::invalid_argument("dpt: test current " + std::to_string(i_test) + " A exceeds current_limit " +
                                    std::to_string(cfg.current_limit) + " A");
    }

    DptResult r;
    r.energies.i_test = i_test;
    r.energies.v_dc = cfg.v_dc;
    r.energies.e_off = 0.5 * cfg.v_dc * i_test * cfg.t_fall;
    r.energies.e_on = 0.5 * cfg.v_dc * i_test * cfg.t_rise;

    auto& w = r.waveform;
    w.reserve(2 * (n + 1) + 6);
    // First pulse: DUT on, inductor current ramps linearly from zero.
    w.push_back({0.0, 0.0, 0.0});
    w.push_back({cfg.first_pulse, 0.0, i_test});

    const double t_off = cfg.first_pulse;
    r.turn_off_begin = w.size();
    append_transition(w, t_off, cfg.t_fall, cfg.v_dc, i_test, false, n);
    r.turn_off_end = w.size();

    // Freewheel interval: lossless inductor holds the current in the diode.
    const double t_on = t_off + cfg.t_fall + cfg.off_time;
    r.turn_on_begin = w.size();
    append_transition(w, t_on, cfg.t_rise, cfg.v_dc, i_test, true, n);
    r.turn_on_end = w.size();

    const double t_end = t_on + cfg.t_rise + cfg.second_pulse;
    w.push_back({t_end, 0.0, i_test + cfg.v_dc * cfg.second_pulse / cfg.inductance});
    return r;
}

}  // namespace pcbench::losses
