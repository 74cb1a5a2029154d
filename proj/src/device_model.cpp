#include "pcbench/device_model.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcbench::device {

DeviceParams DeviceParams::from_gain(double k, double v_t, double t_ref) {
    DeviceParams p;
    p.mu = k;
    p.v_t = v_t;
    p.t_ref = t_ref;
    return p;
}

void DeviceParams::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("device: mu must be > 0");
    if (!(w_channel > 0.0)) throw std::invalid_argument("device: w_channel must be > 0");
    if (!(l_channel > 0.0)) throw std::invalid_argument("device: l_channel must be > 0");
    if (!(c_ox > 0.0)) throw std::invalid_argument("device: c_ox must be > 0");
    if (!(t_ref > 0.0)) throw std::invalid_argument("device: t_ref must be > 0 K");
    if (!std::isfinite(v_t)) throw std::invalid_argument("device: v_t must be finite");
}

void TempCoefficients::validate() const {
    if (!(mu_exponent >= 0.0)) throw std::invalid_argument("device: mu_exponent must be >= 0");
    if (!std::isfinite(vt_slope)) throw std::invalid_argument("device: vt_slope must be finite");
}

std::string_view to_string(Region region) noexcept {
    switch (region) {
        case Region::Cutoff: return "cutoff";
        case Region::Linear: return "linear";
        case Region::Saturation: return "saturation";
    }
    return "unknown";
}

ScaledParams apply_temperature(const DeviceParams& params, const TempCoefficients& coeffs, double t_j) {
    if (!(t_j > 0.0)) throw std::invalid_argument("junction temperature must be > 0 K");
    const double mu_factor = t_j == params.t_ref ? 1.0 : std::pow(t_j / params.t_ref, -coeffs.mu_exponent);
    return {params.gain() * mu_factor, params.v_t + coeffs.vt_slope * (t_j - params.t_ref)};
}

namespace {

Region classify(double overdrive, double v_ds) noexcept {
    if (overdrive <= 0.0) return Region::Cutoff;
    return v_ds < overdrive ? Region::Linear : Region::Saturation;
}

// Square-law current for a given gain and overdrive, region chosen internally.
double square_law(double k, double overdrive, double v_ds) noexcept {
    switch (classify(overdrive, v_ds)) {
        case Region::Cutoff: return 0.0;
        case Region::Linear: return 0.5 * k * v_ds * (2.0 * overdrive - v_ds);
        case Region::Saturation: return 0.5 * k * overdrive * overdrive;
    }
    return 0.0;
}

void require_forward(double v_ds) {
    if (v_ds < 0.0) throw std::invalid_argument("v_ds < 0: reverse conduction is not modeled");
}

}  // namespace

Region region_of(const DeviceParams& params, const TempCoefficients& coeffs, const OperatingPoint& op) {
    require_forward(op.v_ds);
    const auto s = apply_temperature(params, coeffs, op.t_j);
    return classify(op.v_gs - s.v_t, op.v_ds);
}

double drain_current(const DeviceParams& params, const TempCoefficients& coeffs, const OperatingPoint& op) {
    require_forward(op.v_ds);
    const auto s = apply_temperature(params, coeffs, op.t_j);
    return square_law(s.k, op.v_gs - s.v_t, op.v_ds);
}

double on_resistance(const DeviceParams& params, const TempCoefficients& coeffs, double v_gs, double t_j) {
    const auto s = apply_temperature(params, coeffs, t_j);
    const double overdrive = v_gs - s.v_t;
    if (!(overdrive > 0.0)) throw std::domain_error("on_resistance: v_gs does not exceed V_T, channel is off");
    return 1.0 / (s.k * overdrive);
}

double pinch_off(const DeviceParams& params, const TempCoefficients& coeffs, double v_gs, double t_j) {
    const auto s = apply_temperature(params, coeffs, t_j);
    const double overdrive = v_gs - s.v_t;
    if (!(overdrive > 0.0)) throw std::domain_error("pinch_off: v_gs does not exceed V_T, channel is off");
    return overdrive;
}

// ---------------------------------------------------------------------------

namespace {

struct Projection {
    double k;
    double sse;
};

class VarProFit {
public:
    VarProFit(std::span<const IvPoint> points, const TempCoefficients& coeffs, double t_ref)
        : points_(points), coeffs_(coeffs), t_ref_(t_ref) {
        mu_scale_.reserve(points.size());
        for (const auto& p : points) {
            mu_scale_.push_back(p.t_j == t_ref ? 1.0 : std::pow(p.t_j / t_ref, -coeffs.mu_exponent));
            sum_ii_ += p.i_d * p.i_d;
        }
    }

    // Optimal k for fixed V_T and the resulting residual sum of squares.
    [[nodiscard]] Projection project(double v_t) const {
        double sum_bi = 0.0;
        double sum_bb = 0.0;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const double b = basis(i, v_t);
            sum_bi += b * points_[i].i_d;
            sum_bb += b * b;
        }
        if (sum_bb <= 0.0) return {0.0, sum_ii_};
        const double k = sum_bi / sum_bb;
        double sse = 0.0;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const double r = k * basis(i, v_t) - points_[i].i_d;
            sse += r * r;
        }
        return {k, sse};
    }

    [[nodiscard]] Region region(std::size_t i, double v_t) const {
        const auto& p = points_[i];
        return classify(p.v_gs - threshold_at(p.t_j, v_t), p.v_ds);
    }

private:
    [[nodiscard]] double threshold_at(double t_j, double v_t) const {
        return v_t + coeffs_.vt_slope * (t_j - t_ref_);
    }

    [[nodiscard]] double basis(std::size_t i, double v_t) const {
        const auto& p = points_[i];
        return mu_scale_[i] * square_law(1.0, p.v_gs - threshold_at(p.t_j, v_t), p.v_ds);
    }

    std::span<const IvPoint> points_;
    TempCoefficients coeffs_;
    double t_ref_;
    std::vector<double> mu_scale_;
    double sum_ii_ = 0.0;
};

}  // namespace

DeviceFit fit_parameters(std::span<const IvPoint> points, const TempCoefficients& coeffs, double t_ref,
                         const Geometry& geometry) {
    if (points.size() < 4) {
        throw std::invalid_argument("fit_parameters: need at least 4 IV points, got " +
                                    std::to_string(points.size()));
    }
    std::set<double> gate_voltages;
    double max_vds = 0.0;
    for (const auto& p : points) {
        if (!std::isfinite(p.v_gs) || !std::isfinite(p.v_ds) || !std::isfinite(p.i_d) || !(p.t_j > 0.0)) {
            throw std::invalid_argument("fit_parameters: non-finite or invalid IV point");
        }
        require_forward(p.v_ds);
        gate_voltages.insert(p.v_gs);
        max_vds = std::max(max_vds, p.v_ds);
    }
    if (gate_voltages.size() < 2) {
        throw std::invalid_argument("fit_parameters: degenerate point set, all points share one v_gs");
    }

    // Search window for V_T: above v_hi every point is in cutoff.
    double v_hi = -std::numeric_limits<double>::infinity();
    double v_lo = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        const double shifted = p.v_gs - coeffs.vt_slope * (p.t_j - t_ref);
        v_hi = std::max(v_hi, shifted);
        v_lo = std::min(v_lo, shifted);
    }
    const double span = std::max({max_vds, v_hi - v_lo, 1.0});
    v_lo -= 2.0 * span;

    const VarProFit model(points, coeffs, t_ref);

    constexpr int kGrid = 4000;
    const double h = (v_hi - v_lo) / kGrid;
    double best_vt = v_lo;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kGrid; ++i) {
        const double vt = v_lo + h * i;
        const double sse = model.project(vt).sse;
        if (sse < best_sse) {
            best_sse = sse;
            best_vt = vt;
        }
    }

    const auto refined = boost::math::tools::brent_find_minima(
        [&](double vt) { return model.project(vt).sse; }, best_vt - h, std::min(best_vt + h, v_hi),
        std::numeric_limits<double>::digits / 2);
    const double v_t = refined.second <= best_sse ? refined.first : best_vt;
    const auto proj = model.project(v_t);
    if (!(proj.k > 0.0)) throw std::invalid_argument("fit_parameters: degenerate point set, no conducting points");

    std::size_t linear = 0;
    std::size_t saturation = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto r = model.region(i, v_t);
        linear += r == Region::Linear ? 1 : 0;
        saturation += r == Region::Saturation ? 1 : 0;
    }
    if (linear == 0 || saturation == 0) {
        throw std::invalid_argument(
            "fit_parameters: degenerate point set, points must span both linear and saturation regions");
    }

    DeviceParams params;
    params.w_channel = geometry.w_channel;
    params.l_channel = geometry.l_channel;
    params.c_ox = geometry.c_ox;
    params.mu = proj.k / (geometry.w_channel / geometry.l_channel * geometry.c_ox);
    params.v_t = v_t;
    params.t_ref = t_ref;
    params.validate();

    return {params, proj.k, v_t, std::sqrt(proj.sse / static_cast<double>(points.size()))};
}

}  // namespace pcbench::device
