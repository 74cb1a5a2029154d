#include "pcbench/device_model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace pcbench::device;

namespace {

// k = 2 A/V^2, V_T = 4 V at 300 K, temperature laws switched off.
DeviceModel reference_device(double k = 2.0, double v_t = 4.0) {
    return {DeviceParams::from_gain(k, v_t, 300.0), TempCoefficients{0.0, 0.0}};
}

double current(const DeviceModel& d, double v_gs, double v_ds, double t_j = 300.0) {
    return drain_current(d, {v_gs, v_ds, t_j});
}

std::vector<IvPoint> synthetic_points(const DeviceModel& d, const std::vector<double>& v_gs_list) {
    std::vector<IvPoint> pts;
    for (double v_gs : v_gs_list) {
        for (double v_ds = 0.5; v_ds <= 20.0; v_ds += 0.5) {
            pts.push_back({v_gs, v_ds, current(d, v_gs, v_ds), 300.0});
        }
    }
    return pts;
}

}  // namespace

TEST_CASE("operating regions") {
    const auto d = reference_device();
    CHECK(region_of(d.params, d.coeffs, {3.0, 1.0, 300.0}) == Region::Cutoff);
    CHECK(region_of(d.params, d.coeffs, {14.0, 1.0, 300.0}) == Region::Linear);
    CHECK(region_of(d.params, d.coeffs, {14.0, 10.0, 300.0}) == Region::Saturation);
    CHECK(region_of(d.params, d.coeffs, {4.0, 1.0, 300.0}) == Region::Cutoff);
    CHECK(to_string(Region::Linear) == "linear");
}

TEST_CASE("drain current in each region") {
    const auto d = reference_device();
    CHECK(current(d, 14.0, 1.0) == doctest::Approx(19.0).epsilon(1e-15));
    CHECK(current(d, 14.0, 10.0) == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(current(d, 14.0, 17.5) == doctest::Approx(100.0).epsilon(1e-15));
    CHECK(current(d, 14.0, 0.0) == 0.0);
    CHECK(current(d, 3.0, 5.0) == 0.0);
    CHECK_THROWS_AS((void)current(d, 14.0, -0.1), std::invalid_argument);
}

TEST_CASE("on-resistance and pinch-off") {
    const auto d = reference_device();
    CHECK(on_resistance(d, 14.0, 300.0) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK_THROWS_AS((void)on_resistance(d, 4.0, 300.0), std::domain_error);
    CHECK(pinch_off(d.params, d.coeffs, 14.0, 300.0) == doctest::Approx(10.0));
    CHECK(pinch_off(d.params, d.coeffs, 4.0 + 1e-3, 300.0) == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK_THROWS_AS((void)pinch_off(d.params, d.coeffs, 3.0, 300.0), std::domain_error);

    const double h = 1e-6;
    const double slope = (current(d, 14.0, 2 * h) - current(d, 14.0, 0.0)) / (2 * h);
    CHECK(1.0 / slope == doctest::Approx(on_resistance(d, 14.0, 300.0)).epsilon(1e-3));
}

TEST_CASE("temperature scaling") {
    DeviceModel d{DeviceParams::from_gain(2.0, 4.0, 300.0), TempCoefficients{2.5, -0.005}};
    const auto at_ref = apply_temperature(d.params, d.coeffs, 300.0);
    CHECK(at_ref.k == 2.0);
    CHECK(at_ref.v_t == 4.0);
    const auto hot = apply_temperature(d.params, d.coeffs, 600.0);
    CHECK(hot.k / 2.0 == doctest::Approx(std::pow(2.0, -2.5)).epsilon(1e-12));
    CHECK(hot.k / 2.0 == doctest::Approx(0.17678).epsilon(1e-4));
    const auto warm = apply_temperature(d.params, d.coeffs, 400.0);
    CHECK(at_ref.v_t - warm.v_t == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("continuity at the pinch-off boundary") {
    for (double k : {0.5, 2.0, 13.68}) {
        for (double v_t : {1.0, 2.6, 4.0}) {
            for (double v_gs : {6.0, 10.0, 20.0}) {
                const auto d = reference_device(k, v_t);
                const double p = v_gs - v_t;
                const double sat = current(d, v_gs, p);
                const double lin = current(d, v_gs, p - 1e-12);
                const double above = current(d, v_gs, p + 1e-12);
                CHECK(std::abs(lin - sat) <= 1e-9 * sat);
                CHECK(above == sat);
            }
        }
    }
}

TEST_CASE("saturation is flat and the characteristic is monotone") {
    const auto d = reference_device();
    const double sat = current(d, 14.0, 10.0);
    for (double v_ds = 10.0; v_ds < 40.0; v_ds += 0.37) CHECK(current(d, 14.0, v_ds) == sat);

    double prev = -1.0;
    for (double v_ds = 0.0; v_ds <= 10.0; v_ds += 0.01) {
        const double i = current(d, 14.0, v_ds);
        CHECK(i >= prev);
        prev = i;
    }
    for (double v_ds : {0.0, 0.5, 3.0, 12.0}) {
        double last = -1.0;
        for (double v_gs = 0.0; v_gs <= 20.0; v_gs += 0.25) {
            const double i = current(d, v_gs, v_ds);
            CHECK(i >= last);
            last = i;
        }
    }
}

TEST_CASE("fit recovers noiseless parameters") {
    const auto d = reference_device();
    const auto pts = synthetic_points(d, {10.0, 12.0, 14.0});
    const auto fit = fit_parameters(pts, d.coeffs, 300.0);
    CHECK(fit.k == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(fit.v_t == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(fit.rms_residual < 1e-6);
    CHECK(fit.params.gain() == doctest::Approx(fit.k));
}

TEST_CASE("fit tolerates 1% multiplicative noise") {
    const auto d = reference_device();
    auto pts = synthetic_points(d, {10.0, 12.0, 14.0});
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> z;
    for (auto& p : pts) p.i_d *= 1.0 + 0.01 * z(rng);
    const auto fit = fit_parameters(pts, d.coeffs, 300.0);
    CHECK(fit.k == doctest::Approx(2.0).epsilon(0.02));
    CHECK(fit.v_t == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("fit uses the temperature laws of hot points") {
    DeviceModel d{DeviceParams::from_gain(13.68, 2.6, 298.15), TempCoefficients{}};
    std::vector<IvPoint> pts;
    for (double t_j : {298.15, 423.15}) {
        for (double v_gs : {12.0, 16.0, 20.0}) {
            for (double v_ds = 1.0; v_ds <= 20.0; v_ds += 1.0) {
                pts.push_back({v_gs, v_ds, drain_current(d, {v_gs, v_ds, t_j}), t_j});
            }
        }
    }
    const auto fit = fit_parameters(pts, d.coeffs, 298.15);
    CHECK(fit.k == doctest::Approx(13.68).epsilon(1e-6));
    CHECK(fit.v_t == doctest::Approx(2.6).epsilon(1e-6));
}

TEST_CASE("fit rejects degenerate point sets") {
    const auto d = reference_device();
    std::vector<IvPoint> one_gate{{14.0, 1.0, 19.0, 300.0}, {14.0, 2.0, 36.0, 300.0}, {14.0, 3.0, 51.0, 300.0}};
    CHECK_THROWS_AS((void)fit_parameters(one_gate, d.coeffs, 300.0), std::invalid_argument);

    auto single_vgs = synthetic_points(d, {14.0});
    CHECK_THROWS_AS((void)fit_parameters(single_vgs, d.coeffs, 300.0), std::invalid_argument);

    std::vector<IvPoint> saturated;
    for (double v_gs : {8.0, 10.0, 12.0}) {
        for (double v_ds : {15.0, 18.0}) saturated.push_back({v_gs, v_ds, current(d, v_gs, v_ds), 300.0});
    }
    CHECK_THROWS_AS((void)fit_parameters(saturated, d.coeffs, 300.0), std::invalid_argument);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(DeviceParams::from_gain(-1.0, 4.0, 300.0).validate(), std::invalid_argument);
    CHECK_NOTHROW(DeviceParams::from_gain(2.0, 4.0, 300.0).validate());
}
