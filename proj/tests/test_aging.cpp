#include "pcbench/aging.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace pcbench;
using namespace pcbench::aging;

namespace {

// Records produced by constant swings, r_ds_on sampled after each cycle's damage.
std::vector<CycleRecord> constant_swing_run(const DegradationParams& p, double swing, std::size_t n,
                                            double r_base = 0.01) {
    std::vector<CycleRecord> out;
    AgingState s;
    for (std::size_t i = 1; i <= n; ++i) {
        s = accumulate_damage(s, p, swing);
        out.push_back({i, 400.0 + swing, 400.0, swing, r_base * s.r_multiplier, 0.0, true});
    }
    return out;
}

}  // namespace

TEST_CASE("damage increments") {
    const DegradationParams p;
    CHECK(accumulate_damage({}, p, 100.0).n_effective == 1.0);
    CHECK(accumulate_damage({}, p, 200.0).n_effective == doctest::Approx(16.0).epsilon(1e-15));
    const AgingState s{123.0, rds_multiplier(p, 123.0)};
    CHECK(accumulate_damage(s, p, 0.0) == s);
    CHECK_THROWS_AS((void)accumulate_damage(s, p, -1.0), std::invalid_argument);
}

TEST_CASE("multiplier law") {
    const DegradationParams p;
    CHECK(rds_multiplier(p, 0.0) == 1.0);
    CHECK(rds_multiplier(p, p.n0) == doctest::Approx(1.05).epsilon(1e-15));
    CHECK(rds_multiplier(p, p.n0 / 10.0) - 1.0 == doctest::Approx(p.alpha / 1000.0).epsilon(1e-12));
    double prev = 1.0;
    for (double n = 0.0; n < 3e5; n += 997.0) {
        const double m = rds_multiplier(p, n);
        CHECK(m >= prev);
        prev = m;
    }
}

TEST_CASE("early drift is negligible") {
    for (double beta : {2.0, 3.0, 4.5}) {
        DegradationParams p;
        p.beta = beta;
        const double life = p.n0 * std::pow(0.05 / p.alpha, 1.0 / beta);
        const double early = rds_multiplier(p, 0.1 * life) - 1.0;
        CHECK(early < p.alpha * std::pow(10.0, -beta + 1.0));
    }
}

TEST_CASE("clamped drain-source measurement") {
    const ClampConfig c;
    CHECK(vds_on_measured(0.5, c) == 0.5);
    CHECK(vds_on_measured(50.0, c) == 5.0);
    CHECK(vds_on_measured(5.0, c) == 5.0);
    const ClampConfig offset{5.0, 0.1};
    CHECK(vds_on_measured(0.5, offset) == doctest::Approx(0.6));
    double prev = 0.0;
    for (double v = 0.0; v < 10.0; v += 0.01) {
        const double m = vds_on_measured(v, offset);
        CHECK(m >= prev);
        prev = m;
    }
}

TEST_CASE("failure detection") {
    DegradationParams p;
    const auto at_ref = constant_swing_run(p, p.delta_t_ref, 110000);
    const auto n = cycles_to_failure(at_ref, FailureCriterion{0.05});
    REQUIRE(n.has_value());
    CHECK(std::abs(static_cast<double>(*n) - p.n0) <= 1.0);

    const auto longer = constant_swing_run(p, p.delta_t_ref, 130000);
    const auto n10 = cycles_to_failure(longer, FailureCriterion{0.10});
    REQUIRE(n10.has_value());
    CHECK(std::abs(static_cast<double>(*n10) - p.n0 * std::cbrt(2.0)) <= 1.0);

    const auto short_run = constant_swing_run(p, p.delta_t_ref, 10);
    CHECK_FALSE(cycles_to_failure(short_run, FailureCriterion{}).has_value());
}

TEST_CASE("invalid records do not age the device") {
    const DegradationParams p;
    const CycleRecord ok{1, 420.0, 320.0, 100.0, 0.01, 0.0, true};
    const CycleRecord hot{2, 470.0, 320.0, 150.0, 0.01, 0.0, false};

    AgingState with_hot;
    AgingState without_hot;
    for (int i = 0; i < 50; ++i) {
        with_hot = apply_record(with_hot, p, ok);
        with_hot = apply_record(with_hot, p, hot);
        without_hot = apply_record(without_hot, p, ok);
    }
    CHECK(with_hot == without_hot);
    CHECK(with_hot.n_effective == 50.0);
}

TEST_CASE("Coffin-Manson fit on exact data") {
    std::vector<LifetimePoint> pts;
    for (double dt : {50.0, 100.0}) pts.push_back({dt, 1e14 * std::pow(dt, -5.0)});
    const auto fit = fit_coffin_manson(pts);
    CHECK(fit.coefficient == doctest::Approx(1e14).epsilon(1e-9));
    CHECK(fit.exponent == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK(fit.cycles_at(100.0) == doctest::Approx(1e4).epsilon(1e-9));
}

TEST_CASE("Coffin-Manson fit under lognormal noise") {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> z;
    std::vector<LifetimePoint> pts;
    for (int i = 0; i < 10; ++i) {
        const double dt = 40.0 + 10.0 * i;
        pts.push_back({dt, 1e14 * std::pow(dt, -5.0) * std::exp(0.05 * z(rng))});
    }
    const auto fit = fit_coffin_manson(pts);
    CHECK(fit.exponent == doctest::Approx(5.0).epsilon(0.10));
}

TEST_CASE("Coffin-Manson fit rejects degenerate data") {
    std::vector<LifetimePoint> same{{80.0, 1e5}, {80.0, 2e5}};
    CHECK_THROWS_AS((void)fit_coffin_manson(same), std::invalid_argument);
    std::vector<LifetimePoint> negative{{80.0, 1e5}, {-10.0, 2e5}};
    CHECK_THROWS_AS((void)fit_coffin_manson(negative), std::invalid_argument);
}

TEST_CASE("parameter validation") {
    DegradationParams p;
    p.beta = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    CHECK_THROWS_AS((ClampConfig{0.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS(FailureCriterion{0.0}.validate(), std::invalid_argument);
}
