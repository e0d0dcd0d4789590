#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "rcosc/analytic.hpp"
#include "rcosc/catalog.hpp"
#include "rcosc/errors.hpp"
#include "rcosc/measure.hpp"

using namespace rcosc;

namespace {

OscillatorConfig reference_config() {
    OscillatorConfig cfg;
    cfg.c_i = 330e-12;
    cfg.alpha = 0.5;
    cfg.v_p = 5.0;
    cfg.sensor = {330e3, 33e-12};
    return cfg;
}

NonIdealityProfile no_effects_profile() {
    NonIdealityProfile p = near_ideal_profile();
    p.enabled.clear();
    return p;
}

std::vector<PeriodSet> repeat_cycles(const PeriodSet& p, std::size_t n) {
    return std::vector<PeriodSet>(n, p);
}

} // namespace

TEST_CASE("timer capture floors to whole counts") {
    PeriodSet p;
    p.tp1 = p.tp2 = p.tp3 = p.tp4 = 5.445e-05; // 871.2 counts at 16 MHz
    measure::TimerModel timer;
    const auto q = measure::quantize({p}, timer, 0);
    REQUIRE(q.size() == 1);
    CHECK(q[0].tp1 == 5.44375e-05); // 871 counts exactly
    CHECK(q[0].tp2 == 5.44375e-05);
    CHECK(q[0].tp3 == 5.44375e-05);
    CHECK(q[0].tp4 == 5.44375e-05);

    // Values already on the count lattice pass through unchanged.
    const auto q2 = measure::quantize(q, timer, 0);
    CHECK(q2[0].tp1 == q[0].tp1);
    CHECK(q2[0].tp2 == q[0].tp2);
}

TEST_CASE("timer capture rejects counter overflow") {
    PeriodSet p;
    p.tp1 = p.tp2 = p.tp3 = p.tp4 = 5e-3; // 80000 counts > 16-bit range
    measure::TimerModel timer;
    try {
        measure::quantize({p}, timer, 0);
        FAIL("expected a timer overflow");
    } catch (const OscError& e) {
        CHECK(e.code() == Err::TIMER_OVERFLOW);
        CHECK(std::string(e.what()).find("16-bit") != std::string::npos);
    }
    // A wider counter absorbs the same period.
    timer.bit_width = 32;
    CHECK_NOTHROW(measure::quantize({p}, timer, 0));
}

TEST_CASE("timer parameters are validated") {
    PeriodSet p;
    p.tp1 = p.tp2 = p.tp3 = p.tp4 = 1e-5;
    measure::TimerModel timer;
    timer.clock_hz = 0.0;
    CHECK_THROWS_AS(measure::quantize({p}, timer, 0), OscError);
    timer = measure::TimerModel{};
    timer.bit_width = 4;
    CHECK_THROWS_AS(measure::quantize({p}, timer, 0), OscError);
    timer.bit_width = 65;
    CHECK_THROWS_AS(measure::quantize({p}, timer, 0), OscError);
}

TEST_CASE("capture jitter is deterministic per seed") {
    const auto cycles = repeat_cycles(
        PeriodSet{5.445e-05, 5.445e-05, 5.445e-05, 5.445e-05}, 32);
    measure::TimerModel timer;
    timer.capture_jitter_rms = 1e-6; // 16 counts rms
    const auto a = measure::quantize(cycles, timer, 7);
    const auto b = measure::quantize(cycles, timer, 7);
    const auto c = measure::quantize(cycles, timer, 8);
    REQUIRE(a.size() == b.size());
    bool all_equal_ab = true;
    bool all_equal_ac = true;
    bool spread = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        all_equal_ab &= a[i].tp1 == b[i].tp1 && a[i].tp2 == b[i].tp2 &&
                        a[i].tp3 == b[i].tp3 && a[i].tp4 == b[i].tp4;
        all_equal_ac &= a[i].tp1 == c[i].tp1;
        spread |= a[i].tp1 != a[0].tp1;
    }
    CHECK(all_equal_ab);
    CHECK_FALSE(all_equal_ac);
    CHECK(spread);
}

TEST_CASE("jittered counts clamp at zero") {
    PeriodSet p;
    p.tp1 = p.tp2 = p.tp3 = p.tp4 = 1.0 / 16e6; // one count
    measure::TimerModel timer;
    timer.capture_jitter_rms = 1e-3; // overwhelming jitter
    const auto q = measure::quantize(repeat_cycles(p, 64), timer, 3);
    for (const PeriodSet& c : q) {
        CHECK(c.tp1 >= 0.0);
        CHECK(c.tp2 >= 0.0);
        CHECK(c.tp3 >= 0.0);
        CHECK(c.tp4 >= 0.0);
    }
}

TEST_CASE("half-cycle averaging of one cycle") {
    PeriodSet p;
    p.tp1 = 21e-6;
    p.tp3 = 44e-6;
    p.tp2 = 50e-6;
    p.tp4 = 54e-6;
    const AveragedPeriods a = measure::single_cycle_average(p);
    CHECK(a.t1 == doctest::Approx(32.5e-6).epsilon(1e-15));
    CHECK(a.t2 == doctest::Approx(52e-6).epsilon(1e-15));
    CHECK(a.t_offset_skew == doctest::Approx(11.5e-6).epsilon(1e-15));
}

TEST_CASE("sample statistics") {
    const measure::Stats st = measure::statistics({1.0, 2.0, 3.0});
    CHECK(st.mean == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(st.sd == doctest::Approx(1.0).epsilon(1e-15));
    REQUIRE(st.snr_db.has_value());
    CHECK(*st.snr_db == doctest::Approx(8.450980400142567).epsilon(1e-12));
}

TEST_CASE("statistics signal-to-noise ratio is scale invariant") {
    const measure::Stats base = measure::statistics({1.0, 2.0, 3.0});
    const measure::Stats scaled =
        measure::statistics({1000.0, 2000.0, 3000.0});
    CHECK(scaled.mean == doctest::Approx(1000.0 * base.mean));
    CHECK(scaled.sd == doctest::Approx(1000.0 * base.sd));
    CHECK(*scaled.snr_db == doctest::Approx(*base.snr_db).epsilon(1e-12));
}

TEST_CASE("statistics flag zero variance instead of throwing") {
    const measure::Stats st = measure::statistics({5.0, 5.0, 5.0});
    CHECK(st.mean == 5.0);
    CHECK(st.sd == 0.0);
    CHECK_FALSE(st.snr_db.has_value());
}

TEST_CASE("statistics need two samples") {
    try {
        measure::statistics(std::vector<double>{42.0});
        FAIL("expected insufficient samples");
    } catch (const OscError& e) {
        CHECK(e.code() == Err::INSUFFICIENT_SAMPLES);
    }
}

TEST_CASE("pipeline inverts ideal cycles exactly") {
    const OscillatorConfig cfg = reference_config();
    const auto cycles = repeat_cycles(analytic::ideal_periods(cfg), 5);
    measure::PipelineOptions opt;
    const measure::PipelineResult res =
        measure::estimate_pipeline(cycles, cfg, no_effects_profile(), opt);
    REQUIRE(res.estimates.size() == 5);
    CHECK(res.rx_series.unit == "ohm");
    CHECK(res.cx_series.unit == "F");
    for (const SensorEstimate& e : res.estimates) {
        CHECK(e.r_x_est == doctest::Approx(330e3).epsilon(1e-12));
        CHECK(e.c_x_est == doctest::Approx(33e-12).epsilon(1e-12));
        CHECK(e.method == EstimateMethod::IDEAL_INV);
    }
    const measure::Stats st = measure::statistics(res.rx_series);
    CHECK(st.sd == 0.0);
    CHECK_FALSE(st.snr_db.has_value());
}

TEST_CASE("per-cycle averaging cancels the bandwidth ramp loss") {
    const OscillatorConfig cfg = reference_config();
    const double a0w0 = find_opamp(builtin_catalog(), "OPA177").a0w0();
    const auto [fwd, avg] = analytic::gbw_only_periods(cfg, a0w0);
    (void)avg;
    measure::PipelineOptions opt;
    opt.mode = EstimateMethod::IDEAL_INV_AVG;
    const measure::PipelineResult res = measure::estimate_pipeline(
        repeat_cycles(fwd, 3), cfg, no_effects_profile(), opt);
    const double rx_err =
        analytic::relative_error(res.estimates[0].r_x_est, cfg.sensor.r_x);
    const double cx_err =
        analytic::relative_error(res.estimates[0].c_x_est, cfg.sensor.c_x);
    CHECK(rx_err == doctest::Approx(0.24357964966620038).epsilon(1e-9));
    CHECK(std::abs(cx_err) < 1e-9);
    CHECK(res.estimates[0].method == EstimateMethod::IDEAL_INV_AVG);
}

TEST_CASE("pipeline compensated modes undo the forward model") {
    const OscillatorConfig cfg = reference_config();
    const NonIdealityProfile p =
        profile_from_opamp(find_opamp(builtin_catalog(), "OPA177"));
    const auto cycles = repeat_cycles(analytic::nonideal_periods(cfg, p), 3);

    measure::PipelineOptions opt;
    opt.mode = EstimateMethod::COMPENSATED;
    const auto raw = measure::estimate_pipeline(cycles, cfg, p, opt);
    CHECK(std::abs(analytic::relative_error(raw.estimates[0].r_x_est,
                                            330e3)) < 1e-4);
    CHECK(std::abs(analytic::relative_error(raw.estimates[0].c_x_est,
                                            33e-12)) < 1e-4);

    opt.mode = EstimateMethod::COMPENSATED_AVG;
    const auto avg = measure::estimate_pipeline(cycles, cfg, p, opt);
    CHECK(avg.estimates[0].method == EstimateMethod::COMPENSATED_AVG);
    CHECK(std::abs(analytic::relative_error(avg.estimates[0].r_x_est,
                                            330e3)) < 1e-4);
    CHECK(std::abs(analytic::relative_error(avg.estimates[0].c_x_est,
                                            33e-12)) < 1e-4);
}

TEST_CASE("quantization bounds the resistance error by the count step") {
    const OscillatorConfig cfg = reference_config();
    const PeriodSet ideal = analytic::ideal_periods(cfg);
    measure::PipelineOptions opt;
    opt.quantize = true;
    const measure::PipelineResult res = measure::estimate_pipeline(
        repeat_cycles(ideal, 2), cfg, no_effects_profile(), opt);
    const double rx_err =
        analytic::relative_error(res.estimates[0].r_x_est, cfg.sensor.r_x);
    const double lsb_pct = 100.0 / (opt.timer.clock_hz * ideal.tp2);
    CHECK(std::abs(rx_err) <= 2.0 * lsb_pct);
    CHECK(res.cycles[0].tp2 == 5.44375e-05);
}

TEST_CASE("pipeline rejects an empty cycle list") {
    measure::PipelineOptions opt;
    try {
        measure::estimate_pipeline({}, reference_config(),
                                   no_effects_profile(), opt);
        FAIL("expected insufficient cycles");
    } catch (const OscError& e) {
        CHECK(e.code() == Err::INSUFFICIENT_CYCLES);
    }
}

TEST_CASE("series CSV lists one row per cycle") {
    const OscillatorConfig cfg = reference_config();
    const auto cycles = repeat_cycles(analytic::ideal_periods(cfg), 4);
    measure::PipelineOptions opt;
    const measure::PipelineResult res =
        measure::estimate_pipeline(cycles, cfg, no_effects_profile(), opt);
    std::ostringstream os;
    measure::write_series_csv(os, res);
    const std::string text = os.str();
    CHECK(text.rfind("cycle_index,tp1_s,tp2_s,tp3_s,tp4_s,t1_s,t2_s,"
                     "rx_est_ohm,cx_est_f,method\n",
                     0) == 0);
    CHECK(text.find("IDEAL_INV") != std::string::npos);
    std::size_t rows = 0;
    for (char ch : text) {
        if (ch == '\n') ++rows;
    }
    CHECK(rows == 5); // header plus four cycles
}
