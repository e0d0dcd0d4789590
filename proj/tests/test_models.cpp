#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "rcosc/catalog.hpp"
#include "rcosc/errors.hpp"
#include "rcosc/types.hpp"
#include "rcosc/validate.hpp"

using namespace rcosc;

namespace {

OscillatorConfig reference_config() {
    OscillatorConfig c;
    c.c_i = 330e-12;
    c.alpha = 0.5;
    c.v_p = 5.0;
    c.sensor = {330e3, 33e-12};
    return c;
}

} // namespace

TEST_CASE("catalog holds the five parts with data-sheet values") {
    const auto cat = builtin_catalog();
    REQUIRE(cat.size() == 5);

    const OpAmpModel& ad741 = find_opamp(cat, "AD741");
    CHECK(ad741.gbw_hz == 1e6);
    CHECK(ad741.slew_rate == 0.5e6);
    CHECK(ad741.v_offset == 5e-3);
    CHECK(ad741.i_bias == 500e-9);
    CHECK_FALSE(ad741.c_parasitic.has_value());
    CHECK(ad741.delay_lh_or_zero() == 300e-9);
    CHECK(ad741.has_assumed_defaults());

    const OpAmpModel& lt1360 = find_opamp(cat, "LT1360");
    CHECK(lt1360.gbw_hz == 60e6);
    CHECK(lt1360.slew_rate == 800e6);
    CHECK(lt1360.v_offset == 0.3e-3);
    CHECK(lt1360.i_bias == 250e-9);
    CHECK(lt1360.c_parasitic.value() == 4e-12);

    const OpAmpModel& opa177 = find_opamp(cat, "OPA177");
    CHECK(opa177.gbw_hz == 0.6e6);
    CHECK(opa177.slew_rate == 0.3e6);
    CHECK(opa177.v_offset == 0.6e-3);
    CHECK(opa177.i_bias == 6e-9);

    const OpAmpModel& tl071 = find_opamp(cat, "TL071");
    CHECK(tl071.gbw_hz == 5.25e6);
    CHECK(tl071.c_parasitic.value() == 2e-12);
    CHECK(tl071.delay_lh_or_zero() == 310e-9);

    const OpAmpModel& ltc1049 = find_opamp(cat, "LTC1049");
    CHECK(ltc1049.gbw_hz == 0.8e6);
    CHECK(ltc1049.v_offset == 0.01e-3);
}

TEST_CASE("find_opamp ignores case and rejects unknown names") {
    const auto cat = builtin_catalog();
    CHECK(find_opamp(cat, "opa177").name == "OPA177");
    CHECK(find_opamp(cat, "Lt1360").name == "LT1360");
    CHECK_THROWS_AS(find_opamp(cat, "LM741"), OscError);
    try {
        find_opamp(cat, "LM741");
    } catch (const OscError& e) {
        CHECK(e.code() == Err::UNKNOWN_OPAMP);
    }
    CHECK_THROWS_AS(find_opamp({}, "OPA177"), OscError);
    try {
        find_opamp({}, "OPA177");
    } catch (const OscError& e) {
        CHECK(e.code() == Err::EMPTY_CATALOG);
    }
}

TEST_CASE("a0w0 converts the data-sheet bandwidth to rad/s") {
    OpAmpModel m;
    m.gbw_hz = 0.6e6;
    CHECK(m.a0w0() == doctest::Approx(3.7699111843077517e6).epsilon(1e-15));
}

TEST_CASE("profile_from_opamp drives all three stages with one part") {
    const auto cat = builtin_catalog();
    const NonIdealityProfile p = profile_from_opamp(find_opamp(cat, "AD741"));
    CHECK(p.integrator_opamp.name == "AD741");
    CHECK(p.schmitt_opamp.name == "AD741");
    CHECK(p.zcd.v_offset_z == 5e-3);
    CHECK(p.zcd.delay_lh == 300e-9);
    CHECK(p.on(Effect::GBW));
    CHECK(p.on(Effect::DELAYS));
}

TEST_CASE("effect toggles gate the effective parameters") {
    const auto cat = builtin_catalog();
    NonIdealityProfile p = profile_from_opamp(find_opamp(cat, "OPA177"));
    CHECK(p.v_os_eff() == 0.6e-3);
    CHECK(p.i_b_eff() == 6e-9);
    CHECK(p.v_os_prime_eff(330e3) ==
          doctest::Approx(0.6e-3 + 6e-9 * 330e3).epsilon(1e-15));

    p.enabled.clear();
    CHECK(p.a0w0_eff() == std::numeric_limits<double>::infinity());
    CHECK(p.slew_eff() == std::numeric_limits<double>::infinity());
    CHECK(p.v_os_eff() == 0.0);
    CHECK(p.i_b_eff() == 0.0);
    CHECK(p.v_oz_eff() == 0.0);
    CHECK(p.schmitt_delay_lh_eff() == 0.0);
    CHECK(p.zcd_delay_hl_eff() == 0.0);
}

TEST_CASE("near-ideal profile passes validation despite unlimited slew") {
    const OscillatorConfig c = reference_config();
    CHECK(validate(c, near_ideal_profile()).empty());
}

TEST_CASE("validate flags non-positive components") {
    const NonIdealityProfile p = near_ideal_profile();

    OscillatorConfig c = reference_config();
    c.c_i = 0.0;
    auto v = validate(c, p);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().code == Err::NON_POSITIVE_COMPONENT);

    c = reference_config();
    c.alpha = 1.0;
    v = validate(c, p);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().code == Err::NON_POSITIVE_COMPONENT);

    c = reference_config();
    c.sensor.r_x = -5.0;
    v = validate(c, p);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().code == Err::NON_POSITIVE_COMPONENT);
}

TEST_CASE("validate reports a missing leakage path") {
    OscillatorConfig c = reference_config();
    c.sensor.r_x = std::numeric_limits<double>::infinity();
    const auto v = validate(c, near_ideal_profile());
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().code == Err::NO_LEAKAGE_PATH);
}

TEST_CASE("validate rejects alpha at or below the charge-transfer bound") {
    OscillatorConfig c = reference_config();
    c.sensor.c_x = 90e-12; // 2X = 0.5454 > alpha
    const auto v = validate(c, near_ideal_profile());
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().code == Err::CROSS_OVER);

    c.sensor.c_x = 82.5e-12; // 2X = alpha exactly; strict inequality
    const auto v2 = validate(c, near_ideal_profile());
    REQUIRE_FALSE(v2.empty());
    CHECK(v2.front().code == Err::CROSS_OVER);
}

TEST_CASE("validate never throws on NaN input") {
    OscillatorConfig c = reference_config();
    c.alpha = std::numeric_limits<double>::quiet_NaN();
    const auto v = validate(c, near_ideal_profile());
    CHECK_FALSE(v.empty());
}

TEST_CASE("validate_or_throw surfaces the first violation") {
    OscillatorConfig c = reference_config();
    c.v_p = -1.0;
    CHECK_THROWS_AS(validate_or_throw(c, near_ideal_profile()), OscError);
}

TEST_CASE("ramp start must clear the detector threshold") {
    // Start voltage v_p*(alpha - 2X - gamma) = 5*(0.5 - 0.2 - gamma). With an
    // absurd detector offset the detector would sit above the ramp start.
    OscillatorConfig c = reference_config();
    NonIdealityProfile p = near_ideal_profile();
    p.zcd.v_offset_z = 2.0;
    const auto v = validate(c, p);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().code == Err::CROSS_OVER);
}

TEST_CASE("period set helpers") {
    const PeriodSet p{1.0, 2.0, 3.0, 4.0};
    CHECK(p.total() == 10.0);
    OscillatorConfig c = reference_config();
    CHECK(c.x_ratio() == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("estimate method names round trip") {
    CHECK(estimate_method_from_string("IDEAL_INV") == EstimateMethod::IDEAL_INV);
    CHECK(estimate_method_from_string("COMPENSATED_AVG") ==
          EstimateMethod::COMPENSATED_AVG);
    CHECK(to_string(EstimateMethod::IDEAL_INV_AVG) ==
          std::string("IDEAL_INV_AVG"));
    CHECK_THROWS_AS(estimate_method_from_string("BOGUS"), OscError);
}
