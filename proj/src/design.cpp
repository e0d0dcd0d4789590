#include "rcosc/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "rcosc/csv.hpp"
#include "rcosc/errors.hpp"

namespace rcosc::design {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double worst_case_offset(const DesignRequirements& req,
                         const OpAmpModel& opamp) {
    return opamp.v_offset + opamp.i_bias * req.rx_max;
}

double rail_factor(const DesignRequirements& req, double v_os_prime) {
    const double v = v_os_prime / req.v_p;
    const double f = 1.0 - v * v;
    if (!(f > 0.0)) {
        throw OscError(Err::NEGATIVE_PERIOD,
                       "effective offset " + fmt_double(v_os_prime) +
                           " V reaches the rail v_p = " + fmt_double(req.v_p) +
                           " V");
    }
    return f;
}

const char* cause_for(const std::string& criterion) {
    if (criterion == "alpha") return "ALPHA_FAIL";
    if (criterion == "epsilon") return "EPSILON_FAIL";
    if (criterion == "slew") return "SR_FAIL";
    if (criterion == "comparator_tau") return "TAU_FAIL";
    return "TAU_P_FAIL";
}

} // namespace

CheckResult check_alpha(const DesignRequirements& req) {
    CheckResult r;
    r.criterion = "alpha";
    r.bound = 2.0 * req.cx_max / req.c_i;
    r.actual = req.alpha;
    r.margin = req.alpha - r.bound;
    r.pass = req.alpha > r.bound;
    return r;
}

double epsilon_bound(const DesignRequirements& req, const OpAmpModel& opamp,
                     GbwReading reading) {
    const double gbw =
        reading == GbwReading::RadPerSec ? opamp.a0w0() : opamp.gbw_hz;
    const double v_os_prime = worst_case_offset(req, opamp);
    const double v = v_os_prime / req.v_p;
    const double prefactor = 100.0 / rail_factor(req, v_os_prime);
    const double gbw_term = 1.0 / (gbw * req.rx_min * req.c_i);
    double offset_term = 0.0;
    if (req.cx_max > 0.0) {
        const double denom = req.alpha * req.c_i / req.cx_max - 2.0;
        if (!(denom > 0.0)) return kInf;
        offset_term = v * (1.0 / denom + v);
    }
    return prefactor * (gbw_term + offset_term);
}

CheckResult check_epsilon(const DesignRequirements& req,
                          const OpAmpModel& opamp, GbwReading reading) {
    CheckResult r;
    r.criterion = "epsilon";
    r.bound = epsilon_bound(req, opamp, reading);
    r.actual = req.epsilon_pct;
    r.margin = req.epsilon_pct - r.bound;
    r.pass = req.epsilon_pct > r.bound;
    return r;
}

CheckResult check_slew(const DesignRequirements& req,
                       const OpAmpModel& opamp) {
    CheckResult r;
    r.criterion = "slew";
    r.bound = 2.0 * req.v_p / (req.rx_min * req.c_i);
    r.actual = opamp.slew_rate;
    r.margin = opamp.slew_rate - r.bound;
    r.pass = opamp.slew_rate > r.bound;
    return r;
}

CheckResult check_comparator(const DesignRequirements& req,
                             double comparator_tau, double v_os_prime) {
    CheckResult r;
    r.criterion = "comparator_tau";
    r.bound = req.epsilon_pct * req.alpha * req.rx_max * req.c_i /
              (100.0 * rail_factor(req, v_os_prime));
    r.actual = comparator_tau;
    r.margin = r.bound - comparator_tau;
    r.pass = comparator_tau < r.bound;
    return r;
}

CheckResult check_xor(const DesignRequirements& req, double xor_tau,
                      double comparator_tau, double v_os_prime) {
    CheckResult r;
    r.criterion = "xor_tau";
    r.bound = req.epsilon_pct * req.alpha * req.rx_max * req.c_i /
                  (100.0 * rail_factor(req, v_os_prime)) +
              comparator_tau;
    r.actual = xor_tau;
    r.margin = r.bound - xor_tau;
    r.pass = xor_tau < r.bound;
    return r;
}

std::vector<PartReport> select_components(const DesignRequirements& req,
                                          const std::vector<OpAmpModel>& catalog,
                                          GbwReading reading) {
    if (catalog.empty()) {
        throw OscError(Err::EMPTY_CATALOG,
                       "component selection needs at least one part");
    }
    std::vector<PartReport> out;
    out.reserve(catalog.size());
    for (const OpAmpModel& part : catalog) {
        PartReport rep;
        rep.part = part.name;
        const double v_os_prime = worst_case_offset(req, part);
        const double tau =
            std::max(part.delay_lh_or_zero(), part.delay_hl_or_zero());
        rep.checks.push_back(check_alpha(req));
        rep.checks.push_back(check_epsilon(req, part, reading));
        rep.checks.push_back(check_slew(req, part));
        rep.checks.push_back(check_comparator(req, tau, v_os_prime));
        rep.checks.push_back(check_xor(req, tau, tau, v_os_prime));
        rep.pass = true;
        rep.min_norm_margin = kInf;
        for (const CheckResult& c : rep.checks) {
            const double norm =
                c.bound != 0.0 ? c.margin / std::abs(c.bound) : c.margin;
            rep.min_norm_margin = std::min(rep.min_norm_margin, norm);
            if (!c.pass) {
                rep.pass = false;
                if (!rep.failure_causes.empty()) rep.failure_causes += ',';
                rep.failure_causes += cause_for(c.criterion);
            }
        }
        out.push_back(std::move(rep));
    }
    std::sort(out.begin(), out.end(),
              [](const PartReport& a, const PartReport& b) {
                  if (a.pass != b.pass) return a.pass;
                  if (a.min_norm_margin != b.min_norm_margin) {
                      return a.min_norm_margin > b.min_norm_margin;
                  }
                  return a.part < b.part;
              });
    return out;
}

void write_design_csv(std::ostream& out,
                      const std::vector<PartReport>& reports) {
    out << "part,criterion,bound,actual,margin,verdict\n";
    for (const PartReport& rep : reports) {
        for (const CheckResult& c : rep.checks) {
            out << rep.part << ',' << c.criterion << ',' << fmt_double(c.bound)
                << ',' << fmt_double(c.actual) << ',' << fmt_double(c.margin)
                << ',' << (c.pass ? "pass" : "fail") << '\n';
        }
    }
}

} // namespace rcosc::design
