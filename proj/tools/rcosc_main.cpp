#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rcosc/analytic.hpp"
#include "rcosc/catalog.hpp"
#include "rcosc/config_io.hpp"
#include "rcosc/csv.hpp"
#include "rcosc/design.hpp"
#include "rcosc/errors.hpp"
#include "rcosc/measure.hpp"
#include "rcosc/sweep.hpp"
#include "rcosc/transient.hpp"
#include "rcosc/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string opamp;
    std::string out_dir;
    std::string format = "csv";
    std::uint64_t seed = 0;
};

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw rcosc::OscError(rcosc::Err::PARSE_ERROR,
                              path + ": cannot open file");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::ofstream open_out_file(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    const fs::path p = fs::path(dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw rcosc::OscError(rcosc::Err::PARSE_ERROR,
                              p.string() + ": cannot open for writing");
    }
    return out;
}

rcosc::io::ConfigBundle load_bundle(const GlobalOpts& g, bool ideal,
                                    const std::string& effects) {
    if (g.config_path.empty()) {
        throw rcosc::OscError(rcosc::Err::PARSE_ERROR,
                              "this command needs --config <file>");
    }
    rcosc::io::ConfigBundle b = rcosc::io::load_config(g.config_path);
    if (!g.opamp.empty()) {
        b.profile = rcosc::profile_from_opamp(
            rcosc::find_opamp(rcosc::builtin_catalog(), g.opamp));
    }
    if (ideal) b.profile.enabled.clear();
    if (!effects.empty()) {
        b.profile.enabled = rcosc::io::parse_effect_list(effects);
    }
    return b;
}

std::string metrics_to_csv(const ordered_json& m) {
    std::string out = "metric,value\n";
    for (const auto& [key, value] : m.items()) {
        out += key;
        out += ',';
        if (value.is_number()) {
            out += rcosc::fmt_double(value.get<double>());
        } else if (value.is_boolean()) {
            out += value.get<bool>() ? "true" : "false";
        } else {
            out += value.get<std::string>();
        }
        out += '\n';
    }
    return out;
}

// Prints the metric block to stdout and mirrors it into --out when given.
void emit_metrics(const ordered_json& m, const GlobalOpts& g,
                  const std::string& base_name) {
    const std::string text =
        g.format == "json" ? m.dump(2) + "\n" : metrics_to_csv(m);
    std::cout << text;
    if (!g.out_dir.empty()) {
        std::ofstream out = open_out_file(
            g.out_dir, base_name + (g.format == "json" ? ".json" : ".csv"));
        out << text;
    }
}

void run_periods(const GlobalOpts& g, bool ideal, const std::string& effects) {
    const rcosc::io::ConfigBundle b = load_bundle(g, ideal, effects);
    rcosc::validate_or_throw(b.config, b.profile);
    namespace an = rcosc::analytic;
    const rcosc::PeriodSet id = an::ideal_periods(b.config);
    const rcosc::PeriodSet raw = an::nonideal_periods(b.config, b.profile);
    const rcosc::AveragedPeriods avg =
        an::averaged_nonideal_periods(b.config, b.profile);
    const an::GammaBreakdown gb = an::gamma(b.config, b.profile);
    const an::SlopeInfo sl = an::integrator_slope(b.config, b.profile);

    ordered_json m;
    m["ideal_tp1_s"] = id.tp1;
    m["ideal_tp2_s"] = id.tp2;
    m["ideal_tp3_s"] = id.tp3;
    m["ideal_tp4_s"] = id.tp4;
    m["tp1_s"] = raw.tp1;
    m["tp2_s"] = raw.tp2;
    m["tp3_s"] = raw.tp3;
    m["tp4_s"] = raw.tp4;
    m["tp1_err_pct"] = an::relative_error(raw.tp1, id.tp1);
    m["tp2_err_pct"] = an::relative_error(raw.tp2, id.tp2);
    m["tp3_err_pct"] = an::relative_error(raw.tp3, id.tp3);
    m["tp4_err_pct"] = an::relative_error(raw.tp4, id.tp4);
    m["t1_s"] = avg.t1;
    m["t2_s"] = avg.t2;
    m["t_offset_skew_s"] = avg.t_offset_skew;
    m["t1_err_pct"] = an::relative_error(avg.t1, id.tp1);
    m["t2_err_pct"] = an::relative_error(avg.t2, id.tp2);
    m["gamma"] = gb.gamma;
    m["slope_reduction"] = gb.slope_reduction;
    m["loop_gain_product"] = gb.loop_gain_product;
    m["slope_up_v_per_s"] = sl.sl_plus;
    m["slope_down_v_per_s"] = sl.sl_minus;
    m["slew_limited_up"] = sl.slew_limited_plus;
    m["slew_limited_down"] = sl.slew_limited_minus;
    emit_metrics(m, g, "periods");
}

void run_transient(const GlobalOpts& g, bool ideal, const std::string& effects,
                   bool dump_waveforms, int cycles, int settle) {
    const rcosc::io::ConfigBundle b = load_bundle(g, ideal, effects);
    rcosc::transient::SimOptions opts;
    opts.min_cycles = cycles;
    opts.settle_cycles = settle;
    opts.record_waveforms = dump_waveforms;
    const rcosc::transient::Waveforms w =
        rcosc::transient::simulate(b.config, b.profile, opts);
    const std::vector<rcosc::PeriodSet> sets =
        rcosc::transient::extract_periods(w, opts);

    double sim[4] = {0.0, 0.0, 0.0, 0.0};
    for (const rcosc::PeriodSet& p : sets) {
        sim[0] += p.tp1;
        sim[1] += p.tp2;
        sim[2] += p.tp3;
        sim[3] += p.tp4;
    }
    for (double& v : sim) v /= static_cast<double>(sets.size());

    namespace an = rcosc::analytic;
    const rcosc::PeriodSet raw = an::nonideal_periods(b.config, b.profile);
    const double closed[4] = {raw.tp1, raw.tp2, raw.tp3, raw.tp4};
    ordered_json m;
    m["cycles_measured"] = static_cast<double>(sets.size());
    const char* names[4] = {"tp1", "tp2", "tp3", "tp4"};
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        m[std::string("sim_") + names[i] + "_s"] = sim[i];
    }
    for (int i = 0; i < 4; ++i) {
        m[std::string(names[i]) + "_s"] = closed[i];
    }
    for (int i = 0; i < 4; ++i) {
        const double d = std::abs(an::relative_error(sim[i], closed[i]));
        m[std::string("delta_") + names[i] + "_pct"] = d;
        worst = std::max(worst, d);
    }
    m["max_delta_pct"] = worst;
    emit_metrics(m, g, "transient");

    if (dump_waveforms) {
        const std::string dir = g.out_dir.empty() ? "." : g.out_dir;
        std::ofstream wf = open_out_file(dir, "waveforms.csv");
        rcosc::transient::write_waveform_csv(wf, w);
        std::ofstream ef = open_out_file(dir, "events.csv");
        rcosc::transient::write_events_csv(ef, w);
    }
}

void run_sweep(const GlobalOpts& g, const std::string& spec_path, bool svg,
               int threads) {
    const rcosc::sweep::SweepSpec spec = rcosc::io::load_sweep(spec_path);
    const std::vector<rcosc::sweep::SweepRow> rows =
        rcosc::sweep::run_sweep(spec, g.seed, threads);
    const std::vector<rcosc::sweep::OpAmpSummary> sums =
        rcosc::sweep::summarize(rows);

    const std::string dir = g.out_dir.empty() ? "." : g.out_dir;
    {
        std::ofstream out = open_out_file(dir, "sweep.csv");
        rcosc::sweep::write_sweep_csv(out, rows);
    }
    {
        std::ofstream out = open_out_file(dir, "sweep_summary.csv");
        rcosc::sweep::write_summary_csv(out, sums);
    }
    if (svg) {
        std::ofstream out = open_out_file(dir, "sweep_summary.svg");
        rcosc::sweep::write_summary_svg(out, sums);
    }
    std::ostringstream os;
    rcosc::sweep::write_summary_csv(os, sums);
    std::cout << os.str();
}

void run_design(const GlobalOpts& g, const std::string& req_path,
                bool gbw_in_hz, const std::string& catalog_path) {
    const rcosc::design::DesignRequirements req =
        rcosc::io::load_requirements(req_path);
    const std::vector<rcosc::OpAmpModel> catalog =
        catalog_path.empty()
            ? rcosc::builtin_catalog()
            : rcosc::io::catalog_from_json(read_text_file(catalog_path));
    const std::vector<rcosc::design::PartReport> reports =
        rcosc::design::select_components(req, catalog,
                                         gbw_in_hz
                                             ? rcosc::design::GbwReading::Hz
                                             : rcosc::design::GbwReading::RadPerSec);
    std::ostringstream os;
    rcosc::design::write_design_csv(os, reports);
    std::cout << os.str();
    if (!g.out_dir.empty()) {
        std::ofstream out = open_out_file(g.out_dir, "design.csv");
        out << os.str();
    }
}

void run_catalog(const GlobalOpts& g) {
    const std::vector<rcosc::OpAmpModel> cat = rcosc::builtin_catalog();
    std::string text;
    if (g.format == "json") {
        text = rcosc::io::catalog_to_json(cat);
    } else {
        text = "name,gbw_hz,slew_rate,v_offset,i_bias,c_parasitic_f,"
               "delay_lh_s,delay_hl_s\n";
        for (const rcosc::OpAmpModel& m : cat) {
            text += m.name + ',' + rcosc::fmt_double(m.gbw_hz) + ',' +
                    rcosc::fmt_double(m.slew_rate) + ',' +
                    rcosc::fmt_double(m.v_offset) + ',' +
                    rcosc::fmt_double(m.i_bias) + ',';
            if (m.c_parasitic) text += rcosc::fmt_double(*m.c_parasitic);
            text += ',';
            if (m.delay_lh) text += rcosc::fmt_double(*m.delay_lh);
            text += ',';
            if (m.delay_hl) text += rcosc::fmt_double(*m.delay_hl);
            text += '\n';
        }
    }
    std::cout << text;
    if (!g.out_dir.empty()) {
        std::ofstream out = open_out_file(
            g.out_dir, g.format == "json" ? "catalog.json" : "catalog.csv");
        out << text;
    }
}

void run_recover(const GlobalOpts& g, const std::string& rx_text,
                 const std::string& cx_text, double target_tp1,
                 double target_tp2) {
    const std::string name = g.opamp.empty() ? "OPA177" : g.opamp;
    const rcosc::OpAmpModel opamp =
        rcosc::find_opamp(rcosc::builtin_catalog(), name);
    const double rx = rcosc::io::parse_quantity(rx_text);
    const double cx = rcosc::io::parse_quantity(cx_text);
    const rcosc::analytic::RecoveredConfig rec = rcosc::analytic::recover_config(
        opamp.a0w0(), rx, cx, opamp.c_parasitic_or_zero(), target_tp1,
        target_tp2);
    ordered_json m;
    m["opamp"] = name;
    m["c_i_f"] = rec.c_i;
    m["alpha"] = rec.alpha;
    m["loop_gain_product"] = rec.loop_gain_product;
    m["tp1_err_pct"] = rec.tp1_err_pct;
    m["tp2_err_pct"] = rec.tp2_err_pct;
    m["t2_err_pct"] = rec.t2_err_pct;
    emit_metrics(m, g, "recover_config");
}

void run_estimate(const GlobalOpts& g, const std::string& tp1_text,
                  const std::string& tp2_text, const std::string& tp3_text,
                  const std::string& tp4_text, const std::string& mode_name,
                  bool ideal, const std::string& effects) {
    if (tp1_text.empty() || tp2_text.empty()) {
        throw rcosc::OscError(rcosc::Err::PARSE_ERROR,
                              "estimate needs --tp1 and --tp2");
    }
    const rcosc::io::ConfigBundle b = load_bundle(g, ideal, effects);
    rcosc::PeriodSet p;
    p.tp1 = rcosc::io::parse_quantity(tp1_text);
    p.tp2 = rcosc::io::parse_quantity(tp2_text);
    p.tp3 = tp3_text.empty() ? p.tp1 : rcosc::io::parse_quantity(tp3_text);
    p.tp4 = tp4_text.empty() ? p.tp2 : rcosc::io::parse_quantity(tp4_text);

    rcosc::measure::PipelineOptions opts;
    opts.mode = rcosc::estimate_method_from_string(mode_name);
    const rcosc::measure::PipelineResult res =
        rcosc::measure::estimate_pipeline({p}, b.config, b.profile, opts);
    const rcosc::SensorEstimate& est = res.estimates.front();
    ordered_json m;
    m["rx_est_ohm"] = est.r_x_est;
    m["cx_est_f"] = est.c_x_est;
    m["method"] = rcosc::to_string(est.method);
    m["iterations"] = static_cast<double>(est.iterations);
    m["negative"] = est.negative;
    emit_metrics(m, g, "estimate");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Relaxation-oscillator sensor measurement toolkit"};
    app.require_subcommand(1);
    // The shared options (--config, --out, ...) live on the top-level app;
    // let every subcommand hand unmatched flags back up to it.
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--config", g.config_path, "Oscillator config file");
    app.add_option("--opamp", g.opamp, "Catalog op-amp overriding the profile");
    app.add_option("--seed", g.seed, "Seed for quantization jitter");
    app.add_option("--out", g.out_dir, "Directory for output files");
    app.add_option("--format", g.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));

    bool ideal = false;
    std::string effects;
    bool dump_waveforms = false;
    int cycles = 8;
    int settle = 2;
    std::string sweep_path;
    bool svg = false;
    int threads = 0;
    std::string req_path;
    bool gbw_in_hz = false;
    std::string catalog_path;
    std::string tp1_text, tp2_text, tp3_text, tp4_text;
    std::string mode_name = "IDEAL_INV";
    bool recover = false;
    std::string rx_text = "330 kohm";
    std::string cx_text = "33 pF";
    double target_tp1 = -52.76;
    double target_tp2 = 26.74;

    CLI::App* periods =
        app.add_subcommand("periods", "Closed-form periods and error budget");
    periods->add_flag("--ideal", ideal, "Disable every non-ideality");
    periods->add_option("--effects", effects,
                        "Enabled effects (all, none, or a comma list)");

    CLI::App* transient = app.add_subcommand(
        "transient", "Time-domain simulation and oracle comparison");
    transient->add_flag("--ideal", ideal, "Disable every non-ideality");
    transient->add_option("--effects", effects,
                          "Enabled effects (all, none, or a comma list)");
    transient->add_flag("--dump-waveforms", dump_waveforms,
                        "Write waveforms.csv and events.csv");
    transient->add_option("--cycles", cycles, "Cycles to measure");
    transient->add_option("--settle", settle, "Start-up cycles to discard");

    CLI::App* sweep =
        app.add_subcommand("sweep", "Grid sweep of errors per op-amp and mode");
    sweep->add_option("spec", sweep_path, "Sweep spec file")->required();
    sweep->add_flag("--svg", svg, "Also write sweep_summary.svg");
    sweep->add_option("--threads", threads, "Worker threads (0 = auto)");

    CLI::App* design =
        app.add_subcommand("design", "Design criteria check and part ranking");
    design->add_option("requirements", req_path, "Requirements file")
        ->required();
    design->add_flag("--gbw-hz", gbw_in_hz,
                     "Read GBW in Hz instead of rad/s in the error budget");
    design->add_option("--catalog", catalog_path,
                       "JSON catalog replacing the built-in parts");

    CLI::App* catalog =
        app.add_subcommand("catalog", "Print the built-in op-amp catalog");
    (void)catalog;

    CLI::App* estimate = app.add_subcommand(
        "estimate", "Invert measured periods to sensor values");
    estimate->add_option("--tp1", tp1_text, "Measured tp1 (quantity)");
    estimate->add_option("--tp2", tp2_text, "Measured tp2 (quantity)");
    estimate->add_option("--tp3", tp3_text, "Measured tp3 (defaults to tp1)");
    estimate->add_option("--tp4", tp4_text, "Measured tp4 (defaults to tp2)");
    estimate->add_option("--mode", mode_name,
                         "IDEAL_INV, COMPENSATED, IDEAL_INV_AVG, or "
                         "COMPENSATED_AVG");
    estimate->add_flag("--ideal", ideal, "Disable every non-ideality");
    estimate->add_option("--effects", effects,
                         "Enabled effects (all, none, or a comma list)");
    estimate->add_flag("--recover-config", recover,
                       "Fit c_i and alpha to a target error pair instead");
    estimate->add_option("--rx", rx_text, "Sensor resistance for recovery");
    estimate->add_option("--cx", cx_text, "Sensor capacitance for recovery");
    estimate->add_option("--target-tp1-err-pct", target_tp1,
                         "Signed tp1 error the recovery aims for");
    estimate->add_option("--target-tp2-err-pct", target_tp2,
                         "Signed tp2 error the recovery aims for");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (periods->parsed()) {
            run_periods(g, ideal, effects);
        } else if (transient->parsed()) {
            run_transient(g, ideal, effects, dump_waveforms, cycles, settle);
        } else if (sweep->parsed()) {
            run_sweep(g, sweep_path, svg, threads);
        } else if (design->parsed()) {
            run_design(g, req_path, gbw_in_hz, catalog_path);
        } else if (catalog->parsed()) {
            run_catalog(g);
        } else if (estimate->parsed()) {
            if (recover) {
                run_recover(g, rx_text, cx_text, target_tp1, target_tp2);
            } else {
                run_estimate(g, tp1_text, tp2_text, tp3_text, tp4_text,
                             mode_name, ideal, effects);
            }
        }
    } catch (const rcosc::OscError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
