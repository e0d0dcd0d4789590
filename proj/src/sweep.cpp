#include "rcosc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include "rcosc/analytic.hpp"
#include "rcosc/catalog.hpp"
#include "rcosc/csv.hpp"
#include "rcosc/errors.hpp"
#include "rcosc/transient.hpp"

namespace rcosc::sweep {

namespace {

SweepRow evaluate_point(const SweepSpec& spec, double rx, double cx,
                        const std::string& opamp_name, EstimateMethod mode,
                        std::uint64_t seed) {
    SweepRow row;
    row.rx = rx;
    row.cx = cx;
    row.opamp = opamp_name;
    row.mode = mode;
    try {
        OscillatorConfig config = spec.base;
        config.sensor = {rx, cx};
        const OpAmpModel opamp = find_opamp(builtin_catalog(), opamp_name);
        NonIdealityProfile profile = profile_from_opamp(opamp);
        if (spec.zcd_override) profile.zcd = *spec.zcd_override;

        const PeriodSet ideal = analytic::ideal_periods(config);
        const PeriodSet raw = analytic::nonideal_periods(config, profile);
        const AveragedPeriods avg =
            analytic::averaged_nonideal_periods(config, profile);
        row.tp1_err_pct = analytic::relative_error(raw.tp1, ideal.tp1);
        row.tp2_err_pct = analytic::relative_error(raw.tp2, ideal.tp2);
        row.t1_err_pct = analytic::relative_error(avg.t1, ideal.tp1);
        row.t2_err_pct = analytic::relative_error(avg.t2, ideal.tp2);

        PeriodSet measured = raw;
        if (spec.quantize) {
            measured = measure::quantize({raw}, spec.timer, seed).front();
        }
        SensorEstimate est;
        switch (mode) {
        case EstimateMethod::IDEAL_INV:
            est = analytic::estimate_ideal(measured.tp1, measured.tp2,
                                           config.alpha, config.c_i, false);
            break;
        case EstimateMethod::IDEAL_INV_AVG: {
            const AveragedPeriods m = measure::single_cycle_average(measured);
            est = analytic::estimate_ideal(m.t1, m.t2, config.alpha,
                                           config.c_i, true);
            break;
        }
        case EstimateMethod::COMPENSATED:
            est = analytic::estimate_compensated(measured, config, profile);
            break;
        case EstimateMethod::COMPENSATED_AVG:
            est = analytic::estimate_compensated(
                measure::single_cycle_average(measured), config, profile);
            break;
        }
        row.rx_est = est.r_x_est;
        row.cx_est = est.c_x_est;
        row.rx_err_pct = analytic::relative_error(est.r_x_est, rx);
        row.cx_err_pct =
            cx != 0.0 ? analytic::relative_error(est.c_x_est, cx) : 0.0;

        if (spec.transient) {
            transient::SimOptions opts;
            opts.record_waveforms = false;
            const transient::Waveforms w =
                transient::simulate(config, profile, opts);
            const auto cycles = transient::extract_periods(w, opts);
            double sum[4] = {0.0, 0.0, 0.0, 0.0};
            for (const PeriodSet& p : cycles) {
                sum[0] += p.tp1;
                sum[1] += p.tp2;
                sum[2] += p.tp3;
                sum[3] += p.tp4;
            }
            const double n = static_cast<double>(cycles.size());
            const double closed[4] = {raw.tp1, raw.tp2, raw.tp3, raw.tp4};
            row.sim_dev_pct = 0.0;
            for (int i = 0; i < 4; ++i) {
                row.sim_tp[i] = sum[i] / n;
                row.sim_dev_pct =
                    std::max(row.sim_dev_pct,
                             std::abs(analytic::relative_error(row.sim_tp[i],
                                                               closed[i])));
            }
            row.has_sim = true;
        }
    } catch (const OscError& e) {
        row.error = to_string(e.code());
    }
    return row;
}

} // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::uint64_t seed,
                                int threads) {
    if (spec.rx_values.empty() || spec.cx_values.empty() ||
        spec.opamps.empty() || spec.modes.empty()) {
        throw OscError(Err::PARSE_ERROR,
                       "sweep needs nonempty rx, cx, opamp, and mode lists");
    }
    const std::size_t n_rx = spec.rx_values.size();
    const std::size_t n_cx = spec.cx_values.size();
    const std::size_t n_modes = spec.modes.size();
    const std::size_t total =
        spec.opamps.size() * n_modes * n_rx * n_cx;
    if (total > spec.grid_cap) {
        throw OscError(Err::GRID_CAP_EXCEEDED,
                       "sweep has " + std::to_string(total) +
                           " points, cap is " +
                           std::to_string(spec.grid_cap));
    }

    std::vector<SweepRow> rows(total);
    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            std::size_t r = i;
            const std::size_t ic = r % n_cx;
            r /= n_cx;
            const std::size_t ir = r % n_rx;
            r /= n_rx;
            const std::size_t im = r % n_modes;
            const std::size_t io = r / n_modes;
            rows[i] = evaluate_point(spec, spec.rx_values[ir],
                                     spec.cx_values[ic], spec.opamps[io],
                                     spec.modes[im], seed);
        }
    };

    unsigned n_threads = threads > 0
                             ? static_cast<unsigned>(threads)
                             : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads,
                                   static_cast<unsigned>(total));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    return rows;
}

std::vector<OpAmpSummary> summarize(const std::vector<SweepRow>& rows) {
    std::vector<OpAmpSummary> out;
    for (const SweepRow& row : rows) {
        if (!row.error.empty()) continue;
        OpAmpSummary* s = nullptr;
        for (OpAmpSummary& cand : out) {
            if (cand.opamp == row.opamp && cand.mode == row.mode) {
                s = &cand;
                break;
            }
        }
        if (!s) {
            out.push_back({row.opamp, row.mode, 0.0, 0.0, 0.0, 0.0});
            s = &out.back();
        }
        s->worst_rx_err_pct =
            std::max(s->worst_rx_err_pct, std::abs(row.rx_err_pct));
        s->worst_cx_err_pct =
            std::max(s->worst_cx_err_pct, std::abs(row.cx_err_pct));
        s->worst_t1_err_pct =
            std::max(s->worst_t1_err_pct, std::abs(row.t1_err_pct));
        s->worst_t2_err_pct =
            std::max(s->worst_t2_err_pct, std::abs(row.t2_err_pct));
    }
    return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "rx_ohm,cx_f,opamp,mode,tp1_err_pct,tp2_err_pct,t1_err_pct,"
           "t2_err_pct,rx_est_ohm,rx_err_pct,cx_est_f,cx_err_pct,"
           "sim_tp1_s,sim_tp2_s,sim_tp3_s,sim_tp4_s,sim_dev_pct,error\n";
    for (const SweepRow& r : rows) {
        out << fmt_double(r.rx) << ',' << fmt_double(r.cx) << ',' << r.opamp
            << ',' << to_string(r.mode) << ',';
        if (r.error.empty()) {
            out << fmt_double(r.tp1_err_pct) << ','
                << fmt_double(r.tp2_err_pct) << ','
                << fmt_double(r.t1_err_pct) << ','
                << fmt_double(r.t2_err_pct) << ',' << fmt_double(r.rx_est)
                << ',' << fmt_double(r.rx_err_pct) << ','
                << fmt_double(r.cx_est) << ',' << fmt_double(r.cx_err_pct)
                << ',';
            if (r.has_sim) {
                out << fmt_double(r.sim_tp[0]) << ','
                    << fmt_double(r.sim_tp[1]) << ','
                    << fmt_double(r.sim_tp[2]) << ','
                    << fmt_double(r.sim_tp[3]) << ','
                    << fmt_double(r.sim_dev_pct) << ',';
            } else {
                out << ",,,,,";
            }
        } else {
            out << ",,,,,,,,,,,,,";
        }
        out << r.error << '\n';
    }
}

void write_summary_csv(std::ostream& out,
                       const std::vector<OpAmpSummary>& rows) {
    out << "opamp,mode,worst_rx_err_pct,worst_cx_err_pct,worst_t1_err_pct,"
           "worst_t2_err_pct\n";
    for (const OpAmpSummary& s : rows) {
        out << s.opamp << ',' << to_string(s.mode) << ','
            << fmt_double(s.worst_rx_err_pct) << ','
            << fmt_double(s.worst_cx_err_pct) << ','
            << fmt_double(s.worst_t1_err_pct) << ','
            << fmt_double(s.worst_t2_err_pct) << '\n';
    }
}

void write_summary_svg(std::ostream& out,
                       const std::vector<OpAmpSummary>& rows) {
    struct Pair {
        std::string opamp;
        double raw = 0.0; // worst C_x error without averaging
        double avg = 0.0; // with averaging
        bool has_raw = false;
        bool has_avg = false;
    };
    std::vector<Pair> pairs;
    for (const OpAmpSummary& s : rows) {
        Pair* p = nullptr;
        for (Pair& cand : pairs) {
            if (cand.opamp == s.opamp) {
                p = &cand;
                break;
            }
        }
        if (!p) {
            pairs.push_back({s.opamp, 0.0, 0.0, false, false});
            p = &pairs.back();
        }
        if (s.mode == EstimateMethod::IDEAL_INV ||
            s.mode == EstimateMethod::COMPENSATED) {
            p->raw = std::max(p->raw, s.worst_cx_err_pct);
            p->has_raw = true;
        } else {
            p->avg = std::max(p->avg, s.worst_cx_err_pct);
            p->has_avg = true;
        }
    }
    double peak = 0.0;
    for (const Pair& p : pairs) peak = std::max({peak, p.raw, p.avg});
    if (peak <= 0.0) peak = 1.0;

    const int bar_w = 28;
    const int group_w = 3 * bar_w;
    const int plot_h = 220;
    const int left = 60;
    const int top = 30;
    const int width = left + group_w * static_cast<int>(pairs.size()) + 30;
    const int height = top + plot_h + 50;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    out << "<text x=\"" << left << "\" y=\"18\" font-family=\"sans-serif\" "
           "font-size=\"13\">Worst |C_x error| (%), with and without "
           "averaging</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\""
        << width - 10 << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"6\" y=\"" << top + 8
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_double(peak) << "</text>\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Pair& p = pairs[i];
        const int x0 = left + static_cast<int>(i) * group_w;
        const auto bar = [&](int x, double v, const char* fill) {
            const int h =
                static_cast<int>(std::lround(plot_h * (v / peak)));
            out << "<rect x=\"" << x << "\" y=\"" << top + plot_h - h
                << "\" width=\"" << bar_w - 4 << "\" height=\"" << h
                << "\" fill=\"" << fill << "\"/>\n";
        };
        if (p.has_raw) bar(x0, p.raw, "#c44");
        if (p.has_avg) bar(x0 + bar_w, p.avg, "#48a");
        out << "<text x=\"" << x0 << "\" y=\"" << top + plot_h + 16
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << p.opamp
            << "</text>\n";
    }
    out << "<rect x=\"" << left << "\" y=\"" << height - 18
        << "\" width=\"10\" height=\"10\" fill=\"#c44\"/>\n";
    out << "<text x=\"" << left + 14 << "\" y=\"" << height - 9
        << "\" font-family=\"sans-serif\" font-size=\"11\">without "
           "averaging</text>\n";
    out << "<rect x=\"" << left + 130 << "\" y=\"" << height - 18
        << "\" width=\"10\" height=\"10\" fill=\"#48a\"/>\n";
    out << "<text x=\"" << left + 144 << "\" y=\"" << height - 9
        << "\" font-family=\"sans-serif\" font-size=\"11\">with "
           "averaging</text>\n";
    out << "</svg>\n";
}

} // namespace rcosc::sweep
