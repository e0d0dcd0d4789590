#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <sys/wait.h>

// RCOSC_BIN and RCOSC_CONFIG_DIR are injected by the build so the tests can
// drive the installed binary against the shipped configuration files.

namespace {

const std::string kBin = RCOSC_BIN;
const std::string kConfigDir = RCOSC_CONFIG_DIR;

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run_raw(const std::string& command) {
    RunResult res;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) {
        res.out.append(buf, n);
    }
    const int rc = pclose(pipe);
    res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return res;
}

// Runs the tool with stderr dropped; .out is stdout.
RunResult run_cli(const std::string& args) {
    return run_raw(kBin + " " + args + " 2>/dev/null");
}

// Runs the tool keeping only stderr in .out.
RunResult run_cli_stderr(const std::string& args) {
    return run_raw(kBin + " " + args + " 2>&1 1>/dev/null");
}

// Parses the two-column metric block printed by the reporting commands.
std::map<std::string, std::string> parse_metrics(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) continue;
        out[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return out;
}

double metric(const std::map<std::string, std::string>& m,
              const std::string& key) {
    const auto it = m.find(key);
    REQUIRE(it != m.end());
    return std::strtod(it->second.c_str(), nullptr);
}

std::string reference_config() { return kConfigDir + "/reference.ini"; }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("periods command reports the bandwidth error budget") {
    const RunResult r =
        run_cli("periods --config " + reference_config() + " --effects gbw");
    REQUIRE(r.status == 0);
    const auto m = parse_metrics(r.out);
    CHECK(std::abs(metric(m, "tp1_err_pct") - (-33.980708880230075)) < 1e-6);
    CHECK(std::abs(metric(m, "tp2_err_pct") - 20.778152767603952) < 1e-6);
    CHECK(std::abs(metric(m, "gamma") - 0.10242338307202568) < 1e-9);
    CHECK(std::abs(metric(m, "loop_gain_product") - 410.5433279711142) < 1e-6);
    CHECK(std::abs(metric(m, "t2_err_pct") - 0.24357964966620038) < 1e-9);
    CHECK(m.at("slew_limited_up") == "false");
}

TEST_CASE("periods command with every effect disabled reports zeros") {
    const RunResult r =
        run_cli("periods --config " + reference_config() + " --ideal");
    REQUIRE(r.status == 0);
    const auto m = parse_metrics(r.out);
    CHECK(std::abs(metric(m, "tp1_err_pct")) < 1e-12);
    CHECK(std::abs(metric(m, "tp2_err_pct")) < 1e-12);
    CHECK(metric(m, "slope_reduction") == 1.0);
    CHECK(std::abs(metric(m, "tp1_s") - 3.267e-05) < 1e-16);
}

TEST_CASE("periods output is byte-identical across runs") {
    const std::string args = "periods --config " + reference_config();
    const RunResult a = run_cli(args);
    const RunResult b = run_cli(args);
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
}

TEST_CASE("metrics are mirrored into the output directory") {
    const std::string dir = "./cli_out_mirror";
    const RunResult r = run_cli("periods --config " + reference_config() +
                                " --out " + dir);
    REQUIRE(r.status == 0);
    CHECK(slurp(dir + "/periods.csv") == r.out);
    std::remove((dir + "/periods.csv").c_str());
    std::remove(dir.c_str());
}

TEST_CASE("missing config is a clean error") {
    const RunResult r = run_cli_stderr("periods");
    CHECK(r.status != 0);
    CHECK(r.out.find("error:") != std::string::npos);
}

TEST_CASE("a malformed config names the offending line") {
    const std::string path = "./cli_bad_config.ini";
    {
        std::ofstream out(path);
        out << "[oscillator]\nc_i 330 pF\n";
    }
    const RunResult r = run_cli_stderr("periods --config " + path);
    CHECK(r.status != 0);
    CHECK(r.out.find("error:") != std::string::npos);
    CHECK(r.out.find("cli_bad_config.ini") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("an unknown op-amp override is rejected") {
    const RunResult r = run_cli_stderr("periods --config " +
                                       reference_config() + " --opamp NOPE");
    CHECK(r.status != 0);
    CHECK(r.out.find("NOPE") != std::string::npos);
}

TEST_CASE("estimate command inverts an ideal measurement") {
    const RunResult r = run_cli(
        "estimate --config " + reference_config() +
        " --ideal --tp1 \"32.67 us\" --tp2 \"54.45 us\"");
    REQUIRE(r.status == 0);
    const auto m = parse_metrics(r.out);
    CHECK(std::abs(metric(m, "rx_est_ohm") / 330e3 - 1.0) < 1e-9);
    CHECK(std::abs(metric(m, "cx_est_f") / 33e-12 - 1.0) < 1e-9);
    CHECK(m.at("method") == "IDEAL_INV");
    CHECK(m.at("negative") == "false");
}

TEST_CASE("estimate command compensates the profile it is given") {
    // Forward periods for OPA177 at the reference point, closed form.
    const RunResult fwd =
        run_cli("periods --config " + reference_config());
    REQUIRE(fwd.status == 0);
    const auto fm = parse_metrics(fwd.out);
    std::ostringstream args;
    args.precision(17);
    args << "estimate --config " << reference_config() << " --mode COMPENSATED"
         << " --tp1 " << fm.at("tp1_s") << " --tp2 " << fm.at("tp2_s")
         << " --tp3 " << fm.at("tp3_s") << " --tp4 " << fm.at("tp4_s");
    const RunResult r = run_cli(args.str());
    REQUIRE(r.status == 0);
    const auto m = parse_metrics(r.out);
    CHECK(std::abs(metric(m, "rx_est_ohm") / 330e3 - 1.0) < 1e-5);
    CHECK(std::abs(metric(m, "cx_est_f") / 33e-12 - 1.0) < 1e-5);
    CHECK(m.at("method") == "COMPENSATED");
}

TEST_CASE("estimate command requires both measured periods") {
    const RunResult r = run_cli_stderr("estimate --config " +
                                       reference_config() + " --tp1 \"30 us\"");
    CHECK(r.status != 0);
    CHECK(r.out.find("error:") != std::string::npos);
}

TEST_CASE("configuration recovery reproduces the documented pair") {
    const RunResult r = run_cli("estimate --recover-config");
    REQUIRE(r.status == 0);
    const auto m = parse_metrics(r.out);
    CHECK(m.at("opamp") == "OPA177");
    CHECK(std::abs(metric(m, "c_i_f") / 1.4629090805280408e-10 - 1.0) < 1e-9);
    CHECK(std::abs(metric(m, "alpha") / 0.8868669019558952 - 1.0) < 1e-9);
    CHECK(std::abs(metric(m, "tp1_err_pct") - (-52.76)) < 1e-6);
    CHECK(std::abs(metric(m, "tp2_err_pct") - 26.74) < 1e-6);
    CHECK(std::abs(metric(m, "t2_err_pct") - 0.5494619280155932) < 1e-6);
}

TEST_CASE("transient command agrees with the closed forms when ideal") {
    const RunResult r = run_cli("transient --config " + reference_config() +
                                " --ideal --cycles 4");
    REQUIRE(r.status == 0);
    const auto m = parse_metrics(r.out);
    CHECK(metric(m, "cycles_measured") >= 4.0);
    CHECK(metric(m, "max_delta_pct") < 0.01);
}

TEST_CASE("transient command dumps waveform files on request") {
    const std::string dir = "./cli_out_waves";
    const RunResult r =
        run_cli("transient --config " + reference_config() +
                " --ideal --cycles 4 --dump-waveforms --out " + dir);
    REQUIRE(r.status == 0);
    const std::string waves = slurp(dir + "/waveforms.csv");
    CHECK(waves.rfind("time_s,v_r,v_x,v_y,v_z\n", 0) == 0);
    const std::string events = slurp(dir + "/events.csv");
    CHECK(events.rfind("time_s,source,edge\n", 0) == 0);
    CHECK(events.find("SCHMITT") != std::string::npos);
    std::remove((dir + "/waveforms.csv").c_str());
    std::remove((dir + "/events.csv").c_str());
    std::remove((dir + "/transient.csv").c_str());
    std::remove(dir.c_str());
}

TEST_CASE("design command ranks parts from a requirements file") {
    const RunResult r =
        run_cli("design " + kConfigDir + "/requirements.ini");
    REQUIRE(r.status == 0);
    CHECK(r.out.rfind("part,criterion,bound,actual,margin,verdict\n", 0) == 0);
    // The ranking puts the widest-margin passing part first.
    const bool tl071_leads =
        r.out.rfind("part,criterion,bound,actual,margin,verdict\nTL071,", 0) ==
        0;
    CHECK(tl071_leads);
    const std::size_t tl071 = r.out.find("TL071,");
    const std::size_t opa177 = r.out.find("OPA177,");
    REQUIRE(tl071 != std::string::npos);
    REQUIRE(opa177 != std::string::npos);
    CHECK(tl071 < opa177);
}

TEST_CASE("catalog command prints both formats") {
    const RunResult csv = run_cli("catalog");
    REQUIRE(csv.status == 0);
    CHECK(csv.out.rfind("name,gbw_hz,slew_rate,v_offset,i_bias,"
                        "c_parasitic_f,delay_lh_s,delay_hl_s\n",
                        0) == 0);
    CHECK(csv.out.find("OPA177") != std::string::npos);
    std::size_t lines = 0;
    for (char ch : csv.out) {
        if (ch == '\n') ++lines;
    }
    CHECK(lines == 6); // header plus five parts

    const RunResult js = run_cli("catalog --format json");
    REQUIRE(js.status == 0);
    CHECK(js.out.front() == '[');
    CHECK(js.out.find("\"AD741\"") != std::string::npos);
}

TEST_CASE("sweep command writes grid and summary files") {
    const std::string spec = "./cli_sweep_spec.ini";
    {
        std::ofstream out(spec);
        out << "[sweep]\n"
               "rx = 100 kohm, 330 kohm\n"
               "cx = 33 pF\n"
               "opamps = OPA177\n"
               "modes = IDEAL_INV, IDEAL_INV_AVG\n"
               "[oscillator]\n"
               "c_i = 330 pF\n"
               "alpha = 0.5\n"
               "v_p = 5 V\n";
    }
    const std::string dir = "./cli_out_sweep";
    const RunResult r = run_cli("sweep " + spec + " --out " + dir + " --svg");
    REQUIRE(r.status == 0);
    CHECK(r.out.rfind("opamp,mode,worst_rx_err_pct,worst_cx_err_pct,"
                      "worst_t1_err_pct,worst_t2_err_pct\n",
                      0) == 0);
    CHECK(r.out.find("OPA177,IDEAL_INV,") != std::string::npos);
    CHECK(r.out.find("OPA177,IDEAL_INV_AVG,") != std::string::npos);

    const std::string grid = slurp(dir + "/sweep.csv");
    CHECK(grid.rfind("rx_ohm,cx_f,opamp,mode,tp1_err_pct,tp2_err_pct,"
                     "t1_err_pct,t2_err_pct,rx_est_ohm,rx_err_pct,cx_est_f,"
                     "cx_err_pct,sim_tp1_s,sim_tp2_s,sim_tp3_s,sim_tp4_s,"
                     "sim_dev_pct,error\n",
                     0) == 0);
    std::size_t lines = 0;
    for (char ch : grid) {
        if (ch == '\n') ++lines;
    }
    CHECK(lines == 5); // header plus 2 rx * 1 cx * 1 part * 2 modes

    CHECK(slurp(dir + "/sweep_summary.csv") == r.out);
    const std::string svg = slurp(dir + "/sweep_summary.svg");
    CHECK(svg.find("<svg") != std::string::npos);

    std::remove(spec.c_str());
    std::remove((dir + "/sweep.csv").c_str());
    std::remove((dir + "/sweep_summary.csv").c_str());
    std::remove((dir + "/sweep_summary.svg").c_str());
    std::remove(dir.c_str());
}

TEST_CASE("help exits cleanly") {
    const RunResult r = run_cli("--help");
    CHECK(r.status == 0);
    CHECK(r.out.find("periods") != std::string::npos);
    CHECK(r.out.find("design") != std::string::npos);
}
