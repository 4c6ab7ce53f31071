// Integration checks of the command-line tool. Each case shells out to the
// built binary and inspects exit codes and output files.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "leechsim/engine.hpp"
#include "leechsim/imaging.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace leechsim;

namespace {

int failures = 0;

#define CLI_CHECK(cond)                                                          \
    do {                                                                         \
        if (!(cond)) {                                                           \
            ++failures;                                                          \
            std::cerr << "FAIL " << __FILE__ << ":" << __LINE__ << "  " #cond    \
                      << "\n";                                                   \
        }                                                                        \
    } while (0)

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunResult run_cli(const std::string& args) {
    fs::path out = fs::temp_directory_path() / "leechsim_cli_out.txt";
    fs::path err = fs::temp_directory_path() / "leechsim_cli_err.txt";
    std::string cmd = std::string(LEECHSIM_BIN) + " " + args + " > " + out.string() + " 2> " +
                      err.string();
    int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

const std::string kPlan = std::string(LEECHSIM_DATA_DIR) + "/ece_first_floor.plan";

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void test_simulate_outputs() {
    fs::path out = fresh_dir("leechsim_cli_sim");
    RunResult r = run_cli("simulate --plan " + kPlan +
                          " --trials 4 --seed 9 --start-x 102 --start-y 48 --max-steps 200"
                          " --out " + out.string());
    CLI_CHECK(r.exit_code == 0);
    for (const char* name :
         {"trial_0000.csv", "trial_0003.csv", "frequency.csv", "frequency.pgm", "frequency.png",
          "threshold_0.00.png", "threshold_0.05.png", "threshold_0.10.png", "threshold_0.15.png",
          "domain_frequencies.json", "summary.json", "manifest.json"})
        CLI_CHECK(fs::exists(out / name));

    json df = json::parse(slurp(out / "domain_frequencies.json"));
    double sum = 0.0;
    for (auto& [k, v] : df.items()) sum += v.get<double>();
    CLI_CHECK(std::abs(sum - 1.0) < 1e-9);

    json summary = json::parse(slurp(out / "summary.json"));
    CLI_CHECK(summary["n_trials"] == 4);
    CLI_CHECK(summary.contains("frequency_hierarchy"));
    CLI_CHECK(summary.contains("clusters"));
}

void test_simulate_rejects_bad_input() {
    RunResult r = run_cli("simulate --plan " + kPlan +
                          " --trials 0 --start-x 102 --start-y 48 --out /tmp/x");
    CLI_CHECK(r.exit_code != 0);

    RunResult missing = run_cli(
        "simulate --plan /nonexistent/building.plan --trials 1 --start-x 1 --start-y 1 "
        "--out /tmp/x");
    CLI_CHECK(missing.exit_code != 0);
    CLI_CHECK(missing.err.find("/nonexistent/building.plan") != std::string::npos);

    RunResult wall = run_cli("simulate --plan " + kPlan +
                             " --trials 1 --start-x 0 --start-y 0 --out /tmp/x");
    CLI_CHECK(wall.exit_code != 0);
}

void test_simulate_deterministic() {
    fs::path a = fresh_dir("leechsim_cli_det_a");
    fs::path b = fresh_dir("leechsim_cli_det_b");
    std::string args = "simulate --plan " + kPlan +
                       " --trials 3 --seed 77 --start-x 102 --start-y 48 --max-steps 150 --out ";
    CLI_CHECK(run_cli(args + a.string() + " --threads 1").exit_code == 0);
    CLI_CHECK(run_cli(args + b.string() + " --threads 4").exit_code == 0);
    CLI_CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
    CLI_CHECK(slurp(a / "trial_0002.csv") == slurp(b / "trial_0002.csv"));
    CLI_CHECK(slurp(a / "frequency.png") == slurp(b / "frequency.png"));
}

void test_analyze() {
    fs::path sim = fresh_dir("leechsim_cli_ana_src");
    CLI_CHECK(run_cli("simulate --plan " + kPlan +
                      " --trials 3 --seed 5 --start-x 102 --start-y 48 --max-steps 150 --out " +
                      sim.string())
                  .exit_code == 0);
    fs::path out = fresh_dir("leechsim_cli_ana");
    RunResult r = run_cli("analyze --plan " + kPlan + " --out " + out.string() + " " +
                          (sim / "trial_0000.csv").string() + " " +
                          (sim / "trial_0001.csv").string() + " " +
                          (sim / "trial_0002.csv").string());
    CLI_CHECK(r.exit_code == 0);
    json df = json::parse(slurp(out / "domain_frequencies.json"));
    double sum = 0.0;
    for (auto& [k, v] : df.items()) sum += v.get<double>();
    CLI_CHECK(std::abs(sum - 1.0) < 1e-9);

    // Single trace is a valid ensemble of one.
    fs::path single = fresh_dir("leechsim_cli_ana1");
    CLI_CHECK(run_cli("analyze --plan " + kPlan + " --out " + single.string() + " " +
                      (sim / "trial_0000.csv").string())
                  .exit_code == 0);

    // Out-of-bounds coordinate: nonzero exit naming trace and row.
    fs::path bad = fs::temp_directory_path() / "leechsim_bad_trace.csv";
    std::ofstream(bad) << "step,x,y,mode,outcome\n0,102,48,crawling,\n1,500,48,crawling,"
                          "timed_out\n";
    RunResult rb = run_cli("analyze --plan " + kPlan + " --out /tmp/x " + bad.string());
    CLI_CHECK(rb.exit_code != 0);
    CLI_CHECK(rb.err.find("leechsim_bad_trace.csv") != std::string::npos);
    CLI_CHECK(rb.err.find("row 3") != std::string::npos);
}

void test_render() {
    fs::path sim = fresh_dir("leechsim_cli_render_src");
    CLI_CHECK(run_cli("simulate --plan " + kPlan +
                      " --trials 1 --seed 2 --start-x 102 --start-y 48 --max-steps 100 --out " +
                      sim.string())
                  .exit_code == 0);
    fs::path png = fs::temp_directory_path() / "leechsim_overlay.png";
    fs::path png2 = fs::temp_directory_path() / "leechsim_overlay2.png";
    std::string base = "render --trace " + (sim / "trial_0000.csv").string() + " --plan " +
                       kPlan + " --zoom 4 --out ";
    CLI_CHECK(run_cli(base + png.string()).exit_code == 0);
    CLI_CHECK(run_cli(base + png2.string()).exit_code == 0);
    CLI_CHECK(slurp(png) == slurp(png2));

    // 110x100 plan at zoom 4 -> 440x400 pixels in the IHDR.
    std::string bytes = slurp(png);
    CLI_CHECK(bytes.size() > 33);
    auto be32 = [&](size_t at) {
        return (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at])) << 24) |
               (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + 1])) << 16) |
               (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + 2])) << 8) |
               static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + 3]));
    };
    CLI_CHECK(be32(16) == 440);
    CLI_CHECK(be32(20) == 400);

    CLI_CHECK(run_cli("render --trace /nonexistent.csv --plan " + kPlan +
                      " --out /tmp/x.png")
                  .exit_code != 0);
}

void test_calibrate() {
    fs::path target = fs::temp_directory_path() / "leechsim_target.json";
    std::ofstream(target) << R"({"A":0.09,"B":0.11,"C":0.17,"D":0.11,"E":0.23,"F":0.30})";
    fs::path params = fs::temp_directory_path() / "leechsim_calibrated.cfg";
    fs::path summary = fs::temp_directory_path() / "leechsim_calibrated.json";
    RunResult r = run_cli("calibrate --plan " + kPlan + " --target " + target.string() +
                          " --budget 2 --trials-per-eval 3 --seed 3 --start-x 102 --start-y 48" +
                          " --out " + params.string() + " --summary " + summary.string());
    CLI_CHECK(r.exit_code == 0);
    CLI_CHECK(fs::exists(params));
    json s = json::parse(slurp(summary));
    CLI_CHECK(s["evaluations"] == 2);
    CLI_CHECK(s["loss"].get<double>() >= 0.0);
    // The written params round-trip through the parser.
    BehaviorParams p = parse_params(slurp(params));
    CLI_CHECK(p.d_max >= 5.0);

    fs::path bad_target = fs::temp_directory_path() / "leechsim_target_bad.json";
    std::ofstream(bad_target) << R"({"A":0.5})";
    CLI_CHECK(run_cli("calibrate --plan " + kPlan + " --target " + bad_target.string() +
                      " --budget 1 --trials-per-eval 1 --start-x 102 --start-y 48 --out " +
                      params.string())
                  .exit_code != 0);
}

void test_simulate_with_calibrated_params() {
    // Ensemble under the bundled calibrated parameters: the most-visited
    // domain group of the summary's frequency hierarchy is F alone.
    fs::path out = fresh_dir("leechsim_cli_cal_sim");
    RunResult r = run_cli("simulate --plan " + kPlan + " --params " +
                          std::string(LEECHSIM_DATA_DIR) + "/params_calibrated.cfg" +
                          " --trials 500 --seed 1 --start-x 102 --start-y 48 --out " +
                          out.string());
    CLI_CHECK(r.exit_code == 0);
    json summary = json::parse(slurp(out / "summary.json"));
    auto hierarchy = summary["frequency_hierarchy"];
    CLI_CHECK(hierarchy[0].size() == 1);
    CLI_CHECK(hierarchy[0][0] == "F");
    CLI_CHECK(fs::exists(out / "manifest.json"));
    fs::remove_all(out);
}

void test_config_file_precedence() {
    // Values come from the config file unless a flag overrides them.
    fs::path cfg = fs::temp_directory_path() / "leechsim_run.cfg";
    std::ofstream(cfg) << "[simulate]\nplan=\"" << kPlan
                       << "\"\ntrials=2\nseed=5\nstart-x=102\nstart-y=48\nmax-steps=50\n";
    fs::path out1 = fresh_dir("leechsim_cli_cfg1");
    RunResult r1 = run_cli("--config " + cfg.string() + " simulate --out " + out1.string());
    CLI_CHECK(r1.exit_code == 0);
    CLI_CHECK(fs::exists(out1 / "trial_0001.csv"));
    CLI_CHECK(!fs::exists(out1 / "trial_0002.csv"));

    fs::path out2 = fresh_dir("leechsim_cli_cfg2");
    RunResult r2 = run_cli("--config " + cfg.string() + " simulate --trials 3 --out " +
                           out2.string());
    CLI_CHECK(r2.exit_code == 0);
    CLI_CHECK(fs::exists(out2 / "trial_0002.csv"));  // flag beat the config file
}

void test_extract() {
    fs::path frames = fresh_dir("leechsim_cli_frames");
    // 2 seconds at 25 fps; 3x3 blob at (10,12) then (11,12).
    for (int f = 0; f < 50; ++f) {
        Image img{64, 32, std::vector<Rgb>(64 * 32, Rgb{255, 255, 255})};
        int cx = 10 + f / 25;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) img.set(cx + dx, 12 + dy, Rgb{0, 0, 0});
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%03d.ppm", f);
        std::ofstream(frames / name, std::ios::binary) << encode_ppm(img);
    }
    fs::path trace = fs::temp_directory_path() / "leechsim_extracted.csv";
    RunResult r = run_cli("extract --frames " + frames.string() +
                          " --threshold 40 --fps 25 --sample-rate 1 --out " + trace.string());
    CLI_CHECK(r.exit_code == 0);
    Trajectory t = trajectory_from_csv(slurp(trace));
    CLI_CHECK(t.samples.size() == 2);
    CLI_CHECK((t.samples[0].pos == Cell{10, 12}));
    CLI_CHECK((t.samples[1].pos == Cell{11, 12}));
    CLI_CHECK(!t.samples[0].mode);

    CLI_CHECK(run_cli("extract --frames /nonexistent --out /tmp/x.csv").exit_code != 0);
}

}  // namespace

int main() {
    test_simulate_outputs();
    test_simulate_rejects_bad_input();
    test_simulate_deterministic();
    test_analyze();
    test_render();
    test_calibrate();
    test_simulate_with_calibrated_params();
    test_config_file_precedence();
    test_extract();
    if (failures == 0) {
        std::cout << "cli_tests: all checks passed\n";
        return 0;
    }
    std::cerr << "cli_tests: " << failures << " check(s) failed\n";
    return 1;
}
