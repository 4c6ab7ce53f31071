// Command-line front end: simulate ensembles on a floor plan, analyze stored
// traces, render time-color overlays, calibrate behavior parameters against
// target domain frequencies, and extract traces from frame sequences.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "leechsim/engine.hpp"
#include "leechsim/imaging.hpp"
#include "leechsim/metrics.hpp"
#include "leechsim/thermal.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace leechsim;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Collects per-file 64-bit FNV-1a digests so runs can be compared by content.
class OutputWriter {
public:
    explicit OutputWriter(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (!fs::is_directory(dir_))
            throw ArgumentError("cannot create output directory '" + dir_ + "'");
    }

    void write(const std::string& name, const std::string& bytes) {
        std::ofstream out(dir_ + "/" + name, std::ios::binary);
        if (!out) throw ArgumentError("cannot write '" + dir_ + "/" + name + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw ArgumentError("failed writing '" + dir_ + "/" + name + "'");
        digests_[name] = digest_hex(bytes);
    }

    void write(const std::string& name, const std::vector<std::uint8_t>& bytes) {
        write(name, std::string(bytes.begin(), bytes.end()));
    }

    void finish() {
        json manifest;
        manifest["files"] = digests_;
        std::ofstream out(dir_ + "/manifest.json", std::ios::binary);
        out << manifest.dump(2) << "\n";
    }

private:
    static std::string digest_hex(const std::string& bytes) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    std::string dir_;
    std::map<std::string, std::string> digests_;
};

FloorPlan load_plan(const std::string& path) {
    try {
        return parse_plan(read_file(path));
    } catch (const std::exception& e) {
        throw ArgumentError("plan '" + path + "': " + e.what());
    }
}

BehaviorParams load_params(const std::string& path) {
    try {
        return parse_params(read_file(path));
    } catch (const std::exception& e) {
        throw ArgumentError("params '" + path + "': " + e.what());
    }
}

std::string format_theta(double theta) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", theta);
    return buf;
}

std::string frequency_csv(const FrequencyMatrix& fm) {
    std::ostringstream out;
    out.precision(17);
    for (int y = 0; y < fm.height; ++y) {
        for (int x = 0; x < fm.width; ++x) {
            if (x) out << ',';
            out << fm.at(x, y);
        }
        out << '\n';
    }
    return out.str();
}

json domain_frequencies_json(const DomainFrequencies& df) {
    json j;
    for (int d = 0; d < kNumDomains; ++d)
        j[std::string(1, domain_char(static_cast<DomainId>(d)))] = df.f[d];
    return j;
}

json hierarchy_json(const std::vector<std::vector<DomainId>>& groups) {
    json j = json::array();
    for (const auto& group : groups) {
        json g = json::array();
        for (DomainId d : group) g.push_back(std::string(1, domain_char(d)));
        j.push_back(g);
    }
    return j;
}

// The shared analysis pipeline behind `simulate` and `analyze`.
void write_metric_outputs(OutputWriter& out, const std::vector<Trajectory>& trajectories,
                          const FloorPlan& plan, FrequencyMode freq_mode, double tie_epsilon,
                          json extra) {
    FrequencyMatrix fm = visit_frequency(trajectories, plan, freq_mode);
    DomainFrequencies df = domain_frequencies(fm, plan);
    ComplexityReport cr = complexity(plan);

    out.write("frequency.csv", frequency_csv(fm));
    GrayImage gray = frequency_image(fm);
    out.write("frequency.pgm", encode_pgm(gray));
    out.write("frequency.png", encode_png(gray));

    for (double theta : {0.0, 0.05, 0.10, 0.15}) {
        GrayImage mask = threshold_image(threshold_map(fm, theta));
        out.write("threshold_" + format_theta(theta) + ".pgm", encode_pgm(mask));
        out.write("threshold_" + format_theta(theta) + ".png", encode_png(mask));
    }

    out.write("domain_frequencies.json", domain_frequencies_json(df).dump(2) + "\n");

    json summary = std::move(extra);
    summary["n_trials"] = static_cast<int>(trajectories.size());
    int escaped = 0;
    for (const auto& t : trajectories)
        if (t.outcome == OutcomeKind::Escaped) ++escaped;
    summary["escaped_trials"] = escaped;
    summary["domain_frequencies"] = domain_frequencies_json(df);
    summary["frequency_hierarchy"] = hierarchy_json(hierarchy(df.f, tie_epsilon));
    json cx;
    for (int d = 0; d < kNumDomains; ++d)
        cx[std::string(1, domain_char(static_cast<DomainId>(d)))] = cr.c[d];
    summary["complexity"] = cx;
    summary["complexity_hierarchy"] = hierarchy_json(hierarchy(cr.c, 0.01));
    ClusterReport cl = clusters(df, cr);
    json jcl;
    for (int d = 0; d < kNumDomains; ++d)
        jcl[std::string(1, domain_char(static_cast<DomainId>(d)))] =
            cluster_name(cl.assignment[d]);
    summary["clusters"] = jcl;
    out.write("summary.json", summary.dump(2) + "\n");
}

struct CommonOpts {
    std::string plan_path;
    std::string out_dir;
    int threads = 0;
    double tie_epsilon = 0.005;
    bool occupancy_time = false;
};

int cmd_simulate(const CommonOpts& common, const std::string& params_path, int trials,
                 std::uint64_t seed, int start_x, int start_y, int max_steps,
                 const std::vector<int>& heat_rect, double source_temp, double ambient) {
    FloorPlan plan = load_plan(common.plan_path);
    BehaviorParams params =
        params_path.empty() ? BehaviorParams{} : load_params(params_path);

    ThermalField field;
    const ThermalField* field_ptr = nullptr;
    if (!heat_rect.empty()) {
        std::vector<Cell> source;
        for (int y = heat_rect[1]; y <= heat_rect[3]; ++y)
            for (int x = heat_rect[0]; x <= heat_rect[2]; ++x)
                if (plan.kind(x, y) == CellKind::Free) source.push_back({x, y});
        field = thermal_field(plan, source, source_temp, ambient);
        field_ptr = &field;
    }

    auto trajectories = run_ensemble(plan, {start_x, start_y}, params, trials, seed, field_ptr,
                                     max_steps, common.threads);

    OutputWriter out(common.out_dir);
    int width = trials > 1000 ? 5 : 4;
    for (size_t i = 0; i < trajectories.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "trial_%0*zu.csv", width, i);
        out.write(name, trajectory_to_csv(trajectories[i]));
    }

    json extra;
    extra["master_seed"] = seed;
    extra["start"] = {start_x, start_y};
    write_metric_outputs(out, trajectories, plan,
                         common.occupancy_time ? FrequencyMode::OccupancyTime
                                               : FrequencyMode::PerTrialBinary,
                         common.tie_epsilon, std::move(extra));
    out.finish();
    return 0;
}

int cmd_analyze(const CommonOpts& common, const std::vector<std::string>& trace_paths) {
    FloorPlan plan = load_plan(common.plan_path);
    std::vector<Trajectory> trajectories;
    for (const std::string& path : trace_paths) {
        Trajectory t;
        try {
            t = trajectory_from_csv(read_file(path));
        } catch (const std::exception& e) {
            throw ArgumentError("trace '" + path + "': " + e.what());
        }
        for (size_t i = 0; i < t.samples.size(); ++i) {
            const TrajectorySample& s = t.samples[i];
            if (!plan.in_bounds(s.pos.x, s.pos.y) || !plan.is_open(s.pos))
                throw ArgumentError("trace '" + path + "' row " + std::to_string(i + 2) +
                                    ": position (" + std::to_string(s.pos.x) + "," +
                                    std::to_string(s.pos.y) + ") is not on an open cell");
        }
        trajectories.push_back(std::move(t));
    }

    OutputWriter out(common.out_dir);
    json extra;
    extra["traces"] = trace_paths;
    write_metric_outputs(out, trajectories, plan,
                         common.occupancy_time ? FrequencyMode::OccupancyTime
                                               : FrequencyMode::PerTrialBinary,
                         common.tie_epsilon, std::move(extra));
    out.finish();
    return 0;
}

int cmd_render(const std::string& trace_path, const std::string& plan_path, int zoom,
               const std::string& out_path, const std::vector<int>& wall_color) {
    FloorPlan plan = load_plan(plan_path);
    Trajectory t;
    try {
        t = trajectory_from_csv(read_file(trace_path));
    } catch (const std::exception& e) {
        throw ArgumentError("trace '" + trace_path + "': " + e.what());
    }
    Rgb wall = kDefaultWallColor;
    if (!wall_color.empty())
        wall = {static_cast<std::uint8_t>(wall_color[0]), static_cast<std::uint8_t>(wall_color[1]),
                static_cast<std::uint8_t>(wall_color[2])};
    Image img = render_overlay(t, plan, zoom, wall);

    std::string bytes;
    if (out_path.size() >= 4 && out_path.substr(out_path.size() - 4) == ".png") {
        auto png = encode_png(img);
        bytes.assign(png.begin(), png.end());
    } else {
        bytes = encode_ppm(img);
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + out_path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    return 0;
}

int cmd_calibrate(const std::string& plan_path, const std::string& target_path, int budget,
                  int trials_per_eval, std::uint64_t seed, int start_x, int start_y,
                  const std::string& out_params, const std::string& out_summary, int threads) {
    FloorPlan plan = load_plan(plan_path);

    std::map<DomainId, double> target;
    try {
        json j = json::parse(read_file(target_path));
        for (auto& [key, value] : j.items()) {
            if (key.size() != 1 || !domain_from_char(key[0]))
                throw ArgumentError("unknown domain '" + key + "'");
            target[*domain_from_char(key[0])] = value.get<double>();
        }
    } catch (const json::exception& e) {
        throw ArgumentError("target '" + target_path + "': " + e.what());
    }

    CalibrationOptions options;
    options.budget = budget;
    options.trials_per_eval = trials_per_eval;
    options.master_seed = seed;
    options.threads = threads;
    CalibrationResult result = calibrate(plan, {start_x, start_y}, target, options);

    std::ofstream params_out(out_params, std::ios::binary);
    if (!params_out) throw ArgumentError("cannot write '" + out_params + "'");
    params_out << serialize_params(result.best_params);

    json summary;
    summary["loss"] = result.loss;
    summary["evaluations"] = result.evaluations;
    summary["master_seed"] = seed;
    summary["trials_per_eval"] = trials_per_eval;
    json jt;
    for (const auto& [d, v] : result.target) jt[std::string(1, domain_char(d))] = v;
    summary["target"] = jt;
    std::ofstream summary_out(out_summary, std::ios::binary);
    if (!summary_out) throw ArgumentError("cannot write '" + out_summary + "'");
    summary_out << summary.dump(2) << "\n";

    std::cout << "best loss " << result.loss << " after " << result.evaluations
              << " evaluations\n";
    return 0;
}

int cmd_extract(const std::string& frames_dir, int threshold, double fps, double sample_rate,
                bool luminance, double scale, double offset_x, double offset_y,
                const std::string& out_path) {
    FrameSequence seq = load_frame_dir(frames_dir, fps);
    Trajectory t = extract_trace(seq, threshold, sample_rate,
                                 luminance ? DarknessTest::Luminance : DarknessTest::PerChannel);
    if (scale != 1.0 || offset_x != 0.0 || offset_y != 0.0) {
        for (TrajectorySample& s : t.samples) {
            s.pos.x = static_cast<int>(std::lround(scale * s.pos.x + offset_x));
            s.pos.y = static_cast<int>(std::lround(scale * s.pos.y + offset_y));
        }
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + out_path + "'");
    out << trajectory_to_csv(t);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contact-driven exploration simulator for grid floor plans"};
    app.require_subcommand(1);
    // Precedence: command-line flag > config file > built-in default. The
    // config file is INI-style with one section per subcommand, e.g.
    //   [simulate]
    //   plan="data/ece_first_floor.plan"
    // and --config must precede the subcommand name.
    app.set_config("--config", "",
                   "INI config file with a section per subcommand; flags override it");

    CommonOpts common;

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run a trial ensemble and write all metrics");
    std::string sim_params;
    int sim_trials = 20;
    std::uint64_t sim_seed = 1;
    int sim_start_x = -1, sim_start_y = -1, sim_max_steps = 1800;
    std::vector<int> sim_heat_rect;
    double sim_source_temp = 70.0, sim_ambient = 20.0;
    sim->add_option("--plan", common.plan_path, "Plan file")->required();
    sim->add_option("--params", sim_params, "Behavior parameter file (key=value)");
    sim->add_option("--trials,-n", sim_trials, "Number of trials")
        ->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "Master seed; all randomness derives from it");
    sim->add_option("--start-x", sim_start_x, "Start cell x")->required();
    sim->add_option("--start-y", sim_start_y, "Start cell y")->required();
    sim->add_option("--max-steps", sim_max_steps, "Trial length in steps (seconds)");
    sim->add_option("--out", common.out_dir, "Output directory")->required();
    sim->add_option("--threads", common.threads, "Worker threads (0 = hardware)");
    sim->add_flag("--occupancy-time", common.occupancy_time,
                  "Time-weighted frequency instead of per-trial binary");
    sim->add_option("--tie-epsilon", common.tie_epsilon, "Hierarchy tie width");
    sim->add_option("--heat-rect", sim_heat_rect,
                    "Thermal source cell rectangle: x0 y0 x1 y1 (inclusive)")
        ->expected(4);
    sim->add_option("--source-temp", sim_source_temp, "Source temperature, Celsius");
    sim->add_option("--ambient", sim_ambient, "Ambient temperature, Celsius");

    // analyze
    auto* ana = app.add_subcommand("analyze", "Compute metrics from stored trace CSVs");
    std::vector<std::string> ana_traces;
    ana->add_option("--plan", common.plan_path, "Plan file")->required();
    ana->add_option("--out", common.out_dir, "Output directory")->required();
    ana->add_option("traces", ana_traces, "Trace CSV files")->required();
    ana->add_flag("--occupancy-time", common.occupancy_time,
                  "Time-weighted frequency instead of per-trial binary");
    ana->add_option("--tie-epsilon", common.tie_epsilon, "Hierarchy tie width");

    // render
    auto* ren = app.add_subcommand("render", "Render a time-color overlay of one trace");
    std::string ren_trace, ren_plan, ren_out;
    int ren_zoom = 1;
    std::vector<int> ren_wall;
    ren->add_option("--trace", ren_trace, "Trace CSV file")->required();
    ren->add_option("--plan", ren_plan, "Plan file")->required();
    ren->add_option("--zoom", ren_zoom, "Integer magnification")->check(CLI::PositiveNumber);
    ren->add_option("--out", ren_out, "Output image (.png or .ppm)")->required();
    ren->add_option("--wall-color", ren_wall, "Wall color: r g b")
        ->expected(3)
        ->check(CLI::Range(0, 255));

    // calibrate
    auto* cal = app.add_subcommand("calibrate",
                                   "Random-search behavior parameters against target domain "
                                   "frequencies");
    std::string cal_plan, cal_target, cal_out = "calibrated_params.cfg";
    std::string cal_summary;
    int cal_budget = 200, cal_trials = 100, cal_start_x = -1, cal_start_y = -1;
    std::uint64_t cal_seed = 1;
    int cal_threads = 0;
    cal->add_option("--plan", cal_plan, "Plan file")->required();
    cal->add_option("--target", cal_target, "Target domain frequencies JSON")->required();
    cal->add_option("--budget", cal_budget, "Candidate evaluations")
        ->check(CLI::PositiveNumber);
    cal->add_option("--trials-per-eval", cal_trials, "Trials per candidate")
        ->check(CLI::PositiveNumber);
    cal->add_option("--seed", cal_seed, "Master seed");
    cal->add_option("--start-x", cal_start_x, "Start cell x")->required();
    cal->add_option("--start-y", cal_start_y, "Start cell y")->required();
    cal->add_option("--out", cal_out, "Best parameters output file");
    cal->add_option("--summary", cal_summary, "Summary JSON output (default: <out>.json)");
    cal->add_option("--threads", cal_threads, "Worker threads (0 = hardware)");

    // extract
    auto* ext = app.add_subcommand("extract", "Extract a trace from a directory of frames");
    std::string ext_frames, ext_out;
    int ext_threshold = 40;
    double ext_fps = 25.0, ext_rate = 1.0, ext_scale = 1.0, ext_ox = 0.0, ext_oy = 0.0;
    bool ext_luminance = false;
    ext->add_option("--frames", ext_frames, "Directory of .ppm/.pgm frames")->required();
    ext->add_option("--threshold", ext_threshold, "Darkness threshold (0..255 exclusive)");
    ext->add_option("--fps", ext_fps, "Frame rate of the sequence");
    ext->add_option("--sample-rate", ext_rate, "Sampling rate, Hz");
    ext->add_flag("--luminance", ext_luminance, "Threshold Rec.601 luma instead of per-channel");
    ext->add_option("--scale", ext_scale, "Pixel-to-cell scale factor");
    ext->add_option("--offset-x", ext_ox, "Pixel-to-cell x offset, applied after scaling");
    ext->add_option("--offset-y", ext_oy, "Pixel-to-cell y offset, applied after scaling");
    ext->add_option("--out", ext_out, "Output trace CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(common, sim_params, sim_trials, sim_seed, sim_start_x,
                                sim_start_y, sim_max_steps, sim_heat_rect, sim_source_temp,
                                sim_ambient);
        if (ana->parsed()) return cmd_analyze(common, ana_traces);
        if (ren->parsed()) return cmd_render(ren_trace, ren_plan, ren_zoom, ren_out, ren_wall);
        if (cal->parsed())
            return cmd_calibrate(cal_plan, cal_target, cal_budget, cal_trials, cal_seed,
                                 cal_start_x, cal_start_y, cal_out,
                                 cal_summary.empty() ? cal_out + ".json" : cal_summary,
                                 cal_threads);
        if (ext->parsed())
            return cmd_extract(ext_frames, ext_threshold, ext_fps, ext_rate, ext_luminance,
                               ext_scale, ext_ox, ext_oy, ext_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
