// Command-line front end: simulate events from frames, reconstruct frames
// from events, estimate sensor parameters, voxelize streams and score
// reconstructions. Machine-readable output goes to stdout, diagnostics to
// stderr. Exit codes: 0 success, 1 input error, 2 internal error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evox/estimator.hpp"
#include "evox/io.hpp"
#include "evox/metrics.hpp"
#include "evox/reconstructor.hpp"
#include "evox/simulator.hpp"
#include "evox/types.hpp"
#include "evox/voxel_grid.hpp"

namespace fs = std::filesystem;

namespace {

struct cli_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<fs::path> list_pgm_sorted(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw cli_error(dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw cli_error("no .pgm files in " + dir.string());
    return files;
}

std::vector<evox::Timestamp> frame_times(std::size_t count,
                                         const std::string& timestamps_file,
                                         std::int64_t dt_us) {
    if (!timestamps_file.empty()) {
        auto ts = evox::read_boundaries(timestamps_file);
        if (ts.size() != count)
            throw cli_error("timestamp count (" + std::to_string(ts.size()) +
                            ") does not match frame count (" + std::to_string(count) + ")");
        return ts;
    }
    std::vector<evox::Timestamp> ts(count);
    for (std::size_t i = 0; i < count; ++i)
        ts[i] = static_cast<evox::Timestamp>(i) * dt_us;
    return ts;
}

std::vector<evox::Frame> load_frames(const fs::path& dir,
                                     const std::vector<evox::Timestamp>& times) {
    const auto files = list_pgm_sorted(dir);
    if (files.size() != times.size())
        throw cli_error("expected " + std::to_string(times.size()) + " frames in " +
                        dir.string() + ", found " + std::to_string(files.size()));
    std::vector<evox::Frame> frames;
    frames.reserve(files.size());
    for (std::size_t i = 0; i < files.size(); ++i)
        frames.push_back(evox::read_frame_pgm(files[i], times[i]));
    return frames;
}

// Keyframe files are named frame_NNNNNN.pgm where NNNNNN is the index into
// the boundary list.
std::map<evox::Timestamp, evox::Frame> load_keyframes(
    const fs::path& dir, const std::vector<evox::Timestamp>& boundaries) {
    std::map<evox::Timestamp, evox::Frame> keyframes;
    for (const fs::path& file : list_pgm_sorted(dir)) {
        const std::string stem = file.stem().string();
        const auto underscore = stem.rfind('_');
        if (underscore == std::string::npos)
            throw cli_error("keyframe " + file.string() + " is not named frame_NNNNNN.pgm");
        std::size_t index = 0;
        try {
            index = std::stoul(stem.substr(underscore + 1));
        } catch (const std::exception&) {
            throw cli_error("keyframe " + file.string() + " has no numeric index");
        }
        if (index >= boundaries.size())
            throw cli_error("keyframe index " + std::to_string(index) +
                            " is outside the boundary list");
        keyframes.emplace(boundaries[index],
                          evox::read_frame_pgm(file, boundaries[index]));
    }
    return keyframes;
}

void write_frames(const std::vector<evox::Frame>& frames, const fs::path& dir) {
    fs::create_directories(dir);
    char name[32];
    for (std::size_t i = 0; i < frames.size(); ++i) {
        std::snprintf(name, sizeof(name), "frame_%06zu.pgm", i);
        evox::write_frame_pgm(frames[i], dir / name);
    }
}

// Optional key=value config file. Keys are long option names without the
// leading dashes; a key that is also given on the command line is an error
// rather than silently losing to either side.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config") {
            if (i + 1 >= args.size()) throw cli_error("--config needs a file path");
            config_path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (a.rfind("--config=", 0) == 0) {
            config_path = a.substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw cli_error("cannot open config file " + config_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw cli_error(config_path + ":" + std::to_string(line_no) +
                            ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        const std::string flag = "--" + key;
        for (const std::string& a : args) {
            if (a == flag || a.rfind(flag + "=", 0) == 0)
                throw cli_error("config key '" + key +
                                "' conflicts with command-line flag " + flag);
        }
        args.push_back(flag);
        if (!value.empty()) args.push_back(value);
    }
    return args;
}

struct SharedOptions {
    std::uint64_t seed = 1;
    int threads = 1;
};

int cmd_simulate(const fs::path& frames_dir, const std::string& timestamps_file,
                 std::int64_t dt_us, double theta_pos, double theta_neg, double k,
                 double sigma, const fs::path& out, const SharedOptions& shared) {
    const auto files = list_pgm_sorted(frames_dir);
    const auto times = frame_times(files.size(), timestamps_file, dt_us);
    std::vector<evox::Frame> frames;
    frames.reserve(files.size());
    for (std::size_t i = 0; i < files.size(); ++i)
        frames.push_back(evox::read_frame_pgm(files[i], times[i]));

    const evox::CameraParams params =
        evox::sample_thresholds(shared.seed, theta_pos, theta_neg, sigma, k);
    const evox::EventStream stream =
        evox::simulate_events(frames, params, shared.threads);
    evox::write_events_text(stream, out);

    std::printf("events=%zu theta_pos=%.10g theta_neg=%.10g k=%.10g\n",
                stream.events.size(), params.theta_pos(), params.theta_neg(),
                params.k());
    return 0;
}

int cmd_reconstruct(const fs::path& events_file, std::int32_t width,
                    std::int32_t height, const fs::path& keyframes_dir,
                    const fs::path& boundaries_file, double theta_pos,
                    double theta_neg, double k, std::int32_t reset_interval,
                    const fs::path& out_dir) {
    const auto boundaries = evox::read_boundaries(boundaries_file);
    const evox::EventStream stream =
        evox::read_events_text(events_file, width, height);
    const auto keyframes = load_keyframes(keyframes_dir, boundaries);
    const evox::CameraParams params(theta_pos, theta_neg, k);

    const evox::ReconstructionResult result = evox::reconstruct_sequence(
        stream, keyframes, boundaries, params, reset_interval);
    write_frames(result.frames, out_dir);

    std::printf("frames=%zu clip_fraction=%.6g\n", result.frames.size(),
                result.mean_clip_fraction);
    return 0;
}

int cmd_estimate(const fs::path& events_file, std::int32_t width,
                 std::int32_t height, const fs::path& frames_dir,
                 const fs::path& boundaries_file, std::size_t max_rows,
                 double k_lo, double k_hi, const std::string& report_file,
                 const SharedOptions& shared) {
    const auto boundaries = evox::read_boundaries(boundaries_file);
    const auto frames = load_frames(frames_dir, boundaries);
    const evox::EventStream stream =
        evox::read_events_text(events_file, width, height);

    const evox::ObservationSet obs =
        evox::build_observations(frames, stream, max_rows, shared.seed);
    const evox::FitResult fit = evox::fit_all(obs, {k_lo, k_hi});
    const char* flag = fit.condition == evox::FitCondition::well_posed
                           ? "well-posed"
                           : "rank-deficient-fallback";

    std::printf("theta_pos=%.10g theta_neg=%.10g k=%.10g residual_rms=%.10g "
                "rows=%zu flag=%s\n",
                fit.params.theta_pos(), fit.params.theta_neg(), fit.params.k(),
                fit.residual_rms, fit.rows_used, flag);

    if (!report_file.empty()) {
        std::ofstream report(report_file);
        if (!report) throw evox::io_error("cannot write " + report_file);
        report << "rows_total=" << obs.rows().size() << "\n"
               << "subsampled=" << (obs.subsampled() ? 1 : 0) << "\n"
               << "seed=" << obs.seed() << "\n"
               << "theta_pos=" << fit.params.theta_pos() << "\n"
               << "theta_neg=" << fit.params.theta_neg() << "\n"
               << "k=" << fit.params.k() << "\n"
               << "residual_rms=" << fit.residual_rms << "\n"
               << "flag=" << flag << "\n";
        report << "# profile objective over the k grid\n";
        for (int i = 0; i < 64; ++i) {
            const double u = std::log(k_lo) +
                             (std::log(k_hi) - std::log(k_lo)) * i / 63.0;
            const double k = std::exp(u);
            report << "k=" << k << " objective=" << evox::profile_objective(obs, k)
                   << "\n";
        }
    }
    return 0;
}

int cmd_voxelize(const fs::path& events_file, std::int32_t width,
                 std::int32_t height, std::optional<std::int64_t> t0,
                 std::optional<std::int64_t> t1, std::int32_t bins,
                 bool normalize, const fs::path& out) {
    const evox::EventStream stream =
        evox::read_events_text(events_file, width, height);
    if ((!t0 || !t1) && stream.events.empty())
        throw cli_error("empty stream: --t0 and --t1 are required");
    const evox::Timestamp lo = t0 ? *t0 : stream.events.front().t;
    const evox::Timestamp hi = t1 ? *t1 : stream.events.back().t + 1;

    evox::VoxelGrid grid = evox::encode_voxel_grid(stream, lo, hi, bins);
    if (normalize) {
        double peak = 0.0;
        for (double v : grid.values()) peak = std::max(peak, std::abs(v));
        if (peak > 0.0) {
            std::vector<double> scaled = grid.values();
            for (double& v : scaled) v /= peak;
            grid = evox::VoxelGrid(grid.bins(), grid.width(), grid.height(),
                                   std::move(scaled), grid.t0(), grid.t1());
        }
    }
    evox::write_voxel_grid(grid, out);
    std::printf("bins=%d width=%d height=%d signed_mass=%.9g\n", grid.bins(),
                grid.width(), grid.height(), grid.signed_mass());
    return 0;
}

int cmd_evaluate(const fs::path& recon_dir, const fs::path& truth_dir,
                 const std::string& csv_file) {
    const auto recon_files = list_pgm_sorted(recon_dir);
    const auto truth_files = list_pgm_sorted(truth_dir);
    if (recon_files.size() != truth_files.size())
        throw cli_error("frame counts differ between directories");

    std::vector<evox::Frame> recon, truth;
    for (std::size_t i = 0; i < recon_files.size(); ++i) {
        recon.push_back(evox::read_frame_pgm(recon_files[i]));
        truth.push_back(evox::read_frame_pgm(truth_files[i]));
    }
    const evox::SequenceReport report = evox::evaluate_sequence(recon, truth);

    std::printf("%-6s %-12s %-12s\n", "frame", "mse", "ssim");
    for (std::size_t i = 0; i < report.per_frame.size(); ++i)
        std::printf("%-6zu %-12.8f %-12.8f\n", i, report.per_frame[i].mse,
                    report.per_frame[i].ssim);
    std::printf("mean mse=%.8f ssim=%.8f\n", report.mean_mse, report.mean_ssim);

    if (!csv_file.empty()) {
        std::ofstream csv(csv_file);
        if (!csv) throw evox::io_error("cannot write " + csv_file);
        csv << "frame,mse,ssim\n";
        for (std::size_t i = 0; i < report.per_frame.size(); ++i)
            csv << i << "," << report.per_frame[i].mse << ","
                << report.per_frame[i].ssim << "\n";
        csv << "mean," << report.mean_mse << "," << report.mean_ssim << "\n";
    }
    return 0;
}

int cmd_roundtrip(const fs::path& frames_dir, const std::string& timestamps_file,
                  std::int64_t dt_us, double theta_pos, double theta_neg,
                  double k, double sigma, std::int32_t reset_interval,
                  const SharedOptions& shared) {
    const auto files = list_pgm_sorted(frames_dir);
    const auto times = frame_times(files.size(), timestamps_file, dt_us);
    std::vector<evox::Frame> frames;
    frames.reserve(files.size());
    for (std::size_t i = 0; i < files.size(); ++i)
        frames.push_back(evox::read_frame_pgm(files[i], times[i]));
    if (frames.size() < 2) throw cli_error("roundtrip needs at least 2 frames");

    const evox::CameraParams params =
        evox::sample_thresholds(shared.seed, theta_pos, theta_neg, sigma, k);
    const evox::EventStream stream =
        evox::simulate_events(frames, params, shared.threads);

    std::map<evox::Timestamp, evox::Frame> keyframes;
    for (const evox::Frame& f : frames) keyframes.emplace(f.t(), f);
    const evox::ReconstructionResult result = evox::reconstruct_sequence(
        stream, keyframes, times, params, reset_interval);

    // Free-run fidelity check: the recursion may lag the true log intensity
    // by at most one threshold at every emitted frame.
    double max_residual = 0.0;
    for (std::size_t i = 0; i < result.frames.size(); ++i) {
        const auto& rec = result.frames[i].pixels();
        const auto& tru = frames[i + 1].pixels();
        for (std::size_t p = 0; p < rec.size(); ++p) {
            const double r =
                std::abs(std::log(rec[p] + params.k()) - std::log(tru[p] + params.k()));
            max_residual = std::max(max_residual, r);
        }
    }
    const double limit = std::max(params.theta_pos(), params.theta_neg());

    std::vector<evox::Frame> truth(frames.begin() + 1, frames.end());
    const evox::SequenceReport report = evox::evaluate_sequence(result.frames, truth);

    std::printf("residual_bound: %s\n", max_residual < limit ? "PASS" : "FAIL");
    std::printf("max_log_residual=%.10g limit=%.10g\n", max_residual, limit);
    std::printf("events=%zu mean_mse=%.8g mean_ssim=%.8g clip_fraction=%.6g\n",
                stream.events.size(), report.mean_mse, report.mean_ssim,
                result.mean_clip_fraction);
    return max_residual < limit ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"event-stream / video-frame toolbox"};
    app.require_subcommand(1);
    app.fallthrough();

    SharedOptions shared;
    app.add_option("--seed", shared.seed, "seed for all randomized steps");
    app.add_option("--threads", shared.threads, "worker cap for row-parallel stages");

    // simulate
    auto* sim = app.add_subcommand("simulate", "frames -> event stream");
    fs::path sim_frames, sim_out;
    std::string sim_timestamps;
    std::int64_t sim_dt = 40000;
    double sim_tp = 0.2, sim_tn = 0.2, sim_k = 0.1, sim_sigma = 0.0;
    sim->add_option("--frames", sim_frames, "directory of input .pgm frames")->required();
    sim->add_option("--timestamps", sim_timestamps, "file with one microsecond timestamp per frame");
    sim->add_option("--dt-us", sim_dt, "uniform frame spacing when no timestamp file is given");
    sim->add_option("--theta-pos", sim_tp, "positive threshold (mean when --sigma > 0)");
    sim->add_option("--theta-neg", sim_tn, "negative threshold (mean when --sigma > 0)");
    sim->add_option("--k", sim_k, "intensity offset ratio");
    sim->add_option("--sigma", sim_sigma, "threshold sampling spread");
    sim->add_option("-o,--output", sim_out, "output event text file")->required();

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "events -> frames");
    fs::path rec_events, rec_keyframes, rec_boundaries, rec_out;
    std::int32_t rec_w = 0, rec_h = 0, rec_reset = 0;
    double rec_tp = 0.2, rec_tn = 0.2, rec_k = 0.1;
    rec->add_option("--events", rec_events)->required();
    rec->add_option("--width", rec_w)->required();
    rec->add_option("--height", rec_h)->required();
    rec->add_option("--keyframes", rec_keyframes, "directory of frame_NNNNNN.pgm keyframes (NNNNNN = boundary index)")->required();
    rec->add_option("--boundaries", rec_boundaries, "boundary timestamp list")->required();
    rec->add_option("--theta-pos", rec_tp);
    rec->add_option("--theta-neg", rec_tn);
    rec->add_option("--k", rec_k);
    rec->add_option("--reset-interval", rec_reset, "frames between keyframe resets, 0 = free run");
    rec->add_option("-o,--output", rec_out, "output frame directory")->required();

    // estimate
    auto* est = app.add_subcommand("estimate", "recover thresholds and k from frames + events");
    fs::path est_events, est_frames, est_boundaries;
    std::int32_t est_w = 0, est_h = 0;
    std::size_t est_max_rows = 200000;
    double est_k_lo = 0.005, est_k_hi = 1.0;
    std::string est_report;
    est->add_option("--events", est_events)->required();
    est->add_option("--width", est_w)->required();
    est->add_option("--height", est_h)->required();
    est->add_option("--frames", est_frames, "ground-truth frame directory")->required();
    est->add_option("--boundaries", est_boundaries, "frame timestamp list")->required();
    est->add_option("--max-rows", est_max_rows);
    est->add_option("--k-lo", est_k_lo);
    est->add_option("--k-hi", est_k_hi);
    est->add_option("--report", est_report, "write a detailed fit report here");

    // voxelize
    auto* vox = app.add_subcommand("voxelize", "events -> bilinear voxel tensor");
    fs::path vox_events, vox_out;
    std::int32_t vox_w = 0, vox_h = 0, vox_bins = 5;
    std::optional<std::int64_t> vox_t0, vox_t1;
    bool vox_norm = false;
    vox->add_option("--events", vox_events)->required();
    vox->add_option("--width", vox_w)->required();
    vox->add_option("--height", vox_h)->required();
    vox->add_option("--t0", vox_t0, "interval start (default: first event)");
    vox->add_option("--t1", vox_t1, "interval end, exclusive (default: last event + 1)");
    vox->add_option("--bins", vox_bins);
    vox->add_flag("--normalize", vox_norm, "scale values by the peak magnitude");
    vox->add_option("-o,--output", vox_out)->required();

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "score a reconstruction against ground truth");
    fs::path eval_recon, eval_truth;
    std::string eval_csv;
    eval->add_option("recon", eval_recon, "reconstructed frame directory")->required();
    eval->add_option("truth", eval_truth, "ground-truth frame directory")->required();
    eval->add_option("--csv", eval_csv, "also write the table as CSV");

    // roundtrip
    auto* rt = app.add_subcommand("roundtrip", "simulate + reconstruct + evaluate in one pass");
    fs::path rt_frames;
    std::string rt_timestamps;
    std::int64_t rt_dt = 40000;
    std::int32_t rt_reset = 0;
    double rt_tp = 0.2, rt_tn = 0.2, rt_k = 0.1, rt_sigma = 0.0;
    rt->add_option("--frames", rt_frames)->required();
    rt->add_option("--timestamps", rt_timestamps);
    rt->add_option("--dt-us", rt_dt);
    rt->add_option("--theta-pos", rt_tp);
    rt->add_option("--theta-neg", rt_tn);
    rt->add_option("--k", rt_k);
    rt->add_option("--sigma", rt_sigma);
    rt->add_option("--reset-interval", rt_reset);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = apply_config_file(std::move(args));
        std::reverse(args.begin(), args.end());  // CLI11 parses back to front
        app.parse(args);

        if (*sim)
            return cmd_simulate(sim_frames, sim_timestamps, sim_dt, sim_tp, sim_tn,
                                sim_k, sim_sigma, sim_out, shared);
        if (*rec)
            return cmd_reconstruct(rec_events, rec_w, rec_h, rec_keyframes,
                                   rec_boundaries, rec_tp, rec_tn, rec_k, rec_reset,
                                   rec_out);
        if (*est)
            return cmd_estimate(est_events, est_w, est_h, est_frames, est_boundaries,
                                est_max_rows, est_k_lo, est_k_hi, est_report, shared);
        if (*vox)
            return cmd_voxelize(vox_events, vox_w, vox_h, vox_t0, vox_t1, vox_bins,
                                vox_norm, vox_out);
        if (*eval) return cmd_evaluate(eval_recon, eval_truth, eval_csv);
        if (*rt)
            return cmd_roundtrip(rt_frames, rt_timestamps, rt_dt, rt_tp, rt_tn, rt_k,
                                 rt_sigma, rt_reset, shared);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const cli_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const evox::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
