// End-to-end checks of the evox binary. The executable path arrives as
// argv[1] from CTest.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "evox/io.hpp"
#include "support.hpp"

namespace {

std::string g_binary;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = g_binary + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

void write_ramp_fixture(const std::filesystem::path& dir, std::size_t n_frames) {
    std::filesystem::create_directories(dir);
    std::mt19937_64 gen(404);
    const auto frames =
        testsup::gain_ramp_frames(48, 36, n_frames, 10000, gen, 0.10, 0.42);
    char name[32];
    for (std::size_t i = 0; i < frames.size(); ++i) {
        std::snprintf(name, sizeof(name), "frame_%06zu.pgm", i);
        evox::write_frame_pgm(frames[i], dir / name);
    }
}

}  // namespace

TEST_CASE("no arguments prints usage and exits 1") {
    const RunResult r = run("");
    CHECK(r.exit_code == 1);
}

TEST_CASE("unknown subcommand exits 1") {
    CHECK(run("transmogrify").exit_code == 1);
}

TEST_CASE("help exits 0") {
    const RunResult r = run("--help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("simulate") != std::string::npos);
}

TEST_CASE("simulate writes a readable event file") {
    testsup::TempDir dir("cli_sim");
    write_ramp_fixture(dir.path() / "frames", 10);
    const auto events = dir.path() / "events.txt";

    const RunResult r = run("simulate --frames " + (dir.path() / "frames").string() +
                            " --dt-us 10000 --theta-pos 0.2 --theta-neg 0.2 --k 0.05 -o " +
                            events.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("events=") != std::string::npos);
    CHECK(r.out.find("theta_pos=0.2") != std::string::npos);

    const evox::EventStream s = evox::read_events_text(events, 48, 36);
    CHECK(!s.events.empty());
    CHECK(evox::validate_stream(s).ok);
}

TEST_CASE("simulate then reconstruct then evaluate closes the loop") {
    testsup::TempDir dir("cli_loop");
    const auto frames_dir = dir.path() / "frames";
    write_ramp_fixture(frames_dir, 12);
    const auto events = dir.path() / "events.txt";
    const auto bounds = dir.path() / "bounds.txt";
    const auto recon_dir = dir.path() / "recon";
    const auto keyframes = dir.path() / "keys";

    REQUIRE(run("simulate --frames " + frames_dir.string() +
                " --dt-us 10000 --theta-pos 0.2 --theta-neg 0.2 --k 0.05 -o " +
                events.string())
                .exit_code == 0);

    {
        std::ofstream b(bounds);
        for (int i = 0; i < 12; ++i) b << i * 10000 << "\n";
        std::filesystem::create_directories(keyframes);
        std::filesystem::copy_file(frames_dir / "frame_000000.pgm",
                                   keyframes / "frame_000000.pgm");
    }

    REQUIRE(run("reconstruct --events " + events.string() +
                " --width 48 --height 36 --keyframes " + keyframes.string() +
                " --boundaries " + bounds.string() +
                " --theta-pos 0.2 --theta-neg 0.2 --k 0.05 -o " + recon_dir.string())
                .exit_code == 0);

    // reconstruction output aligns with ground-truth frames 1..N
    testsup::TempDir truth_dir("cli_truth");
    for (int i = 1; i < 12; ++i) {
        char src[32], dst[32];
        std::snprintf(src, sizeof(src), "frame_%06d.pgm", i);
        std::snprintf(dst, sizeof(dst), "frame_%06d.pgm", i - 1);
        std::filesystem::copy_file(frames_dir / src, truth_dir.path() / dst);
    }
    const RunResult eval =
        run("evaluate " + recon_dir.string() + " " + truth_dir.path().string());
    REQUIRE(eval.exit_code == 0);
    CHECK(eval.out.find("mean mse=0.000") != std::string::npos);
}

TEST_CASE("evaluate of a directory against itself is perfect") {
    testsup::TempDir dir("cli_self");
    write_ramp_fixture(dir.path() / "frames", 4);
    const RunResult r = run("evaluate " + (dir.path() / "frames").string() + " " +
                            (dir.path() / "frames").string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("mean mse=0.00000000 ssim=1.00000000") != std::string::npos);
}

TEST_CASE("roundtrip reports the residual bound and a small error") {
    testsup::TempDir dir("cli_rt");
    write_ramp_fixture(dir.path() / "frames", 20);
    const RunResult r = run("roundtrip --frames " + (dir.path() / "frames").string() +
                            " --dt-us 10000 --theta-pos 0.2 --theta-neg 0.2 --k 0.01");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("residual_bound: PASS") != std::string::npos);

    const auto mse_pos = r.out.find("mean_mse=");
    REQUIRE(mse_pos != std::string::npos);
    const double mean_mse = std::stod(r.out.substr(mse_pos + 9));
    CHECK(mean_mse < 1e-3);
}

TEST_CASE("voxelize writes the tensor with its sidecar") {
    testsup::TempDir dir("cli_vox");
    write_ramp_fixture(dir.path() / "frames", 8);
    const auto events = dir.path() / "events.txt";
    REQUIRE(run("simulate --frames " + (dir.path() / "frames").string() +
                " --dt-us 10000 --theta-pos 0.25 --theta-neg 0.25 --k 0.05 -o " +
                events.string())
                .exit_code == 0);

    const auto out = dir.path() / "grid.voxg";
    const RunResult r = run("voxelize --events " + events.string() +
                            " --width 48 --height 36 --bins 5 --t0 0 --t1 70000 -o " +
                            out.string());
    REQUIRE(r.exit_code == 0);
    CHECK(std::filesystem::exists(out));
    CHECK(std::filesystem::exists(out.string() + ".txt"));

    const evox::VoxelGrid g = evox::read_voxel_grid(out);
    CHECK(g.bins() == 5);
    const evox::EventStream s = evox::read_events_text(events, 48, 36);
    double polarity_sum = 0.0;
    for (const auto& e : s.events)
        if (e.t < 70000) polarity_sum += e.polarity;
    CHECK(g.signed_mass() == doctest::Approx(polarity_sum).epsilon(1e-3));
}

TEST_CASE("estimate prints a parseable result line") {
    testsup::TempDir dir("cli_est");
    const auto frames_dir = dir.path() / "frames";
    write_ramp_fixture(frames_dir, 30);
    const auto events = dir.path() / "events.txt";
    const auto bounds = dir.path() / "bounds.txt";

    REQUIRE(run("simulate --frames " + frames_dir.string() +
                " --dt-us 10000 --theta-pos 0.2 --theta-neg 0.3 --k 0.1 -o " +
                events.string())
                .exit_code == 0);
    {
        std::ofstream b(bounds);
        for (int i = 0; i < 30; ++i) b << i * 10000 << "\n";
    }

    const RunResult r = run("estimate --events " + events.string() +
                            " --width 48 --height 36 --frames " + frames_dir.string() +
                            " --boundaries " + bounds.string() +
                            " --k-lo 0.01 --k-hi 1.0");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("theta_pos=") != std::string::npos);
    CHECK(r.out.find("rows=") != std::string::npos);
    CHECK(r.out.find("flag=") != std::string::npos);
}

TEST_CASE("config file fills in flags but conflicts are errors") {
    testsup::TempDir dir("cli_cfg");
    write_ramp_fixture(dir.path() / "frames", 6);
    const auto events = dir.path() / "events.txt";
    const auto cfg = dir.path() / "run.cfg";
    {
        std::ofstream c(cfg);
        c << "theta-pos=0.2\n"
          << "theta-neg=0.2\n"
          << "k=0.05\n";
    }

    const RunResult ok = run("simulate --config " + cfg.string() + " --frames " +
                             (dir.path() / "frames").string() + " --dt-us 10000 -o " +
                             events.string());
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("theta_pos=0.2") != std::string::npos);

    const RunResult clash = run("simulate --config " + cfg.string() + " --frames " +
                                (dir.path() / "frames").string() +
                                " --theta-pos 0.3 --dt-us 10000 -o " + events.string());
    CHECK(clash.exit_code == 1);
}

TEST_CASE("missing input files exit 1, not 2") {
    CHECK(run("simulate --frames /nonexistent_dir_12345 -o /tmp/x.txt").exit_code == 1);
    CHECK(run("reconstruct --events /nonexistent.txt --width 8 --height 8 "
              "--keyframes /nonexistent_dir --boundaries /nonexistent_b.txt -o /tmp/r")
              .exit_code == 1);
}

int main(int argc, char** argv) {
    if (argc > 1 && argv[1][0] != '-') g_binary = argv[1];
    if (g_binary.empty()) {
        std::fprintf(stderr, "usage: test_cli <path-to-evox-binary> [doctest args]\n");
        return 1;
    }
    doctest::Context context;
    context.applyCommandLine(argc - 1, argv + 1);
    return context.run();
}
