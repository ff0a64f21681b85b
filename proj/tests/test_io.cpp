#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>

#include "evox/io.hpp"
#include "evox/voxel_grid.hpp"
#include "support.hpp"

using namespace evox;

namespace {

void write_text(const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

}  // namespace

TEST_CASE("empty event file reads as an empty stream") {
    testsup::TempDir dir("io_empty");
    const auto path = dir.path() / "events.txt";
    write_text(path, "");
    EventReadStats stats;
    const EventStream s = read_events_text(path, 240, 180, &stats);
    CHECK(s.events.empty());
    CHECK(stats.lines == 0);
}

TEST_CASE("event line parses with exact microsecond conversion") {
    testsup::TempDir dir("io_line");
    const auto path = dir.path() / "events.txt";
    write_text(path, "0.000010 3 4 1\n");
    const EventStream s = read_events_text(path, 240, 180);
    REQUIRE(s.events.size() == 1);
    CHECK(s.events[0].t == 10);
    CHECK(s.events[0].x == 3);
    CHECK(s.events[0].y == 4);
    CHECK(s.events[0].polarity == 1);
}

TEST_CASE("half-microsecond ties round to even") {
    testsup::TempDir dir("io_ties");
    const auto path = dir.path() / "events.txt";
    write_text(path,
               "0.0000005 0 0 1\n"
               "0.0000015 0 0 1\n"
               "0.0000025 0 0 1\n"
               "0.00000250001 0 1 1\n");
    const EventStream s = read_events_text(path, 8, 8);
    REQUIRE(s.events.size() == 4);
    CHECK(s.events[0].t == 0);  // 0.5 -> 0
    CHECK(s.events[1].t == 2);  // 1.5 -> 2
    CHECK(s.events[2].t == 2);  // 2.5 -> 2
    CHECK(s.events[3].t == 3);  // above the tie -> 3
}

TEST_CASE("malformed and out-of-bounds lines fail with a line number") {
    testsup::TempDir dir("io_bad");
    const auto path = dir.path() / "events.txt";

    auto error_for = [&path](const std::string& body,
                             std::int32_t w = 240, std::int32_t h = 180) {
        write_text(path, body);
        try {
            read_events_text(path, w, h);
        } catch (const parse_error& e) {
            return std::string(e.what());
        }
        return std::string();
    };

    CHECK(error_for("0.1 300 4 1\n").find(":1:") != std::string::npos);
    CHECK(error_for("0.1 3 4 1\nnot a line\n").find(":2:") != std::string::npos);
    CHECK(error_for("0.1 3 4 2\n").find("polarity") != std::string::npos);
    CHECK_THROWS_AS(read_events_text(dir.path() / "missing.txt", 240, 180), io_error);
}

TEST_CASE("out-of-order input is re-sorted and counted") {
    testsup::TempDir dir("io_order");
    const auto path = dir.path() / "events.txt";
    write_text(path,
               "0.000020 1 1 1\n"
               "0.000010 2 2 0\n"
               "0.000030 3 3 1\n");
    EventReadStats stats;
    const EventStream s = read_events_text(path, 8, 8, &stats);
    CHECK(stats.out_of_order == 1);
    REQUIRE(s.events.size() == 3);
    CHECK(s.events[0].t == 10);
    CHECK(validate_stream(s).ok);
}

TEST_CASE("event text round trip is the identity on canonical streams") {
    std::mt19937_64 gen(77);
    std::uniform_int_distribution<Timestamp> time(0, 50'000'000);
    std::uniform_int_distribution<int> cx(0, 239), cy(0, 179);
    EventStream s{240, 180, {}};
    for (int i = 0; i < 5000; ++i)
        s.events.push_back({time(gen), static_cast<std::int16_t>(cx(gen)),
                            static_cast<std::int16_t>(cy(gen)),
                            gen() % 2 ? std::int8_t{1} : std::int8_t{-1}});
    sort_canonical(s);

    testsup::TempDir dir("io_roundtrip");
    const auto path = dir.path() / "events.txt";
    write_events_text(s, path);
    EventReadStats stats;
    const EventStream back = read_events_text(path, 240, 180, &stats);

    CHECK(stats.out_of_order == 0);
    REQUIRE(back.events.size() == s.events.size());
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        CHECK(back.events[i].t == s.events[i].t);
        CHECK(back.events[i].x == s.events[i].x);
        CHECK(back.events[i].y == s.events[i].y);
        CHECK(back.events[i].polarity == s.events[i].polarity);
    }
}

TEST_CASE("written event lines use fixed six-decimal seconds") {
    EventStream s{8, 8, {{10, 1, 2, +1}, {2'500'000, 3, 4, -1}}};
    testsup::TempDir dir("io_format");
    const auto path = dir.path() / "events.txt";
    write_events_text(s, path);
    std::ifstream in(path);
    std::string line1, line2;
    std::getline(in, line1);
    std::getline(in, line2);
    CHECK(line1 == "0.000010 1 2 1");
    CHECK(line2 == "2.500000 3 4 0");
}

TEST_CASE("pgm round trip stays within the quantization half-step") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> v(0.0, 1.0);
    std::vector<double> px(32 * 20);
    for (double& p : px) p = v(gen);
    const Frame f(32, 20, 0, px);

    testsup::TempDir dir("io_pgm");
    const auto path = dir.path() / "frame.pgm";
    write_frame_pgm(f, path);
    const Frame back = read_frame_pgm(path);
    REQUIRE(back.width() == 32);
    REQUIRE(back.height() == 20);
    for (std::size_t i = 0; i < px.size(); ++i)
        CHECK(std::abs(back.pixels()[i] - px[i]) <= 1.0 / 510.0 + 1e-12);

    // second trip is exact: values are already on the 8-bit lattice
    const auto path2 = dir.path() / "frame2.pgm";
    write_frame_pgm(back, path2);
    const Frame again = read_frame_pgm(path2);
    for (std::size_t i = 0; i < px.size(); ++i)
        CHECK(again.pixels()[i] == back.pixels()[i]);
}

TEST_CASE("pgm byte 128 maps to 128/255") {
    testsup::TempDir dir("io_pgm_byte");
    const auto path = dir.path() / "gray.pgm";
    {
        std::ofstream out(path, std::ios::binary);
        out << "P5\n# a comment\n4 4\n255\n";
        std::vector<unsigned char> raw(16, 128);
        out.write(reinterpret_cast<const char*>(raw.data()), raw.size());
    }
    const Frame f = read_frame_pgm(path);
    CHECK(f.at(0, 0) == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
    CHECK(f.at(0, 0) == doctest::Approx(0.50196).epsilon(1e-4));
}

TEST_CASE("pgm rejects wrong magic, maxval and truncation") {
    testsup::TempDir dir("io_pgm_bad");
    const auto path = dir.path() / "bad.pgm";

    write_text(path, "P2\n4 4\n255\n");
    CHECK_THROWS_AS(read_frame_pgm(path), parse_error);

    {
        std::ofstream out(path, std::ios::binary);
        out << "P5\n4 4\n65535\n";
        std::vector<unsigned char> raw(32, 0);
        out.write(reinterpret_cast<const char*>(raw.data()), raw.size());
    }
    CHECK_THROWS_AS(read_frame_pgm(path), parse_error);

    {
        std::ofstream out(path, std::ios::binary);
        out << "P5\n4 4\n255\n";
        std::vector<unsigned char> raw(7, 0);
        out.write(reinterpret_cast<const char*>(raw.data()), raw.size());
    }
    CHECK_THROWS_AS(read_frame_pgm(path), parse_error);
}

TEST_CASE("boundary list round trips") {
    testsup::TempDir dir("io_bounds");
    const auto path = dir.path() / "bounds.txt";
    const std::vector<Timestamp> bounds{0, 1000, 2500, 999999};
    write_boundaries(bounds, path);
    CHECK(read_boundaries(path) == bounds);

    write_text(path, "12\nnope\n");
    CHECK_THROWS_AS(read_boundaries(path), parse_error);
}

TEST_CASE("voxel tensor file carries the header, payload and sidecar") {
    EventStream s{6, 4, {{100, 2, 1, +1}, {300, 2, 1, -1}, {450, 5, 3, +1}}};
    const VoxelGrid g = encode_voxel_grid(s, 0, 500, 3);

    testsup::TempDir dir("io_voxg");
    const auto path = dir.path() / "grid.voxg";
    write_voxel_grid(g, path);

    // header check
    std::ifstream in(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "VOXG");
    unsigned char rest[12];
    in.read(reinterpret_cast<char*>(rest), 12);
    CHECK(rest[0] == 3);  // bins, little endian
    CHECK(rest[4] == 4);  // height
    CHECK(rest[8] == 6);  // width

    std::ifstream sidecar(path.string() + ".txt");
    Timestamp t0, t1;
    sidecar >> t0 >> t1;
    CHECK(t0 == 0);
    CHECK(t1 == 500);

    const VoxelGrid back = read_voxel_grid(path);
    CHECK(back.bins() == 3);
    CHECK(back.width() == 6);
    CHECK(back.height() == 4);
    for (std::size_t i = 0; i < g.values().size(); ++i)
        CHECK(back.values()[i] ==
              doctest::Approx(g.values()[i]).epsilon(1e-6));  // f32 payload
}
