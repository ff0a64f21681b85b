#include "evox/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

namespace evox {

namespace {

[[noreturn]] void fail_line(const std::filesystem::path& path, std::size_t line,
                            const std::string& what) {
    throw parse_error(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

bool parse_int(const std::string& tok, std::int64_t& out) {
    if (tok.empty()) return false;
    std::size_t i = tok[0] == '+' ? 1 : 0;
    if (i == tok.size()) return false;
    std::int64_t v = 0;
    for (; i < tok.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
        if (v > (std::numeric_limits<std::int64_t>::max() - 9) / 10) return false;
        v = v * 10 + (tok[i] - '0');
    }
    out = v;
    return true;
}

// Decimal seconds -> integer microseconds, rounding the exact decimal value
// half to even. Avoids double parsing so ties like "0.0000005" behave
// deterministically regardless of binary representation.
bool parse_seconds_to_us(const std::string& tok, Timestamp& out) {
    if (tok.empty()) return false;
    std::size_t i = tok[0] == '+' ? 1 : 0;
    std::string int_part, frac_part;
    bool seen_dot = false, seen_digit = false;
    for (; i < tok.size(); ++i) {
        const char c = tok[i];
        if (c == '.') {
            if (seen_dot) return false;
            seen_dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            seen_digit = true;
            (seen_dot ? frac_part : int_part).push_back(c);
        } else {
            return false;
        }
    }
    if (!seen_digit) return false;

    std::int64_t seconds = 0;
    for (char c : int_part) {
        if (seconds > 9'000'000'000'000LL) return false;  // would overflow in us
        seconds = seconds * 10 + (c - '0');
    }

    std::int64_t micros = 0;
    for (std::size_t d = 0; d < 6; ++d)
        micros = micros * 10 + (d < frac_part.size() ? frac_part[d] - '0' : 0);

    if (frac_part.size() > 6) {
        const char head = frac_part[6];
        bool tail_nonzero = false;
        for (std::size_t d = 7; d < frac_part.size(); ++d)
            if (frac_part[d] != '0') tail_nonzero = true;
        if (head > '5' || (head == '5' && tail_nonzero))
            ++micros;
        else if (head == '5' && micros % 2 == 1)
            ++micros;  // ties to even
    }
    out = seconds * 1'000'000 + micros;
    return true;
}

std::ifstream open_input(const std::filesystem::path& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw io_error("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw io_error("cannot write " + path.string());
    return out;
}

void put_u32_le(std::string& buf, std::uint32_t v) {
    buf.push_back(static_cast<char>(v & 0xff));
    buf.push_back(static_cast<char>((v >> 8) & 0xff));
    buf.push_back(static_cast<char>((v >> 16) & 0xff));
    buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

EventStream read_events_text(const std::filesystem::path& path,
                             std::int32_t width, std::int32_t height,
                             EventReadStats* stats) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("read_events_text: dimensions must be positive");
    std::ifstream in = open_input(path, false);

    EventStream stream{width, height, {}};
    EventReadStats local;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::vector<std::string> tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok.size() != 4) fail_line(path, line_no, "expected 4 fields \"t x y p\"");

        Timestamp t;
        std::int64_t x, y, p;
        if (!parse_seconds_to_us(tok[0], t)) fail_line(path, line_no, "bad timestamp");
        if (!parse_int(tok[1], x) || !parse_int(tok[2], y))
            fail_line(path, line_no, "bad coordinates");
        if (!parse_int(tok[3], p) || (p != 0 && p != 1))
            fail_line(path, line_no, "polarity must be 0 or 1");
        if (x >= width || y >= height)
            fail_line(path, line_no, "coordinates outside " + std::to_string(width) +
                                         "x" + std::to_string(height));

        Event e{t, static_cast<std::int16_t>(x), static_cast<std::int16_t>(y),
                static_cast<std::int8_t>(p == 1 ? +1 : -1)};
        if (!stream.events.empty() && canonical_less(e, stream.events.back()))
            ++local.out_of_order;
        stream.events.push_back(e);
        ++local.lines;
    }
    if (local.out_of_order > 0) sort_canonical(stream);
    if (stats) *stats = local;
    return stream;
}

void write_events_text(const EventStream& stream,
                       const std::filesystem::path& path) {
    std::ofstream out = open_output(path, false);
    std::array<char, 64> buf;
    for (const Event& e : stream.events) {
        const long long sec = e.t / 1'000'000;
        const long long us = e.t % 1'000'000;
        const int n = std::snprintf(buf.data(), buf.size(), "%lld.%06lld %d %d %d\n",
                                    sec, us, static_cast<int>(e.x),
                                    static_cast<int>(e.y), e.polarity > 0 ? 1 : 0);
        out.write(buf.data(), n);
    }
    if (!out) throw io_error("write failed for " + path.string());
}

namespace {

// Next whitespace-delimited PGM header token, treating '#'..EOL as comment.
std::string pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

}  // namespace

Frame read_frame_pgm(const std::filesystem::path& path, Timestamp t) {
    std::ifstream in = open_input(path, true);
    if (pgm_token(in) != "P5") throw parse_error(path.string() + ": not a binary PGM (P5)");

    std::int64_t w = 0, h = 0, maxval = 0;
    if (!parse_int(pgm_token(in), w) || !parse_int(pgm_token(in), h) ||
        !parse_int(pgm_token(in), maxval))
        throw parse_error(path.string() + ": malformed PGM header");
    if (w <= 0 || h <= 0) throw parse_error(path.string() + ": bad PGM dimensions");
    if (maxval != 255) throw parse_error(path.string() + ": PGM maxval must be 255");

    std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw parse_error(path.string() + ": truncated PGM pixel data");

    std::vector<double> pixels(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) pixels[i] = raw[i] / 255.0;
    return Frame(static_cast<std::int32_t>(w), static_cast<std::int32_t>(h), t,
                 std::move(pixels));
}

void write_frame_pgm(const Frame& frame, const std::filesystem::path& path) {
    std::ofstream out = open_output(path, true);
    out << "P5\n" << frame.width() << " " << frame.height() << "\n255\n";
    std::vector<unsigned char> raw(frame.pixels().size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = static_cast<unsigned char>(std::nearbyint(frame.pixels()[i] * 255.0));
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) throw io_error("write failed for " + path.string());
}

std::vector<Timestamp> read_boundaries(const std::filesystem::path& path) {
    std::ifstream in = open_input(path, false);
    std::vector<Timestamp> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::vector<std::string> tok = split_ws(line);
        if (tok.empty()) continue;
        std::int64_t t;
        if (tok.size() != 1 || !parse_int(tok[0], t))
            fail_line(path, line_no, "expected one microsecond timestamp");
        out.push_back(t);
    }
    return out;
}

void write_boundaries(std::span<const Timestamp> boundaries,
                      const std::filesystem::path& path) {
    std::ofstream out = open_output(path, false);
    for (Timestamp t : boundaries) out << t << "\n";
    if (!out) throw io_error("write failed for " + path.string());
}

void write_voxel_grid(const VoxelGrid& grid, const std::filesystem::path& path) {
    std::string buf;
    buf.reserve(16 + grid.values().size() * 4);
    buf += "VOXG";
    put_u32_le(buf, static_cast<std::uint32_t>(grid.bins()));
    put_u32_le(buf, static_cast<std::uint32_t>(grid.height()));
    put_u32_le(buf, static_cast<std::uint32_t>(grid.width()));
    for (double v : grid.values())
        put_u32_le(buf, std::bit_cast<std::uint32_t>(static_cast<float>(v)));

    std::ofstream out = open_output(path, true);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw io_error("write failed for " + path.string());

    std::ofstream sidecar = open_output(path.string() + ".txt", false);
    sidecar << grid.t0() << " " << grid.t1() << "\n";
    if (!sidecar) throw io_error("write failed for " + path.string() + ".txt");
}

VoxelGrid read_voxel_grid(const std::filesystem::path& path) {
    std::ifstream in = open_input(path, true);
    std::array<unsigned char, 16> header;
    in.read(reinterpret_cast<char*>(header.data()), header.size());
    if (in.gcount() != 16 || std::memcmp(header.data(), "VOXG", 4) != 0)
        throw parse_error(path.string() + ": missing VOXG header");

    const std::uint32_t bins = get_u32_le(&header[4]);
    const std::uint32_t height = get_u32_le(&header[8]);
    const std::uint32_t width = get_u32_le(&header[12]);
    const std::size_t n = static_cast<std::size_t>(bins) * height * width;

    std::vector<unsigned char> raw(n * 4);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw parse_error(path.string() + ": truncated voxel data");

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i)
        values[i] = std::bit_cast<float>(get_u32_le(&raw[i * 4]));

    std::ifstream sidecar = open_input(path.string() + ".txt", false);
    Timestamp t0, t1;
    if (!(sidecar >> t0 >> t1))
        throw parse_error(path.string() + ".txt: expected \"t0 t1\"");

    return VoxelGrid(static_cast<std::int32_t>(bins), static_cast<std::int32_t>(width),
                     static_cast<std::int32_t>(height), std::move(values), t0, t1);
}

}  // namespace evox
