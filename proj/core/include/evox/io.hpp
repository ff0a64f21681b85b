#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "evox/types.hpp"

namespace evox {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct parse_error : io_error {
    using io_error::io_error;
};

struct EventReadStats {
    std::size_t lines = 0;
    std::size_t out_of_order = 0;  // events that had to be re-sorted
};

// Reads the plain-text event convention "t x y p" (t decimal seconds,
// p in {0, 1}), one event per line. Seconds convert to integer
// microseconds with exact decimal round-half-even; p maps to +/-1. Sensor
// dimensions come from the caller since the format has no header. Input
// out of canonical order is re-sorted and counted in stats.
EventStream read_events_text(const std::filesystem::path& path,
                             std::int32_t width, std::int32_t height,
                             EventReadStats* stats = nullptr);

// Inverse of read_events_text: seconds with 6 decimal places, polarity
// mapped back to {0, 1}. write then read is the identity on canonical
// streams.
void write_events_text(const EventStream& stream,
                       const std::filesystem::path& path);

// Binary P5 PGM with maxval 255. Pixel byte v maps to v/255; writing
// rounds intensity*255 to nearest (ties to even).
Frame read_frame_pgm(const std::filesystem::path& path, Timestamp t = 0);
void write_frame_pgm(const Frame& frame, const std::filesystem::path& path);

// One integer microsecond timestamp per line.
std::vector<Timestamp> read_boundaries(const std::filesystem::path& path);
void write_boundaries(std::span<const Timestamp> boundaries,
                      const std::filesystem::path& path);

// Flat little-endian float32 tensor prefixed by the 16-byte header
// {magic "VOXG", u32 bins, u32 height, u32 width}, plus a sidecar text file
// (path + ".txt") holding "t0 t1" in microseconds.
void write_voxel_grid(const VoxelGrid& grid, const std::filesystem::path& path);
VoxelGrid read_voxel_grid(const std::filesystem::path& path);

}  // namespace evox
