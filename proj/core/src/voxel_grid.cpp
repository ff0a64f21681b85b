#include "evox/voxel_grid.hpp"

#include <cmath>

namespace evox {

VoxelGrid encode_voxel_grid(const EventStream& stream, Timestamp t0,
                            Timestamp t1, std::int32_t bins) {
    if (t0 >= t1) throw std::invalid_argument("encode_voxel_grid: requires t0 < t1");
    if (bins < 1) throw std::invalid_argument("encode_voxel_grid: bins must be >= 1");
    if (stream.width <= 0 || stream.height <= 0)
        throw std::invalid_argument("encode_voxel_grid: stream has no dimensions");

    const std::size_t plane = static_cast<std::size_t>(stream.width) * stream.height;
    std::vector<double> values(plane * bins, 0.0);
    const double scale = static_cast<double>(bins - 1) / static_cast<double>(t1 - t0);

    for (const Event& e : stream.events) {
        if (e.t < t0 || e.t >= t1) continue;
        const double tstar = bins == 1 ? 0.0 : static_cast<double>(e.t - t0) * scale;
        const auto b0 = static_cast<std::int32_t>(tstar);  // tstar in [0, bins-1)
        const double w1 = tstar - b0;
        const std::size_t idx =
            static_cast<std::size_t>(e.y) * stream.width + e.x;
        values[static_cast<std::size_t>(b0) * plane + idx] += e.polarity * (1.0 - w1);
        if (w1 > 0.0)
            values[static_cast<std::size_t>(b0 + 1) * plane + idx] += e.polarity * w1;
    }
    return VoxelGrid(bins, stream.width, stream.height, std::move(values), t0, t1);
}

}  // namespace evox
