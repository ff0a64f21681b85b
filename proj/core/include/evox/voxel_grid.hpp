#pragma once

#include "evox/types.hpp"

namespace evox {

// Bins the events of [t0, t1) into a B-bin tensor with bilinear weights in
// normalized time t* = (B-1)(t - t0)/(t1 - t0): an event adds
// polarity * max(0, 1 - |b - t*|) to every integer bin b, which touches at
// most the two bins surrounding t*. B == 1 degenerates to a polarity sum
// image. No normalization is applied, so the signed mass of the tensor
// equals the polarity sum of the encoded events.
VoxelGrid encode_voxel_grid(const EventStream& stream, Timestamp t0,
                            Timestamp t1, std::int32_t bins);

}  // namespace evox
