#pragma once
#include <string>

#include "qpf/blowup/pipeline.hpp"
#include "qpf/minsets/fiberset.hpp"

namespace qpf::cli {

// The curve and its first `images` iterates, drawn on the unit square.
void svg_curves(const std::string& path, const curves::ExactBase& R, const curves::PLGraph& g, long images);

// Atlas arcs U_n on every `stride`-th G0 fiber, one colour per layer.
void svg_atlas(const std::string& path, const blowup::Pipeline& p, std::size_t stride);

// Occupied cells of a fiber set as vertical raster strips, downsampled to at most 512 x 512.
void svg_fiberset(const std::string& path, const minsets::FiberSet& K);

}  // namespace qpf::cli
