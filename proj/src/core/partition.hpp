#pragma once

#include <cstdint>
#include <vector>

#include "core/cloud.hpp"

namespace lskum {

// One domain piece. `locals` are the points this partition owns (it is the
// only writer of their fields); `ghosts` are the remote points its stencils
// read. Both lists are ascending and disjoint.
struct Partition {
  std::vector<std::int32_t> locals;
  std::vector<std::int32_t> ghosts;
};

struct Partitioning {
  std::vector<Partition> parts;
  int n_parts() const { return static_cast<int>(parts.size()); }
};

// Recursive coordinate bisection. Each level sorts the candidate ids by
// (coordinate, id) along the longer bounding-box axis (x on ties) and cuts
// at round(size * n_left / n_parts), so the decomposition is a pure
// function of the cloud geometry.
Partitioning partition_cloud(const PointCloud& cloud, int n_parts);

}  // namespace lskum
