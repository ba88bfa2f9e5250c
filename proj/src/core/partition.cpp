#include "core/partition.hpp"

#include <algorithm>
#include <numeric>

#include "core/error.hpp"

namespace lskum {

namespace {

void bisect(const PointCloud& cloud, std::vector<std::int32_t>& ids, int n_parts,
            Partitioning& out) {
  if (n_parts == 1) {
    Partition part;
    part.locals = ids;
    std::sort(part.locals.begin(), part.locals.end());
    out.parts.push_back(std::move(part));
    return;
  }

  double xmin = cloud.x(ids[0]), xmax = xmin;
  double ymin = cloud.y(ids[0]), ymax = ymin;
  for (std::int32_t i : ids) {
    xmin = std::min(xmin, cloud.x(i));
    xmax = std::max(xmax, cloud.x(i));
    ymin = std::min(ymin, cloud.y(i));
    ymax = std::max(ymax, cloud.y(i));
  }
  const bool along_x = (xmax - xmin) >= (ymax - ymin);
  std::sort(ids.begin(), ids.end(), [&](std::int32_t a, std::int32_t b) {
    const double ca = along_x ? cloud.x(a) : cloud.y(a);
    const double cb = along_x ? cloud.x(b) : cloud.y(b);
    return ca < cb || (ca == cb && a < b);
  });

  const int n_left = (n_parts + 1) / 2;
  const std::size_t cut =
      (ids.size() * static_cast<std::size_t>(n_left) + n_parts / 2) / n_parts;
  std::vector<std::int32_t> left(ids.begin(), ids.begin() + cut);
  std::vector<std::int32_t> right(ids.begin() + cut, ids.end());
  bisect(cloud, left, n_left, out);
  bisect(cloud, right, n_parts - n_left, out);
}

}  // namespace

Partitioning partition_cloud(const PointCloud& cloud, int n_parts) {
  if (n_parts < 1) {
    throw Error(ErrorCode::argument, "partition count must be >= 1");
  }
  if (n_parts > cloud.n_points()) {
    throw Error(ErrorCode::argument, "more partitions than points (" +
                                         std::to_string(n_parts) + " > " +
                                         std::to_string(cloud.n_points()) + ")");
  }

  std::vector<std::int32_t> ids(cloud.n_points());
  std::iota(ids.begin(), ids.end(), 0);
  Partitioning out;
  out.parts.reserve(n_parts);
  bisect(cloud, ids, n_parts, out);

  // Ghosts: stencil neighbours owned elsewhere. The local/ghost union
  // closes every stencil by construction; keep it that way.
  std::vector<char> is_local(cloud.n_points(), 0);
  for (Partition& part : out.parts) {
    for (std::int32_t i : part.locals) is_local[i] = 1;
    for (std::int32_t i : part.locals) {
      for (std::int32_t nb : cloud.nbhs(i)) {
        if (!is_local[nb]) part.ghosts.push_back(nb);
      }
    }
    std::sort(part.ghosts.begin(), part.ghosts.end());
    part.ghosts.erase(std::unique(part.ghosts.begin(), part.ghosts.end()),
                      part.ghosts.end());
    for (std::int32_t i : part.locals) is_local[i] = 0;
  }
  return out;
}

}  // namespace lskum
