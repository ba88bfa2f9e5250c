#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "core/layout.hpp"

namespace lskum {

enum class PointKind : std::uint8_t { interior = 0, wall = 1, outer = 2 };

// Construction/IO-side view of one point.  Inside PointCloud the same data is
// held columnar with CSR connectivity.
struct PointRecord {
  std::int32_t id = 0;
  double x = 0.0;
  double y = 0.0;
  PointKind kind = PointKind::interior;
  double nx = 0.0;
  double ny = 0.0;
  std::vector<std::int32_t> nbhs;
};

// Sign-filtered neighbour subsets of one point.  A neighbour with dx == 0
// appears in both xpos and xneg (same for dy and the y subsets).
struct SplitStencils {
  std::vector<std::int32_t> xpos;
  std::vector<std::int32_t> xneg;
  std::vector<std::int32_t> ypos;
  std::vector<std::int32_t> yneg;
};

class PointCloud {
public:
  PointCloud() = default;
  explicit PointCloud(std::vector<PointRecord> records);

  std::int32_t n_points() const { return static_cast<std::int32_t>(x_.size()); }
  double x(std::int32_t i) const { return x_[i]; }
  double y(std::int32_t i) const { return y_[i]; }
  PointKind kind(std::int32_t i) const { return kind_[i]; }
  double normal_x(std::int32_t i) const { return nx_[i]; }
  double normal_y(std::int32_t i) const { return ny_[i]; }

  std::span<const std::int32_t> nbhs(std::int32_t i) const {
    return {nbh_data_.data() + nbh_offsets_[i],
            static_cast<std::size_t>(nbh_offsets_[i + 1] - nbh_offsets_[i])};
  }

  bool has_wall_points() const;

  FieldStore& store() { return *store_; }
  const FieldStore& store() const { return *store_; }

  // Drops field contents and recreates the store with the given layout.
  void reset_store(Layout layout);

  // Replaces connectivity.  Construction-time only; a cloud in use by a
  // solver run must not be modified.
  void set_connectivity(const std::vector<std::vector<std::int32_t>>& nbhs);

  std::vector<PointRecord> to_records() const;

private:
  std::vector<double> x_, y_, nx_, ny_;
  std::vector<PointKind> kind_;
  std::vector<std::int32_t> nbh_data_;
  std::vector<std::int64_t> nbh_offsets_;
  std::unique_ptr<FieldStore> store_;
};

// k nearest distinct points by Euclidean distance, ties broken by smaller id.
// Symmetric closure is not enforced.
void build_stencils(PointCloud& cloud, int k);

SplitStencils split_stencils(const PointCloud& cloud, std::int32_t p);

struct PointCheck {
  std::int32_t id = 0;
  int full_size = 0;
  int split_size[4] = {0, 0, 0, 0};  // xpos, xneg, ypos, yneg
  double full_det = 0.0;
  double split_det[4] = {0.0, 0.0, 0.0, 0.0};
  bool defective = false;
};

struct ValidationReport {
  std::vector<PointCheck> points;
  std::vector<std::int32_t> defective_ids;
  double h_ref = 0.0;    // median nearest-neighbour distance
  double det_tol = 0.0;  // 1e-12 * h_ref^4
  int n_defective = 0;
  int n_wall_isolated = 0;  // wall points with fewer than 2 wall neighbours
  int min_stencil_size = 0;

  bool clean() const { return n_defective == 0; }
};

// Report-only rank-deficiency and stencil screening.  A point is defective if
// any determinant its kind relies on is below det_tol or a required split
// stencil is empty: interior and wall points rely on the full stencil and all
// four split stencils, outer points only on the full stencil.
ValidationReport validate_cloud(const PointCloud& cloud);

struct RectBounds {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;
};

// Jittered nx-by-ny lattice with outer boundary points.  Bit-reproducible for
// fixed inputs; interior points are perturbed by jitter*spacing, boundary
// points stay on the lattice.
PointCloud generate_rect_cloud(int nx, int ny, const RectBounds& bounds,
                               double jitter, std::uint64_t seed, int k);

// Annular cloud around the unit circle: innermost ring is a wall, outermost a
// far-field boundary, rings in between are interior (jittered).
PointCloud generate_annulus_cloud(int n_theta, int n_rings, double r_outer,
                                  double jitter, std::uint64_t seed, int k);

PointCloud read_point_cloud(std::istream& in);
PointCloud read_point_cloud_file(const std::string& path);
void write_point_cloud(const PointCloud& cloud, std::ostream& out);
void write_point_cloud_file(const PointCloud& cloud, const std::string& path);

}  // namespace lskum
