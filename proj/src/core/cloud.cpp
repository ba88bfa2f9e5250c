#include "core/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "core/error.hpp"
#include "core/kinetic.hpp"

namespace lskum {

namespace {

[[noreturn]] void parse_fail(std::int64_t line, const std::string& what) {
  throw Error(ErrorCode::parse, "line " + std::to_string(line) + ": " + what);
}

// Uniform double in [0,1) from the top 53 bits; keeps generated clouds
// bit-reproducible across standard library implementations.
double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double symmetric_double(std::mt19937_64& rng) { return 2.0 * unit_double(rng) - 1.0; }

struct Candidate {
  double d2;
  std::int32_t id;
  bool operator<(const Candidate& o) const {
    return d2 < o.d2 || (d2 == o.d2 && id < o.id);
  }
};

}  // namespace

PointCloud::PointCloud(std::vector<PointRecord> records) {
  const std::int32_t n = static_cast<std::int32_t>(records.size());
  if (n == 0) {
    throw Error(ErrorCode::argument, "point cloud needs at least one point");
  }
  x_.reserve(n);
  y_.reserve(n);
  nx_.reserve(n);
  ny_.reserve(n);
  kind_.reserve(n);
  nbh_offsets_.assign(1, 0);
  for (std::int32_t i = 0; i < n; ++i) {
    const PointRecord& r = records[i];
    if (r.id != i) {
      throw Error(ErrorCode::argument, "point ids must be dense and ascending (got " +
                                           std::to_string(r.id) + " at index " +
                                           std::to_string(i) + ")");
    }
    x_.push_back(r.x);
    y_.push_back(r.y);
    nx_.push_back(r.nx);
    ny_.push_back(r.ny);
    kind_.push_back(r.kind);
    for (std::int32_t nb : r.nbhs) {
      if (nb < 0 || nb >= n) {
        throw Error(ErrorCode::argument, "neighbour id out of range at point " +
                                             std::to_string(i));
      }
      if (nb == i) {
        throw Error(ErrorCode::argument,
                    "point " + std::to_string(i) + " lists itself as neighbour");
      }
      nbh_data_.push_back(nb);
    }
    if (!r.nbhs.empty() && r.nbhs.size() < 3) {
      throw Error(ErrorCode::argument, "stencil too small (n >= 3 required) at point " +
                                           std::to_string(i));
    }
    nbh_offsets_.push_back(static_cast<std::int64_t>(nbh_data_.size()));
  }
  store_ = std::make_unique<FieldStore>(Layout::aos, n);
}

bool PointCloud::has_wall_points() const {
  return std::any_of(kind_.begin(), kind_.end(),
                     [](PointKind k) { return k == PointKind::wall; });
}

void PointCloud::reset_store(Layout layout) {
  store_ = std::make_unique<FieldStore>(layout, n_points());
}

void PointCloud::set_connectivity(const std::vector<std::vector<std::int32_t>>& nbhs) {
  const std::int32_t n = n_points();
  if (static_cast<std::int32_t>(nbhs.size()) != n) {
    throw Error(ErrorCode::argument, "connectivity size mismatch");
  }
  std::vector<std::int32_t> data;
  std::vector<std::int64_t> offsets{0};
  for (std::int32_t i = 0; i < n; ++i) {
    if (nbhs[i].size() < 3) {
      throw Error(ErrorCode::argument, "stencil too small (n >= 3 required) at point " +
                                           std::to_string(i));
    }
    for (std::int32_t nb : nbhs[i]) {
      if (nb < 0 || nb >= n || nb == i) {
        throw Error(ErrorCode::argument, "invalid neighbour " + std::to_string(nb) +
                                             " at point " + std::to_string(i));
      }
      data.push_back(nb);
    }
    offsets.push_back(static_cast<std::int64_t>(data.size()));
  }
  nbh_data_ = std::move(data);
  nbh_offsets_ = std::move(offsets);
}

std::vector<PointRecord> PointCloud::to_records() const {
  std::vector<PointRecord> out;
  out.reserve(n_points());
  for (std::int32_t i = 0; i < n_points(); ++i) {
    PointRecord r;
    r.id = i;
    r.x = x_[i];
    r.y = y_[i];
    r.kind = kind_[i];
    r.nx = nx_[i];
    r.ny = ny_[i];
    const auto nb = nbhs(i);
    r.nbhs.assign(nb.begin(), nb.end());
    out.push_back(std::move(r));
  }
  return out;
}

void build_stencils(PointCloud& cloud, int k) {
  const std::int32_t n = cloud.n_points();
  if (k < 3) {
    throw Error(ErrorCode::argument, "stencil size k must be >= 3, got " + std::to_string(k));
  }
  if (k >= n) {
    throw Error(ErrorCode::argument, "stencil size k=" + std::to_string(k) +
                                         " needs more than k points (have " +
                                         std::to_string(n) + ")");
  }

  double xmin = cloud.x(0), xmax = cloud.x(0);
  double ymin = cloud.y(0), ymax = cloud.y(0);
  for (std::int32_t i = 1; i < n; ++i) {
    xmin = std::min(xmin, cloud.x(i));
    xmax = std::max(xmax, cloud.x(i));
    ymin = std::min(ymin, cloud.y(i));
    ymax = std::max(ymax, cloud.y(i));
  }

  std::vector<std::vector<std::int32_t>> result(n);
  std::vector<Candidate> cand;

  const auto select_k = [&](std::int32_t p) {
    std::sort(cand.begin(), cand.end());
    auto& out = result[p];
    out.resize(k);
    for (int j = 0; j < k; ++j) {
      out[j] = cand[j].id;
    }
    std::sort(out.begin(), out.end());
  };

  // Bucket grid sized for a handful of points per cell; degenerate extents
  // (collinear clouds) fall back to brute force.
  const double width = xmax - xmin;
  const double height = ymax - ymin;
  const double extent = std::max(width, height);
  if (n <= 2048 || extent <= 0.0) {
    for (std::int32_t p = 0; p < n; ++p) {
      cand.clear();
      for (std::int32_t q = 0; q < n; ++q) {
        if (q == p) continue;
        const double dx = cloud.x(q) - cloud.x(p);
        const double dy = cloud.y(q) - cloud.y(p);
        cand.push_back({dx * dx + dy * dy, q});
      }
      select_k(p);
    }
    cloud.set_connectivity(result);
    return;
  }

  const int grid_dim = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n) / 2.0)));
  const double cell = extent / grid_dim;
  const int ncx = std::max(1, static_cast<int>(std::floor(width / cell)) + 1);
  const int ncy = std::max(1, static_cast<int>(std::floor(height / cell)) + 1);
  std::vector<std::vector<std::int32_t>> cells(static_cast<std::size_t>(ncx) * ncy);
  const auto cell_of = [&](double px, double py) {
    int cx = std::min(ncx - 1, static_cast<int>(std::floor((px - xmin) / cell)));
    int cy = std::min(ncy - 1, static_cast<int>(std::floor((py - ymin) / cell)));
    return std::pair<int, int>{cx, cy};
  };
  for (std::int32_t i = 0; i < n; ++i) {
    const auto [cx, cy] = cell_of(cloud.x(i), cloud.y(i));
    cells[static_cast<std::size_t>(cy) * ncx + cx].push_back(i);
  }

  const int max_ring = std::max(ncx, ncy);
  for (std::int32_t p = 0; p < n; ++p) {
    cand.clear();
    const auto [pcx, pcy] = cell_of(cloud.x(p), cloud.y(p));
    for (int ring = 0; ring <= max_ring; ++ring) {
      // Append candidates from the cells at Chebyshev distance == ring.
      for (int cy = pcy - ring; cy <= pcy + ring; ++cy) {
        if (cy < 0 || cy >= ncy) continue;
        for (int cx = pcx - ring; cx <= pcx + ring; ++cx) {
          if (cx < 0 || cx >= ncx) continue;
          if (std::max(std::abs(cx - pcx), std::abs(cy - pcy)) != ring) continue;
          for (std::int32_t q : cells[static_cast<std::size_t>(cy) * ncx + cx]) {
            if (q == p) continue;
            const double dx = cloud.x(q) - cloud.x(p);
            const double dy = cloud.y(q) - cloud.y(p);
            cand.push_back({dx * dx + dy * dy, q});
          }
        }
      }
      if (static_cast<int>(cand.size()) >= k) {
        // All unscanned points are at least ring*cell away; the k-th best
        // must beat that strictly or another ring could still tie.
        std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end());
        const double guard = static_cast<double>(ring) * cell;
        if (cand[k - 1].d2 < guard * guard || ring == max_ring) {
          break;
        }
      }
    }
    select_k(p);
  }
  cloud.set_connectivity(result);
}

SplitStencils split_stencils(const PointCloud& cloud, std::int32_t p) {
  SplitStencils s;
  for (std::int32_t nb : cloud.nbhs(p)) {
    const double dx = cloud.x(nb) - cloud.x(p);
    const double dy = cloud.y(nb) - cloud.y(p);
    if (dx >= 0.0) s.xpos.push_back(nb);
    if (dx <= 0.0) s.xneg.push_back(nb);
    if (dy >= 0.0) s.ypos.push_back(nb);
    if (dy <= 0.0) s.yneg.push_back(nb);
  }
  return s;
}

ValidationReport validate_cloud(const PointCloud& cloud) {
  const std::int32_t n = cloud.n_points();
  ValidationReport report;
  report.points.reserve(n);

  std::vector<double> nn_dist;
  nn_dist.reserve(n);
  for (std::int32_t p = 0; p < n; ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::int32_t nb : cloud.nbhs(p)) {
      const double dx = cloud.x(nb) - cloud.x(p);
      const double dy = cloud.y(nb) - cloud.y(p);
      best = std::min(best, std::sqrt(dx * dx + dy * dy));
    }
    if (std::isfinite(best)) {
      nn_dist.push_back(best);
    }
  }
  if (!nn_dist.empty()) {
    std::sort(nn_dist.begin(), nn_dist.end());
    report.h_ref = nn_dist[(nn_dist.size() - 1) / 2];
  }
  report.det_tol = 1e-12 * report.h_ref * report.h_ref * report.h_ref * report.h_ref;

  report.min_stencil_size = n > 0 ? std::numeric_limits<int>::max() : 0;
  for (std::int32_t p = 0; p < n; ++p) {
    PointCheck check;
    check.id = p;
    LsSums full;
    LsSums split[4];
    int wall_nbhs = 0;
    for (std::int32_t nb : cloud.nbhs(p)) {
      const double dx = cloud.x(nb) - cloud.x(p);
      const double dy = cloud.y(nb) - cloud.y(p);
      const Vec4 zero{0.0, 0.0, 0.0, 0.0};
      full.add(dx, dy, zero);
      if (dx >= 0.0) split[0].add(dx, dy, zero);
      if (dx <= 0.0) split[1].add(dx, dy, zero);
      if (dy >= 0.0) split[2].add(dx, dy, zero);
      if (dy <= 0.0) split[3].add(dx, dy, zero);
      if (cloud.kind(nb) == PointKind::wall) ++wall_nbhs;
    }
    check.full_size = full.count;
    check.full_det = full.determinant();
    for (int d = 0; d < 4; ++d) {
      check.split_size[d] = split[d].count;
      check.split_det[d] = split[d].determinant();
    }

    const PointKind kind = cloud.kind(p);
    bool defective = check.full_det < report.det_tol || check.full_size < 3;
    if (kind != PointKind::outer) {
      for (int d = 0; d < 4; ++d) {
        defective = defective || check.split_size[d] == 0 ||
                    check.split_det[d] < report.det_tol;
      }
    }
    check.defective = defective;
    if (defective) {
      ++report.n_defective;
      report.defective_ids.push_back(p);
    }
    if (kind == PointKind::wall && wall_nbhs < 2) {
      ++report.n_wall_isolated;
    }
    report.min_stencil_size = std::min(report.min_stencil_size, check.full_size);
    report.points.push_back(check);
  }
  return report;
}

PointCloud generate_rect_cloud(int nx, int ny, const RectBounds& bounds,
                               double jitter, std::uint64_t seed, int k) {
  if (nx < 4 || ny < 4) {
    throw Error(ErrorCode::argument, "rect cloud needs nx, ny >= 4");
  }
  if (!(jitter >= 0.0 && jitter <= 0.3)) {
    throw Error(ErrorCode::argument, "jitter must lie in [0, 0.3]");
  }
  if (!(bounds.xmax > bounds.xmin) || !(bounds.ymax > bounds.ymin)) {
    throw Error(ErrorCode::argument, "degenerate bounds");
  }

  const double hx = (bounds.xmax - bounds.xmin) / (nx - 1);
  const double hy = (bounds.ymax - bounds.ymin) / (ny - 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::mt19937_64 rng(seed);

  std::vector<PointRecord> records;
  records.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      PointRecord r;
      r.id = j * nx + i;
      r.x = bounds.xmin + i * hx;
      r.y = bounds.ymin + j * hy;
      const bool left = i == 0, right = i == nx - 1;
      const bool bottom = j == 0, top = j == ny - 1;
      if (left || right || bottom || top) {
        r.kind = PointKind::outer;
        double nxn = left ? -1.0 : (right ? 1.0 : 0.0);
        double nyn = bottom ? -1.0 : (top ? 1.0 : 0.0);
        if (nxn != 0.0 && nyn != 0.0) {
          nxn *= inv_sqrt2;
          nyn *= inv_sqrt2;
        }
        r.nx = nxn;
        r.ny = nyn;
      } else if (jitter > 0.0) {
        r.x += jitter * hx * symmetric_double(rng);
        r.y += jitter * hy * symmetric_double(rng);
      }
      records.push_back(std::move(r));
    }
  }
  PointCloud cloud(std::move(records));
  build_stencils(cloud, k);
  return cloud;
}

PointCloud generate_annulus_cloud(int n_theta, int n_rings, double r_outer,
                                  double jitter, std::uint64_t seed, int k) {
  if (n_theta < 8 || n_rings < 3) {
    throw Error(ErrorCode::argument, "annulus cloud needs n_theta >= 8 and n_rings >= 3");
  }
  if (!(r_outer > 1.0)) {
    throw Error(ErrorCode::argument, "annulus outer radius must exceed the unit circle");
  }
  if (!(jitter >= 0.0 && jitter <= 0.3)) {
    throw Error(ErrorCode::argument, "jitter must lie in [0, 0.3]");
  }

  // Geometric radial spacing from the unit wall circle to the far field.
  std::vector<double> radii(n_rings);
  for (int j = 0; j < n_rings; ++j) {
    radii[j] = std::pow(r_outer, static_cast<double>(j) / (n_rings - 1));
  }
  const double dtheta = 2.0 * M_PI / n_theta;
  std::mt19937_64 rng(seed);

  std::vector<PointRecord> records;
  records.reserve(static_cast<std::size_t>(n_theta) * n_rings);
  for (int j = 0; j < n_rings; ++j) {
    for (int i = 0; i < n_theta; ++i) {
      PointRecord r;
      r.id = j * n_theta + i;
      double radius = radii[j];
      double theta = i * dtheta;
      const bool wall = j == 0;
      const bool outer = j == n_rings - 1;
      if (!wall && !outer && jitter > 0.0) {
        const double gap = std::min(radii[j + 1] - radii[j], radii[j] - radii[j - 1]);
        radius += jitter * gap * symmetric_double(rng);
        theta += jitter * dtheta * symmetric_double(rng);
      }
      r.x = radius * std::cos(theta);
      r.y = radius * std::sin(theta);
      if (wall) {
        r.kind = PointKind::wall;
        // Outward from the flow domain means into the cylinder.
        r.nx = -std::cos(theta);
        r.ny = -std::sin(theta);
      } else if (outer) {
        r.kind = PointKind::outer;
        r.nx = std::cos(theta);
        r.ny = std::sin(theta);
      }
      records.push_back(std::move(r));
    }
  }
  PointCloud cloud(std::move(records));
  build_stencils(cloud, k);
  return cloud;
}

PointCloud read_point_cloud(std::istream& in) {
  std::string line;
  std::int64_t line_no = 0;

  if (!std::getline(in, line)) {
    parse_fail(1, "missing header");
  }
  ++line_no;
  std::int64_t n_points = 0;
  {
    std::istringstream iss(line);
    if (!(iss >> n_points) || n_points <= 0) {
      parse_fail(line_no, "malformed header (expected positive point count)");
    }
    std::string rest;
    if (iss >> rest) {
      parse_fail(line_no, "malformed header (trailing data)");
    }
  }

  std::vector<PointRecord> records;
  records.reserve(n_points);
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream iss(line);
    iss >> std::ws;
    if (iss.eof()) continue;  // blank line
    if (static_cast<std::int64_t>(records.size()) == n_points) {
      parse_fail(line_no, "record count mismatch (more than " +
                              std::to_string(n_points) + " records)");
    }

    PointRecord r;
    int kind_code = 0;
    std::int64_t n_nbhs = 0;
    if (!(iss >> r.id >> r.x >> r.y >> kind_code >> r.nx >> r.ny >> n_nbhs)) {
      parse_fail(line_no, "malformed point record");
    }
    if (r.id != static_cast<std::int32_t>(records.size())) {
      parse_fail(line_no, "point ids must be ascending from 0 (got " +
                              std::to_string(r.id) + ")");
    }
    if (kind_code < 0 || kind_code > 2) {
      parse_fail(line_no, "unknown point kind " + std::to_string(kind_code));
    }
    r.kind = static_cast<PointKind>(kind_code);
    if (r.kind != PointKind::interior) {
      const double norm2 = r.nx * r.nx + r.ny * r.ny;
      if (std::abs(norm2 - 1.0) > 1e-12) {
        parse_fail(line_no, "boundary normal is not unit length");
      }
    }
    if (n_nbhs < 3) {
      parse_fail(line_no, "stencil too small (n >= 3 required)");
    }
    r.nbhs.resize(n_nbhs);
    for (std::int64_t j = 0; j < n_nbhs; ++j) {
      if (!(iss >> r.nbhs[j])) {
        parse_fail(line_no, "expected " + std::to_string(n_nbhs) + " neighbour ids");
      }
      if (r.nbhs[j] < 0 || r.nbhs[j] >= n_points) {
        parse_fail(line_no, "neighbor id out of range (" + std::to_string(r.nbhs[j]) + ")");
      }
      if (r.nbhs[j] == r.id) {
        parse_fail(line_no, "point lists itself as neighbour");
      }
    }
    std::string rest;
    if (iss >> rest) {
      parse_fail(line_no, "trailing data after neighbour list");
    }
    records.push_back(std::move(r));
  }
  if (static_cast<std::int64_t>(records.size()) != n_points) {
    parse_fail(line_no + 1, "record count mismatch (expected " + std::to_string(n_points) +
                                ", got " + std::to_string(records.size()) + ")");
  }
  return PointCloud(std::move(records));
}

PointCloud read_point_cloud_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open grid file: " + path);
  }
  return read_point_cloud(in);
}

void write_point_cloud(const PointCloud& cloud, std::ostream& out) {
  char buf[64];
  const auto real = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << cloud.n_points() << "\n";
  for (std::int32_t i = 0; i < cloud.n_points(); ++i) {
    out << i << ' ' << real(cloud.x(i)) << ' ' << real(cloud.y(i)) << ' '
        << static_cast<int>(cloud.kind(i)) << ' ' << real(cloud.normal_x(i)) << ' '
        << real(cloud.normal_y(i));
    const auto nbhs = cloud.nbhs(i);
    out << ' ' << nbhs.size();
    for (std::int32_t nb : nbhs) {
      out << ' ' << nb;
    }
    out << "\n";
  }
}

void write_point_cloud_file(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::io, "cannot open output file: " + path);
  }
  write_point_cloud(cloud, out);
  if (!out) {
    throw Error(ErrorCode::io, "failed writing grid file: " + path);
  }
}

}  // namespace lskum
