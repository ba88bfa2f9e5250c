#include "core/layout.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "core/error.hpp"

namespace lskum {

FieldStore::FieldStore(Layout layout, std::int32_t n_points)
    : layout_(layout), n_points_(n_points) {
  if (n_points <= 0) {
    throw Error(ErrorCode::argument,
                "field store needs n_points > 0, got " + std::to_string(n_points));
  }
  if (layout == Layout::aos) {
    point_stride_ = slot::count;
    slot_stride_ = 1;
  } else {
    point_stride_ = 1;
    slot_stride_ = static_cast<std::size_t>(n_points);
  }
  data_.assign(static_cast<std::size_t>(n_points) * slot::count, 0.0);
}

void FieldStore::fill_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

bool store_equivalence_check(const FieldStore& a, const FieldStore& b) {
  if (a.n_points() != b.n_points()) {
    throw Error(ErrorCode::argument, "store capacity mismatch: " +
                                         std::to_string(a.n_points()) + " vs " +
                                         std::to_string(b.n_points()));
  }
  for (std::int32_t i = 0; i < a.n_points(); ++i) {
    for (int s = 0; s < slot::count; ++s) {
      const double va = a.at(i, s);
      const double vb = b.at(i, s);
      if (std::memcmp(&va, &vb, sizeof(double)) != 0) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace lskum
