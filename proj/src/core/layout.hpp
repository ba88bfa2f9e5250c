#pragma once

#include <cstdint>
#include <vector>

namespace lskum {

enum class Layout : std::uint8_t { aos = 0, soa = 1 };

// Per-point solver fields as flat slots.  One record holds 21 doubles.
namespace slot {
inline constexpr int prim = 0;      // rho, u1, u2, p
inline constexpr int q = 4;         // q0..q3
inline constexpr int qx = 8;
inline constexpr int qy = 12;
inline constexpr int flux_res = 16;
inline constexpr int delta_t = 20;
inline constexpr int count = 21;
}  // namespace slot

// Storage backend for per-point fields.  Both layouts live in one contiguous
// buffer and differ only in the index strides: AOS interleaves the 21 slots
// of each point, SOA keeps one parallel array per slot.
class FieldStore {
public:
  FieldStore(Layout layout, std::int32_t n_points);

  Layout layout() const { return layout_; }
  std::int32_t n_points() const { return n_points_; }

  double& at(std::int32_t point, int s) {
    return data_[static_cast<std::size_t>(point) * point_stride_ +
                 static_cast<std::size_t>(s) * slot_stride_];
  }
  double at(std::int32_t point, int s) const {
    return data_[static_cast<std::size_t>(point) * point_stride_ +
                 static_cast<std::size_t>(s) * slot_stride_];
  }

  void fill_zero();

private:
  Layout layout_;
  std::int32_t n_points_ = 0;
  std::size_t point_stride_ = 0;
  std::size_t slot_stride_ = 0;
  std::vector<double> data_;
};

// True iff every (point, slot) value matches bitwise.  Throws on capacity
// mismatch; layouts may differ.
bool store_equivalence_check(const FieldStore& a, const FieldStore& b);

}  // namespace lskum
