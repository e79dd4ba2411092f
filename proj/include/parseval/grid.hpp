#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "parseval/error.hpp"

namespace parseval {

using Index = std::int64_t;

/// Integer d-vector used for filter taps and shifts.
using Offset = std::vector<Index>;

/// Finite periodic d-dimensional lattice. Sites are enumerated in row-major
/// order (last axis fastest); all index arithmetic wraps modulo the sizes.
class Grid {
 public:
  Grid() = default;

  explicit Grid(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw DimensionError("grid needs at least one dimension");
    for (Index n : sizes_) {
      if (n < 1) throw DimensionError("grid sizes must be positive");
    }
    strides_.assign(sizes_.size(), 1);
    for (std::size_t i = sizes_.size() - 1; i > 0; --i) strides_[i - 1] = strides_[i] * sizes_[i];
    count_ = strides_[0] * sizes_[0];
  }

  Grid(std::initializer_list<Index> sizes) : Grid(std::vector<Index>(sizes)) {}

  std::size_t dims() const noexcept { return sizes_.size(); }
  Index size(std::size_t axis) const { return sizes_[axis]; }
  const std::vector<Index>& sizes() const noexcept { return sizes_; }
  const std::vector<Index>& strides() const noexcept { return strides_; }

  /// Number of sites K.
  Index count() const noexcept { return count_; }

  static Index wrap(Index i, Index n) noexcept {
    Index r = i % n;
    return r < 0 ? r + n : r;
  }

  Offset coords(Index site) const {
    Offset c(dims());
    for (std::size_t a = 0; a < dims(); ++a) {
      c[a] = site / strides_[a];
      site -= c[a] * strides_[a];
    }
    return c;
  }

  /// Linear index of a (possibly out-of-range) coordinate vector.
  Index site(const Offset& c) const {
    check_arity(c);
    Index s = 0;
    for (std::size_t a = 0; a < dims(); ++a) s += wrap(c[a], sizes_[a]) * strides_[a];
    return s;
  }

  /// Linear index of `site - offset`, wrapped.
  Index shifted(Index site, const Offset& offset) const {
    Index s = 0;
    for (std::size_t a = 0; a < dims(); ++a) {
      Index c = site / strides_[a];
      site -= c * strides_[a];
      s += wrap(c - offset[a], sizes_[a]) * strides_[a];
    }
    return s;
  }

  void check_arity(const Offset& c) const {
    if (c.size() != dims()) {
      throw DimensionError("offset has " + std::to_string(c.size()) + " components, grid has " +
                           std::to_string(dims()) + " dimensions");
    }
  }

  std::string str() const {
    std::string s;
    for (std::size_t a = 0; a < dims(); ++a) {
      if (a) s += 'x';
      s += std::to_string(sizes_[a]);
    }
    return s;
  }

  friend bool operator==(const Grid& a, const Grid& b) { return a.sizes_ == b.sizes_; }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> strides_;
  Index count_ = 0;
};

inline Offset operator+(Offset a, const Offset& b) {
  if (a.size() != b.size()) throw DimensionError("offset arity mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Offset operator-(Offset a) {
  for (auto& v : a) v = -v;
  return a;
}

inline Offset operator-(const Offset& a, const Offset& b) { return a + (-b); }

inline Offset zero_offset(std::size_t d) { return Offset(d, 0); }

/// Canonical unit offset e_axis in dimension d.
inline Offset unit_offset(std::size_t d, std::size_t axis) {
  Offset o(d, 0);
  o.at(axis) = 1;
  return o;
}

}  // namespace parseval
