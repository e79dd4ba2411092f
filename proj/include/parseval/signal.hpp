#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <type_traits>

#include "parseval/grid.hpp"

namespace parseval {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class Scalar>
inline Scalar conj_if(const Scalar& v) {
  if constexpr (is_complex_v<Scalar>) {
    return std::conj(v);
  } else {
    return v;
  }
}

/// Channel-major storage: row n holds channel n, columns are grid sites in
/// row-major order.
template <class Scalar>
using ChannelArray = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// N-channel signal on a periodic grid.
template <class Scalar>
class MultiSignal {
 public:
  using scalar_type = Scalar;

  MultiSignal() = default;

  MultiSignal(Grid grid, Index channels) : grid_(std::move(grid)) {
    if (channels < 1) throw DimensionError("a signal needs at least one channel");
    data_ = ChannelArray<Scalar>::Zero(channels, grid_.count());
  }

  MultiSignal(Grid grid, ChannelArray<Scalar> data) : grid_(std::move(grid)), data_(std::move(data)) {
    if (data_.rows() < 1 || data_.cols() != grid_.count()) {
      throw DimensionError("signal data must be channels x " + std::to_string(grid_.count()));
    }
  }

  static MultiSignal zeros(const Grid& grid, Index channels) { return MultiSignal(grid, channels); }

  /// Unit impulse in `channel` at `site`.
  static MultiSignal impulse(const Grid& grid, Index channels, Index channel, const Offset& at) {
    MultiSignal s(grid, channels);
    s.data_(channel, grid.site(at)) = Scalar(1);
    return s;
  }

  /// I.i.d. standard normal entries (real and imaginary parts for complex).
  template <class Rng>
  static MultiSignal random(const Grid& grid, Index channels, Rng& rng) {
    std::normal_distribution<double> gauss;
    MultiSignal s(grid, channels);
    for (Index i = 0; i < s.data_.size(); ++i) {
      if constexpr (is_complex_v<Scalar>) {
        double re = gauss(rng);
        double im = gauss(rng);
        s.data_.data()[i] = Scalar(re, im);
      } else {
        s.data_.data()[i] = gauss(rng);
      }
    }
    return s;
  }

  const Grid& grid() const noexcept { return grid_; }
  Index channels() const noexcept { return data_.rows(); }
  Index sites() const noexcept { return data_.cols(); }

  ChannelArray<Scalar>& data() noexcept { return data_; }
  const ChannelArray<Scalar>& data() const noexcept { return data_; }

  auto channel(Index n) { return data_.row(n); }
  auto channel(Index n) const { return data_.row(n); }

  Scalar& operator()(Index n, Index site) { return data_(n, site); }
  const Scalar& operator()(Index n, Index site) const { return data_(n, site); }

  template <class Other>
  MultiSignal<Other> cast() const {
    return MultiSignal<Other>(grid_, data_.template cast<Other>());
  }

  MultiSignal& operator+=(const MultiSignal& o) {
    check_same_shape(o);
    data_ += o.data_;
    return *this;
  }
  MultiSignal& operator-=(const MultiSignal& o) {
    check_same_shape(o);
    data_ -= o.data_;
    return *this;
  }
  MultiSignal& operator*=(Scalar a) {
    data_ *= a;
    return *this;
  }

  friend MultiSignal operator+(MultiSignal a, const MultiSignal& b) { return a += b; }
  friend MultiSignal operator-(MultiSignal a, const MultiSignal& b) { return a -= b; }
  friend MultiSignal operator*(Scalar s, MultiSignal a) { return a *= s; }
  friend MultiSignal operator*(MultiSignal a, Scalar s) { return a *= s; }

  void check_same_shape(const MultiSignal& o) const {
    if (!(grid_ == o.grid_) || channels() != o.channels()) {
      throw DimensionError("signals differ in grid or channel count");
    }
  }

  bool all_finite() const { return data_.allFinite(); }

 private:
  Grid grid_;
  ChannelArray<Scalar> data_;
};

using Signal = MultiSignal<double>;
using ComplexSignal = MultiSignal<std::complex<double>>;

template <class Scalar>
double norm(const MultiSignal<Scalar>& x) {
  return x.data().norm();
}

/// Sum over channels and sites of x * conj(y).
template <class Scalar>
Scalar inner_product(const MultiSignal<Scalar>& x, const MultiSignal<Scalar>& y) {
  x.check_same_shape(y);
  // Eigen's dot conjugates its left operand.
  return y.data().reshaped().dot(x.data().reshaped());
}

/// x[n][-k mod sizes]
template <class Scalar>
MultiSignal<Scalar> flip(const MultiSignal<Scalar>& x) {
  const Grid& g = x.grid();
  MultiSignal<Scalar> out(g, x.channels());
  for (Index k = 0; k < g.count(); ++k) {
    Offset c = g.coords(k);
    Index dst = g.site(-c);
    out.data().col(dst) = x.data().col(k);
  }
  return out;
}

/// Channel n becomes x_n[. - offsets[n]] with periodic wrap. `offsets` holds
/// either one shared d-vector or one d-vector per channel.
template <class Scalar>
MultiSignal<Scalar> shift(const MultiSignal<Scalar>& x, const std::vector<Offset>& offsets) {
  const Grid& g = x.grid();
  if (offsets.size() != 1 && static_cast<Index>(offsets.size()) != x.channels()) {
    throw DimensionError("shift expects one shared offset or one per channel");
  }
  for (const auto& o : offsets) g.check_arity(o);
  MultiSignal<Scalar> out(g, x.channels());
  for (Index n = 0; n < x.channels(); ++n) {
    const Offset& o = offsets.size() == 1 ? offsets[0] : offsets[n];
    for (Index k = 0; k < g.count(); ++k) out(n, k) = x(n, g.shifted(k, o));
  }
  return out;
}

template <class Scalar>
MultiSignal<Scalar> shift(const MultiSignal<Scalar>& x, const Offset& offset) {
  return shift(x, std::vector<Offset>{offset});
}

}  // namespace parseval
