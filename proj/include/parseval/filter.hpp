#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <vector>

#include "parseval/fft.hpp"
#include "parseval/signal.hpp"

namespace parseval {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
struct Tap {
  Offset offset;
  Mat<Scalar> matrix;
};

/// Matrix-valued finite impulse response H[k] (out x in per tap). Offsets live
/// on Z^d; they are wrapped onto a grid only when the filter is applied.
template <class Scalar>
class MultiFilter {
 public:
  using scalar_type = Scalar;

  MultiFilter() = default;

  MultiFilter(Index out_channels, Index in_channels, std::size_t dims)
      : out_(out_channels), in_(in_channels), dims_(dims) {
    if (out_ < 1 || in_ < 1) throw DimensionError("filter channel counts must be positive");
    if (dims_ < 1) throw DimensionError("filter dimension must be positive");
  }

  MultiFilter(Index out_channels, Index in_channels, std::size_t dims, std::vector<Tap<Scalar>> taps)
      : MultiFilter(out_channels, in_channels, dims) {
    for (auto& t : taps) add_tap(std::move(t.offset), std::move(t.matrix));
  }

  /// I_N delta[.]
  static MultiFilter identity(Index channels, std::size_t dims) {
    MultiFilter h(channels, channels, dims);
    h.add_tap(zero_offset(dims), Mat<Scalar>::Identity(channels, channels));
    return h;
  }

  /// Single tap `matrix * delta[. - offset]`.
  static MultiFilter delta(const Mat<Scalar>& matrix, const Offset& offset) {
    MultiFilter h(matrix.rows(), matrix.cols(), offset.size());
    h.add_tap(offset, matrix);
    return h;
  }

  void add_tap(Offset offset, Mat<Scalar> matrix) {
    if (offset.size() != dims_) throw DimensionError("tap offset arity differs from filter dimension");
    if (matrix.rows() != out_ || matrix.cols() != in_) {
      throw DimensionError("tap matrix must be " + std::to_string(out_) + "x" + std::to_string(in_));
    }
    if (!matrix.allFinite()) throw ValueError("tap matrix has non-finite entries");
    taps_.push_back({std::move(offset), std::move(matrix)});
  }

  Index out_channels() const noexcept { return out_; }
  Index in_channels() const noexcept { return in_; }
  std::size_t dims() const noexcept { return dims_; }
  const std::vector<Tap<Scalar>>& taps() const noexcept { return taps_; }
  std::size_t tap_count() const noexcept { return taps_.size(); }

  template <class Other>
  MultiFilter<Other> cast() const {
    MultiFilter<Other> h(out_, in_, dims_);
    for (const auto& t : taps_) h.add_tap(t.offset, t.matrix.template cast<Other>());
    return h;
  }

  MultiFilter scaled(Scalar s) const {
    MultiFilter h = *this;
    for (auto& t : h.taps_) t.matrix *= s;
    return h;
  }

  /// Sum of squared entries over all taps.
  double energy() const {
    double e = 0.0;
    for (const auto& t : taps_) e += t.matrix.squaredNorm();
    return e;
  }

 private:
  Index out_ = 0;
  Index in_ = 0;
  std::size_t dims_ = 0;
  std::vector<Tap<Scalar>> taps_;
};

using Filter = MultiFilter<double>;
using ComplexFilter = MultiFilter<cd>;

/// Merges duplicate offsets, drops all-zero taps, sorts offsets lexicographically.
template <class Scalar>
MultiFilter<Scalar> canonicalize(const MultiFilter<Scalar>& h) {
  std::map<Offset, Mat<Scalar>> merged;
  for (const auto& t : h.taps()) {
    auto [it, inserted] = merged.try_emplace(t.offset, t.matrix);
    if (!inserted) it->second += t.matrix;
  }
  MultiFilter<Scalar> out(h.out_channels(), h.in_channels(), h.dims());
  for (auto& [offset, m] : merged) {
    if (m.isZero(0.0)) continue;
    out.add_tap(offset, std::move(m));
  }
  return out;
}

/// (H2 * H1)[k] = sum_m H2[m] H1[k - m]
template <class Scalar>
MultiFilter<Scalar> compose(const MultiFilter<Scalar>& h2, const MultiFilter<Scalar>& h1) {
  if (h2.in_channels() != h1.out_channels()) {
    throw DimensionError("compose: outer filter takes " + std::to_string(h2.in_channels()) +
                         " channels, inner produces " + std::to_string(h1.out_channels()));
  }
  if (h2.dims() != h1.dims()) throw DimensionError("compose: filters live in different dimensions");
  std::map<Offset, Mat<Scalar>> acc;
  for (const auto& a : h2.taps()) {
    for (const auto& b : h1.taps()) {
      Mat<Scalar> prod = a.matrix * b.matrix;
      auto [it, inserted] = acc.try_emplace(a.offset + b.offset, prod);
      if (!inserted) it->second += prod;
    }
  }
  MultiFilter<Scalar> out(h2.out_channels(), h1.in_channels(), h1.dims());
  for (auto& [offset, m] : acc) {
    if (m.isZero(0.0)) continue;
    out.add_tap(offset, std::move(m));
  }
  return out;
}

/// Flipped, conjugate-transposed impulse response H^{T v}.
template <class Scalar>
MultiFilter<Scalar> adjoint(const MultiFilter<Scalar>& h) {
  MultiFilter<Scalar> out(h.in_channels(), h.out_channels(), h.dims());
  for (const auto& t : h.taps()) out.add_tap(-t.offset, t.matrix.adjoint());
  return canonicalize(out);
}

/// Largest absolute entry difference between two impulse responses, taken
/// over the union of their supports.
template <class Scalar>
double max_tap_difference(const MultiFilter<Scalar>& a, const MultiFilter<Scalar>& b) {
  if (a.out_channels() != b.out_channels() || a.in_channels() != b.in_channels()) {
    throw DimensionError("filters differ in shape");
  }
  std::map<Offset, Mat<Scalar>> diff;
  for (const auto& t : a.taps()) {
    auto [it, inserted] = diff.try_emplace(t.offset, t.matrix);
    if (!inserted) it->second += t.matrix;
  }
  for (const auto& t : b.taps()) {
    auto [it, inserted] = diff.try_emplace(t.offset, -t.matrix);
    if (!inserted) it->second -= t.matrix;
  }
  double worst = 0.0;
  for (const auto& [offset, m] : diff) worst = std::max(worst, m.cwiseAbs().maxCoeff());
  return worst;
}

/// Matrix-valued frequency response sampled on the DFT bins of a grid.
struct FrequencyResponse {
  Grid grid;
  Index out_channels = 0;
  Index in_channels = 0;
  std::vector<Mat<cd>> bins;

  const Mat<cd>& operator[](Index k) const { return bins[static_cast<std::size_t>(k)]; }
};

/// H^(w) = sum_taps matrix * exp(-j<w, offset>) at every DFT bin of `grid`.
template <class Scalar>
FrequencyResponse freq_response(const MultiFilter<Scalar>& h, const Grid& grid) {
  if (h.dims() != grid.dims()) throw DimensionError("filter and grid dimensions differ");
  const Index m_out = h.out_channels();
  const Index n_in = h.in_channels();
  // One row per matrix entry (m, n), holding the periodized impulse response.
  MultiSignal<cd> entries(grid, m_out * n_in);
  for (const auto& t : h.taps()) {
    const Index site = grid.site(t.offset);
    for (Index m = 0; m < m_out; ++m) {
      for (Index n = 0; n < n_in; ++n) entries(m * n_in + n, site) += cd(t.matrix(m, n));
    }
  }
  ChannelArray<cd> spectra = dft(entries);
  FrequencyResponse r{grid, m_out, n_in, {}};
  r.bins.resize(static_cast<std::size_t>(grid.count()));
  parallel_for(r.bins.size(), [&](std::size_t k) {
    Mat<cd> b(m_out, n_in);
    for (Index m = 0; m < m_out; ++m) {
      for (Index n = 0; n < n_in; ++n) b(m, n) = spectra(m * n_in + n, static_cast<Index>(k));
    }
    r.bins[k] = std::move(b);
  }, 64);
  return r;
}

/// Pointwise product H^(w) x^(w) followed by the inverse DFT.
template <class Scalar>
MultiSignal<Scalar> apply_spectral(const FrequencyResponse& hr, const MultiSignal<Scalar>& x) {
  if (!(hr.grid == x.grid())) throw DimensionError("frequency response sampled on a different grid");
  if (x.channels() != hr.in_channels) throw DimensionError("signal channel count differs from filter input");
  ChannelArray<cd> xh = dft(x);
  ChannelArray<cd> yh(hr.out_channels, x.grid().count());
  parallel_for(static_cast<std::size_t>(x.grid().count()), [&](std::size_t k) {
    const auto col = static_cast<Index>(k);
    yh.col(col).noalias() = hr[col] * xh.col(col);
  }, 256);
  ComplexSignal y = idft(x.grid(), std::move(yh));
  if constexpr (is_complex_v<Scalar>) {
    return y;
  } else {
    return MultiSignal<Scalar>(x.grid(), y.data().real());
  }
}

template <class Scalar>
MultiSignal<Scalar> apply_fft(const MultiFilter<Scalar>& h, const MultiSignal<Scalar>& x) {
  if (x.channels() != h.in_channels()) throw DimensionError("signal channel count differs from filter input");
  return apply_spectral(freq_response(h, x.grid()), x);
}

/// Direct summation y[k] = sum_taps H[l] x[k - l] with periodic wrap.
template <class Scalar>
MultiSignal<Scalar> apply_direct(const MultiFilter<Scalar>& h, const MultiSignal<Scalar>& x) {
  if (x.channels() != h.in_channels()) {
    throw DimensionError("filter expects " + std::to_string(h.in_channels()) + " channels, signal has " +
                         std::to_string(x.channels()));
  }
  const Grid& g = x.grid();
  if (h.dims() != g.dims()) throw DimensionError("filter and grid dimensions differ");
  MultiSignal<Scalar> y(g, h.out_channels());
  std::vector<Index> src(static_cast<std::size_t>(g.count()));
  for (const auto& t : h.taps()) {
    for (Index k = 0; k < g.count(); ++k) src[static_cast<std::size_t>(k)] = g.shifted(k, t.offset);
    parallel_for(static_cast<std::size_t>(g.count()), [&](std::size_t k) {
      y.data().col(static_cast<Index>(k)).noalias() += t.matrix * x.data().col(src[k]);
    }, 1024);
  }
  return y;
}

struct ApplyOptions {
  enum class Method { automatic, direct, fft };
  Method method = Method::automatic;
  /// Direct summation while tap_count * sites stays below this.
  Index fft_threshold = Index(1) << 16;
};

template <class Scalar>
MultiSignal<Scalar> apply(const MultiFilter<Scalar>& h, const MultiSignal<Scalar>& x, const ApplyOptions& opts = {}) {
  using M = ApplyOptions::Method;
  bool use_fft = opts.method == M::fft;
  if (opts.method == M::automatic) {
    use_fft = static_cast<Index>(h.tap_count()) * x.grid().count() >= opts.fft_threshold;
  }
  return use_fft ? apply_fft(h, x) : apply_direct(h, x);
}

}  // namespace parseval
