#pragma once

#include <unsupported/Eigen/FFT>
#include <complex>
#include <vector>

#include "parseval/parallel.hpp"
#include "parseval/signal.hpp"

namespace parseval {

using cd = std::complex<double>;

namespace detail {

/// Separable d-dimensional DFT of one channel laid out row-major over `grid`.
/// Forward: X[w] = sum_k x[k] exp(-j<w,k>); inverse omits the 1/K factor.
inline void dft_nd(cd* data, const Grid& grid, bool inverse, Eigen::FFT<double>& fft) {
  const Index total = grid.count();
  std::vector<cd> line_in;
  std::vector<cd> line_out;
  for (std::size_t a = 0; a < grid.dims(); ++a) {
    const Index n = grid.size(a);
    if (n == 1) continue;
    const Index stride = grid.strides()[a];
    line_in.resize(n);
    for (Index start = 0; start < total; ++start) {
      if ((start / stride) % n != 0) continue;
      for (Index i = 0; i < n; ++i) line_in[i] = data[start + i * stride];
      if (inverse) {
        fft.inv(line_out, line_in);
      } else {
        fft.fwd(line_out, line_in);
      }
      for (Index i = 0; i < n; ++i) data[start + i * stride] = line_out[i];
    }
  }
}

}  // namespace detail

/// Unnormalized forward DFT of every channel.
template <class Scalar>
ChannelArray<cd> dft(const MultiSignal<Scalar>& x) {
  ChannelArray<cd> out = x.data().template cast<cd>();
  const Grid& g = x.grid();
  parallel_for(static_cast<std::size_t>(out.rows()), [&](std::size_t n) {
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    detail::dft_nd(out.row(static_cast<Index>(n)).data(), g, false, fft);
  });
  return out;
}

/// Inverse of dft(): includes the 1/K factor.
inline ComplexSignal idft(const Grid& g, ChannelArray<cd> bins) {
  parallel_for(static_cast<std::size_t>(bins.rows()), [&](std::size_t n) {
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    detail::dft_nd(bins.row(static_cast<Index>(n)).data(), g, true, fft);
  });
  bins /= static_cast<double>(g.count());
  return ComplexSignal(g, std::move(bins));
}

/// Angular frequency vector of DFT bin `bin`: 2*pi*(k_1/n_1, ..., k_d/n_d).
inline std::vector<double> bin_frequency(const Grid& g, Index bin) {
  Offset c = g.coords(bin);
  std::vector<double> w(c.size());
  for (std::size_t a = 0; a < c.size(); ++a) {
    w[a] = 2.0 * M_PI * static_cast<double>(c[a]) / static_cast<double>(g.size(a));
  }
  return w;
}

}  // namespace parseval
