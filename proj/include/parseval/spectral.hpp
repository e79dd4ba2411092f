#pragma once

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "parseval/filter.hpp"

namespace parseval {

/// Default absolute tolerance on Parseval defects.
inline constexpr double kParsevalTol = 1e-9;

/// Singular values of one frequency bin, descending.
inline Eigen::VectorXd bin_singular_values(const Mat<cd>& bin) {
  return Eigen::JacobiSVD<Mat<cd>>(bin).singularValues();
}

struct NormResult {
  double value = 0.0;
  Index bin = 0;  ///< maximizing DFT bin
};

/// max_k sigma_max(H^(w_k)); the exact l2 -> l2 norm on the periodic grid.
inline NormResult operator_norm_detail(const FrequencyResponse& hr) {
  std::vector<double> top(hr.bins.size(), 0.0);
  parallel_for(hr.bins.size(), [&](std::size_t k) {
    const Mat<cd>& b = hr.bins[k];
    if (b.size() == 0) return;
    top[k] = bin_singular_values(b)(0);
  }, 64);
  NormResult r;
  for (std::size_t k = 0; k < top.size(); ++k) {
    if (top[k] > r.value) {
      r.value = top[k];
      r.bin = static_cast<Index>(k);
    }
  }
  return r;
}

template <class Scalar>
double operator_norm(const MultiFilter<Scalar>& h, const Grid& grid) {
  return operator_norm_detail(freq_response(h, grid)).value;
}

/// Norm evaluated on a grid refined `factor` times per axis; an estimate of
/// the infinite-lattice supremum with spacing 2*pi/(factor*n_a).
template <class Scalar>
double oversampled_norm(const MultiFilter<Scalar>& h, const Grid& grid, Index factor) {
  if (factor < 1) throw ValueError("oversampling factor must be >= 1");
  std::vector<Index> fine = grid.sizes();
  for (auto& n : fine) n *= factor;
  return operator_norm(h, Grid(fine));
}

/// Complex probe x[k] = v exp(j<w*, k>) built from the top right-singular
/// vector v at the maximizing bin w*; attains ||Hx|| = ||H|| ||x||.
template <class Scalar>
ComplexSignal norm_attaining_probe(const MultiFilter<Scalar>& h, const Grid& grid) {
  FrequencyResponse hr = freq_response(h, grid);
  NormResult nr = operator_norm_detail(hr);
  Eigen::JacobiSVD<Mat<cd>> svd(hr[nr.bin], Eigen::ComputeFullV);
  Eigen::VectorXcd v = svd.matrixV().col(0);
  std::vector<double> w = bin_frequency(grid, nr.bin);
  ComplexSignal x(grid, h.in_channels());
  for (Index k = 0; k < grid.count(); ++k) {
    Offset c = grid.coords(k);
    double phase = 0.0;
    for (std::size_t a = 0; a < c.size(); ++a) phase += w[a] * static_cast<double>(c[a]);
    x.data().col(k) = v * std::polar(1.0, phase);
  }
  return x;
}

struct ParsevalReport {
  double max_paraunitarity_defect = 0.0;  ///< max_w ||H^H H - I||_F
  double max_time_domain_defect = 0.0;    ///< max_k ||(H^{Tv} * H)[k] - I delta[k]||_F
  double operator_norm = 0.0;
  double tolerance = kParsevalTol;
  bool passed = false;
};

/// Both faces of the Parseval characterization: paraunitarity on every DFT
/// bin and invertibility by flip-transposition on Z^d.
template <class Scalar>
ParsevalReport is_parseval(const MultiFilter<Scalar>& h, const Grid& grid, double tol = kParsevalTol) {
  if (h.out_channels() < h.in_channels()) {
    throw DimensionError("Parseval impossible: " + std::to_string(h.in_channels()) + " channels cannot be mapped "
                         "isometrically onto " + std::to_string(h.out_channels()));
  }
  ParsevalReport rep;
  rep.tolerance = tol;
  FrequencyResponse hr = freq_response(h, grid);
  const Index n = h.in_channels();
  std::vector<double> defect(hr.bins.size(), 0.0);
  parallel_for(hr.bins.size(), [&](std::size_t k) {
    defect[k] = (hr.bins[k].adjoint() * hr.bins[k] - Mat<cd>::Identity(n, n)).norm();
  }, 64);
  for (double d : defect) rep.max_paraunitarity_defect = std::max(rep.max_paraunitarity_defect, d);
  rep.operator_norm = operator_norm_detail(hr).value;

  MultiFilter<Scalar> gram = compose(adjoint(h), h);
  const Offset origin = zero_offset(h.dims());
  bool saw_origin = false;
  for (const auto& t : gram.taps()) {
    double d;
    if (t.offset == origin) {
      saw_origin = true;
      d = (t.matrix - Mat<Scalar>::Identity(n, n)).norm();
    } else {
      d = t.matrix.norm();
    }
    rep.max_time_domain_defect = std::max(rep.max_time_domain_defect, d);
  }
  if (!saw_origin) rep.max_time_domain_defect = std::max(rep.max_time_domain_defect, std::sqrt(double(n)));
  rep.passed = rep.max_paraunitarity_defect <= tol && rep.max_time_domain_defect <= tol;
  return rep;
}

/// max over random pairs of |<x,y> - <Hx,Hy>| / (||x|| ||y||).
template <class Scalar>
double inner_product_preservation_check(const MultiFilter<Scalar>& h, const Grid& grid, int trials,
                                        std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  FrequencyResponse hr = freq_response(h, grid);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    auto x = MultiSignal<Scalar>::random(grid, h.in_channels(), rng);
    auto y = MultiSignal<Scalar>::random(grid, h.in_channels(), rng);
    auto hx = apply_spectral(hr, x);
    auto hy = apply_spectral(hr, y);
    double d = std::abs(inner_product(x, y) - inner_product(hx, hy)) / (norm(x) * norm(y));
    worst = std::max(worst, d);
  }
  return worst;
}

struct GramProjectorDefects {
  double idempotence = 0.0;     ///< max ||P(Py) - Py|| / ||y||
  double self_adjointness = 0.0;  ///< max |<Py,z> - <y,Pz>| / (||y|| ||z||)
};

/// P = H H^* on l2^M should be the orthogonal projector onto the range of H.
template <class Scalar>
GramProjectorDefects gram_projector_check(const MultiFilter<Scalar>& h, const Grid& grid, int trials = 10,
                                          std::uint64_t seed = 2) {
  FrequencyResponse pr = freq_response(compose(h, adjoint(h)), grid);
  std::mt19937_64 rng(seed);
  GramProjectorDefects d;
  for (int t = 0; t < trials; ++t) {
    auto y = MultiSignal<Scalar>::random(grid, h.out_channels(), rng);
    auto z = MultiSignal<Scalar>::random(grid, h.out_channels(), rng);
    auto py = apply_spectral(pr, y);
    auto ppy = apply_spectral(pr, py);
    auto pz = apply_spectral(pr, z);
    d.idempotence = std::max(d.idempotence, norm(ppy - py) / norm(y));
    d.self_adjointness =
        std::max(d.self_adjointness, std::abs(inner_product(py, z) - inner_product(y, pz)) / (norm(y) * norm(z)));
  }
  return d;
}

}  // namespace parseval
