#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "parseval/spectral.hpp"

namespace parseval {

/// Continuous piecewise-linear activation on uniform knots spanning
/// [t_min, t_max]; linear extrapolation with the boundary segment slopes.
struct SplineActivation {
  double t_min = -1.0;
  double t_max = 1.0;
  std::vector<double> values;  ///< one value per knot, at least two

  static constexpr int kDefaultKnots = 21;

  /// values == knots, i.e. the identity map.
  static SplineActivation identity(int knots = kDefaultKnots, double t_min = -1.0, double t_max = 1.0);

  /// Samples `f` at the knots.
  static SplineActivation sampled(const std::function<double(double)>& f, int knots = kDefaultKnots,
                                  double t_min = -1.0, double t_max = 1.0);

  std::size_t knot_count() const noexcept { return values.size(); }
  double spacing() const { return (t_max - t_min) / static_cast<double>(values.size() - 1); }
  double knot(std::size_t i) const { return t_min + spacing() * static_cast<double>(i); }
  std::vector<double> slopes() const;

  void validate() const;
};

double spline_eval(const SplineActivation& s, double t);

/// Max |slope| over all segments, extrapolation included.
double spline_lipschitz(const SplineActivation& s);

/// Clips slopes to [-1, 1] and rebuilds the knot values from the leftmost one.
SplineActivation project_unit_lipschitz(const SplineActivation& s);

Signal relu(const Signal& x);

/// sign(v) max(|v| - tau, 0) entrywise.
Signal soft_threshold(const Signal& x, double tau);

/// H / ||T_H|| on `grid`.
Filter spectral_normalize(const Filter& h, const Grid& grid);

/// Pointwise nonlinearity with one activation profile per channel.
struct ActivationLayer {
  enum class Kind { relu, spline };
  Kind kind = Kind::relu;
  std::vector<SplineActivation> splines;  ///< one per channel when kind == spline

  static ActivationLayer relu_layer() { return {}; }
  static ActivationLayer spline_layer(std::vector<SplineActivation> per_channel) {
    return {Kind::spline, std::move(per_channel)};
  }

  Signal operator()(const Signal& x) const;
};

/// Exact Lipschitz constant of a pointwise layer: the sup of its channel constants.
double nonlinear_layer_lipschitz(const ActivationLayer& layer);

struct WorstCasePair {
  Signal x;
  Signal y;
  double ratio = 0.0;  ///< ||f(y) - f(x)|| / ||y - x||
};

/// Single-site, single-channel pair realising the layer constant.
WorstCasePair worst_case_probe(const ActivationLayer& layer, const Grid& grid, Index channels);

/// R = T_{H_L} o sigma_L o ... o sigma_2 o T_{H_1} with channel plan 1 -> N -> ... -> N -> 1.
struct CnnDenoiser {
  std::vector<Filter> filters;
  std::vector<ActivationLayer> activations;  ///< filters.size() - 1 layers
  std::vector<Eigen::VectorXd> biases;       ///< empty, or one per filter (added after it)

  void validate() const;
};

Signal cnn_forward(const CnnDenoiser& net, const Signal& x);

struct CertificationReport {
  std::vector<double> filter_norms;
  std::vector<double> activation_constants;
  double lipschitz_bound = 0.0;  ///< product of the layer constants
  bool certified = false;
  std::vector<std::string> audit;
};

/// Checks every filter norm and activation constant against 1 + tol on `grid`.
CertificationReport certify(const CnnDenoiser& net, const Grid& grid, double tol = 1e-9);

/// Spectrally normalizes offending filters and clips offending splines.
/// Each change is appended to `audit`.
CnnDenoiser renormalize(CnnDenoiser net, const Grid& grid, std::vector<std::string>& audit, double tol = 1e-9);

using SignalMap = std::function<Signal(const Signal&)>;

/// R(z) = T^* soft_threshold(T z, tau) for a Parseval analysis filter T.
/// Channels listed in `pass_through` (e.g. the lowpass band) are not thresholded.
class FrameThresholdDenoiser {
 public:
  FrameThresholdDenoiser(const Filter& analysis, double tau, const Grid& grid,
                         std::vector<Index> pass_through = {});

  Signal operator()(const Signal& z) const;

  double tau() const noexcept { return tau_; }
  const Filter& analysis() const noexcept { return analysis_; }
  const std::vector<Index>& pass_through() const noexcept { return pass_through_; }

 private:
  Filter analysis_;
  double tau_;
  std::vector<Index> pass_through_;
  FrequencyResponse forward_;
  FrequencyResponse backward_;
};

/// Undecimated 2-D DCT frame on a size x size window (1 -> size^2 channels).
/// Channel 0 is the constant (lowpass) atom.
Filter dct_frame(Index size);

/// Undecimated multi-level DCT frame: level j applies dct_frame(size) with
/// offsets dilated by size^j to the previous lowpass channel.
/// 1 -> 1 + levels (size^2 - 1) channels; channel 0 is the coarsest lowpass.
Filter wavelet_frame(Index size, int levels);

/// D = beta R + (1 - beta) Id with Lip(R) <= residual_lipschitz (<= 1 for averagedness).
struct AveragedDenoiser {
  SignalMap residual;
  double beta = 0.5;
  double residual_lipschitz = 1.0;

  void validate() const;
};

Signal averaged_apply(const AveragedDenoiser& d, const Signal& z);

/// Upper bound on Lip(D): beta Lip(R) + (1 - beta).
double averaged_lipschitz(const AveragedDenoiser& d);

}  // namespace parseval
