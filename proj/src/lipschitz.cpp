#include "parseval/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "parseval/builders.hpp"

namespace parseval {

namespace {

constexpr double kSlopeSlack = 1e-12;

void check_real_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ValueError(std::string(what) + " must be finite");
}

// Index of the segment with the largest |slope|; first one wins on ties.
std::size_t steepest_segment(const SplineActivation& s) {
  auto sl = s.slopes();
  std::size_t best = 0;
  for (std::size_t i = 1; i < sl.size(); ++i) {
    if (std::abs(sl[i]) > std::abs(sl[best])) best = i;
  }
  return best;
}

}  // namespace

SplineActivation SplineActivation::identity(int knots, double t_min, double t_max) {
  return sampled([](double t) { return t; }, knots, t_min, t_max);
}

SplineActivation SplineActivation::sampled(const std::function<double(double)>& f, int knots, double t_min,
                                           double t_max) {
  SplineActivation s;
  s.t_min = t_min;
  s.t_max = t_max;
  s.values.assign(static_cast<std::size_t>(std::max(knots, 0)), 0.0);
  if (knots < 2) throw ValueError("a spline needs at least two knots");
  for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = f(s.knot(i));
  s.validate();
  return s;
}

void SplineActivation::validate() const {
  if (values.size() < 2) throw ValueError("a spline needs at least two knots");
  check_real_finite(t_min, "spline range");
  check_real_finite(t_max, "spline range");
  if (!(t_min < t_max)) throw ValueError("spline range must satisfy t_min < t_max");
  for (double v : values) check_real_finite(v, "spline knot value");
}

std::vector<double> SplineActivation::slopes() const {
  const double h = spacing();
  std::vector<double> out(values.size() - 1);
  for (std::size_t i = 0; i + 1 < values.size(); ++i) out[i] = (values[i + 1] - values[i]) / h;
  return out;
}

double spline_eval(const SplineActivation& s, double t) {
  const double h = s.spacing();
  const auto segments = static_cast<double>(s.values.size() - 1);
  // Clamping the segment index gives linear extrapolation on both sides.
  double pos = (t - s.t_min) / h;
  double seg = std::clamp(std::floor(pos), 0.0, segments - 1.0);
  const auto i = static_cast<std::size_t>(seg);
  const double frac = pos - seg;
  return s.values[i] + frac * (s.values[i + 1] - s.values[i]);
}

double spline_lipschitz(const SplineActivation& s) {
  double worst = 0.0;
  for (double m : s.slopes()) worst = std::max(worst, std::abs(m));
  return worst;
}

SplineActivation project_unit_lipschitz(const SplineActivation& s) {
  s.validate();
  SplineActivation out = s;
  const double h = s.spacing();
  auto sl = s.slopes();
  // Unclipped segments keep their original values shifted by the offset
  // accumulated so far, which stays exactly zero until the first clip.
  for (std::size_t i = 0; i < sl.size(); ++i) {
    const double offset = out.values[i] - s.values[i];
    // Slopes within rounding of 1 are left alone so that projection is idempotent.
    if (std::abs(sl[i]) <= 1.0 + kSlopeSlack) {
      out.values[i + 1] = s.values[i + 1] + offset;
    } else {
      out.values[i + 1] = out.values[i] + std::copysign(h, sl[i]);
    }
  }
  return out;
}

Signal relu(const Signal& x) { return Signal(x.grid(), x.data().cwiseMax(0.0)); }

Signal soft_threshold(const Signal& x, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ValueError("threshold must be finite and nonnegative");
  ChannelArray<double> d = x.data().unaryExpr([tau](double v) {
    const double a = std::abs(v) - tau;
    return a > 0.0 ? std::copysign(a, v) : 0.0;
  });
  return Signal(x.grid(), std::move(d));
}

Filter spectral_normalize(const Filter& h, const Grid& grid) {
  const double n = operator_norm(h, grid);
  if (!(n > 0.0)) throw ValueError("cannot normalize a filter with zero operator norm");
  return h.scaled(1.0 / n);
}

Signal ActivationLayer::operator()(const Signal& x) const {
  if (kind == Kind::relu) return relu(x);
  if (static_cast<Index>(splines.size()) != x.channels()) {
    throw DimensionError("activation layer has " + std::to_string(splines.size()) + " profiles, signal has " +
                         std::to_string(x.channels()) + " channels");
  }
  Signal y(x.grid(), x.channels());
  parallel_for(splines.size(), [&](std::size_t n) {
    const auto row = static_cast<Index>(n);
    const auto& s = splines[n];
    y.data().row(row) = x.data().row(row).unaryExpr([&s](double t) { return spline_eval(s, t); });
  });
  return y;
}

double nonlinear_layer_lipschitz(const ActivationLayer& layer) {
  if (layer.kind == ActivationLayer::Kind::relu) return 1.0;
  double worst = 0.0;
  for (const auto& s : layer.splines) worst = std::max(worst, spline_lipschitz(s));
  return worst;
}

WorstCasePair worst_case_probe(const ActivationLayer& layer, const Grid& grid, Index channels) {
  Signal x = Signal::zeros(grid, channels);
  Signal y = Signal::zeros(grid, channels);
  if (layer.kind == ActivationLayer::Kind::relu) {
    y(0, 0) = 1.0;
  } else {
    if (static_cast<Index>(layer.splines.size()) != channels) {
      throw DimensionError("activation layer profile count differs from channel count");
    }
    std::size_t best = 0;
    for (std::size_t n = 1; n < layer.splines.size(); ++n) {
      if (spline_lipschitz(layer.splines[n]) > spline_lipschitz(layer.splines[best])) best = n;
    }
    const auto& s = layer.splines[best];
    const std::size_t seg = steepest_segment(s);
    const auto ch = static_cast<Index>(best);
    x(ch, 0) = s.knot(seg);
    y(ch, 0) = s.knot(seg + 1);
  }
  WorstCasePair p{x, y, 0.0};
  p.ratio = norm(layer(y) - layer(x)) / norm(y - x);
  return p;
}

void CnnDenoiser::validate() const {
  if (filters.empty()) throw DimensionError("a CNN needs at least one filter");
  if (activations.size() + 1 != filters.size()) {
    throw DimensionError("a CNN with L filters needs L - 1 activation layers");
  }
  if (filters.front().in_channels() != 1) throw DimensionError("the first filter must take one channel");
  if (filters.back().out_channels() != 1) throw DimensionError("the last filter must produce one channel");
  const std::size_t dims = filters.front().dims();
  for (std::size_t i = 0; i < filters.size(); ++i) {
    if (filters[i].dims() != dims) throw DimensionError("CNN filters differ in grid dimension");
    if (i + 1 < filters.size() && filters[i].out_channels() != filters[i + 1].in_channels()) {
      throw DimensionError("CNN channel plan breaks between filters " + std::to_string(i) + " and " +
                           std::to_string(i + 1));
    }
  }
  for (std::size_t i = 0; i < activations.size(); ++i) {
    const auto& a = activations[i];
    if (a.kind == ActivationLayer::Kind::spline) {
      if (static_cast<Index>(a.splines.size()) != filters[i].out_channels()) {
        throw DimensionError("activation layer " + std::to_string(i) + " needs one profile per channel");
      }
      for (const auto& s : a.splines) s.validate();
    }
  }
  if (!biases.empty()) {
    if (biases.size() != filters.size()) throw DimensionError("biases must be absent or given for every filter");
    for (std::size_t i = 0; i < biases.size(); ++i) {
      if (biases[i].size() != filters[i].out_channels()) {
        throw DimensionError("bias " + std::to_string(i) + " has the wrong length");
      }
      if (!biases[i].allFinite()) throw ValueError("biases must be finite");
    }
  }
}

Signal cnn_forward(const CnnDenoiser& net, const Signal& x) {
  net.validate();
  if (x.channels() != 1) throw DimensionError("CNN input must be single-channel");
  Signal z = x;
  for (std::size_t i = 0; i < net.filters.size(); ++i) {
    z = apply(net.filters[i], z);
    if (!net.biases.empty()) z.data().colwise() += net.biases[i];
    if (i < net.activations.size()) z = net.activations[i](z);
  }
  return z;
}

CertificationReport certify(const CnnDenoiser& net, const Grid& grid, double tol) {
  net.validate();
  CertificationReport rep;
  rep.lipschitz_bound = 1.0;
  rep.certified = true;
  for (std::size_t i = 0; i < net.filters.size(); ++i) {
    const double n = operator_norm(net.filters[i], grid);
    rep.filter_norms.push_back(n);
    rep.lipschitz_bound *= n;
    if (n > 1.0 + tol) {
      rep.certified = false;
      std::ostringstream os;
      os << "filter " << i << ": operator norm " << n << " exceeds 1";
      rep.audit.push_back(os.str());
    }
  }
  for (std::size_t i = 0; i < net.activations.size(); ++i) {
    const double c = nonlinear_layer_lipschitz(net.activations[i]);
    rep.activation_constants.push_back(c);
    rep.lipschitz_bound *= c;
    if (c > 1.0 + tol) {
      rep.certified = false;
      std::ostringstream os;
      os << "activation " << i << ": Lipschitz constant " << c << " exceeds 1";
      rep.audit.push_back(os.str());
    }
  }
  return rep;
}

CnnDenoiser renormalize(CnnDenoiser net, const Grid& grid, std::vector<std::string>& audit, double tol) {
  net.validate();
  for (std::size_t i = 0; i < net.filters.size(); ++i) {
    const double n = operator_norm(net.filters[i], grid);
    if (n > 1.0 + tol) {
      net.filters[i] = spectral_normalize(net.filters[i], grid);
      std::ostringstream os;
      os << "filter " << i << ": divided by operator norm " << n;
      audit.push_back(os.str());
    }
  }
  for (std::size_t i = 0; i < net.activations.size(); ++i) {
    auto& a = net.activations[i];
    for (std::size_t c = 0; c < a.splines.size(); ++c) {
      const double l = spline_lipschitz(a.splines[c]);
      if (l > 1.0 + tol) {
        a.splines[c] = project_unit_lipschitz(a.splines[c]);
        std::ostringstream os;
        os << "activation " << i << " channel " << c << ": slopes clipped (was " << l << ")";
        audit.push_back(os.str());
      }
    }
  }
  return net;
}

FrameThresholdDenoiser::FrameThresholdDenoiser(const Filter& analysis, double tau, const Grid& grid,
                                               std::vector<Index> pass_through)
    : analysis_(analysis), tau_(tau), pass_through_(std::move(pass_through)) {
  for (Index c : pass_through_) {
    if (c < 0 || c >= analysis.out_channels()) throw DimensionError("pass-through channel out of range");
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ValueError("threshold must be finite and nonnegative");
  if (analysis.in_channels() != 1) throw DimensionError("frame analysis filter must take one channel");
  auto rep = is_parseval(analysis, grid);
  if (!rep.passed) {
    std::ostringstream os;
    os << "frame analysis filter is not Parseval (defect " << rep.max_paraunitarity_defect << ")";
    throw ValueError(os.str());
  }
  forward_ = freq_response(analysis, grid);
  backward_ = freq_response(adjoint(analysis), grid);
}

Signal FrameThresholdDenoiser::operator()(const Signal& z) const {
  if (tau_ == 0.0) {
    if (z.channels() != analysis_.in_channels()) throw DimensionError("signal channel count differs from frame input");
    return z;  // T^* T = Id exactly
  }
  const bool cached = z.grid() == forward_.grid;
  Signal c = cached ? apply_spectral(forward_, z) : apply(analysis_, z);
  Signal t = soft_threshold(c, tau_);
  for (Index ch : pass_through_) t.data().row(ch) = c.data().row(ch);
  return cached ? apply_spectral(backward_, t) : apply(adjoint(analysis_), t);
}

Filter dct_frame(Index size) {
  if (size < 1) throw ValueError("frame window must be at least 1");
  const OrthoMatrix c = dct_matrix(size);
  OrthoMatrix u(size * size, size * size);
  for (Index a = 0; a < size; ++a) {
    for (Index b = 0; b < size; ++b) u.block(a * size, b * size, size, size) = c(a, b) * c;
  }
  return build_one_to_N(u, centered_offsets(size * size, 2));
}

Filter wavelet_frame(Index size, int levels) {
  if (size < 2) throw ValueError("wavelet frame window must be at least 2");
  if (levels < 1) throw ValueError("wavelet frame needs at least one level");
  const Index atoms = size * size;
  const OrthoMatrix c = dct_matrix(size);
  OrthoMatrix u(atoms, atoms);
  for (Index a = 0; a < size; ++a) {
    for (Index b = 0; b < size; ++b) u.block(a * size, b * size, size, size) = c(a, b) * c;
  }
  Filter t = Filter::identity(1, 2);
  Index dilation = 1;
  for (int level = 0; level < levels; ++level) {
    TapSet offsets = centered_offsets(atoms, 2);
    for (auto& o : offsets) {
      for (auto& v : o) v *= dilation;
    }
    const Filter split = build_one_to_N(u, offsets);
    // Split the lowpass channel, pass the detail channels through.
    const Index ch = t.out_channels();
    Filter stage(atoms + ch - 1, ch, 2);
    for (const auto& tap : split.taps()) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(atoms + ch - 1, ch);
      m.col(0).head(atoms) = tap.matrix.col(0);
      stage.add_tap(tap.offset, std::move(m));
    }
    if (ch > 1) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(atoms + ch - 1, ch);
      m.bottomRightCorner(ch - 1, ch - 1).setIdentity();
      stage.add_tap(zero_offset(2), std::move(m));
    }
    t = compose(canonicalize(stage), t);
    dilation *= size;
  }
  return t;
}

void AveragedDenoiser::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw ValueError("beta must lie strictly inside (0, 1)");
  if (!residual) throw ValueError("averaged denoiser has no residual operator");
}

Signal averaged_apply(const AveragedDenoiser& d, const Signal& z) {
  d.validate();
  Signal r = d.residual(z);
  r.check_same_shape(z);
  return d.beta * r + (1.0 - d.beta) * z;
}

double averaged_lipschitz(const AveragedDenoiser& d) {
  d.validate();
  return d.beta * d.residual_lipschitz + (1.0 - d.beta);
}

}  // namespace parseval
