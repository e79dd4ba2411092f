#include "parseval/inverse.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace parseval {

namespace {

template <class... F>
struct Overloaded : F... {
  using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

void require_image(const ForwardModel& a, const Grid& g, Index channels) {
  if (!(g == a.grid)) throw DimensionError("signal grid " + g.str() + " differs from model grid " + a.grid.str());
  if (channels != 1) throw DimensionError("forward models act on single-channel signals");
}

void require_measurement(const ForwardModel& a, const Measurement& y) {
  if (y.size() != a.measurement_size()) {
    throw DimensionError("measurement has " + std::to_string(y.size()) + " entries, model expects " +
                         std::to_string(a.measurement_size()));
  }
}

Measurement as_measurement(const ComplexSignal& s) { return s.data().row(0).transpose(); }

ComplexSignal as_signal(const Grid& g, const Measurement& y) {
  ChannelArray<cd> d(1, g.count());
  d.row(0) = y.transpose();
  return ComplexSignal(g, std::move(d));
}

}  // namespace

ForwardModel ForwardModel::blur(const Filter& kernel, const Grid& grid) {
  if (kernel.in_channels() != 1 || kernel.out_channels() != 1) throw DimensionError("blur kernel must be scalar");
  if (kernel.dims() != grid.dims()) throw DimensionError("blur kernel and grid dimensions differ");
  return {models::PeriodicBlur{kernel}, grid};
}

ForwardModel ForwardModel::masked_fourier(const SamplingMask& mask) {
  mask.validate();
  return {models::MaskedFourier{mask}, mask.grid};
}

Index ForwardModel::measurement_size() const {
  if (const auto* m = std::get_if<models::MaskedFourier>(&kind)) return m->mask.count();
  return grid.count();
}

const char* ForwardModel::name() const {
  return std::visit(Overloaded{[](const models::Identity&) { return "identity"; },
                               [](const models::PeriodicBlur&) { return "blur"; },
                               [](const models::MaskedFourier&) { return "masked_fourier"; }},
                    kind);
}

Measurement model_apply(const ForwardModel& a, const ComplexSignal& s) {
  require_image(a, s.grid(), s.channels());
  return std::visit(
      Overloaded{[&](const models::Identity&) { return as_measurement(s); },
                 [&](const models::PeriodicBlur& b) { return as_measurement(parseval::apply(b.kernel.cast<cd>(), s)); },
                 [&](const models::MaskedFourier& m) {
                   ChannelArray<cd> spec = dft(s);
                   const double scale = 1.0 / std::sqrt(static_cast<double>(a.grid.count()));
                   auto idx = m.mask.indices();
                   Measurement y(static_cast<Index>(idx.size()));
                   for (std::size_t i = 0; i < idx.size(); ++i) y(static_cast<Index>(i)) = scale * spec(0, idx[i]);
                   return y;
                 }},
      a.kind);
}

Measurement model_apply(const ForwardModel& a, const Signal& s) { return model_apply(a, s.cast<cd>()); }

ComplexSignal model_adjoint(const ForwardModel& a, const Measurement& y) {
  require_measurement(a, y);
  return std::visit(
      Overloaded{[&](const models::Identity&) { return as_signal(a.grid, y); },
                 [&](const models::PeriodicBlur& b) {
                   return parseval::apply(adjoint(b.kernel).cast<cd>(), as_signal(a.grid, y));
                 },
                 [&](const models::MaskedFourier& m) {
                   ChannelArray<cd> spec = ChannelArray<cd>::Zero(1, a.grid.count());
                   auto idx = m.mask.indices();
                   for (std::size_t i = 0; i < idx.size(); ++i) spec(0, idx[i]) = y(static_cast<Index>(i));
                   // idft carries 1/K; the unitary inverse needs 1/sqrt(K).
                   ComplexSignal s = idft(a.grid, std::move(spec));
                   s *= cd(std::sqrt(static_cast<double>(a.grid.count())));
                   return s;
                 }},
      a.kind);
}

Signal zero_fill(const ForwardModel& a, const Measurement& y) {
  return Signal(a.grid, model_adjoint(a, y).data().real());
}

Signal grad_quadratic(const ForwardModel& a, const Signal& s, const Measurement& y) {
  require_measurement(a, y);
  return zero_fill(a, model_apply(a, s) - y);
}

double data_fidelity(const ForwardModel& a, const Signal& s, const Measurement& y) {
  require_measurement(a, y);
  return 0.5 * (model_apply(a, s) - y).squaredNorm();
}

double lipschitz_of_gradient(const ForwardModel& a, std::uint64_t seed, int max_iters, double tol) {
  std::mt19937_64 rng(seed);
  Signal v = Signal::random(a.grid, 1, rng);
  v *= 1.0 / norm(v);
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Signal w = zero_fill(a, model_apply(a, v));
    const double next = norm(w);
    if (next == 0.0) return 0.0;
    w *= 1.0 / next;
    v = std::move(w);
    const bool settled = std::abs(next - lambda) <= tol * next;
    lambda = next;
    if (settled) break;
  }
  return lambda;
}

Measurement add_noise(const ForwardModel& a, const Measurement& y, double sigma, std::uint64_t seed) {
  require_measurement(a, y);
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ValueError("noise level must be finite and nonnegative");
  const bool complex_data = std::holds_alternative<models::MaskedFourier>(a.kind);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Measurement out = y;
  for (Index i = 0; i < out.size(); ++i) {
    const double re = g(rng);
    const double im = complex_data ? g(rng) : 0.0;
    out(i) += sigma * cd(re, im);
  }
  return out;
}

FbsResult fbs_solve(const ForwardModel& a, const Measurement& y, const SignalMap& denoiser, const FbsConfig& cfg) {
  require_measurement(a, y);
  if (!(cfg.alpha > 0.0) || !std::isfinite(cfg.alpha)) throw ValueError("step size must be positive");
  if (cfg.max_iters < 1) throw ValueError("max_iters must be at least 1");
  auto step = [&](const Signal& s) {
    Signal z = s;
    z -= cfg.alpha * grad_quadratic(a, s, y);
    return denoiser(z);
  };

  FbsResult r;
  Signal s = zero_fill(a, y);
  const double start = norm(s) > 0.0 ? norm(s) : 1.0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    Signal next = step(s);
    const double scale = norm(s);
    const double diff = norm(next - s);
    const double gap = scale > 0.0 ? diff / scale : diff;
    s = std::move(next);
    r.iterations = k + 1;
    if (cfg.record_trace) r.trace.push_back(gap);
    const double n = norm(s);
    if (!std::isfinite(n) || n > cfg.divergence_factor * start) {
      std::ostringstream os;
      os << "PnP-FBS diverged at iteration " << k + 1 << ": iterate norm " << n << " exceeds "
         << cfg.divergence_factor << " x the initial norm " << start << " (check alpha < 2/L and the denoiser)";
      throw DivergenceError(os.str());
    }
    if (gap <= cfg.tol) {
      r.converged = true;
      break;
    }
  }
  r.fixed_point_residual = norm(s - step(s));
  r.data_fidelity = data_fidelity(a, s, y);
  r.solution = std::move(s);
  return r;
}

FbsResult fbs_solve(const ForwardModel& a, const Measurement& y, const AveragedDenoiser& d, const FbsConfig& cfg) {
  d.validate();
  return fbs_solve(a, y, [&d](const Signal& z) { return averaged_apply(d, z); }, cfg);
}

StabilityCheck check_forward_stability(const ForwardModel& a, const AveragedDenoiser& d, const FbsConfig& cfg,
                                       const Measurement& y1, const Measurement& y2) {
  d.validate();
  if (d.beta > 0.5) throw ValueError("forward stability needs an averaged denoiser with beta <= 1/2");
  auto r1 = fbs_solve(a, y1, d, cfg);
  auto r2 = fbs_solve(a, y2, d, cfg);
  StabilityCheck c;
  c.lhs = (model_apply(a, r1.solution) - model_apply(a, r2.solution)).norm();
  c.rhs = (y1 - y2).norm();
  c.slack = 10.0 * (r1.fixed_point_residual + r2.fixed_point_residual);
  c.converged = r1.converged && r2.converged;
  c.pass = c.lhs <= c.rhs + c.slack;
  return c;
}

StabilityCheck check_solution_stability(const ForwardModel& a, const AveragedDenoiser& d, const FbsConfig& cfg,
                                        const Measurement& y1, const Measurement& y2, double l0) {
  d.validate();
  if (!(l0 >= 0.0 && l0 < 1.0)) throw ValueError("solution stability needs a contraction factor L0 in [0, 1)");
  if (averaged_lipschitz(d) > 1.0 + 1e-12) throw ValueError("denoiser is not certified 1-Lipschitz");
  SignalMap contracted = [&d, l0](const Signal& z) { return l0 * averaged_apply(d, z); };
  auto r1 = fbs_solve(a, y1, contracted, cfg);
  auto r2 = fbs_solve(a, y2, contracted, cfg);
  const double a_norm = std::sqrt(lipschitz_of_gradient(a));
  StabilityCheck c;
  c.lhs = norm(r1.solution - r2.solution);
  c.rhs = cfg.alpha * l0 * a_norm / (1.0 - l0) * (y1 - y2).norm();
  c.slack = 10.0 * (r1.fixed_point_residual + r2.fixed_point_residual);
  c.converged = r1.converged && r2.converged;
  c.pass = c.lhs <= c.rhs + c.slack;
  return c;
}

double psnr(const Signal& reference, const Signal& estimate, double peak) {
  reference.check_same_shape(estimate);
  if (!(peak > 0.0)) throw ValueError("PSNR peak must be positive");
  const double sq = (reference.data() - estimate.data()).squaredNorm();
  if (sq == 0.0) return kPsnrCap;
  const double mse = sq / static_cast<double>(reference.data().size());
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

Signal phantom(const Grid& grid) {
  if (grid.dims() != 2) throw DimensionError("phantom needs a 2-D grid");
  // Modified Shepp-Logan: intensity, semi-axes, centre, rotation in degrees.
  struct Ellipse {
    double value, a, b, x0, y0, phi;
  };
  static constexpr std::array<Ellipse, 10> kEllipses{{{1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
                                                      {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
                                                      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
                                                      {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
                                                      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
                                                      {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
                                                      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
                                                      {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
                                                      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
                                                      {0.1, 0.023, 0.046, 0.06, -0.605, 0.0}}};
  const Index rows = grid.size(0);
  const Index cols = grid.size(1);
  Signal s(grid, 1);
  for (Index i = 0; i < rows; ++i) {
    const double y = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(rows);
    for (Index j = 0; j < cols; ++j) {
      const double x = (2.0 * static_cast<double>(j) + 1.0) / static_cast<double>(cols) - 1.0;
      double v = 0.0;
      for (const auto& e : kEllipses) {
        const double c = std::cos(e.phi * std::numbers::pi / 180.0);
        const double sn = std::sin(e.phi * std::numbers::pi / 180.0);
        const double u = (x - e.x0) * c + (y - e.y0) * sn;
        const double w = -(x - e.x0) * sn + (y - e.y0) * c;
        if (u * u / (e.a * e.a) + w * w / (e.b * e.b) <= 1.0) v += e.value;
      }
      s(0, i * cols + j) = std::clamp(v, 0.0, 1.0);
    }
  }
  return s;
}

}  // namespace parseval
