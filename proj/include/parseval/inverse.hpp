#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "parseval/lipschitz.hpp"

namespace parseval {

using Measurement = Eigen::VectorXcd;

/// Boolean selection over the DFT bins of a 2-D grid (unshifted, bin 0 is DC).
struct SamplingMask {
  Grid grid;
  std::vector<std::uint8_t> selected;  ///< one flag per bin, row-major

  Index count() const;
  double fraction() const { return static_cast<double>(count()) / static_cast<double>(grid.count()); }
  std::vector<Index> indices() const;
  bool conjugate_symmetric() const;
  void validate() const;
};

struct MaskSpec {
  enum class Scheme { random, radial, cartesian };
  Scheme scheme = Scheme::cartesian;
  double rate = 0.3;      ///< random: Bernoulli keep probability
  int lines = 16;         ///< radial: number of lines through DC
  int acceleration = 4;   ///< cartesian: keep every a-th row
  std::uint64_t seed = 0;
  bool conjugate_symmetric = false;  ///< also select -k whenever k is selected
};

/// Rows kept by the cartesian scheme: every a-th row plus a 4-row band around DC.
SamplingMask make_mask(const MaskSpec& spec, const Grid& grid);

namespace models {
struct Identity {};
struct PeriodicBlur {
  Filter kernel;  ///< 1 -> 1
};
struct MaskedFourier {
  SamplingMask mask;
};
}  // namespace models

/// Linear measurement operator on single-channel real signals of `grid`.
struct ForwardModel {
  std::variant<models::Identity, models::PeriodicBlur, models::MaskedFourier> kind;
  Grid grid;

  static ForwardModel identity(const Grid& grid) { return {models::Identity{}, grid}; }
  static ForwardModel blur(const Filter& kernel, const Grid& grid);
  static ForwardModel masked_fourier(const SamplingMask& mask);

  Index measurement_size() const;
  const char* name() const;
};

Measurement model_apply(const ForwardModel& a, const Signal& s);
Measurement model_apply(const ForwardModel& a, const ComplexSignal& s);
ComplexSignal model_adjoint(const ForwardModel& a, const Measurement& y);

/// Re(A^H y), the zero-fill reconstruction.
Signal zero_fill(const ForwardModel& a, const Measurement& y);

/// Gradient of 1/2 ||y - A s||^2 over real s: Re(A^H (A s - y)).
Signal grad_quadratic(const ForwardModel& a, const Signal& s, const Measurement& y);

double data_fidelity(const ForwardModel& a, const Signal& s, const Measurement& y);

/// Dominant eigenvalue of s -> Re(A^H A s) by power iteration.
double lipschitz_of_gradient(const ForwardModel& a, std::uint64_t seed = 0, int max_iters = 10000,
                             double tol = 1e-10);

/// Adds seeded Gaussian noise; real and imaginary parts for Fourier data, real part otherwise.
Measurement add_noise(const ForwardModel& a, const Measurement& y, double sigma, std::uint64_t seed);

struct FbsConfig {
  double alpha = 1.0;
  int max_iters = 1000;
  double tol = 1e-6;  ///< on ||s^{k+1} - s^k|| / ||s^k||
  bool record_trace = true;
  double divergence_factor = 1e6;
};

struct FbsResult {
  Signal solution;
  int iterations = 0;
  std::vector<double> trace;
  double data_fidelity = 0.0;
  double fixed_point_residual = 0.0;  ///< ||s - D{s - alpha grad}||
  bool converged = false;
};

/// s^{k+1} = D{s^k - alpha Re(A^H(A s^k - y))} from the zero-fill start.
/// Throws DivergenceError when the iterate norm blows past divergence_factor x the start.
FbsResult fbs_solve(const ForwardModel& a, const Measurement& y, const SignalMap& denoiser, const FbsConfig& cfg);
FbsResult fbs_solve(const ForwardModel& a, const Measurement& y, const AveragedDenoiser& d, const FbsConfig& cfg);

struct StabilityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool converged = false;
  bool pass = false;
};

/// ||A s1* - A s2*|| <= ||y1 - y2|| for an averaged denoiser with beta <= 1/2.
StabilityCheck check_forward_stability(const ForwardModel& a, const AveragedDenoiser& d, const FbsConfig& cfg,
                                       const Measurement& y1, const Measurement& y2);

/// ||s1* - s2*|| <= alpha L0 ||A|| / (1 - L0) ||y1 - y2|| with the denoiser L0 * D.
StabilityCheck check_solution_stability(const ForwardModel& a, const AveragedDenoiser& d, const FbsConfig& cfg,
                                        const Measurement& y1, const Measurement& y2, double l0);

constexpr double kPsnrCap = 999.0;

double psnr(const Signal& reference, const Signal& estimate, double peak = 1.0);

/// Piecewise-constant ellipse phantom with values in [0, 1] on a 2-D grid.
Signal phantom(const Grid& grid);

}  // namespace parseval
