// psvb: build, verify and apply Parseval filterbanks; run PnP reconstructions.
//
// Exit codes: 0 pass, 1 verification failure, 2 input error, 3 solver divergence.

#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "parseval/io.hpp"
#include "parseval/seed.hpp"

using namespace parseval;
namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0;
constexpr int kVerifyFail = 1;
constexpr int kInputError = 2;
constexpr int kDiverged = 3;

void kv(const std::string& key, double v) { std::printf("%s=%.17g\n", key.c_str(), v); }
void kv(const std::string& key, long long v) { std::printf("%s=%lld\n", key.c_str(), v); }
void kv(const std::string& key, int v) { kv(key, static_cast<long long>(v)); }
void kv(const std::string& key, bool v) { std::printf("%s=%s\n", key.c_str(), v ? "true" : "false"); }
void kv(const std::string& key, const char* v) { std::printf("%s=%s\n", key.c_str(), v); }
void kv(const std::string& key, const std::string& v) { std::printf("%s=%s\n", key.c_str(), v.c_str()); }

bool is_json(const fs::path& p) { return p.extension() == ".json"; }

/// A compiled chain spec or a stored filter.
Filter load_operator(const fs::path& p) {
  return is_json(p) ? io::compile(io::load_chain_spec(p)) : io::load_filter(p);
}

Signal load_input(const std::string& path, const Grid& grid) {
  if (path == "phantom") return phantom(grid);
  return io::load_any_signal(path);
}

struct MaskOptions {
  std::string scheme = "cartesian";
  double rate = 0.3;
  Index lines = 16;
  Index acceleration = 4;
  bool symmetric = false;
  std::string file;

  void add(CLI::App* cmd) {
    cmd->add_option("--scheme", scheme, "Sampling scheme")->check(CLI::IsMember({"cartesian", "random", "radial"}));
    cmd->add_option("--rate", rate, "Random keep probability");
    cmd->add_option("--lines", lines, "Radial spoke count");
    cmd->add_option("--acceleration", acceleration, "Cartesian row acceleration");
    cmd->add_flag("--symmetric", symmetric, "Symmetrize the mask under k -> -k");
    cmd->add_option("--mask", file, "Load the mask from a file instead");
  }

  SamplingMask make(const Grid& grid, std::uint64_t seed) const {
    if (!file.empty()) {
      auto m = io::load_mask(file);
      if (!(m.grid == grid)) throw DimensionError("mask grid " + m.grid.str() + " differs from " + grid.str());
      return m;
    }
    MaskSpec spec;
    spec.scheme = scheme == "random"   ? MaskSpec::Scheme::random
                  : scheme == "radial" ? MaskSpec::Scheme::radial
                                       : MaskSpec::Scheme::cartesian;
    spec.rate = rate;
    spec.lines = lines;
    spec.acceleration = acceleration;
    spec.seed = seed;
    spec.conjugate_symmetric = symmetric;
    return make_mask(spec, grid);
  }
};

struct ModelOptions {
  std::string model = "mri";
  Index blur_width = 3;
  MaskOptions mask;

  void add(CLI::App* cmd) {
    cmd->add_option("--model", model, "Forward model")->check(CLI::IsMember({"mri", "identity", "blur"}));
    cmd->add_option("--blur-width", blur_width, "Box blur width for --model blur");
    mask.add(cmd);
  }

  ForwardModel make(const Grid& grid, std::uint64_t seed) const {
    if (model == "identity") return ForwardModel::identity(grid);
    if (model == "blur") {
      if (blur_width < 1) throw ValueError("blur width must be positive");
      Filter k(1, 1, grid.dims());
      const auto offsets = centered_offsets(blur_width, 1);
      const double w = 1.0 / static_cast<double>(blur_width);
      for (const auto& o : offsets) {
        Offset full(grid.dims(), 0);
        full.back() = o[0];
        k.add_tap(full, Eigen::MatrixXd::Constant(1, 1, w));
      }
      return ForwardModel::blur(k, grid);
    }
    return ForwardModel::masked_fourier(mask.make(grid, seed));
  }
};

struct DenoiserOptions {
  std::string spec_file;
  std::string weights;
  std::string frame = "wavelet";
  Index frame_size = 2;
  int levels = 3;
  double tau = 0.015;
  double beta = 0.4;
  bool renormalize = false;
  CLI::Option* tau_opt = nullptr;
  CLI::Option* beta_opt = nullptr;

  void add(CLI::App* cmd) {
    cmd->add_option("--denoiser", spec_file, "Denoiser spec (JSON)");
    cmd->add_option("--weights", weights, "CNN weights file (instead of a frame denoiser)");
    cmd->add_option("--frame", frame, "Frame for the threshold denoiser")->check(CLI::IsMember({"wavelet", "dct"}));
    cmd->add_option("--frame-size", frame_size, "Frame window size");
    cmd->add_option("--levels", levels, "Wavelet levels");
    tau_opt = cmd->add_option("--tau", tau, "Soft threshold");
    beta_opt = cmd->add_option("--beta", beta, "Averaging weight of the residual denoiser");
    cmd->add_flag("--renormalize", renormalize, "Renormalize uncertified CNN weights instead of rejecting them");
  }

  io::DenoiserSpec spec() const {
    io::DenoiserSpec s;
    if (!spec_file.empty()) {
      s = io::load_denoiser_spec(spec_file);
    } else if (!weights.empty()) {
      s.type = io::DenoiserSpec::Type::cnn;
      s.weights = weights;
    } else {
      s.frame = frame;
      s.frame_size = frame_size;
      s.levels = levels;
    }
    if (spec_file.empty() || tau_opt->count()) s.tau = tau;
    if (spec_file.empty() || beta_opt->count()) s.beta = beta;
    if (renormalize) s.renormalize = true;
    return s;
  }
};

struct Common {
  std::string grid = "64x64";
  std::uint64_t seed = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--grid", grid, "Grid, e.g. 64x64");
    cmd->add_option("--seed", seed, "Random seed");
  }
  Grid g() const { return io::parse_grid(grid); }
};

void print_audit(const std::vector<std::string>& audit) {
  for (std::size_t i = 0; i < audit.size(); ++i) kv("audit." + std::to_string(i), audit[i]);
}

void write_trace(const std::string& path, const std::vector<double>& trace) {
  std::string out = "iteration,gap\n";
  char buf[64];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i + 1, trace[i]);
    out += buf;
  }
  io::write_file(path, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parseval filterbanks and plug-and-play reconstruction"};
  app.require_subcommand(1);
  int code = kPass;

  // verify
  Common vc;
  std::string verify_in, verify_out;
  double verify_tol = 1e-9;
  auto* verify = app.add_subcommand("verify", "Check that a chain spec or filter is Parseval on a grid");
  verify->add_option("input", verify_in, "Chain spec (.json) or filter file")->required();
  verify->add_option("--tol", verify_tol, "Defect tolerance");
  verify->add_option("-o,--output", verify_out, "Write the compiled filter");
  vc.add(verify);
  verify->callback([&] {
    const Grid g = vc.g();
    const Filter h = load_operator(verify_in);
    const auto rep = is_parseval(h, g, verify_tol);
    const auto gram = gram_projector_check(h, g, 10, vc.seed);
    const bool ok = rep.passed && gram.idempotence <= verify_tol && gram.self_adjointness <= verify_tol;
    kv("grid", g.str());
    kv("in_channels", static_cast<long long>(h.in_channels()));
    kv("out_channels", static_cast<long long>(h.out_channels()));
    kv("taps", static_cast<long long>(h.tap_count()));
    kv("max_paraunitarity_defect", rep.max_paraunitarity_defect);
    kv("max_time_domain_defect", rep.max_time_domain_defect);
    kv("gram_idempotence_defect", gram.idempotence);
    kv("gram_self_adjointness_defect", gram.self_adjointness);
    kv("operator_norm", rep.operator_norm);
    kv("tolerance", rep.tolerance);
    kv("passed", ok);
    if (!verify_out.empty()) io::save(verify_out, h);
    code = ok ? kPass : kVerifyFail;
  });

  // norm
  Common nc;
  std::string norm_in;
  Index oversample = 1;
  auto* norm = app.add_subcommand("norm", "Operator norm on a grid and on an oversampled frequency grid");
  norm->add_option("input", norm_in, "Chain spec (.json) or filter file")->required();
  norm->add_option("--oversample", oversample, "Frequency oversampling factor")->check(CLI::PositiveNumber);
  nc.add(norm);
  norm->callback([&] {
    const Grid g = nc.g();
    const Filter h = load_operator(norm_in);
    kv("grid", g.str());
    kv("operator_norm", operator_norm(h, g));
    kv("oversample", static_cast<long long>(oversample));
    kv("oversampled_norm", oversampled_norm(h, g, oversample));
    // Frequency spacing of the refined grid, per unit of 2 pi, along the coarsest axis.
    Index n = g.sizes().front();
    for (Index s : g.sizes()) n = std::min(n, s);
    kv("frequency_spacing", 1.0 / static_cast<double>(n * oversample));
  });

  // compose
  std::vector<std::string> compose_in;
  std::string compose_out;
  auto* comp = app.add_subcommand("compose", "Compose operators, first listed applied first");
  comp->add_option("inputs", compose_in, "Chain specs or filter files")->required();
  comp->add_option("-o,--output", compose_out, "Output filter file")->required();
  comp->callback([&] {
    Filter acc = load_operator(compose_in.front());
    for (std::size_t i = 1; i < compose_in.size(); ++i) acc = compose(load_operator(compose_in[i]), acc);
    io::save(compose_out, acc);
    kv("in_channels", static_cast<long long>(acc.in_channels()));
    kv("out_channels", static_cast<long long>(acc.out_channels()));
    kv("taps", static_cast<long long>(acc.tap_count()));
  });

  // denoise
  Common dc;
  DenoiserOptions dd;
  std::string den_in, den_out;
  double den_sigma = 10.0 / 255.0;
  auto* den = app.add_subcommand("denoise", "Add seeded Gaussian noise and apply the residual denoiser R");
  den->add_option("input", den_in, "Signal file (.psvb, .pgm, .csv) or 'phantom'")->required();
  den->add_option("-o,--output", den_out, "Denoised signal");
  den->add_option("--sigma", den_sigma, "Noise standard deviation");
  dc.add(den);
  dd.add(den);
  den->callback([&] {
    const Signal clean = load_input(den_in, dc.g());
    if (clean.channels() != 1) throw DimensionError("denoise expects a single-channel signal");
    const auto id = ForwardModel::identity(clean.grid());
    const Measurement noisy_y = add_noise(id, model_apply(id, clean), den_sigma, dc.seed);
    const Signal noisy = zero_fill(id, noisy_y);
    const auto built = io::build_denoiser(dd.spec(), clean.grid());
    const Signal out = built.residual(noisy);
    print_audit(built.audit);
    kv("sigma", den_sigma);
    kv("psnr_noisy", psnr(clean, noisy));
    kv("psnr_denoised", psnr(clean, out));
    if (!den_out.empty()) io::save_any_signal(den_out, out);
  });

  // reconstruct
  Common rc;
  DenoiserOptions rd;
  ModelOptions rm;
  std::string rec_in = "phantom", rec_out, rec_zf, trace_out;
  double rec_sigma = 10.0 / 255.0, rec_tol = 1e-6;
  double rec_alpha = 0.0;
  int rec_iters = 1000;
  auto* rec = app.add_subcommand("reconstruct", "Simulate measurements and run PnP forward-backward splitting");
  rec->add_option("input", rec_in, "Ground truth signal or 'phantom'");
  rec->add_option("-o,--output", rec_out, "Reconstruction");
  rec->add_option("--zero-fill-out", rec_zf, "Zero-fill baseline Re(A^H y)");
  rec->add_option("--trace-out", trace_out, "Convergence trace (CSV)");
  rec->add_option("--sigma", rec_sigma, "Measurement noise standard deviation");
  auto* alpha_opt = rec->add_option("--alpha", rec_alpha, "Step size (default 1/L)");
  rec->add_option("--max-iters", rec_iters, "Iteration cap");
  rec->add_option("--tol", rec_tol, "Relative fixed-point gap for convergence");
  rc.add(rec);
  rd.add(rec);
  rm.add(rec);
  rec->callback([&] {
    const Signal truth = load_input(rec_in, rc.g());
    const Grid& g = truth.grid();
    if (g.dims() != 2 || truth.channels() != 1) throw DimensionError("reconstruct expects a single-channel 2-D image");
    const ForwardModel a = rm.make(g, mix_seed(rc.seed, 0));
    const Measurement y = add_noise(a, model_apply(a, truth), rec_sigma, mix_seed(rc.seed, 1));
    const auto built = io::build_denoiser(rd.spec(), g);
    print_audit(built.audit);
    const double lip = lipschitz_of_gradient(a);
    FbsConfig cfg;
    cfg.alpha = alpha_opt->count() ? rec_alpha : 1.0 / lip;
    cfg.max_iters = rec_iters;
    cfg.tol = rec_tol;
    const Signal zf = zero_fill(a, y);
    kv("model", a.name());
    kv("grid", g.str());
    kv("measurements", static_cast<long long>(a.measurement_size()));
    kv("lipschitz", lip);
    kv("alpha", cfg.alpha);
    kv("beta", built.beta);
    kv("psnr_zero_fill", psnr(truth, zf));
    FbsResult r;
    try {
      r = fbs_solve(a, y, AveragedDenoiser{built.residual, built.beta}, cfg);
    } catch (const DivergenceError& e) {
      kv("diverged", true);
      kv("error", std::string(e.what()));
      code = kDiverged;
      return;
    }
    kv("iterations", r.iterations);
    kv("converged", r.converged);
    kv("final_gap", r.trace.empty() ? 0.0 : r.trace.back());
    kv("fixed_point_residual", r.fixed_point_residual);
    kv("data_fidelity", r.data_fidelity);
    kv("psnr_pnp", psnr(truth, r.solution));
    if (!rec_out.empty()) io::save_any_signal(rec_out, r.solution);
    if (!rec_zf.empty()) io::save_any_signal(rec_zf, zf);
    if (!trace_out.empty()) write_trace(trace_out, r.trace);
  });

  // stability
  Common sc;
  DenoiserOptions sd;
  ModelOptions sm;
  std::string stab_in = "phantom";
  int trials = 20, stab_iters = 1000;
  double delta = 0.05, stab_sigma = 10.0 / 255.0, stab_tol = 1e-8;
  std::optional<double> l0;
  auto* stab = app.add_subcommand("stability", "Audit measurement-to-solution stability over perturbation pairs");
  stab->add_option("input", stab_in, "Ground truth signal or 'phantom'");
  stab->add_option("--trials", trials, "Perturbation pairs");
  stab->add_option("--delta", delta, "Perturbation standard deviation");
  stab->add_option("--sigma", stab_sigma, "Noise on the base measurement");
  stab->add_option("--max-iters", stab_iters, "Iteration cap per solve");
  stab->add_option("--tol", stab_tol, "Relative fixed-point gap for convergence");
  stab->add_option("--l0", l0, "Also audit solutions with the contracted denoiser L0 * D");
  sc.add(stab);
  sd.add(stab);
  sm.add(stab);
  stab->callback([&] {
    const Signal truth = load_input(stab_in, sc.g());
    const Grid& g = truth.grid();
    const ForwardModel a = sm.make(g, mix_seed(sc.seed, 0));
    const auto built = io::build_denoiser(sd.spec(), g);
    print_audit(built.audit);
    const AveragedDenoiser d{built.residual, built.beta};
    FbsConfig cfg;
    cfg.alpha = 1.0 / lipschitz_of_gradient(a);
    cfg.max_iters = stab_iters;
    cfg.tol = stab_tol;
    cfg.record_trace = false;
    kv("model", a.name());
    kv("beta", built.beta);
    bool all = true;
    int converged = 0;
    for (int t = 0; t < trials; ++t) {
      const auto base = mix_seed(sc.seed, 2 * static_cast<std::uint64_t>(t) + 2);
      const Measurement y1 = add_noise(a, model_apply(a, truth), stab_sigma, base);
      const Measurement y2 = add_noise(a, y1, delta, base + 1);
      const std::string p = "trial." + std::to_string(t) + ".";
      const auto c = check_forward_stability(a, d, cfg, y1, y2);
      kv(p + "lhs", c.lhs);
      kv(p + "rhs", c.rhs);
      kv(p + "slack", c.slack);
      kv(p + "converged", c.converged);
      kv(p + "pass", c.pass);
      if (c.converged) {
        ++converged;
        all = all && c.pass;
      }
      if (l0) {
        const auto s = check_solution_stability(a, d, cfg, y1, y2, *l0);
        kv(p + "solution_lhs", s.lhs);
        kv(p + "solution_rhs", s.rhs);
        kv(p + "solution_slack", s.slack);
        kv(p + "solution_converged", s.converged);
        kv(p + "solution_pass", s.pass);
        if (s.converged) all = all && s.pass;
      }
    }
    kv("converged_trials", converged);
    kv("passed", all);
    code = all ? kPass : kVerifyFail;
  });

  // mask
  Common mc;
  MaskOptions mo;
  std::string mask_out;
  auto* mask = app.add_subcommand("mask", "Generate a k-space sampling mask");
  mask->add_option("-o,--output", mask_out, "Mask file (.psvb, or .pgm for viewing)");
  mc.add(mask);
  mo.add(mask);
  mask->callback([&] {
    const SamplingMask m = mo.make(mc.g(), mc.seed);
    kv("grid", m.grid.str());
    kv("count", static_cast<long long>(m.count()));
    kv("fraction", m.fraction());
    kv("conjugate_symmetric", m.conjugate_symmetric());
    if (mask_out.empty()) return;
    if (fs::path(mask_out).extension() == ".pgm") {
      Signal img(m.grid, 1);
      for (Index k = 0; k < m.grid.count(); ++k) img(0, k) = m.selected[static_cast<std::size_t>(k)];
      io::save_pgm(mask_out, img);
    } else {
      io::save(mask_out, m);
    }
  });

  // convert
  std::string conv_in, conv_out;
  auto* conv = app.add_subcommand("convert", "Convert signals between .psvb, .pgm and .csv; re-encode containers");
  conv->add_option("input", conv_in, "Input file")->required();
  conv->add_option("output", conv_out, "Output file")->required();
  conv->callback([&] {
    const auto ext = fs::path(conv_in).extension();
    if (ext == ".pgm" || ext == ".csv") {
      io::save_any_signal(conv_out, io::load_any_signal(conv_in));
      kv("kind", std::string("signal"));
      return;
    }
    const std::string bytes = io::read_file(conv_in);
    const auto kind = io::peek_kind(bytes);
    kv("kind", std::string(io::kind_name(kind)));
    switch (kind) {
      case io::FileKind::signal:
        if (io::decode(bytes, kind).complex) {
          io::write_file(conv_out, io::encode_signal(io::decode_complex_signal(bytes)));
        } else {
          io::save_any_signal(conv_out, io::decode_signal(bytes));
        }
        break;
      case io::FileKind::filter: io::write_file(conv_out, io::encode_filter(io::decode_filter(bytes))); break;
      case io::FileKind::mask: io::write_file(conv_out, io::encode_mask(io::decode_mask(bytes))); break;
      case io::FileKind::weights: io::write_file(conv_out, io::encode_weights(io::decode_weights(bytes))); break;
      case io::FileKind::spline: io::write_file(conv_out, io::encode_splines(io::decode_splines(bytes))); break;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kInputError;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "psvb: diverged: %s\n", e.what());
    return kDiverged;
  } catch (const std::exception& e) {
    std::fflush(stdout);
    std::fprintf(stderr, "psvb: %s\n", e.what());
    return kInputError;
  }
  std::fflush(stdout);
  return code;
}
