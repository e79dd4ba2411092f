// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <unistd.h>

#include "oracles.hpp"
#include "parseval/io.hpp"
#include "parseval/seed.hpp"

using namespace parseval;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// ---------------------------------------------------------------- random modules

Offset random_offset(std::size_t d, int radius, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> off(-radius, radius);
  Offset o(d);
  for (auto& v : o) v = off(rng);
  return o;
}

Offset random_unit_shift(std::size_t d, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> off(-1, 1);
  Offset o(d, 0);
  while (std::all_of(o.begin(), o.end(), [](Index v) { return v == 0; })) {
    for (auto& v : o) v = off(rng);
  }
  return o;
}

TapSet distinct_offsets(Index count, std::size_t d, std::mt19937_64& rng) {
  int radius = 1;
  while (std::pow(2 * radius + 1, static_cast<double>(d)) < 2.0 * static_cast<double>(count)) ++radius;
  std::set<Offset> seen;
  TapSet out;
  while (static_cast<Index>(out.size()) < count) {
    Offset o = random_offset(d, std::max(radius, 3), rng);
    if (seen.insert(o).second) out.push_back(o);
  }
  return out;
}

TapSet any_offsets(Index count, std::size_t d, std::mt19937_64& rng) {
  TapSet out;
  for (Index i = 0; i < count; ++i) out.push_back(random_offset(d, 3, rng));
  return out;
}

Index uniform(Index lo, Index hi, std::mt19937_64& rng) { return std::uniform_int_distribution<Index>(lo, hi)(rng); }

/// Module of the given kind (0..8) reading `channels` inputs; outputs stay <= 16.
ParsevalModule random_module(int kind, Index channels, std::size_t d, std::mt19937_64& rng) {
  const std::uint64_t seed = rng();
  switch (kind) {
    case 0: {
      const Index p = uniform(1, std::max<Index>(1, 16 / channels), rng);
      return modules::Patch{distinct_offsets(p, d, rng), channels};
    }
    case 1: return modules::Mult{random_orthogonal(channels, seed), d};
    case 2: {
      const Index n = uniform(1, 16, rng);
      const Index n0 = uniform(1, n, rng);
      return modules::OneToN{random_frame(n, n0, seed), distinct_offsets(n0, d, rng)};
    }
    case 3: {
      const Index p = uniform(1, std::max<Index>(1, 16 / channels), rng);
      return modules::NToPN{random_orthogonal(p * channels, seed), distinct_offsets(p, d, rng), channels};
    }
    case 4: return modules::GenShift{any_offsets(channels, d, rng)};
    case 5: {
      const Index m = uniform(channels, 16, rng);
      return modules::FrameShift{random_frame(m, channels, seed), any_offsets(channels, d, rng)};
    }
    case 6:
      return modules::Usv{random_orthogonal(channels, seed), any_offsets(channels, d, rng),
                          random_orthogonal(channels, mix_seed(seed, 1))};
    case 7: {
      const Index k = uniform(0, channels, rng);
      return modules::Projection{random_orthogonal(channels, seed).leftCols(k), random_unit_shift(d, rng)};
    }
    default: return modules::Householder{random_unit_vector(channels, seed), random_unit_shift(d, rng)};
  }
}

Grid random_grid(std::size_t d, std::mt19937_64& rng) {
  if (d == 1) return Grid{uniform(4, 32, rng)};
  return Grid{uniform(4, 32, rng), uniform(4, 32, rng)};
}

struct ParsevalStats {
  double paraunitarity = 0, time_domain = 0, energy = 0, norm_dev = 0;
  void add(const Filter& h, const Grid& g, std::mt19937_64& rng) {
    const auto rep = is_parseval(h, g, 1e-9);
    paraunitarity = std::max(paraunitarity, rep.max_paraunitarity_defect);
    time_domain = std::max(time_domain, rep.max_time_domain_defect);
    norm_dev = std::max(norm_dev, std::abs(rep.operator_norm - 1.0));
    const Signal x = Signal::random(g, h.in_channels(), rng);
    const Signal y = apply(h, x);
    energy = std::max(energy, std::abs(oracle::sum_squares(y) / oracle::sum_squares(x) - 1.0));
  }
  bool ok() const { return paraunitarity <= 1e-9 && time_domain <= 1e-9 && energy <= 1e-10 && norm_dev <= 1e-9; }
  std::string str() const {
    return "paraunitarity=" + fmt("%.3g", paraunitarity) + " time_domain=" + fmt("%.3g", time_domain) +
           " energy=" + fmt("%.3g", energy) + " |norm-1|=" + fmt("%.3g", norm_dev);
  }
};

// ---------------------------------------------------------------- criteria

Outcome criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  ParsevalStats st;
  int builders = 0;
  for (int i = 0; i < 216; ++i) {
    const int kind = i % 9;
    const std::size_t d = 1 + (i / 9) % 2;
    const Index channels = kind == 2 ? 1 : uniform(1, 16, rng);
    const Filter h = compile(random_module(kind, channels, d, rng));
    st.add(h, random_grid(d, rng), rng);
    ++builders;
  }
  int chains = 0;
  for (int c = 0; c < 50; ++c) {
    const std::size_t d = 1 + c % 2;
    const Index length = uniform(1, 16, rng);
    Index channels = uniform(1, 8, rng);
    ModuleChain chain;
    for (Index k = 0; k < length; ++k) {
      int kind = static_cast<int>(uniform(0, 8, rng));
      if (kind == 2 && channels != 1) kind = 1;
      chain.push_back(random_module(kind, channels, d, rng));
      channels = out_channels(chain.back());
    }
    st.add(chain_compile(chain), random_grid(d, rng), rng);
    ++chains;
  }
  const double secs = seconds_since(t0);
  return {st.ok() && secs <= 60.0, "builders=" + std::to_string(builders) + " chains=" + std::to_string(chains) +
                                       " " + st.str() + " time=" + fmt("%.1fs", secs)};
}

Outcome criterion2() {
  std::mt19937_64 rng(202);
  double fft_vs_direct = 0, compose_vs_seq = 0, bins = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + t % 2;
    const Grid g = random_grid(d, rng);
    const Index n0 = uniform(1, 4, rng), n1 = uniform(1, 4, rng), n2 = uniform(1, 4, rng);
    const Filter h1 = oracle::random_filter(n1, n0, d, static_cast<int>(uniform(1, 6, rng)), 3, rng);
    const Filter h2 = oracle::random_filter(n2, n1, d, static_cast<int>(uniform(1, 6, rng)), 3, rng);
    const Signal x = Signal::random(g, n0, rng);
    fft_vs_direct = std::max(fft_vs_direct, oracle::rel_diff(apply_fft(h1, x), oracle::convolve(h1, x)));
    const Filter h21 = compose(h2, h1);
    compose_vs_seq = std::max(compose_vs_seq, oracle::rel_diff(apply(h21, x), apply(h2, apply(h1, x))));
    const auto r1 = freq_response(h1, g), r2 = freq_response(h2, g), r21 = freq_response(h21, g);
    for (Index k = 0; k < g.count(); ++k) bins = std::max(bins, (r21[k] - r2[k] * r1[k]).cwiseAbs().maxCoeff());
  }
  return {fft_vs_direct <= 1e-10 && compose_vs_seq <= 1e-10 && bins <= 1e-11,
          "fft_vs_direct=" + fmt("%.3g", fft_vs_direct) + " compose_vs_sequential=" + fmt("%.3g", compose_vs_seq) +
              " freq_response_product=" + fmt("%.3g", bins)};
}

Outcome criterion3() {
  std::mt19937_64 rng(303);
  double adj = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + t % 2;
    const Grid g = random_grid(d, rng);
    const Index m = uniform(1, 6, rng), n = uniform(1, 6, rng);
    const Filter h = oracle::random_filter(m, n, d, static_cast<int>(uniform(1, 6, rng)), 3, rng);
    const Signal x = Signal::random(g, n, rng);
    const Signal y = Signal::random(g, m, rng);
    const Signal hx = apply(h, x);
    const double lhs = oracle::inner(hx, y).real();
    const double rhs = oracle::inner(x, apply(adjoint(h), y)).real();
    adj = std::max(adj, std::abs(lhs - rhs) / (norm(hx) * norm(y)));
  }
  double idem = 0, self = 0;
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 1 + t % 2;
    const Index n = uniform(1, 4, rng);
    const Index m = uniform(n, 12, rng);
    const Filter h = compile(modules::FrameShift{random_frame(m, n, rng()), any_offsets(n, d, rng)});
    const Filter frame = compose(h, compile(random_module(6, n, d, rng)));
    const auto defects = gram_projector_check(frame, random_grid(d, rng), 5, rng());
    idem = std::max(idem, defects.idempotence);
    self = std::max(self, defects.self_adjointness);
  }
  return {adj <= 1e-11 && idem <= 1e-10 && self <= 1e-10,
          "adjoint_identity=" + fmt("%.3g", adj) + " gram_idempotence=" + fmt("%.3g", idem) +
              " gram_self_adjointness=" + fmt("%.3g", self)};
}

Outcome criterion4() {
  const Grid g{16};
  std::vector<std::array<int, 3>> found;
  int scanned = 0;
  for (int a = -10; a <= 10; ++a) {
    for (int b = -10; b <= 10; ++b) {
      for (int c = -10; c <= 10; ++c) {
        Filter h(1, 1, 1);
        h.add_tap({0}, Eigen::MatrixXd::Constant(1, 1, a / 10.0));
        h.add_tap({1}, Eigen::MatrixXd::Constant(1, 1, b / 10.0));
        h.add_tap({2}, Eigen::MatrixXd::Constant(1, 1, c / 10.0));
        ++scanned;
        if (is_parseval(canonicalize(h), g, 1e-6).passed) found.push_back({a, b, c});
      }
    }
  }
  std::set<std::array<int, 3>> expected;
  for (int k = 0; k < 3; ++k) {
    for (int s : {-10, 10}) {
      std::array<int, 3> e{0, 0, 0};
      e[static_cast<std::size_t>(k)] = s;
      expected.insert(e);
    }
  }
  const std::set<std::array<int, 3>> got(found.begin(), found.end());
  return {got == expected && found.size() == 6,
          "scanned=" + std::to_string(scanned) + " passing=" + std::to_string(found.size())};
}

Outcome criterion5() {
  std::mt19937_64 rng(505);
  double worst = 0, back = 0;
  for (int t = 0; t < 20; ++t) {
    WFactorization wf;
    for (int s = 0; s < 4; ++s) wf.w.push_back(random_orthogonal(4, rng()));
    for (int s = 0; s < 3; ++s) wf.shifts.push_back(any_offsets(4, 2, rng));
    const auto uf = to_u_form(wf);
    worst = std::max(worst, max_tap_difference(compile(wf), compile(uf)));
    back = std::max(back, max_tap_difference(compile(to_w_form(uf)), compile(wf)));
  }
  return {worst <= 1e-12 && back <= 1e-12,
          "chains=20 w_vs_u=" + fmt("%.3g", worst) + " roundtrip=" + fmt("%.3g", back)};
}

std::vector<ForwardModel> three_models(const Grid& g) {
  Filter blur(1, 1, 2);
  for (const auto& o : centered_offsets(9, 2)) blur.add_tap(o, Eigen::MatrixXd::Constant(1, 1, 1.0 / 9.0));
  MaskSpec cart;
  return {ForwardModel::identity(g), ForwardModel::blur(blur, g), ForwardModel::masked_fourier(make_mask(cart, g))};
}

Outcome criterion6() {
  std::mt19937_64 rng(606);
  const Grid g{8, 8};
  std::string detail;
  bool ok = true;
  for (const auto& a : three_models(g)) {
    const Signal s = Signal::random(g, 1, rng);
    const Measurement y = add_noise(a, model_apply(a, Signal::random(g, 1, rng)), 0.5, rng());
    const Signal grad = grad_quadratic(a, s, y);
    Signal fd(g, 1);
    const double h = 1e-5;
    for (Index k = 0; k < g.count(); ++k) {
      Signal sp = s, sm = s;
      sp(0, k) += h;
      sm(0, k) -= h;
      fd(0, k) = (data_fidelity(a, sp, y) - data_fidelity(a, sm, y)) / (2 * h);
    }
    const double rel = oracle::rel_diff(fd, grad);
    ok = ok && rel <= 1e-6;
    detail += std::string(a.name()) + "=" + fmt("%.3g", rel) + " ";
  }
  return {ok, detail};
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  const Grid g{64, 64};
  const Signal truth = phantom(g);
  MaskSpec spec;
  spec.acceleration = 4;
  const ForwardModel a = ForwardModel::masked_fourier(make_mask(spec, g));
  const Measurement y = add_noise(a, model_apply(a, truth), 10.0 / 255.0, 7);
  FrameThresholdDenoiser ft(wavelet_frame(2, 3), 0.015, g, {0});
  FbsConfig cfg;
  cfg.alpha = 1.0 / lipschitz_of_gradient(a);
  cfg.max_iters = 1000;
  cfg.tol = 1e-6;
  const auto r = fbs_solve(a, y, AveragedDenoiser{ft, 0.4}, cfg);
  const double zf = psnr(truth, zero_fill(a, y));
  const double pnp = psnr(truth, r.solution);
  const double secs = seconds_since(t0);
  const bool gap_ok = r.converged && !r.trace.empty() && r.trace.back() <= 1e-6;
  const bool gain_ok = pnp - zf >= 3.0;
  return {gap_ok && gain_ok && secs <= 120.0,
          std::string("gap_reached=") + (gap_ok ? "yes" : "no") + " iterations=" + std::to_string(r.iterations) +
              " final_gap=" + fmt("%.3g", r.trace.empty() ? 0.0 : r.trace.back()) + " psnr_zero_fill=" +
              fmt("%.2f", zf) + " psnr_pnp=" + fmt("%.2f", pnp) + " gain=" + fmt("%.2f", pnp - zf) +
              "dB (need >= 3) time=" + fmt("%.1fs", secs)};
}

Outcome criterion8() {
  const Grid g{32, 32};
  const Signal truth = phantom(g);
  FrameThresholdDenoiser ft(wavelet_frame(2, 2), 0.02, g, {0});
  const AveragedDenoiser d{ft, 0.4};
  std::string detail;
  bool ok = true;
  std::uint64_t seed = 800;
  for (const auto& a : three_models(g)) {
    FbsConfig cfg;
    cfg.alpha = 1.0 / lipschitz_of_gradient(a);
    cfg.max_iters = 3000;
    cfg.tol = 1e-9;
    cfg.record_trace = false;
    int converged = 0, passed = 0;
    double worst = -1e300;
    for (int t = 0; t < 20; ++t) {
      const Measurement y1 = add_noise(a, model_apply(a, truth), 10.0 / 255.0, ++seed);
      const Measurement y2 = add_noise(a, y1, 0.05, ++seed);
      const auto c = check_forward_stability(a, d, cfg, y1, y2);
      if (!c.converged) continue;
      ++converged;
      passed += c.pass;
      worst = std::max(worst, c.lhs - c.rhs - c.slack);
    }
    ok = ok && converged > 0 && passed == converged;
    detail += std::string(a.name()) + ":" + std::to_string(passed) + "/" + std::to_string(converged) +
              " converged (max lhs-rhs-slack=" + fmt("%.3g", worst) + ") ";
  }
  return {ok, detail};
}

Outcome criterion9() {
  const Grid g{32, 32};
  const Signal truth = phantom(g);
  const ForwardModel a = ForwardModel::identity(g);
  FrameThresholdDenoiser ft(wavelet_frame(2, 2), 0.02, g, {0});
  const AveragedDenoiser d{ft, 0.4};
  FbsConfig cfg;
  cfg.alpha = 1.0 / lipschitz_of_gradient(a);
  cfg.max_iters = 3000;
  cfg.tol = 1e-10;
  cfg.record_trace = false;
  int passed = 0;
  double ratio = 0;
  for (int t = 0; t < 20; ++t) {
    const Measurement y1 = add_noise(a, model_apply(a, truth), 10.0 / 255.0, 900 + 2 * t);
    const Measurement y2 = add_noise(a, y1, 0.05, 901 + 2 * t);
    const auto c = check_solution_stability(a, d, cfg, y1, y2, 0.9);
    passed += c.converged && c.pass;
    ratio = std::max(ratio, c.lhs / c.rhs);
  }
  return {passed == 20, "passed=" + std::to_string(passed) + "/20 max lhs/rhs=" + fmt("%.3g", ratio)};
}

double probe_ratio(const SignalMap& f, const Grid& g, Index channels, std::mt19937_64& rng) {
  const Signal x = Signal::random(g, channels, rng);
  Signal y = Signal::random(g, channels, rng);
  // Mix far and near pairs.
  std::uniform_real_distribution<double> u(-6, 0);
  y = x + std::pow(10.0, u(rng)) * y;
  return norm(f(y) - f(x)) / norm(y - x);
}

CnnDenoiser random_cnn(const Grid& g, std::mt19937_64& rng) {
  CnnDenoiser net;
  const Index n = 6;
  net.filters.push_back(spectral_normalize(oracle::random_filter(n, 1, 2, 5, 1, rng), g));
  net.filters.push_back(spectral_normalize(oracle::random_filter(n, n, 2, 5, 1, rng), g));
  net.filters.push_back(spectral_normalize(oracle::random_filter(1, n, 2, 5, 1, rng), g));
  std::vector<SplineActivation> per;
  std::normal_distribution<double> gauss;
  for (Index c = 0; c < n; ++c) {
    SplineActivation s = SplineActivation::identity(11, -2, 2);
    for (auto& v : s.values) v += 0.3 * gauss(rng);
    per.push_back(project_unit_lipschitz(s));
  }
  net.activations.push_back(ActivationLayer::spline_layer(per));
  net.activations.push_back(ActivationLayer::relu_layer());
  net.biases = {Eigen::VectorXd::Constant(n, 0.1), Eigen::VectorXd::Constant(n, -0.05),
                Eigen::VectorXd::Constant(1, 0.0)};
  return net;
}

Outcome criterion10() {
  std::mt19937_64 rng(1010);
  const Grid g{16, 16};
  const double fp = 1e-12;
  bool ok = true;
  std::string detail;
  auto track = [&](const std::string& name, const SignalMap& f, Index channels, double certified) {
    double worst = 0;
    for (int t = 0; t < 200; ++t) worst = std::max(worst, probe_ratio(f, g, channels, rng));
    ok = ok && worst <= certified * (1 + fp);
    detail += name + "=" + fmt("%.6f", worst) + "/" + fmt("%.6f", certified) + " ";
  };

  const ActivationLayer relu_layer = ActivationLayer::relu_layer();
  track("relu", relu_layer, 4, nonlinear_layer_lipschitz(relu_layer));

  std::vector<SplineActivation> per;
  std::normal_distribution<double> gauss;
  for (int c = 0; c < 4; ++c) {
    SplineActivation s = SplineActivation::identity(15, -1.5, 1.5);
    for (auto& v : s.values) v = 0.8 * v + 0.2 * gauss(rng);
    per.push_back(s);
  }
  const ActivationLayer spline_layer = ActivationLayer::spline_layer(per);
  const double spline_const = nonlinear_layer_lipschitz(spline_layer);
  track("spline", spline_layer, 4, spline_const);

  const Filter sn = spectral_normalize(oracle::random_filter(3, 2, 2, 6, 2, rng), g);
  track("normalized_filter", [&](const Signal& x) { return apply(sn, x); }, 2, operator_norm(sn, g));

  const CnnDenoiser net = random_cnn(g, rng);
  const auto cert = certify(net, g);
  ok = ok && cert.certified;
  track("cnn", [&](const Signal& x) { return cnn_forward(net, x); }, 1, cert.lipschitz_bound);

  double attained = 1e300;
  for (const auto* layer : {&relu_layer, &spline_layer}) {
    const auto probe = worst_case_probe(*layer, g, 4);
    const double c = nonlinear_layer_lipschitz(*layer);
    attained = std::min(attained, probe.ratio / c);
  }
  ok = ok && attained >= 1 - 1e-6;
  detail += "worst_case_probe/constant=" + fmt("%.12f", attained);
  return {ok, detail};
}

// ---------------------------------------------------------------- CLI determinism

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int status = -1;
  std::string stdout_text;
  std::vector<std::string> files;
};

CliRun run_cli(const fs::path& dir, int threads, const std::string& args, const std::vector<std::string>& outputs) {
  const fs::path out = dir / "stdout.txt";
  const std::string cmd = "cd '" + dir.string() + "' && PSVB_THREADS=" + std::to_string(threads) + " '" +
                          std::string(PSVB_BIN) + "' " + args + " > stdout.txt 2>/dev/null";
  CliRun r;
  const int raw = std::system(cmd.c_str());
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.stdout_text = slurp(out);
  for (const auto& f : outputs) r.files.push_back(slurp(dir / f));
  return r;
}

Outcome criterion11() {
  const fs::path root = fs::temp_directory_path() / ("psvb_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(root);
  auto setup = [&](const fs::path& dir) {
    fs::create_directories(dir);
    io::write_file(dir / "chain.json",
                   R"({"dims": 2, "in_channels": 1, "seed": 5, "modules": [
                        {"kind": "one_to_n", "offsets": {"centered": 4}},
                        {"kind": "householder_chain", "length": 6},
                        {"kind": "frame_shift", "channels": 8}]})");
    io::write_file(dir / "rot.json", R"({"dims": 2, "in_channels": 8, "modules": [{"kind": "usv"}]})");
    io::write_file(dir / "ft.json", R"({"type": "frame_threshold", "frame": "wavelet", "levels": 2, "tau": 0.02})");
    io::save(dir / "img.psvb", phantom(Grid{32, 32}));
  };

  struct Cmd {
    std::string args;
    std::vector<std::string> outputs;
  };
  const std::vector<Cmd> cmds{
      {"verify chain.json --grid 24x24 -o chain.psvb", {"chain.psvb"}},
      {"norm chain.psvb --grid 24x24 --oversample 3", {}},
      {"compose chain.json rot.json -o composed.psvb", {"composed.psvb"}},
      {"denoise img.psvb --denoiser ft.json --sigma 0.04 --seed 3 -o den.psvb", {"den.psvb"}},
      {"reconstruct img.psvb --grid 32x32 --seed 4 --max-iters 300 --tau 0.015 -o rec.psvb --zero-fill-out zf.psvb "
       "--trace-out trace.csv",
       {"rec.psvb", "zf.psvb", "trace.csv"}},
      {"stability phantom --grid 16x16 --trials 2 --max-iters 400 --seed 9 --l0 0.9", {}},
      {"mask --grid 32x32 --scheme random --rate 0.25 --seed 11 -o mask.psvb", {"mask.psvb"}},
      {"convert den.psvb den.csv", {"den.csv"}},
  };

  std::vector<std::vector<CliRun>> runs(2);
  const int threads[2] = {1, 4};
  for (int v = 0; v < 2; ++v) {
    const fs::path dir = root / ("threads" + std::to_string(threads[v]));
    setup(dir);
    for (const auto& c : cmds) runs[static_cast<std::size_t>(v)].push_back(run_cli(dir, threads[v], c.args, c.outputs));
  }
  bool ok = true;
  int identical = 0;
  std::string bad;
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    const auto& a = runs[0][i];
    const auto& b = runs[1][i];
    bool same = a.status == 0 && b.status == 0 && a.stdout_text == b.stdout_text && a.files == b.files &&
                !a.stdout_text.empty();
    for (const auto& f : a.files) same = same && !f.empty();
    identical += same;
    if (!same) bad += " [" + cmds[i].args.substr(0, cmds[i].args.find(' ')) + " status=" + std::to_string(a.status) + "]";
    ok = ok && same;
  }

  // Round trip of every file kind.
  std::mt19937_64 rng(1111);
  const Grid g{6, 10};
  std::vector<SplineActivation> splines{SplineActivation::identity(7), SplineActivation::sampled(
                                                                           [](double t) { return std::sin(t); }, 7)};
  const std::string sig = io::encode_signal(Signal::random(g, 3, rng));
  const std::string csig = io::encode_signal(ComplexSignal::random(g, 2, rng));
  const std::string fil = io::encode_filter(oracle::random_filter(3, 2, 2, 5, 2, rng));
  const std::string msk = io::encode_mask(make_mask({MaskSpec::Scheme::radial, 0.3, 6}, Grid{16, 16}));
  const std::string spl = io::encode_splines(splines);
  const std::string wts = io::encode_weights(random_cnn(Grid{8, 8}, rng));
  int round_trips = 0;
  round_trips += io::encode_signal(io::decode_signal(sig)) == sig;
  round_trips += io::encode_signal(io::decode_complex_signal(csig)) == csig;
  round_trips += io::encode_filter(io::decode_filter(fil)) == fil;
  round_trips += io::encode_mask(io::decode_mask(msk)) == msk;
  round_trips += io::encode_splines(io::decode_splines(spl)) == spl;
  round_trips += io::encode_weights(io::decode_weights(wts)) == wts;
  ok = ok && round_trips == 6;

  fs::remove_all(root);
  return {ok, "commands_identical=" + std::to_string(identical) + "/" + std::to_string(cmds.size()) +
                  " (PSVB_THREADS=1 vs 4) round_trips=" + std::to_string(round_trips) + "/6" + bad};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"Parseval suite", criterion1},
      {"Oracle equivalence", criterion2},
      {"Adjoint calculus", criterion3},
      {"Scalar 3-tap falsifier", criterion4},
      {"W/U factorization equivalence", criterion5},
      {"Gradient check", criterion6},
      {"FBS convergence and PSNR gain", criterion7},
      {"Forward stability audit", criterion8},
      {"Solution stability audit", criterion9},
      {"Lipschitz certification", criterion10},
      {"Determinism and round-trip", criterion11},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
