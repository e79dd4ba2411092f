#include "parseval/builders.hpp"

#include <cmath>
#include <random>

#include "parseval/parallel.hpp"
#include "parseval/seed.hpp"

namespace parseval {

namespace {

constexpr double kFrameTol = 1e-9;
constexpr double kBasisTol = 1e-12;

void require_frame(const Eigen::MatrixXd& u, const char* what) {
  if (u.rows() < u.cols()) {
    throw DimensionError(std::string(what) + ": matrix has more columns than rows");
  }
  double d = frame_defect(u);
  if (!(d <= kFrameTol)) {
    throw ValueError(std::string(what) + ": columns are not orthonormal (defect " + std::to_string(d) + ")");
  }
}

void require_square_orthogonal(const Eigen::MatrixXd& u, const char* what) {
  if (u.rows() != u.cols()) throw DimensionError(std::string(what) + ": matrix must be square");
  require_frame(u, what);
}

std::size_t common_dims(const TapSet& offsets, const char* what) {
  if (offsets.empty()) throw DimensionError(std::string(what) + ": offset list is empty");
  const std::size_t d = offsets.front().size();
  if (d == 0) throw DimensionError(std::string(what) + ": zero-dimensional offset");
  for (const auto& o : offsets) {
    if (o.size() != d) throw DimensionError(std::string(what) + ": offsets differ in dimension");
  }
  return d;
}

void require_unit_shift(const Offset& k1) {
  if (k1.empty()) throw DimensionError("unit shift has no components");
  bool nonzero = false;
  for (Index c : k1) {
    if (c < -1 || c > 1) throw ValueError("unit shift components must lie in [-1, 1]");
    nonzero = nonzero || c != 0;
  }
  if (!nonzero) throw ValueError("unit shift must be nonzero");
}

}  // namespace

double frame_defect(const Eigen::MatrixXd& u) {
  return (u.transpose() * u - Eigen::MatrixXd::Identity(u.cols(), u.cols())).norm();
}

OrthoMatrix random_orthogonal(Index n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("random_orthogonal: size must be >= 1");
  if (n == 1) return Eigen::MatrixXd::Ones(1, 1);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd g(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Index i = 0; i < n; ++i) {
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  }
  return q;
}

OrthoMatrix random_frame(Index rows, Index cols, std::uint64_t seed) {
  if (cols > rows) throw DimensionError("random_frame: a tight frame needs rows >= cols");
  return random_orthogonal(rows, seed).leftCols(cols);
}

Eigen::VectorXd random_unit_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd u(n);
  for (Index i = 0; i < n; ++i) u(i) = gauss(rng);
  return u / u.norm();
}

OrthoMatrix dct_matrix(Index n) {
  Eigen::MatrixXd c(n, n);
  for (Index k = 0; k < n; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(n));
    for (Index i = 0; i < n; ++i) {
      c(k, i) = scale * std::cos(M_PI * (2.0 * i + 1.0) * k / (2.0 * n));
    }
  }
  return c;
}

TapSet centered_offsets(Index count, std::size_t dims) {
  if (count < 1) throw DimensionError("centered_offsets: count must be positive");
  TapSet out;
  const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(count))));
  if (dims == 2 && side * side == count) {
    const Index start = -(side - 1) / 2;
    for (Index r = 0; r < side; ++r) {
      for (Index c = 0; c < side; ++c) out.push_back({start + r, start + c});
    }
    return out;
  }
  const Index start = -(count - 1) / 2;
  for (Index i = 0; i < count; ++i) {
    Offset o(dims, 0);
    o.back() = start + i;
    out.push_back(std::move(o));
  }
  return out;
}

Filter build_patch(const TapSet& kset, Index channels) {
  const std::size_t d = common_dims(kset, "patch");
  if (channels < 1) throw DimensionError("patch: channel count must be positive");
  const auto m = static_cast<Index>(kset.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Filter h(m * channels, channels, d);
  for (Index i = 0; i < m; ++i) {
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(m * channels, channels);
    block.middleRows(i * channels, channels) = scale * Eigen::MatrixXd::Identity(channels, channels);
    h.add_tap(kset[static_cast<std::size_t>(i)], std::move(block));
  }
  return canonicalize(h);
}

Filter build_mult(const OrthoMatrix& u, std::size_t dims) {
  require_frame(u, "mult");
  return Filter::delta(u, zero_offset(dims));
}

Filter build_one_to_N(const OrthoMatrix& u, const TapSet& kset) {
  const std::size_t d = common_dims(kset, "one_to_N");
  if (u.cols() != static_cast<Index>(kset.size())) {
    throw DimensionError("one_to_N: matrix needs one column per offset");
  }
  require_frame(u, "one_to_N");
  const double scale = 1.0 / std::sqrt(static_cast<double>(kset.size()));
  Filter h(u.rows(), 1, d);
  for (std::size_t n = 0; n < kset.size(); ++n) h.add_tap(kset[n], scale * u.col(static_cast<Index>(n)));
  return canonicalize(h);
}

Filter build_N_to_pN(const OrthoMatrix& u, const TapSet& kset, Index channels) {
  const std::size_t d = common_dims(kset, "N_to_pN");
  const auto p = static_cast<Index>(kset.size());
  if (channels < 1 || u.rows() != p * channels) {
    throw DimensionError("N_to_pN: matrix must be pN x pN with p = number of offsets");
  }
  require_square_orthogonal(u, "N_to_pN");
  const double scale = 1.0 / std::sqrt(static_cast<double>(p));
  Filter h(p * channels, channels, d);
  for (Index i = 0; i < p; ++i) h.add_tap(kset[static_cast<std::size_t>(i)], scale * u.middleCols(i * channels, channels));
  return canonicalize(h);
}

Filter build_gen_shift(const TapSet& shifts) {
  const std::size_t d = common_dims(shifts, "gen_shift");
  const auto n = static_cast<Index>(shifts.size());
  Filter h(n, n, d);
  for (Index i = 0; i < n; ++i) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
    e(i, i) = 1.0;
    h.add_tap(shifts[static_cast<std::size_t>(i)], std::move(e));
  }
  return canonicalize(h);
}

Filter build_frame_shift(const OrthoMatrix& a, const TapSet& shifts) {
  const std::size_t d = common_dims(shifts, "frame_shift");
  if (a.cols() != static_cast<Index>(shifts.size())) {
    throw DimensionError("frame_shift: frame needs one column per shift");
  }
  require_frame(a, "frame_shift");
  const Index n = a.cols();
  Filter h(a.rows(), n, d);
  for (Index i = 0; i < n; ++i) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(a.rows(), n);
    t.col(i) = a.col(i);
    h.add_tap(shifts[static_cast<std::size_t>(i)], std::move(t));
  }
  return canonicalize(h);
}

Filter build_usv(const OrthoMatrix& u, const TapSet& shifts, const OrthoMatrix& v) {
  const std::size_t d = common_dims(shifts, "usv");
  const auto n = static_cast<Index>(shifts.size());
  if (u.rows() != n || v.rows() != n) throw DimensionError("usv: U and V must be N x N with N shifts");
  require_square_orthogonal(u, "usv (U)");
  require_square_orthogonal(v, "usv (V)");
  Filter h(n, n, d);
  for (Index i = 0; i < n; ++i) h.add_tap(shifts[static_cast<std::size_t>(i)], u.col(i) * v.col(i).transpose());
  return canonicalize(h);
}

Filter build_projection(const Eigen::MatrixXd& range_basis, const Offset& k1) {
  require_unit_shift(k1);
  const Index n = range_basis.rows();
  if (n < 1) throw DimensionError("projection: basis vectors must have at least one entry");
  if (range_basis.cols() > n) throw DimensionError("projection: rank exceeds dimension");
  const double d = frame_defect(range_basis);
  if (!(d <= kBasisTol)) {
    throw ValueError("projection: range basis is not orthonormal (defect " + std::to_string(d) + ")");
  }
  const Eigen::MatrixXd p = range_basis * range_basis.transpose();
  Filter h(n, n, k1.size());
  h.add_tap(zero_offset(k1.size()), Eigen::MatrixXd::Identity(n, n) - p);
  h.add_tap(k1, p);
  return canonicalize(h);
}

Filter build_householder(const Eigen::VectorXd& u, const Offset& k1) {
  if (u.size() < 1) throw DimensionError("householder: empty vector");
  if (!(std::abs(u.norm() - 1.0) <= kBasisTol)) throw ValueError("householder: vector must have unit norm");
  return build_projection(Eigen::MatrixXd(u), k1);
}

namespace {

struct Compiler {
  Filter operator()(const modules::Patch& m) const { return build_patch(m.offsets, m.channels); }
  Filter operator()(const modules::Mult& m) const { return build_mult(m.u, m.dims); }
  Filter operator()(const modules::OneToN& m) const { return build_one_to_N(m.u, m.offsets); }
  Filter operator()(const modules::NToPN& m) const { return build_N_to_pN(m.u, m.offsets, m.channels); }
  Filter operator()(const modules::GenShift& m) const { return build_gen_shift(m.shifts); }
  Filter operator()(const modules::FrameShift& m) const { return build_frame_shift(m.a, m.shifts); }
  Filter operator()(const modules::Usv& m) const { return build_usv(m.u, m.shifts, m.v); }
  Filter operator()(const modules::Projection& m) const { return build_projection(m.basis, m.shift); }
  Filter operator()(const modules::Householder& m) const { return build_householder(m.u, m.shift); }
};

struct Channels {
  bool input;
  Index operator()(const modules::Patch& m) const {
    return input ? m.channels : m.channels * static_cast<Index>(m.offsets.size());
  }
  Index operator()(const modules::Mult& m) const { return input ? m.u.cols() : m.u.rows(); }
  Index operator()(const modules::OneToN& m) const { return input ? 1 : m.u.rows(); }
  Index operator()(const modules::NToPN& m) const { return input ? m.channels : m.u.rows(); }
  Index operator()(const modules::GenShift& m) const { return static_cast<Index>(m.shifts.size()); }
  Index operator()(const modules::FrameShift& m) const { return input ? m.a.cols() : m.a.rows(); }
  Index operator()(const modules::Usv& m) const { return m.u.rows(); }
  Index operator()(const modules::Projection& m) const { return m.basis.rows(); }
  Index operator()(const modules::Householder& m) const { return m.u.size(); }
};

void check_interfaces(const ModuleChain& chain) {
  if (chain.empty()) throw DimensionError("module chain is empty");
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (out_channels(chain[i]) < in_channels(chain[i])) {
      throw DimensionError("module " + std::to_string(i) + " (" + kind_name(chain[i]) + ") reduces channels");
    }
    if (i > 0 && in_channels(chain[i]) != out_channels(chain[i - 1])) {
      throw DimensionError("module " + std::to_string(i) + " (" + kind_name(chain[i]) + ") expects " +
                           std::to_string(in_channels(chain[i])) + " channels, previous module produces " +
                           std::to_string(out_channels(chain[i - 1])));
    }
  }
}

std::vector<Filter> compile_all(const ModuleChain& chain) {
  check_interfaces(chain);
  std::vector<Filter> parts(chain.size());
  parallel_for(chain.size(), [&](std::size_t i) { parts[i] = compile(chain[i]); });
  return parts;
}

}  // namespace

Filter compile(const ParsevalModule& m) { return std::visit(Compiler{}, m); }
Index in_channels(const ParsevalModule& m) { return std::visit(Channels{true}, m); }
Index out_channels(const ParsevalModule& m) { return std::visit(Channels{false}, m); }

std::string kind_name(const ParsevalModule& m) {
  static const char* names[] = {"patch",       "mult", "one_to_n",   "n_to_pn",    "gen_shift",
                                "frame_shift", "usv",  "projection", "householder"};
  return names[m.index()];
}

Filter chain_compile(const ModuleChain& chain) {
  std::vector<Filter> parts = compile_all(chain);
  Filter h = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) h = compose(parts[i], h);
  return h;
}

Filter chain_compile_adjoint(const ModuleChain& chain) {
  std::vector<Filter> parts = compile_all(chain);
  Filter h = adjoint(parts.back());
  for (std::size_t i = parts.size() - 1; i-- > 0;) h = compose(adjoint(parts[i]), h);
  return h;
}

ModuleChain householder_chain(Index channels, std::size_t dims, Index length, std::uint64_t seed) {
  ModuleChain chain;
  for (Index i = 0; i < length; ++i) {
    const std::size_t axis = dims - 1 - static_cast<std::size_t>(i) % dims;
    chain.push_back(modules::Householder{random_unit_vector(channels, mix_seed(seed, static_cast<std::uint64_t>(i))),
                                         unit_offset(dims, axis)});
  }
  return chain;
}

UFactorization to_u_form(const WFactorization& wf) {
  const std::size_t s = wf.shifts.size();
  if (wf.w.size() != s + 1) throw DimensionError("W factorization needs one more matrix than shift sets");
  UFactorization uf;
  uf.shifts = wf.shifts;
  Eigen::MatrixXd prefix = wf.w.front();  // W_i ... W_1
  uf.u.push_back(prefix.transpose());
  for (std::size_t i = 1; i <= s; ++i) {
    prefix = wf.w[i] * prefix;
    uf.u.push_back(prefix.transpose());
  }
  return uf;
}

WFactorization to_w_form(const UFactorization& uf) {
  const std::size_t s = uf.shifts.size();
  if (uf.u.size() != s + 1) throw DimensionError("U factorization needs one more matrix than shift sets");
  WFactorization wf;
  wf.shifts = uf.shifts;
  wf.w.push_back(uf.u.front().transpose());
  for (std::size_t i = 1; i <= s; ++i) wf.w.push_back(uf.u[i].transpose() * uf.u[i - 1]);
  return wf;
}

Filter compile(const WFactorization& wf) {
  if (wf.shifts.empty() || wf.w.size() != wf.shifts.size() + 1) {
    throw DimensionError("W factorization needs at least one shift set and one more matrix");
  }
  const std::size_t d = common_dims(wf.shifts.front(), "W factorization");
  Filter h = build_mult(wf.w.front(), d);
  for (std::size_t i = 0; i < wf.shifts.size(); ++i) {
    h = compose(build_gen_shift(wf.shifts[i]), h);
    h = compose(build_mult(wf.w[i + 1], d), h);
  }
  return h;
}

Filter compile(const UFactorization& uf) {
  if (uf.shifts.empty() || uf.u.size() != uf.shifts.size() + 1) {
    throw DimensionError("U factorization needs at least one shift set and one more matrix");
  }
  const std::size_t d = common_dims(uf.shifts.front(), "U factorization");
  Filter h = build_usv(uf.u[0], uf.shifts[0], uf.u[0]);
  for (std::size_t i = 1; i < uf.shifts.size(); ++i) h = compose(build_usv(uf.u[i], uf.shifts[i], uf.u[i]), h);
  return compose(build_mult(uf.u.back().transpose(), d), h);
}

}  // namespace parseval
