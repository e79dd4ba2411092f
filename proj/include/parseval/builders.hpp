#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "parseval/filter.hpp"

namespace parseval {

/// Real orthogonal (square) or orthonormal-column (rectangular, 1-tight frame) matrix.
using OrthoMatrix = Eigen::MatrixXd;

/// Ordered list of d-vectors; duplicates allowed where a builder says so.
using TapSet = std::vector<Offset>;

/// Frobenius norm of U^T U - I.
double frame_defect(const Eigen::MatrixXd& u);

/// Seeded Gaussian matrix orthonormalized by QR with the triangular factor's
/// diagonal forced positive.
OrthoMatrix random_orthogonal(Index n, std::uint64_t seed);

/// First `cols` columns of random_orthogonal(rows, seed).
OrthoMatrix random_frame(Index rows, Index cols, std::uint64_t seed);

Eigen::VectorXd random_unit_vector(Index n, std::uint64_t seed);

/// Orthonormal DCT-II matrix; row k is the k-th cosine atom.
OrthoMatrix dct_matrix(Index n);

/// Contiguous block of `count` offsets centered at the origin: a square
/// s x s window when dims == 2 and count == s^2, otherwise a line along the
/// last axis. count == 3 in 1-D gives {-1, 0, 1}.
TapSet centered_offsets(Index count, std::size_t dims);

namespace modules {

struct Patch {
  TapSet offsets;
  Index channels = 1;
};
struct Mult {
  OrthoMatrix u;
  std::size_t dims = 1;
};
struct OneToN {
  OrthoMatrix u;  ///< N x N0 with orthonormal columns, N0 = offsets.size()
  TapSet offsets;
};
struct NToPN {
  OrthoMatrix u;  ///< pN x pN orthogonal
  TapSet offsets;  ///< size p
  Index channels = 1;
};
struct GenShift {
  TapSet shifts;
};
struct FrameShift {
  OrthoMatrix a;  ///< M x N, A^T A = I
  TapSet shifts;
};
struct Usv {
  OrthoMatrix u;
  TapSet shifts;
  OrthoMatrix v;
};
struct Projection {
  Eigen::MatrixXd basis;  ///< N x k orthonormal columns spanning the range of P
  Offset shift;
};
struct Householder {
  Eigen::VectorXd u;
  Offset shift;
};

}  // namespace modules

using ParsevalModule =
    std::variant<modules::Patch, modules::Mult, modules::OneToN, modules::NToPN, modules::GenShift,
                 modules::FrameShift, modules::Usv, modules::Projection, modules::Householder>;

/// Modules in application order; channel counts must chain and never shrink.
using ModuleChain = std::vector<ParsevalModule>;

Filter build_patch(const TapSet& kset, Index channels);
Filter build_mult(const OrthoMatrix& u, std::size_t dims);
Filter build_one_to_N(const OrthoMatrix& u, const TapSet& kset);
Filter build_N_to_pN(const OrthoMatrix& u, const TapSet& kset, Index channels);
Filter build_gen_shift(const TapSet& shifts);
Filter build_frame_shift(const OrthoMatrix& a, const TapSet& shifts);
Filter build_usv(const OrthoMatrix& u, const TapSet& shifts, const OrthoMatrix& v);
Filter build_projection(const Eigen::MatrixXd& range_basis, const Offset& k1);
Filter build_householder(const Eigen::VectorXd& u, const Offset& k1);

Filter compile(const ParsevalModule& m);
Index in_channels(const ParsevalModule& m);
Index out_channels(const ParsevalModule& m);
std::string kind_name(const ParsevalModule& m);

/// H_I * ... * H_1 for a chain applied first-to-last.
Filter chain_compile(const ModuleChain& chain);

/// H_1^{Tv} * ... * H_I^{Tv}: the transposed flow graph.
Filter chain_compile_adjoint(const ModuleChain& chain);

/// N -> N chain of `length` Householder elements whose unit shifts cycle
/// through the canonical axes (0,..,1), (0,..,1,0), ...
ModuleChain householder_chain(Index channels, std::size_t dims, Index length, std::uint64_t seed);

/// W_{S+1} S^{K_S} W_S ... W_2 S^{K_1} W_1
struct WFactorization {
  std::vector<OrthoMatrix> w;  ///< S + 1 matrices
  std::vector<TapSet> shifts;  ///< S shift sets
};

/// U_{S+1}^T (U_S S^{K_S} U_S^T) ... (U_1 S^{K_1} U_1^T)
struct UFactorization {
  std::vector<OrthoMatrix> u;
  std::vector<TapSet> shifts;
};

UFactorization to_u_form(const WFactorization& wf);
WFactorization to_w_form(const UFactorization& uf);
Filter compile(const WFactorization& wf);
Filter compile(const UFactorization& uf);

}  // namespace parseval
