// Copyright 2026 The sledsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Qubit linear algebra: Pauli operators, density matrices, Bloch vectors and
// Liouville-space (vectorized) superoperators.
//
// Conventions used throughout the library:
//   * basis {|0>, |1>}, sigma_z |0> = +|0>; |1> is the excited state, so the
//     free Hamiltonian is H_S = -omega_q sigma_z / 2;
//   * sigma_x = |0><1| + |1><0|, sigma_y = i|1><0| - i|0><1|;
//   * vectorization stacks columns, so vec(A rho B) = (B^T kron A) vec(rho)
//     and vec(rho) = (rho00, rho10, rho01, rho11).

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace sledsim {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
/// 4x4 map on column-stacked density matrices (Liouvillian or propagator).
using Superop = Eigen::Matrix4cd;
using LiouvilleVec = Eigen::Vector4cd;
using TraceRow = Eigen::RowVector4cd;

inline constexpr double kStateTolerance = 1e-12;
/// Trace slack accepted from propagated states (cumulative stepping drift).
inline constexpr double kPropagatedTolerance = 1e-9;

Mat2 identity2();
Mat2 sigma_x();
Mat2 sigma_y();
Mat2 sigma_z();
/// |i><j|
Mat2 ket_bra(int i, int j);

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
};

/// Hermitian, unit-trace 2x2 matrix. Positivity is not part of the type
/// because single stochastic trajectories may leave the Bloch ball; use
/// is_positive() where a physical state is required.
class DensityMatrix {
 public:
  /// Maximally mixed state I/2.
  DensityMatrix();

  /// Validates Hermiticity and unit trace within `tol` (absolute).
  static DensityMatrix from_matrix(const Mat2& m, double tol = kStateTolerance);
  /// No validation; for propagated states whose checks happen upstream.
  static DensityMatrix unchecked(const Mat2& m);

  static DensityMatrix ground();   ///< |0><0|
  static DensityMatrix excited();  ///< |1><1|
  static DensityMatrix maximally_mixed();

  const Mat2& matrix() const { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }

  Complex trace() const { return m_.trace(); }
  double hermiticity_error() const;
  /// Real eigenvalues of the Hermitian part, ascending.
  std::array<double, 2> eigenvalues() const;
  bool is_positive(double tol) const;

 private:
  explicit DensityMatrix(const Mat2& m) : m_(m) {}
  Mat2 m_;
};

/// Tr[sigma_i rho]; throws InvalidState when the trace differs from one.
BlochVector to_bloch(const DensityMatrix& rho);
/// (I + v.sigma)/2; throws InvalidState when |v| > 1 + 1e-9.
DensityMatrix from_bloch(const BlochVector& v);

/// Bloch vector of exp(-i sigma_z w t/2) rho exp(+i sigma_z w t/2).
BlochVector rotating_frame_bloch(const DensityMatrix& rho, double omega_d,
                                 double t);

/// F = Tr[r1 r2] + 2 sqrt(det r1 det r2), clamped to [0, 1]. Eigenvalue
/// residues in [-1e-10, 0) are clipped; anything more negative throws.
double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2);

LiouvilleVec vectorize(const DensityMatrix& rho);
LiouvilleVec vectorize(const Mat2& m);
/// Inverse of vectorize. Does not validate; see DensityMatrix::from_matrix.
Mat2 devectorize(const LiouvilleVec& v);

/// Superoperator of rho -> A rho.
Superop left_multiplication(const Mat2& a);
/// Superoperator of rho -> rho B.
Superop right_multiplication(const Mat2& b);
/// rho -> [A, rho] for arbitrary A.
Superop commutator_action(const Mat2& a);
/// rho -> {A, rho}.
Superop anticommutator_action(const Mat2& a);

/// rho -> -i[H, rho]. Throws DomainError unless H is Hermitian.
Superop commutator_superop(const Mat2& h);
/// D_ij(rho) = |i><j| rho |j><i| - {|j><j|, rho}/2, for i, j in {0, 1}.
Superop dissipator_superop(int i, int j);

/// Row vector t with t . vec(rho) = Tr rho.
TraceRow trace_functional();
/// max_k |(t L)_k|; zero for every trace-preserving generator.
double trace_annihilation_error(const Superop& l);

/// exp(L) by scaling and squaring around a Taylor kernel. Throws DomainError
/// on non-finite entries.
Superop matrix_exp(const Superop& l);
/// exp(L) v without forming exp(L). Intended for small ||L|| (one time step);
/// larger norms are split into equal sub-steps.
LiouvilleVec expm_action(const Superop& l, const LiouvilleVec& v);

/// Normalized fixed point of a Liouvillian with a unique steady state,
/// solved from L v = 0 together with Tr v = 1.
DensityMatrix stationary_state(const Superop& l);

}  // namespace sledsim
