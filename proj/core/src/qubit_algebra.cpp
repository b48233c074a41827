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

#include "sledsim/qubit_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sledsim/errors.hpp"

namespace sledsim {
namespace {

constexpr Complex kI{0.0, 1.0};

// Eigenvalue residues of a valid state may dip this far below zero.
constexpr double kFidelityClip = 1e-10;

// Kronecker product of two 2x2 matrices.
Superop kron(const Mat2& x, const Mat2& y) {
  Superop out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = x(i, j) * y(k, l);
  return out;
}

double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

double one_norm(const Superop& l) {
  return l.cwiseAbs().colwise().sum().maxCoeff();
}

std::array<double, 2> hermitian_eigenvalues(const Mat2& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const Complex b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
  const double mean = 0.5 * (a + d);
  const double radius = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
  return {mean - radius, mean + radius};
}

// Determinant of a qubit state from its clipped eigenvalues.
double clipped_determinant(const DensityMatrix& rho) {
  auto ev = rho.eigenvalues();
  for (double& e : ev) {
    if (e < -kFidelityClip) {
      std::ostringstream msg;
      msg << "fidelity: eigenvalue " << e << " below -" << kFidelityClip;
      throw InvalidState(msg.str());
    }
    e = std::max(e, 0.0);
  }
  return ev[0] * ev[1];
}

}  // namespace

Mat2 identity2() { return Mat2::Identity(); }

Mat2 sigma_x() {
  Mat2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Mat2 sigma_y() {
  Mat2 m;
  m << 0.0, -kI, kI, 0.0;
  return m;
}

Mat2 sigma_z() {
  Mat2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Mat2 ket_bra(int i, int j) {
  if (i < 0 || i > 1 || j < 0 || j > 1) throw DomainError("ket_bra: index out of {0, 1}");
  Mat2 m = Mat2::Zero();
  m(i, j) = 1.0;
  return m;
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

DensityMatrix::DensityMatrix() : m_(0.5 * Mat2::Identity()) {}

DensityMatrix DensityMatrix::from_matrix(const Mat2& m, double tol) {
  if (!m.allFinite()) throw InvalidState("density matrix has non-finite entries");
  const double herm = max_abs(m - m.adjoint());
  if (herm > tol) {
    std::ostringstream msg;
    msg << "density matrix not Hermitian (deviation " << herm << ")";
    throw InvalidState(msg.str());
  }
  const double tr_err = std::abs(m.trace() - 1.0);
  if (tr_err > tol) {
    std::ostringstream msg;
    msg << "density matrix trace deviates from 1 by " << tr_err;
    throw InvalidState(msg.str());
  }
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::unchecked(const Mat2& m) { return DensityMatrix(m); }

DensityMatrix DensityMatrix::ground() { return DensityMatrix(ket_bra(0, 0)); }
DensityMatrix DensityMatrix::excited() { return DensityMatrix(ket_bra(1, 1)); }
DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(); }

double DensityMatrix::hermiticity_error() const { return max_abs(m_ - m_.adjoint()); }

std::array<double, 2> DensityMatrix::eigenvalues() const { return hermitian_eigenvalues(m_); }

bool DensityMatrix::is_positive(double tol) const { return eigenvalues()[0] >= -tol; }

BlochVector to_bloch(const DensityMatrix& rho) {
  const double tr_err = std::abs(rho.trace() - 1.0);
  if (tr_err > kPropagatedTolerance) {
    std::ostringstream msg;
    msg << "to_bloch: trace deviates from 1 by " << tr_err;
    throw InvalidState(msg.str());
  }
  const Mat2& m = rho.matrix();
  return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

DensityMatrix from_bloch(const BlochVector& v) {
  if (!(v.norm() <= 1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "from_bloch: |v| = " << v.norm() << " exceeds 1";
    throw InvalidState(msg.str());
  }
  Mat2 m = 0.5 * (identity2() + v.x * sigma_x() + v.y * sigma_y() + v.z * sigma_z());
  return DensityMatrix::unchecked(m);
}

BlochVector rotating_frame_bloch(const DensityMatrix& rho, double omega_d, double t) {
  const double half = 0.5 * omega_d * t;
  Mat2 u = Mat2::Zero();
  u(0, 0) = std::exp(-kI * half);
  u(1, 1) = std::exp(kI * half);
  const Mat2 rotated = u * rho.matrix() * u.adjoint();
  // The z component is frame independent; keep it bit-identical.
  BlochVector v = to_bloch(DensityMatrix::unchecked(rotated));
  v.z = (rho(0, 0) - rho(1, 1)).real();
  return v;
}

double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  const Mat2& a = rho1.matrix();
  const Mat2& b = rho2.matrix();
  // Tr[ab] written so that swapping a and b reproduces the same sum.
  const double diag = (a(0, 0) * b(0, 0)).real() + (a(1, 1) * b(1, 1)).real();
  const double offd = (a(0, 1) * b(1, 0)).real() + (a(1, 0) * b(0, 1)).real();
  const double overlap = diag + offd;
  const double det = clipped_determinant(rho1) * clipped_determinant(rho2);
  const double f = overlap + 2.0 * std::sqrt(std::max(det, 0.0));
  return std::clamp(f, 0.0, 1.0);
}

LiouvilleVec vectorize(const Mat2& m) {
  LiouvilleVec v;
  v << m(0, 0), m(1, 0), m(0, 1), m(1, 1);
  return v;
}

LiouvilleVec vectorize(const DensityMatrix& rho) { return vectorize(rho.matrix()); }

Mat2 devectorize(const LiouvilleVec& v) {
  Mat2 m;
  m << v(0), v(2), v(1), v(3);
  return m;
}

Superop left_multiplication(const Mat2& a) { return kron(identity2(), a); }

Superop right_multiplication(const Mat2& b) { return kron(b.transpose(), identity2()); }

Superop commutator_action(const Mat2& a) {
  return left_multiplication(a) - right_multiplication(a);
}

Superop anticommutator_action(const Mat2& a) {
  return left_multiplication(a) + right_multiplication(a);
}

Superop commutator_superop(const Mat2& h) {
  if (!h.allFinite()) throw DomainError("commutator_superop: non-finite Hamiltonian");
  const double scale = std::max(1.0, max_abs(h));
  if (max_abs(h - h.adjoint()) > 1e-12 * scale)
    throw DomainError("commutator_superop: Hamiltonian is not Hermitian");
  return -kI * commutator_action(h);
}

Superop dissipator_superop(int i, int j) {
  const Mat2 jump = ket_bra(i, j);
  const Mat2 proj = ket_bra(j, j);
  // A rho A^dagger -> conj(A) kron A; the jump operator is real.
  return kron(jump.conjugate(), jump) - 0.5 * anticommutator_action(proj);
}

TraceRow trace_functional() {
  TraceRow t;
  t << 1.0, 0.0, 0.0, 1.0;
  return t;
}

double trace_annihilation_error(const Superop& l) {
  return (trace_functional() * l).cwiseAbs().maxCoeff();
}

Superop matrix_exp(const Superop& l) {
  if (!l.allFinite()) throw DomainError("matrix_exp: non-finite entries");
  const double norm = one_norm(l);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Superop a = l / std::ldexp(1.0, squarings);

  // ||a|| <= 1/2: the Taylor remainder after 30 terms is far below 1 ulp.
  Superop sum = Superop::Identity();
  Superop term = Superop::Identity();
  for (int k = 1; k <= 30; ++k) {
    term = (term * a) / static_cast<double>(k);
    sum += term;
    if (one_norm(term) <= 1e-18 * one_norm(sum)) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

LiouvilleVec expm_action(const Superop& l, const LiouvilleVec& v) {
  // |re| + |im| bounds |z| from above and avoids a hypot per entry.
  double norm = 0.0;
  for (int c = 0; c < 4; ++c) {
    double col = 0.0;
    for (int r = 0; r < 4; ++r) col += std::abs(l(r, c).real()) + std::abs(l(r, c).imag());
    norm = std::max(norm, col);
  }
  int substeps = 1;
  if (norm > 1.0) substeps = static_cast<int>(std::ceil(norm));
  const Superop a = l / static_cast<double>(substeps);

  LiouvilleVec out = v;
  for (int s = 0; s < substeps; ++s) {
    LiouvilleVec sum = out;
    LiouvilleVec term = out;
    const double floor = 1e-34 * sum.squaredNorm();
    for (int k = 1; k <= 40; ++k) {
      term = (a * term) / static_cast<double>(k);
      sum += term;
      if (term.squaredNorm() <= floor) break;
    }
    out = sum;
  }
  return out;
}

DensityMatrix stationary_state(const Superop& l) {
  Superop m = l;
  m.row(0) = trace_functional();
  LiouvilleVec rhs = LiouvilleVec::Zero();
  rhs(0) = 1.0;
  const LiouvilleVec v = m.fullPivLu().solve(rhs);
  if (!v.allFinite()) throw NumericalError("stationary_state: singular Liouvillian");
  const Mat2 rho = devectorize(v);
  return DensityMatrix::unchecked(0.5 * (rho + rho.adjoint()));
}

}  // namespace sledsim
