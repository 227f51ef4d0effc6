#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hdqkd/types.hpp"

namespace hdqkd {

// One of the d^2 generalized Bell states |phi_alpha^beta>:
// alpha is the bit (shift) coordinate, beta the phase coordinate.
struct BellLabel {
  int alpha = 0;
  int beta = 0;
  friend bool operator==(const BellLabel&, const BellLabel&) = default;
};

// |phi_alpha^beta> = (1/sqrt d) sum_a omega^(a*beta) |a, a+alpha mod d>,
// omega = exp(2 pi i / d). Dimension d^2, index convention |a,b> -> a*d + b.
Eigen::VectorXcd bell_state(PrimeDimension d, BellLabel label);

// Closed-form outcome class of a Bell label under the basis-j POVM:
//   j = 0   : c = alpha
//   j = s+1 : c = s*alpha - beta  (mod d)
int pcj_symbol(PrimeDimension d, int j, BellLabel label);

// The set P_c^j of Bell labels that produce outcome c in basis j
// (closed form; certified against the MubSystem oracle at test time).
std::vector<BellLabel> pcj_closed_form(PrimeDimension d, int j, int c);

// Forward statistics map: Q(j,c) = (1/n) sum_{(a,b) in P_c^j} lambda(a,b),
// where lambda is the d x d Bell-weight matrix (rows alpha, cols beta) and
// n = sum(lambda). Each returned row is a probability vector.
Eigen::MatrixXd forward_statistics(const Eigen::MatrixXd& lambda,
                                   PrimeDimension d);

// Inverse statistics map (per-basis statistics -> Bell weights):
//   lambda(a,b) = (n/d) * ( Q(0,a) + sum_{s=0}^{d-1} Q(s+1, (s*a-b) mod d) - 1 )
// Negative entries are returned as-is; feasibility policy lives upstream.
Eigen::MatrixXd invert_statistics(const Eigen::MatrixXd& q, double n,
                                  PrimeDimension d);

// Brute-force linear-algebra oracle for the d+1 MUBs and the two-party POVMs.
//
// Basis 0 is computational; basis j = k+1 is the eigenbasis of X Z^k, with
// column x holding the eigenvector whose eigenvalue is mu_0 * omega^x
// (mu_0 the eigenvalue of smallest non-negative phase). Eigenvector phases
// are fixed by making the first non-negligible component real positive.
//
// Desk-scale oracle: construction is limited to d <= 13.
class MubSystem {
 public:
  explicit MubSystem(PrimeDimension d);

  PrimeDimension dim() const noexcept { return d_; }
  int d() const noexcept { return d_.value(); }

  // Column x of basis j.
  const Eigen::MatrixXcd& basis(int j) const;

  // Lambda^j_c acting on the d^2-dimensional joint space. Alice's projector
  // uses the conjugated basis vector; this is the convention under which the
  // maximally entangled state yields outcome difference 0 in every basis.
  Eigen::MatrixXcd povm_element(int j, int c) const;

  // <phi_label| Lambda^j_c |phi_label>.
  double outcome_probability(int j, int c, BellLabel label) const;

  // Worst residual of V e = mu e over all constructed eigenpairs.
  double max_eigen_residual() const noexcept { return max_eigen_residual_; }
  // Worst | |<u|v>|^2 - 1/d | over all cross-basis vector pairs.
  double max_mub_deviation() const;
  // Worst entry of | sum_c Lambda^j_c - I | over all bases.
  double max_povm_completeness_residual() const;

 private:
  void check_index(int j, int c) const;

  PrimeDimension d_;
  std::vector<Eigen::MatrixXcd> bases_;
  double max_eigen_residual_ = 0.0;
};

}  // namespace hdqkd
