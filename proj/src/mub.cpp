#include "hdqkd/mub.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace hdqkd {

namespace {

using Cx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int mod_d(int v, int d) { return ((v % d) + d) % d; }

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// X|a> = |a+1 mod d>
MatrixXcd shift_op(int d) {
  MatrixXcd x = MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a) x((a + 1) % d, a) = 1.0;
  return x;
}

// Z|a> = omega^a |a>
MatrixXcd clock_op(int d) {
  MatrixXcd z = MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    const double ang = kTwoPi * a / d;
    z(a, a) = Cx{std::cos(ang), std::sin(ang)};
  }
  return z;
}

struct EigenPair {
  Cx mu;
  VectorXcd vec;
};

// Eigensystem of a unitary V with nondegenerate spectrum, via the Hermitian
// part V + V^dagger. Degenerate Hermitian eigenvalues (conjugate phase pairs)
// are split by diagonalizing V restricted to the degenerate subspace.
std::vector<EigenPair> unitary_eigensystem(const MatrixXcd& v) {
  const int n = static_cast<int>(v.rows());
  const MatrixXcd h = v + v.adjoint();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("unitary_eigensystem: Hermitian solve failed");

  std::vector<EigenPair> out;
  out.reserve(n);
  int i = 0;
  while (i < n) {
    int j = i + 1;
    while (j < n && es.eigenvalues()(j) - es.eigenvalues()(i) < 1e-6) ++j;
    const int k = j - i;
    const MatrixXcd sub = es.eigenvectors().middleCols(i, k);
    if (k == 1) {
      const VectorXcd vec = sub.col(0);
      const Cx mu = (vec.adjoint() * v * vec).value();
      out.push_back({mu, vec});
    } else {
      const MatrixXcd w = sub.adjoint() * v * sub;
      Eigen::ComplexEigenSolver<MatrixXcd> ces(w);
      if (ces.info() != Eigen::Success)
        throw std::runtime_error("unitary_eigensystem: block solve failed");
      for (int t = 0; t < k; ++t) {
        VectorXcd vec = sub * ces.eigenvectors().col(t);
        vec.normalize();
        out.push_back({ces.eigenvalues()(t), vec});
      }
    }
    i = j;
  }
  return out;
}

// Orders the eigenpairs of X Z^k so that column x carries eigenvalue
// mu_0 * omega^x. The spectrum is d equally spaced phases; the common offset
// is recovered from mu^d, which is basis-point independent.
MatrixXcd label_eigenbasis(std::vector<EigenPair> pairs, int d) {
  const double step = kTwoPi / d;
  const Cx mu_d = std::pow(pairs.front().mu, d);
  double base = std::arg(mu_d) / d;
  base = std::fmod(base + kTwoPi, step);  // into [0, 2pi/d)

  MatrixXcd basis = MatrixXcd::Zero(d, d);
  std::vector<bool> used(d, false);
  for (auto& p : pairs) {
    const double ang = std::fmod(std::arg(p.mu) + kTwoPi, kTwoPi);
    const double idx = (ang - base) / step;
    const int x = mod_d(static_cast<int>(std::llround(idx)), d);
    if (std::abs(idx - std::llround(idx)) > 1e-6 || used[x])
      throw std::runtime_error("label_eigenbasis: spectrum not equally spaced");
    used[x] = true;
    // canonical phase: first non-negligible component real positive
    for (int a = 0; a < d; ++a) {
      if (std::abs(p.vec(a)) > 1e-8) {
        p.vec *= std::conj(p.vec(a)) / std::abs(p.vec(a));
        break;
      }
    }
    basis.col(x) = p.vec;
  }
  return basis;
}

}  // namespace

Eigen::VectorXcd bell_state(PrimeDimension dp, BellLabel label) {
  const int d = dp.value();
  if (label.alpha < 0 || label.alpha >= d || label.beta < 0 || label.beta >= d)
    throw std::invalid_argument("bell_state: label out of range");
  VectorXcd phi = VectorXcd::Zero(d * d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int a = 0; a < d; ++a) {
    const double ang = kTwoPi * a * label.beta / d;
    phi(a * d + (a + label.alpha) % d) = norm * Cx{std::cos(ang), std::sin(ang)};
  }
  return phi;
}

int pcj_symbol(PrimeDimension dp, int j, BellLabel label) {
  const int d = dp.value();
  if (j < 0 || j > d) throw std::invalid_argument("pcj_symbol: basis index out of range");
  if (j == 0) return label.alpha;
  const int s = j - 1;
  return mod_d(s * label.alpha - label.beta, d);
}

std::vector<BellLabel> pcj_closed_form(PrimeDimension dp, int j, int c) {
  const int d = dp.value();
  if (j < 0 || j > d || c < 0 || c >= d)
    throw std::invalid_argument("pcj_closed_form: index out of range");
  std::vector<BellLabel> out;
  out.reserve(d);
  if (j == 0) {
    for (int beta = 0; beta < d; ++beta) out.push_back({c, beta});
  } else {
    const int s = j - 1;
    for (int alpha = 0; alpha < d; ++alpha)
      out.push_back({alpha, mod_d(s * alpha - c, d)});
  }
  return out;
}

Eigen::MatrixXd forward_statistics(const Eigen::MatrixXd& lambda,
                                   PrimeDimension dp) {
  const int d = dp.value();
  if (lambda.rows() != d || lambda.cols() != d)
    throw std::invalid_argument("forward_statistics: lambda must be d x d");
  if (lambda.minCoeff() < -1e-12)
    throw std::invalid_argument("forward_statistics: negative Bell weight");
  const double n = lambda.sum();
  if (!(n > 0.0))
    throw std::invalid_argument("forward_statistics: weights sum to zero");

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(d + 1, d);
  for (int alpha = 0; alpha < d; ++alpha)
    for (int beta = 0; beta < d; ++beta) {
      const double w = lambda(alpha, beta) / n;
      for (int j = 0; j <= d; ++j)
        q(j, pcj_symbol(dp, j, {alpha, beta})) += w;
    }
  return q;
}

Eigen::MatrixXd invert_statistics(const Eigen::MatrixXd& q, double n,
                                  PrimeDimension dp) {
  const int d = dp.value();
  if (q.rows() != d + 1 || q.cols() != d)
    throw std::invalid_argument("invert_statistics: Q must be (d+1) x d");
  for (int j = 0; j <= d; ++j)
    if (std::abs(q.row(j).sum() - 1.0) > 1e-6)
      throw std::invalid_argument("invert_statistics: Q row does not sum to 1");

  Eigen::MatrixXd lambda(d, d);
  for (int alpha = 0; alpha < d; ++alpha)
    for (int beta = 0; beta < d; ++beta) {
      double acc = q(0, alpha) - 1.0;
      for (int s = 0; s < d; ++s) acc += q(s + 1, mod_d(s * alpha - beta, d));
      lambda(alpha, beta) = n / d * acc;
    }
  return lambda;
}

MubSystem::MubSystem(PrimeDimension dp) : d_(dp) {
  const int d = dp.value();
  if (d > 13)
    throw std::out_of_range("MubSystem: oracle restricted to d <= 13");

  bases_.reserve(d + 1);
  bases_.push_back(MatrixXcd::Identity(d, d));

  const MatrixXcd x = shift_op(d);
  const MatrixXcd z = clock_op(d);
  MatrixXcd zk = MatrixXcd::Identity(d, d);
  for (int k = 0; k < d; ++k) {
    const MatrixXcd v = x * zk;
    MatrixXcd basis = label_eigenbasis(unitary_eigensystem(v), d);
    // residuals: eigen-equation per column plus orthonormality of the basis
    for (int col = 0; col < d; ++col) {
      const Cx mu = (basis.col(col).adjoint() * v * basis.col(col)).value();
      const double r =
          (v * basis.col(col) - mu * basis.col(col)).cwiseAbs().maxCoeff();
      max_eigen_residual_ = std::max(max_eigen_residual_, r);
    }
    const double ortho =
        (basis.adjoint() * basis - MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
    max_eigen_residual_ = std::max(max_eigen_residual_, ortho);
    bases_.push_back(std::move(basis));
    zk = zk * z;
  }

  if (max_eigen_residual_ > 1e-8)
    throw std::runtime_error("MubSystem: eigendecomposition residual exceeds 1e-8");
}

const Eigen::MatrixXcd& MubSystem::basis(int j) const {
  if (j < 0 || j > d()) throw std::invalid_argument("MubSystem::basis: index");
  return bases_[static_cast<std::size_t>(j)];
}

void MubSystem::check_index(int j, int c) const {
  if (j < 0 || j > d() || c < 0 || c >= d())
    throw std::invalid_argument("MubSystem: (j,c) index out of range");
}

Eigen::MatrixXcd MubSystem::povm_element(int j, int c) const {
  check_index(j, c);
  const int d = this->d();
  const MatrixXcd& b = bases_[static_cast<std::size_t>(j)];
  MatrixXcd out = MatrixXcd::Zero(d * d, d * d);
  for (int x_idx = 0; x_idx < d; ++x_idx) {
    const VectorXcd a_side = b.col(x_idx).conjugate();
    const VectorXcd b_side = b.col((x_idx + c) % d);
    out += kron(a_side * a_side.adjoint(), b_side * b_side.adjoint());
  }
  return out;
}

double MubSystem::outcome_probability(int j, int c, BellLabel label) const {
  const VectorXcd phi = bell_state(d_, label);
  const Cx p = (phi.adjoint() * povm_element(j, c) * phi).value();
  return p.real();
}

double MubSystem::max_mub_deviation() const {
  const int d = this->d();
  const double target = 1.0 / d;
  double worst = 0.0;
  for (int j = 0; j <= d; ++j)
    for (int jp = j + 1; jp <= d; ++jp)
      for (int u = 0; u < d; ++u)
        for (int v = 0; v < d; ++v) {
          const Cx ip = (bases_[j].col(u).adjoint() * bases_[jp].col(v)).value();
          worst = std::max(worst, std::abs(std::norm(ip) - target));
        }
  return worst;
}

double MubSystem::max_povm_completeness_residual() const {
  const int d = this->d();
  const MatrixXcd eye = MatrixXcd::Identity(d * d, d * d);
  double worst = 0.0;
  for (int j = 0; j <= d; ++j) {
    MatrixXcd sum = MatrixXcd::Zero(d * d, d * d);
    for (int c = 0; c < d; ++c) sum += povm_element(j, c);
    worst = std::max(worst, (sum - eye).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace hdqkd
