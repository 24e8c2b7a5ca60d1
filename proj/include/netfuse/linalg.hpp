#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace netfuse {

/// Emit a numerical warning at most `limit` times per call site.
#define NETFUSE_WARN_LIMITED(limit, ...)                                        \
  do {                                                                          \
    static std::atomic<int> count_{0};                                          \
    const int seen_ = count_.fetch_add(1);                                      \
    if (seen_ < (limit)) {                                                      \
      std::fprintf(stderr, "netfuse: warning: " __VA_ARGS__);                   \
      if (seen_ + 1 == (limit))                                                 \
        std::fprintf(stderr, "netfuse: (further warnings from this site suppressed)\n"); \
    }                                                                           \
  } while (0)

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Configuration problems (bad scenario, dimension mismatch). CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failures (lost positive definiteness, singular systems). CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double eig = 0.0)
      : std::runtime_error(what), offending_eigenvalue(eig) {}
  double offending_eigenvalue;
};

inline Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

inline double min_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline bool is_positive_definite(const Mat& m, double tol = 0.0) {
  return min_eigenvalue(m) > tol;
}

/// Largest |eigenvalue| of a (not necessarily symmetric) square matrix.
inline double spectral_radius(const Mat& m) {
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

/// Solve S * X = B for symmetric S, LDLT with inverse fallback.
inline Mat solve_sym(const Mat& s, const Mat& b) {
  Eigen::LDLT<Mat> ldlt(symmetrize(s));
  if (ldlt.info() == Eigen::Success) return ldlt.solve(b);
  return s.fullPivLu().solve(b);
}

/// (X^{-1} - alpha E^T E)^{-1} via the matrix inversion lemma:
/// X + X E^T (alpha^{-1} I - E X E^T)^{-1} E X.  Requires the inner matrix PD.
inline Mat inflate(const Mat& x, const Mat& e, double alpha) {
  const Mat inner = Mat::Identity(e.rows(), e.rows()) / alpha - e * x * e.transpose();
  const double me = min_eigenvalue(inner);
  if (me <= 0.0)
    throw NumericalError("alpha too large / bound blow-up: alpha^{-1}I - E X E^T not PD "
                         "(min eigenvalue " + std::to_string(me) + ")", me);
  return x + x * e.transpose() * solve_sym(inner, e * x);
}

}  // namespace netfuse
