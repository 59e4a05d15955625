#include "uekit/internal_scorers.hpp"

#include <cmath>

#include "uekit/errors.hpp"

namespace uekit {

double inside_eigenscore(const Eigen::MatrixXd& Z, double alpha) {
  if (Z.rows() < 1 || Z.cols() < 1) throw ValidationError("hidden matrix must be at least 1 x 1");
  if (!(alpha > 0.0)) throw ValidationError("INSIDE alpha must be > 0");
  const double d = static_cast<double>(Z.rows());
  Eigen::RowVectorXd colsum = Z.colwise().sum();
  // Z^T J Z without forming the d x d centering matrix.
  Eigen::MatrixXd sigma = Z.transpose() * Z - (colsum.transpose() * colsum) / d;
  sigma = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("eigensolver did not converge");
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s += std::log(std::max(0.0, es.eigenvalues()(i)) + alpha);
  return s / static_cast<double>(Z.cols());
}

Eigen::MatrixXd hidden_matrix(const GenerationTrace& t) {
  if (t.samples.empty()) throw ValidationError("INSIDE needs at least one sample");
  std::size_t d = 0;
  for (const auto& g : t.samples) {
    if (!g.hidden) throw ValidationError("INSIDE needs hidden_state on every sample");
    if (d == 0) d = g.hidden->size();
    if (g.hidden->size() != d || d == 0) throw ValidationError("hidden_state dimensions differ across samples");
  }
  Eigen::MatrixXd Z(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t.samples.size()));
  for (std::size_t b = 0; b < t.samples.size(); ++b)
    for (std::size_t i = 0; i < d; ++i) Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) = (*t.samples[b].hidden)[i];
  return Z;
}

double inside_eigenscore(const GenerationTrace& t, double alpha) { return inside_eigenscore(hidden_matrix(t), alpha); }

double attention_score_raw(const std::vector<std::vector<double>>& heads) {
  double s = 0.0;
  for (const auto& head : heads)
    for (double v : head) {
      if (!(v > 0.0)) throw ValidationError("attention diagonal entries must be > 0");
      s -= std::log(v);
    }
  return s;
}

double attention_score(const Generation& g, bool flip) {
  if (!g.attention) throw ValidationError("generation has no attention diagonals");
  double raw = attention_score_raw(*g.attention);
  return flip ? -raw : raw;
}

}  // namespace uekit
