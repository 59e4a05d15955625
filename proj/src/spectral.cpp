#include "uekit/spectral.hpp"

#include <cmath>

#include "uekit/errors.hpp"

namespace uekit {

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best)) + 1e-12) best = i;
  if (v.size() && v(best) < 0) v = -v;
}

SymEigen sym_eigen(const Eigen::MatrixXd& a, double group_tol) {
  if (a.rows() != a.cols()) throw ValidationError("eigen-decomposition needs a square matrix");
  const Eigen::Index m = a.rows();
  SymEigen out;
  if (m == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw Error("eigensolver did not converge");
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();

  Eigen::Index start = 0;
  while (start < m) {
    Eigen::Index end = start + 1;
    while (end < m && out.values(end) - out.values(end - 1) <= group_tol) ++end;
    const Eigen::Index g = end - start;
    if (g > 1) {
      Eigen::MatrixXd vg = out.vectors.middleCols(start, g);
      Eigen::MatrixXd proj = vg * vg.transpose();
      Eigen::MatrixXd basis(m, g);
      Eigen::Index have = 0;
      for (Eigen::Index i = 0; i < m && have < g; ++i) {
        Eigen::VectorXd v = proj.col(i);
        for (int pass = 0; pass < 2; ++pass)  // re-orthogonalise once for stability
          for (Eigen::Index b = 0; b < have; ++b) v -= basis.col(b).dot(v) * basis.col(b);
        double norm = v.norm();
        if (norm > 1e-6) basis.col(have++) = v / norm;
      }
      if (have < g) throw Error("could not build a basis for a degenerate eigenspace");
      out.vectors.middleCols(start, g) = basis;
    }
    start = end;
  }
  for (Eigen::Index c = 0; c < m; ++c) fix_sign(out.vectors.col(c));
  return out;
}

}  // namespace uekit
