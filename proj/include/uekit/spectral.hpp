#pragma once

#include <Eigen/Dense>

namespace uekit {

/// Eigen-decomposition of a real symmetric matrix with a reproducible basis.
///
/// Eigenvalues ascend. Within a group of eigenvalues closer than `group_tol`
/// the basis is rebuilt as Gram-Schmidt over P e_1, P e_2, ... where P
/// projects onto the group's eigenspace, so it does not depend on solver
/// internals. Each vector's largest-magnitude entry is made positive (first
/// such index on ties).
struct SymEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // column i pairs with values(i)
};

SymEigen sym_eigen(const Eigen::MatrixXd& a, double group_tol = 1e-8);

/// Makes the largest-magnitude entry positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v);

}  // namespace uekit
