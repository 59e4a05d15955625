#pragma once

#include <Eigen/Dense>

#include "uekit/trace.hpp"

namespace uekit {

/// Mean log-eigenvalue of Z^T J Z + alpha I, J = I_d - (1/d) 1 1^T.
/// Columns of Z are per-sample hidden states (d x B).
double inside_eigenscore(const Eigen::MatrixXd& Z, double alpha = 1e-3);
/// Stacks each sample's hidden state as a column. All must share d.
Eigen::MatrixXd hidden_matrix(const GenerationTrace& t);
double inside_eigenscore(const GenerationTrace& t, double alpha = 1e-3);

/// Sum over heads of -sum_j log diag_j. Larger means more uncertain unless
/// `flip` is set, in which case the sign is reversed.
double attention_score(const Generation& g, bool flip = false);
double attention_score_raw(const std::vector<std::vector<double>>& heads);

}  // namespace uekit
