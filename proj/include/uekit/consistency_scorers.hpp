#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uekit/backend.hpp"
#include "uekit/prompts.hpp"
#include "uekit/trace.hpp"

namespace uekit {

struct SemanticGraph {
  Eigen::MatrixXd W;         // symmetric, unit diagonal
  Eigen::VectorXd degree;    // D_ii
  Eigen::MatrixXd L_norm;    // I - D^-1/2 W D^-1/2
  Eigen::MatrixXd L_unnorm;  // D - W
  std::size_t size() const { return static_cast<std::size_t>(W.rows()); }
};

/// W = (forward + backward) / 2, symmetrized.
SemanticGraph build_graph(const SimilarityMatrix& sim);
SemanticGraph build_graph_from_weights(const Eigen::MatrixXd& W);

/// trace(mI - D) / m^2.
double degmat(const SemanticGraph& g);
/// D_jj / m. degmat_c() is its negation.
double degmat_c_confidence(const SemanticGraph& g, std::size_t j);
double degmat_c(const SemanticGraph& g, std::size_t j);

/// sum_k max(0, 1 - lambda_k(L_norm)).
double sum_eigv(const SemanticGraph& g);

struct EccentricityParams {
  int k = -1;  // negative means min(m, 2)
  /// Only eigenvectors whose eigenvalue is below this (by more than 1e-9)
  /// enter the embedding.
  /// Any value >= 2 keeps all k.
  double eigen_threshold = 0.9;
};

/// Per-node embedding rows v_j (m x k'), centered across nodes.
Eigen::MatrixXd eccentricity_embedding(const SemanticGraph& g, const EccentricityParams& p = {});
/// Frobenius norm of the centered embedding.
double eccentricity(const SemanticGraph& g, const EccentricityParams& p = {});
/// ||v'_j||, already in uncertainty orientation.
double eccentricity_c(const SemanticGraph& g, std::size_t j, const EccentricityParams& p = {});

/// Von Neumann entropy of the normalized heat kernel exp(-t L_unnorm).
double kle(const SemanticGraph& g, double t = 0.3);
/// Heat kernel after K(x,y) / sqrt(K(x,x) K(y,y)) / m; unit trace.
Eigen::MatrixXd normalized_heat_kernel(const SemanticGraph& g, double t);
double von_neumann_entropy(const Eigen::MatrixXd& a);

/// -sum (n_i/N) ln(n_i/N).
double cluster_size_entropy(const std::vector<std::size_t>& sizes);

struct SelfDetectionParams {
  int n_paraphrases = 5;
  double threshold = 0.5;
  SimilarityKind kind = SimilarityKind::NliEntailment;
};

/// Paraphrases the question, answers each paraphrase, clusters the answers.
/// Uses the trace's recorded paraphrase answers when present.
double self_detection(const GenerationTrace& t, Backend& backend, const PromptSet& prompts,
                      const SelfDetectionParams& p = {});
std::vector<std::string> generate_paraphrases(const std::string& question, int n, Backend& backend,
                                              const PromptSet& prompts);
std::vector<std::size_t> cluster_texts(const std::vector<std::string>& texts, Backend& backend, double threshold,
                                       SimilarityKind kind);

}  // namespace uekit
