#include "uekit/consistency_scorers.hpp"

#include <cmath>

#include "uekit/errors.hpp"
#include "uekit/spectral.hpp"
#include "uekit/text.hpp"

namespace uekit {

SemanticGraph build_graph_from_weights(const Eigen::MatrixXd& W) {
  if (W.rows() != W.cols() || W.rows() == 0) throw ValidationError("graph weights must be a nonempty square matrix");
  SemanticGraph g;
  g.W = 0.5 * (W + W.transpose());
  const Eigen::Index m = g.W.rows();
  g.degree = g.W.rowwise().sum();
  Eigen::VectorXd inv_sqrt(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(g.degree(i) > 0.0)) throw ValidationError("graph has a node with zero degree");
    inv_sqrt(i) = 1.0 / std::sqrt(g.degree(i));
  }
  g.L_norm = Eigen::MatrixXd::Identity(m, m) - inv_sqrt.asDiagonal() * g.W * inv_sqrt.asDiagonal();
  g.L_norm = 0.5 * (g.L_norm + g.L_norm.transpose());
  g.L_unnorm = Eigen::MatrixXd(g.degree.asDiagonal()) - g.W;
  return g;
}

SemanticGraph build_graph(const SimilarityMatrix& sim) { return build_graph_from_weights(0.5 * (sim.forward + sim.backward)); }

double degmat(const SemanticGraph& g) {
  const double m = static_cast<double>(g.size());
  return (m * m - g.degree.sum()) / (m * m);
}

double degmat_c_confidence(const SemanticGraph& g, std::size_t j) {
  if (j >= g.size()) throw ValidationError("node index " + std::to_string(j) + " out of range");
  return g.degree(static_cast<Eigen::Index>(j)) / static_cast<double>(g.size());
}

double degmat_c(const SemanticGraph& g, std::size_t j) { return -degmat_c_confidence(g, j); }

double sum_eigv(const SemanticGraph& g) {
  auto e = sym_eigen(g.L_norm);
  double s = 0.0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) s += std::max(0.0, 1.0 - e.values(i));
  return s;
}

Eigen::MatrixXd eccentricity_embedding(const SemanticGraph& g, const EccentricityParams& p) {
  const auto m = static_cast<Eigen::Index>(g.size());
  Eigen::Index k = p.k >= 0 ? p.k : std::min<Eigen::Index>(m, 2);
  if (k > m) throw ValidationError("eccentricity k must be at most m");
  auto e = sym_eigen(g.L_norm);
  Eigen::Index used = 0;
  // An eigenvalue within rounding of the threshold counts as not below it.
  while (used < k && e.values(used) < p.eigen_threshold - 1e-9) ++used;
  Eigen::MatrixXd v = e.vectors.leftCols(used);  // row j = v_j
  if (used > 0) v.rowwise() -= v.colwise().mean();
  return v;
}

double eccentricity(const SemanticGraph& g, const EccentricityParams& p) {
  auto v = eccentricity_embedding(g, p);
  return v.cols() ? v.norm() : 0.0;
}

double eccentricity_c(const SemanticGraph& g, std::size_t j, const EccentricityParams& p) {
  if (j >= g.size()) throw ValidationError("node index " + std::to_string(j) + " out of range");
  auto v = eccentricity_embedding(g, p);
  return v.cols() ? v.row(static_cast<Eigen::Index>(j)).norm() : 0.0;
}

Eigen::MatrixXd normalized_heat_kernel(const SemanticGraph& g, double t) {
  if (!(t > 0.0)) throw ValidationError("KLE temperature must be > 0");
  auto e = sym_eigen(g.L_unnorm);
  Eigen::VectorXd ex = (-t * e.values.array()).exp();
  Eigen::MatrixXd K = e.vectors * ex.asDiagonal() * e.vectors.transpose();
  const Eigen::Index m = K.rows();
  Eigen::VectorXd d = K.diagonal().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index x = 0; x < m; ++x)
    for (Eigen::Index y = 0; y < m; ++y) out(x, y) = K(x, y) / (d(x) * d(y)) / static_cast<double>(m);
  return 0.5 * (out + out.transpose());
}

double von_neumann_entropy(const Eigen::MatrixXd& a) {
  auto e = sym_eigen(a);
  double h = 0.0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    double mu = e.values(i);
    if (mu < -1e-9) throw Error("kernel is not positive semidefinite (eigenvalue " + std::to_string(mu) + ")");
    if (mu > 0.0) h -= mu * std::log(mu);
  }
  return std::max(0.0, h);
}

double kle(const SemanticGraph& g, double t) { return von_neumann_entropy(normalized_heat_kernel(g, t)); }

double cluster_size_entropy(const std::vector<std::size_t>& sizes) {
  double n = 0.0;
  for (auto s : sizes) n += static_cast<double>(s);
  if (n <= 0.0) throw ValidationError("no cluster members");
  double h = 0.0;
  for (auto s : sizes) {
    if (s == 0) continue;
    double p = static_cast<double>(s) / n;
    h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

std::vector<std::string> generate_paraphrases(const std::string& question, int n, Backend& backend,
                                              const PromptSet& prompts) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    std::map<std::string, std::string> fields{
        {"question", question}, {"previous_questions", text::format_string_list(out)}, {"index", std::to_string(i + 1)}};
    out.push_back(text::trim(complete(backend, prompts.render("paraphrase", fields), TaskAnnotation{"paraphrase", fields}, 1.0, 128)));
  }
  return out;
}

std::vector<std::size_t> cluster_texts(const std::vector<std::string>& texts, Backend& backend, double threshold,
                                       SimilarityKind kind) {
  std::vector<std::size_t> reps, sizes;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    bool joined = false;
    for (std::size_t k = 0; k < reps.size() && !joined; ++k) {
      if (bidirectional_entails(backend.similarity(texts[reps[k]], texts[i], kind), threshold)) {
        ++sizes[k];
        joined = true;
      }
    }
    if (!joined) {
      reps.push_back(i);
      sizes.push_back(1);
    }
  }
  return sizes;
}

double self_detection(const GenerationTrace& t, Backend& backend, const PromptSet& prompts, const SelfDetectionParams& p) {
  std::vector<std::string> answers;
  if (t.paraphrase_answers && !t.paraphrase_answers->empty()) {
    for (const auto& g : *t.paraphrase_answers) answers.push_back(g.text);
  } else {
    if (p.n_paraphrases < 1) throw ValidationError("self-detection needs at least one paraphrase");
    for (const auto& q : generate_paraphrases(t.query.prompt, p.n_paraphrases, backend, prompts)) {
      std::map<std::string, std::string> fields{{"question", q}};
      answers.push_back(complete(backend, {{"user", q}}, TaskAnnotation{"answer", fields}, 0.0));
    }
  }
  return cluster_size_entropy(cluster_texts(answers, backend, p.threshold, p.kind));
}

}  // namespace uekit
