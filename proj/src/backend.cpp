#include "uekit/backend.hpp"

#include <algorithm>

#include "uekit/errors.hpp"
#include "uekit/text.hpp"

namespace uekit {

std::string to_string(SimilarityKind k) {
  return k == SimilarityKind::NliEntailment ? "nli_entailment" : "continuous_similarity";
}

SimilarityKind parse_similarity_kind(const std::string& s) {
  auto l = text::to_lower(s);
  if (l == "nli_entailment" || l == "nli") return SimilarityKind::NliEntailment;
  if (l == "continuous_similarity" || l == "continuous") return SimilarityKind::Continuous;
  throw ValidationError("unknown similarity kind \"" + s + "\"");
}

SimilarityMatrix SimilarityMatrix::select(const std::vector<std::size_t>& idx) const {
  const auto k = static_cast<Eigen::Index>(idx.size());
  SimilarityMatrix out;
  out.kind = kind;
  out.forward.resize(k, k);
  out.backward.resize(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) {
      auto i = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(a)]);
      auto j = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(b)]);
      out.forward(a, b) = forward(i, j);
      out.backward(a, b) = backward(i, j);
    }
  return out;
}

SimilarityMatrix make_similarity_matrix(const Eigen::MatrixXd& forward, SimilarityKind kind) {
  if (forward.rows() != forward.cols()) throw ValidationError("similarity matrix must be square");
  for (Eigen::Index i = 0; i < forward.rows(); ++i)
    for (Eigen::Index j = 0; j < forward.cols(); ++j) {
      double v = forward(i, j);
      if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("similarity entries must lie in [0,1]");
      if (i == j && v != 1.0) throw ValidationError("similarity diagonal must be 1");
    }
  return {forward, forward.transpose(), kind};
}

SimilarityMatrix build_similarity_matrix(Backend& backend, const std::vector<std::string>& texts, SimilarityKind kind) {
  if (texts.empty()) throw ValidationError("similarity matrix needs at least one text");
  const auto m = static_cast<Eigen::Index>(texts.size());
  Eigen::MatrixXd fwd = Eigen::MatrixXd::Identity(m, m);
  auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      auto s = backend.similarity(texts[static_cast<std::size_t>(i)], texts[static_cast<std::size_t>(j)], kind);
      fwd(i, j) = clamp01(s.entail_forward);
      fwd(j, i) = clamp01(s.entail_backward);
    }
  return {fwd, fwd.transpose(), kind};
}

bool bidirectional_entails(const SimilarityJudgment& j, double threshold) {
  return std::min(j.entail_forward, j.entail_backward) > threshold;
}

std::string complete(Backend& backend, std::vector<Message> messages, std::optional<TaskAnnotation> task,
                     double temperature, int max_tokens) {
  BackendRequest req;
  req.messages = std::move(messages);
  req.temperature = temperature;
  req.max_tokens = max_tokens;
  req.n = 1;
  req.task = std::move(task);
  auto resp = backend.generate(req);
  if (resp.generations.empty()) throw BackendError("backend returned no generations");
  return resp.generations.front().text;
}

int parse_judge_reply(const std::string& reply) {
  std::string up;
  for (char c : reply) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (up.find("INCORRECT") != std::string::npos) return 1;
  if (up.find("CORRECT") != std::string::npos) return 0;
  throw ParseError("judge reply is neither CORRECT nor INCORRECT: \"" + reply + "\"");
}

int judge_correctness(Backend& backend, const PromptSet& prompts, const QueryRecord& q, const std::string& answer) {
  std::string refs;
  for (const auto& g : q.ground_truths) refs += "- " + g + "\n";
  std::map<std::string, std::string> fields{{"question", q.prompt}, {"ground_truths", text::trim(refs)}, {"answer", answer}};
  auto reply = complete(backend, prompts.render("judge", fields), TaskAnnotation{"judge", fields}, 0.0, 8);
  return parse_judge_reply(reply);
}

}  // namespace uekit
