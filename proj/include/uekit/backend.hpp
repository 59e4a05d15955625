#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "uekit/prompts.hpp"
#include "uekit/trace.hpp"

namespace uekit {

enum class SimilarityKind { NliEntailment, Continuous };

std::string to_string(SimilarityKind k);
SimilarityKind parse_similarity_kind(const std::string& s);

/// What a request is for. Live backends ignore it; the mock dispatches on
/// `kind` and reads `fields` instead of re-parsing the rendered prompt.
struct TaskAnnotation {
  std::string kind;
  std::map<std::string, std::string> fields;
  bool operator==(const TaskAnnotation&) const = default;
};

struct BackendRequest {
  std::vector<Message> messages;
  int max_tokens = 256;
  double temperature = 0.0;
  int n = 1;
  bool want_logprobs = true;
  std::optional<TaskAnnotation> task;
};

struct Usage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct BackendResponse {
  std::vector<Generation> generations;
  Usage usage;
};

struct SimilarityJudgment {
  double entail_forward = 0.0;  // a entails b
  double entail_backward = 0.0; // b entails a
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendResponse generate(const BackendRequest& req) = 0;
  virtual SimilarityJudgment similarity(const std::string& a, const std::string& b, SimilarityKind kind) = 0;
  /// Per-token logprobs of `completion` as a reply to `messages`.
  virtual Generation teacher_force(const std::vector<Message>& messages, const std::string& completion) = 0;
};

/// Pairwise judgments among m texts. forward(i,j) is the degree to which
/// text i entails text j; backward is its transpose.
struct SimilarityMatrix {
  Eigen::MatrixXd forward;
  Eigen::MatrixXd backward;
  SimilarityKind kind = SimilarityKind::NliEntailment;
  std::size_t size() const { return static_cast<std::size_t>(forward.rows()); }
  /// Sub-matrix over the given indices, in that order.
  SimilarityMatrix select(const std::vector<std::size_t>& idx) const;
};

SimilarityMatrix make_similarity_matrix(const Eigen::MatrixXd& forward, SimilarityKind kind = SimilarityKind::NliEntailment);

/// Queries each unordered pair once; m(m-1)/2 calls.
SimilarityMatrix build_similarity_matrix(Backend& backend, const std::vector<std::string>& texts,
                                         SimilarityKind kind = SimilarityKind::NliEntailment);

/// Both directions above `threshold`.
bool bidirectional_entails(const SimilarityJudgment& j, double threshold = 0.5);

/// Single completion text for a prompt, temperature 0 unless given.
std::string complete(Backend& backend, std::vector<Message> messages, std::optional<TaskAnnotation> task = std::nullopt,
                     double temperature = 0.0, int max_tokens = 256);

/// 0 if the judge calls `answer` correct, 1 otherwise. Throws ParseError
/// when the judge reply is neither CORRECT nor INCORRECT.
int judge_correctness(Backend& backend, const PromptSet& prompts, const QueryRecord& q, const std::string& answer);
int parse_judge_reply(const std::string& reply);

}  // namespace uekit
