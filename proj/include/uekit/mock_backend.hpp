#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uekit/backend.hpp"

namespace uekit {

/// Deterministic offline backend. Every output is a pure function of the
/// request and the seed.
///
/// Tokens are whitespace-delimited words, each after the first keeping its
/// leading space. A token's logprob hashes (prompt, position, token), so
/// teacher_force() reproduces the logprobs generate() reported for the same
/// text. Similarity is word-level Jaccard, identical in both directions.
class MockBackend : public Backend {
 public:
  /// Produces the text of generation `index` for a request.
  using Handler = std::function<std::string(const BackendRequest&, int index)>;

  explicit MockBackend(std::uint64_t seed = 0);

  BackendResponse generate(const BackendRequest& req) override;
  SimilarityJudgment similarity(const std::string& a, const std::string& b, SimilarityKind kind) override;
  Generation teacher_force(const std::vector<Message>& messages, const std::string& completion) override;

  /// Replaces the handler for a task kind ("answer" covers untagged requests).
  void on(const std::string& kind, Handler h);
  /// P(true) replies put exactly this probability on the " true" token.
  void force_p_true(double p) { forced_p_true_ = p; }
  std::uint64_t seed() const { return seed_; }

  /// Uniform [0,1) draw keyed by the request, generation index and salt.
  double unit(const BackendRequest& req, int index, std::uint64_t salt = 0) const;

  static std::vector<std::string> tokenize(const std::string& text);
  static double jaccard(const std::string& a, const std::string& b);
  static std::string context_digest(const std::vector<Message>& messages);

 private:
  double token_logprob(const std::string& ctx, std::size_t pos, const std::string& tok) const;
  Generation make_generation(const std::string& ctx, const std::string& text) const;

  std::uint64_t seed_;
  std::optional<double> forced_p_true_;
  std::map<std::string, Handler> handlers_;
};

}  // namespace uekit
