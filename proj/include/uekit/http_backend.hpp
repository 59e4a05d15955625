#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include "uekit/backend.hpp"

namespace uekit {

struct HttpBackendConfig {
  std::string base_url = "https://api.openai.com/v1";  // scheme://host[:port][/prefix]
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "OPENAI_API_KEY";
  /// POST {a, b, kind} -> {entail_forward, entail_backward}. Empty disables similarity().
  std::string similarity_url;
  /// Model used by teacher_force() via the legacy completions endpoint; defaults to `model`.
  std::string completions_model;
  int parallelism = 4;
  std::optional<std::int64_t> seed;
  int attempts = 3;
  std::chrono::milliseconds backoff{500};
  std::chrono::seconds timeout{60};
};

/// OpenAI-compatible client: chat completions with logprobs for generation,
/// `echo` completions for teacher forcing, and a separate similarity service.
/// Transport failures, 429 and 5xx responses are retried with exponential
/// backoff; at most `parallelism` requests are in flight at once.
class OpenAIBackend : public Backend {
 public:
  explicit OpenAIBackend(HttpBackendConfig cfg);
  ~OpenAIBackend() override;

  BackendResponse generate(const BackendRequest& req) override;
  SimilarityJudgment similarity(const std::string& a, const std::string& b, SimilarityKind kind) override;
  Generation teacher_force(const std::vector<Message>& messages, const std::string& completion) override;

  const HttpBackendConfig& config() const { return cfg_; }

 private:
  std::string post(const std::string& url, const std::string& body);

  HttpBackendConfig cfg_;
  std::string api_key_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
};

}  // namespace uekit
