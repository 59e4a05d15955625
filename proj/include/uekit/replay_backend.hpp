#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "uekit/backend.hpp"

namespace uekit {

/// Wraps another backend and persists every call to a JSONL store.
///
/// Record mode answers from the store when it can and otherwise calls the
/// inner backend and appends the exchange. Replay mode never calls out; a
/// request absent from the store raises ReplayMiss.
///
/// Keys are FNV-1a digests of the request serialized with sorted object keys,
/// so field order in a hand-written request does not matter.
class RecordReplayBackend : public Backend {
 public:
  enum class Mode { Record, Replay };

  RecordReplayBackend(std::string store_path, Mode mode, std::shared_ptr<Backend> inner = nullptr);

  BackendResponse generate(const BackendRequest& req) override;
  SimilarityJudgment similarity(const std::string& a, const std::string& b, SimilarityKind kind) override;
  Generation teacher_force(const std::vector<Message>& messages, const std::string& completion) override;

  Mode mode() const { return mode_; }
  std::size_t size() const;
  std::size_t misses() const { return misses_; }

 private:
  std::string lookup_or_call(const std::string& request_json, const std::function<std::string()>& call);

  std::string path_;
  Mode mode_;
  std::shared_ptr<Backend> inner_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> store_;  // key -> response JSON
  std::size_t misses_ = 0;
};

/// Canonical digest of a JSON request text: keys sorted, compact form.
std::string request_digest(const std::string& request_json);

std::string request_to_json(const BackendRequest& req);
std::string response_to_json(const BackendResponse& resp);
BackendResponse response_from_json(const std::string& s);

}  // namespace uekit
