#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "uekit/backend.hpp"
#include "uekit/ensemble.hpp"
#include "uekit/http_backend.hpp"
#include "uekit/longform.hpp"
#include "uekit/method.hpp"
#include "uekit/pipeline.hpp"
#include "uekit/prompts.hpp"
#include "uekit/scoring.hpp"
#include "uekit/transforms.hpp"

namespace uekit {

struct Config {
  std::string backend_kind = "mock";  // "mock" | "openai"
  std::uint64_t seed = 0;
  HttpBackendConfig http;

  std::string replay_mode = "off";  // "off" | "record" | "replay"
  std::string replay_store;

  std::vector<Method> methods;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  int parallelism = 1;
  std::map<std::string, std::string> prompt_files;  // template name -> path

  ScoringParams scoring;
  GenerationParams generation;
  LongformParams longform;
  EnsembleParams ensemble;
  SearchParams search;
  std::vector<std::string> probe_methods{"lns", "eccentricity", "kle"};
  /// Accuracy of a search candidate from the greedy answer (else the first sample).
  bool search_greedy_accuracy = true;
};

/// Reads a JSON config. Relative prompt paths resolve against the config's
/// directory. Unknown keys are rejected so typos surface early.
Config load_config(const std::string& path);
Config parse_config(const std::string& json_text, const std::string& base_dir = ".");

PromptSet make_prompts(const Config& c);
/// The configured backend, wrapped for record/replay when asked.
std::shared_ptr<Backend> make_backend(const Config& c);

}  // namespace uekit
