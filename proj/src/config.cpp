#include "uekit/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "uekit/errors.hpp"
#include "uekit/mock_backend.hpp"
#include "uekit/replay_backend.hpp"

namespace uekit {

using json = nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError("config: " + where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ValidationError("config: unknown key \"" + k + "\" in " + (where.empty() ? "top level" : where));
}

template <class T>
void get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

Config parse_config(const std::string& text, const std::string& base_dir) {
  Config c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    only_keys(j, "", {"backend", "replay", "methods", "seeds", "parallelism", "prompts", "scoring", "generation",
                      "longform", "ensemble", "search"});
    if (j.contains("backend")) {
      const auto& b = j["backend"];
      only_keys(b, "backend", {"kind", "seed", "base_url", "model", "api_key_env", "similarity_url", "completions_model",
                               "attempts", "timeout_s"});
      get(b, "kind", c.backend_kind);
      get(b, "seed", c.seed);
      get(b, "base_url", c.http.base_url);
      get(b, "model", c.http.model);
      get(b, "api_key_env", c.http.api_key_env);
      get(b, "similarity_url", c.http.similarity_url);
      get(b, "completions_model", c.http.completions_model);
      get(b, "attempts", c.http.attempts);
      if (b.contains("timeout_s")) c.http.timeout = std::chrono::seconds(b["timeout_s"].get<int>());
      if (b.contains("seed")) c.http.seed = static_cast<std::int64_t>(c.seed);
      if (c.backend_kind != "mock" && c.backend_kind != "openai")
        throw ValidationError("config: backend.kind must be \"mock\" or \"openai\"");
    }
    if (j.contains("replay")) {
      const auto& r = j["replay"];
      only_keys(r, "replay", {"mode", "store"});
      get(r, "mode", c.replay_mode);
      get(r, "store", c.replay_store);
      if (c.replay_mode != "off" && c.replay_mode != "record" && c.replay_mode != "replay")
        throw ValidationError("config: replay.mode must be off, record or replay");
      if (c.replay_mode != "off" && c.replay_store.empty()) throw ValidationError("config: replay.store is required");
      if (!c.replay_store.empty() && std::filesystem::path(c.replay_store).is_relative())
        c.replay_store = (std::filesystem::path(base_dir) / c.replay_store).string();
    }
    if (j.contains("methods"))
      for (const auto& m : j["methods"]) c.methods.push_back(parse_method(m.get<std::string>()));
    get(j, "seeds", c.seeds);
    get(j, "parallelism", c.parallelism);
    c.http.parallelism = c.parallelism;
    c.generation.parallelism = c.parallelism;
    if (j.contains("prompts")) {
      for (const auto& [name, path] : j["prompts"].items()) {
        std::filesystem::path p = path.get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        c.prompt_files[name] = p.string();
      }
    }
    if (j.contains("scoring")) {
      const auto& s = j["scoring"];
      only_keys(s, "scoring", {"similarity_kind", "relevance_kind", "cluster_threshold", "sentsar_temperature", "kle_t",
                               "eccentricity_k", "eccentricity_threshold", "inside_alpha", "attention_flip",
                               "n_paraphrases", "verbalized_retries"});
      if (s.contains("similarity_kind")) c.scoring.similarity_kind = parse_similarity_kind(s["similarity_kind"]);
      if (s.contains("relevance_kind")) c.scoring.relevance_kind = parse_similarity_kind(s["relevance_kind"]);
      get(s, "cluster_threshold", c.scoring.cluster_threshold);
      get(s, "sentsar_temperature", c.scoring.sentsar_temperature);
      get(s, "kle_t", c.scoring.kle_t);
      get(s, "eccentricity_k", c.scoring.eccentricity.k);
      get(s, "eccentricity_threshold", c.scoring.eccentricity.eigen_threshold);
      get(s, "inside_alpha", c.scoring.inside_alpha);
      get(s, "attention_flip", c.scoring.attention_flip);
      get(s, "n_paraphrases", c.scoring.n_paraphrases);
      get(s, "verbalized_retries", c.scoring.verbalized_retries);
    }
    if (j.contains("generation")) {
      const auto& g = j["generation"];
      only_keys(g, "generation", {"B", "temperature", "max_tokens", "label"});
      get(g, "B", c.generation.B);
      get(g, "temperature", c.generation.temperature);
      get(g, "max_tokens", c.generation.max_tokens);
      get(g, "label", c.generation.label);
    }
    if (j.contains("longform")) {
      const auto& l = j["longform"];
      only_keys(l, "longform", {"n_questions", "align_threshold", "question_temperature"});
      get(l, "n_questions", c.longform.n_questions);
      get(l, "align_threshold", c.longform.align_threshold);
      get(l, "question_temperature", c.longform.question_temperature);
      c.longform.kind = c.scoring.similarity_kind;
    }
    if (j.contains("ensemble")) {
      const auto& e = j["ensemble"];
      only_keys(e, "ensemble", {"lambda", "max_iter", "tol", "max_depth", "min_leaf", "voting_recall"});
      get(e, "lambda", c.ensemble.linear.lambda);
      get(e, "max_iter", c.ensemble.linear.max_iter);
      get(e, "tol", c.ensemble.linear.tol);
      get(e, "max_depth", c.ensemble.tree.max_depth);
      get(e, "min_leaf", c.ensemble.tree.min_leaf);
      get(e, "voting_recall", c.ensemble.voting_recall);
    }
    if (j.contains("search")) {
      const auto& s = j["search"];
      only_keys(s, "search", {"iterations", "accuracy_budget", "initial_prompt", "probe_methods", "greedy_accuracy"});
      get(s, "iterations", c.search.iterations);
      get(s, "accuracy_budget", c.search.accuracy_budget);
      get(s, "initial_prompt", c.search.initial_prompt);
      get(s, "probe_methods", c.probe_methods);
      get(s, "greedy_accuracy", c.search_greedy_accuracy);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  auto dir = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

PromptSet make_prompts(const Config& c) {
  PromptSet p;
  for (const auto& [name, path] : c.prompt_files) p.load_file(name, path);
  return p;
}

std::shared_ptr<Backend> make_backend(const Config& c) {
  std::shared_ptr<Backend> inner;
  if (c.replay_mode != "replay") {
    if (c.backend_kind == "openai")
      inner = std::make_shared<OpenAIBackend>(c.http);
    else
      inner = std::make_shared<MockBackend>(c.seed);
  }
  if (c.replay_mode == "off") return inner;
  auto mode = c.replay_mode == "record" ? RecordReplayBackend::Mode::Record : RecordReplayBackend::Mode::Replay;
  return std::make_shared<RecordReplayBackend>(c.replay_store, mode, inner);
}

}  // namespace uekit
