#include "uekit/http_backend.hpp"

#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "uekit/errors.hpp"

namespace uekit {

using json = nlohmann::json;

namespace {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/' or empty
};

Url split_url(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ValidationError("URL needs a scheme: " + url);
  auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, ""};
  std::string path = url.substr(slash);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {url.substr(0, slash), path};
}

json messages_json(const std::vector<Message>& msgs) {
  json arr = json::array();
  for (const auto& m : msgs) arr.push_back({{"role", m.role}, {"content", m.content}});
  return arr;
}

}  // namespace

OpenAIBackend::OpenAIBackend(HttpBackendConfig cfg)
    : cfg_(std::move(cfg)), slots_(std::make_unique<std::counting_semaphore<>>(std::max(1, cfg_.parallelism))) {
  if (!cfg_.api_key_env.empty()) {
    if (const char* k = std::getenv(cfg_.api_key_env.c_str())) api_key_ = k;
  }
  if (cfg_.completions_model.empty()) cfg_.completions_model = cfg_.model;
}

OpenAIBackend::~OpenAIBackend() = default;

std::string OpenAIBackend::post(const std::string& url, const std::string& body) {
  auto [origin, path] = split_url(url);
  slots_->acquire();
  struct Release {
    std::counting_semaphore<>* s;
    ~Release() { s->release(); }
  } release{slots_.get()};

  std::string last_error;
  for (int attempt = 0; attempt < std::max(1, cfg_.attempts); ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(cfg_.backoff * (1 << (attempt - 1)));
    httplib::Client cli(origin);
    cli.set_connection_timeout(cfg_.timeout);
    cli.set_read_timeout(cfg_.timeout);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = cli.Post(path.empty() ? "/" : path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) throw BackendError("HTTP " + std::to_string(res->status) + " from " + url + ": " + res->body);
    return res->body;
  }
  throw BackendError(url + " failed after " + std::to_string(cfg_.attempts) + " attempts: " + last_error, true);
}

BackendResponse OpenAIBackend::generate(const BackendRequest& req) {
  json body{{"model", cfg_.model},
            {"messages", messages_json(req.messages)},
            {"max_tokens", req.max_tokens},
            {"temperature", req.temperature},
            {"n", req.n},
            {"logprobs", req.want_logprobs}};
  if (cfg_.seed) body["seed"] = *cfg_.seed;
  auto raw = post(cfg_.base_url + "/chat/completions", body.dump());
  BackendResponse out;
  try {
    auto j = json::parse(raw);
    for (const auto& choice : j.at("choices")) {
      Generation g;
      const auto& content = choice.at("message").at("content");
      g.text = content.is_string() ? content.get<std::string>() : std::string{};
      if (req.want_logprobs && choice.contains("logprobs") && !choice["logprobs"].is_null()) {
        for (const auto& t : choice["logprobs"].at("content"))
          g.tokens.push_back({t.at("token").get<std::string>(), std::min(0.0, t.at("logprob").get<double>())});
      }
      out.generations.push_back(std::move(g));
    }
    if (j.contains("usage")) {
      out.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
      out.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed chat completion payload: ") + e.what());
  }
  if (static_cast<int>(out.generations.size()) != req.n)
    throw BackendError("asked for " + std::to_string(req.n) + " choices, got " + std::to_string(out.generations.size()));
  return out;
}

SimilarityJudgment OpenAIBackend::similarity(const std::string& a, const std::string& b, SimilarityKind kind) {
  if (a == b) return {1.0, 1.0};
  if (cfg_.similarity_url.empty()) throw BackendError("no similarity_url configured");
  auto raw = post(cfg_.similarity_url, json{{"a", a}, {"b", b}, {"kind", to_string(kind)}}.dump());
  try {
    auto j = json::parse(raw);
    return {j.at("entail_forward").get<double>(), j.at("entail_backward").get<double>()};
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed similarity payload: ") + e.what());
  }
}

Generation OpenAIBackend::teacher_force(const std::vector<Message>& messages, const std::string& completion) {
  // Flatten the chat into a plain prompt and have the server echo the
  // completion's logprobs without generating anything new.
  std::string prompt;
  for (const auto& m : messages) prompt += m.role + ": " + m.content + "\n";
  prompt += "assistant: ";
  json body{{"model", cfg_.completions_model}, {"prompt", prompt + completion}, {"max_tokens", 0},
            {"echo", true},                   {"logprobs", 1}};
  auto raw = post(cfg_.base_url + "/completions", body.dump());
  Generation g;
  g.text = completion;
  try {
    auto j = json::parse(raw);
    const auto& lp = j.at("choices").at(0).at("logprobs");
    const auto& toks = lp.at("tokens");
    const auto& vals = lp.at("token_logprobs");
    const auto& offs = lp.at("text_offset");
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (offs.at(i).get<std::size_t>() < prompt.size() || vals.at(i).is_null()) continue;
      g.tokens.push_back({toks[i].get<std::string>(), std::min(0.0, vals[i].get<double>())});
    }
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed completions payload: ") + e.what());
  }
  if (g.tokens.empty() && !completion.empty()) throw BackendError("teacher forcing returned no completion tokens");
  return g;
}

}  // namespace uekit
