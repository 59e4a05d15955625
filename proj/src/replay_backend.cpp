#include "uekit/replay_backend.hpp"

#include <fstream>
#include <functional>

#include "json.hpp"
#include "uekit/errors.hpp"
#include "uekit/text.hpp"

namespace uekit {

using json = nlohmann::json;  // std::map-backed: keys come out sorted

namespace {

json gen_json(const Generation& g) {
  json toks = json::array();
  for (const auto& t : g.tokens) toks.push_back({{"t", t.text}, {"lp", t.logprob}});
  return {{"text", g.text}, {"tokens", toks}};
}

Generation gen_from(const json& j) {
  Generation g;
  g.text = j.at("text").get<std::string>();
  for (const auto& t : j.at("tokens")) g.tokens.push_back({t.at("t").get<std::string>(), t.at("lp").get<double>()});
  return g;
}

json messages_json(const std::vector<Message>& msgs) {
  json arr = json::array();
  for (const auto& m : msgs) arr.push_back({{"role", m.role}, {"content", m.content}});
  return arr;
}

}  // namespace

std::string request_digest(const std::string& request_json) {
  json j;
  try {
    j = json::parse(request_json);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("request is not valid JSON: ") + e.what());
  }
  return text::hex_digest(j.dump());
}

std::string request_to_json(const BackendRequest& req) {
  json j{{"op", "generate"},
         {"messages", messages_json(req.messages)},
         {"max_tokens", req.max_tokens},
         {"temperature", req.temperature},
         {"n", req.n},
         {"want_logprobs", req.want_logprobs}};
  if (req.task) j["task"] = {{"kind", req.task->kind}, {"fields", req.task->fields}};
  return j.dump();
}

std::string response_to_json(const BackendResponse& resp) {
  json gens = json::array();
  for (const auto& g : resp.generations) gens.push_back(gen_json(g));
  return json{{"generations", gens},
              {"usage", {{"prompt_tokens", resp.usage.prompt_tokens}, {"completion_tokens", resp.usage.completion_tokens}}}}
      .dump();
}

BackendResponse response_from_json(const std::string& s) {
  auto j = json::parse(s);
  BackendResponse r;
  for (const auto& g : j.at("generations")) r.generations.push_back(gen_from(g));
  if (j.contains("usage")) {
    r.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0);
    r.usage.completion_tokens = j["usage"].value("completion_tokens", 0);
  }
  return r;
}

RecordReplayBackend::RecordReplayBackend(std::string store_path, Mode mode, std::shared_ptr<Backend> inner)
    : path_(std::move(store_path)), mode_(mode), inner_(std::move(inner)) {
  if (mode_ == Mode::Record && !inner_) throw Error("record mode needs an inner backend");
  std::ifstream in(path_, std::ios::binary);
  if (!in) {
    if (mode_ == Mode::Replay) throw Error("cannot open replay store " + path_);
    return;
  }
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = json::parse(line);
      store_[j.at("key").get<std::string>()] = j.at("response").dump();
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad replay record: ") + e.what(), n);
    }
  }
}

std::size_t RecordReplayBackend::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return store_.size();
}

std::string RecordReplayBackend::lookup_or_call(const std::string& request_json, const std::function<std::string()>& call) {
  const std::string key = request_digest(request_json);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = store_.find(key);
    if (it != store_.end()) return it->second;
    ++misses_;
  }
  if (mode_ == Mode::Replay) throw ReplayMiss(key);
  std::string response = call();
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, fresh] = store_.emplace(key, response);
  if (fresh) {
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot append to replay store " + path_);
    json rec{{"key", key}, {"request", json::parse(request_json)}, {"response", json::parse(response)}};
    out << rec.dump() << '\n';
  }
  return it->second;
}

BackendResponse RecordReplayBackend::generate(const BackendRequest& req) {
  auto s = lookup_or_call(request_to_json(req), [&] { return response_to_json(inner_->generate(req)); });
  return response_from_json(s);
}

SimilarityJudgment RecordReplayBackend::similarity(const std::string& a, const std::string& b, SimilarityKind kind) {
  json req{{"op", "similarity"}, {"a", a}, {"b", b}, {"kind", to_string(kind)}};
  auto s = lookup_or_call(req.dump(), [&] {
    auto r = inner_->similarity(a, b, kind);
    return json{{"entail_forward", r.entail_forward}, {"entail_backward", r.entail_backward}}.dump();
  });
  auto j = json::parse(s);
  return {j.at("entail_forward").get<double>(), j.at("entail_backward").get<double>()};
}

Generation RecordReplayBackend::teacher_force(const std::vector<Message>& messages, const std::string& completion) {
  json req{{"op", "teacher_force"}, {"messages", messages_json(messages)}, {"completion", completion}};
  auto s = lookup_or_call(req.dump(), [&] { return gen_json(inner_->teacher_force(messages, completion)).dump(); });
  return gen_from(json::parse(s));
}

}  // namespace uekit
