#include "uekit/mock_backend.hpp"

#include <cmath>
#include <set>

#include "uekit/errors.hpp"
#include "uekit/text.hpp"

namespace uekit {

namespace {

double hash_unit(std::uint64_t h) {
  // splitmix64 finaliser, then 53 high bits.
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::string field(const BackendRequest& req, const std::string& key) {
  if (!req.task) return {};
  auto it = req.task->fields.find(key);
  return it == req.task->fields.end() ? std::string{} : it->second;
}

std::string last_user_message(const BackendRequest& req) {
  for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it)
    if (it->role == "user") return it->content;
  return req.messages.empty() ? std::string{} : req.messages.back().content;
}

std::vector<std::string> split_sentences(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < s.size(); ++i) {
    cur.push_back(s[i]);
    bool end = (s[i] == '.' || s[i] == '!' || s[i] == '?') && (i + 1 == s.size() || s[i + 1] == ' ' || s[i + 1] == '\n');
    if (end) {
      auto t = text::trim(cur);
      if (!t.empty()) out.push_back(t);
      cur.clear();
    }
  }
  auto t = text::trim(cur);
  if (!t.empty()) out.push_back(t);
  return out;
}

}  // namespace

MockBackend::MockBackend(std::uint64_t seed) : seed_(seed) {
  auto answer = [this](const BackendRequest& req, int index) {
    std::string q = field(req, "question");
    if (q.empty()) q = last_user_message(req);
    std::string d = text::hex_digest(q);
    // Greedy decoding returns candidate 0; sampling spreads over four.
    int pick = 0;
    if (req.temperature > 0.0) {
      double u = unit(req, index, 1);
      pick = u < 0.55 ? 0 : u < 0.8 ? 1 : u < 0.93 ? 2 : 3;
    }
    static const char* shapes[] = {"The answer is {d}.", "It is {d}.", "Probably {d} or {e}.", "I am not sure about {q}."};
    return text::render(shapes[pick], {{"d", d.substr(0, 6)}, {"e", d.substr(6, 6)}, {"q", d.substr(0, 3)}});
  };
  handlers_["answer"] = answer;
  handlers_["claim_answer"] = answer;
  handlers_["judge"] = [](const BackendRequest& req, int) -> std::string {
    auto ans = text::to_lower(text::trim(field(req, "answer")));
    std::string refs = field(req, "ground_truths");
    std::size_t start = 0;
    while (start <= refs.size()) {
      auto nl = refs.find('\n', start);
      auto line = text::trim(refs.substr(start, nl == std::string::npos ? std::string::npos : nl - start));
      if (line.rfind("- ", 0) == 0) line = line.substr(2);
      if (!line.empty() && text::to_lower(line) == ans) return "CORRECT";
      if (nl == std::string::npos) break;
      start = nl + 1;
    }
    return "INCORRECT";
  };
  handlers_["p_true"] = [this](const BackendRequest& req, int index) -> std::string {
    if (forced_p_true_) return "The generated answer is true";
    return unit(req, index, 2) < 0.5 ? "The generated answer is true" : "The generated answer is false";
  };
  handlers_["verbalized_confidence"] = [this](const BackendRequest& req, int index) {
    return std::to_string(static_cast<int>(unit(req, index, 3) * 101.0));
  };
  handlers_["paraphrase"] = [](const BackendRequest& req, int) {
    return "Rephrased #" + field(req, "index") + ": " + field(req, "question");
  };
  handlers_["decompose_step1"] = [](const BackendRequest& req, int) {
    return text::format_string_list(split_sentences(field(req, "text")));
  };
  handlers_["decompose_step2"] = [](const BackendRequest& req, int) {
    auto t = text::trim(field(req, "text"));
    return text::format_string_list(t.empty() ? std::vector<std::string>{} : std::vector<std::string>{t});
  };
  handlers_["question_gen"] = [](const BackendRequest& req, int index) {
    return "Question " + std::to_string(index + 1) + " about: " + field(req, "claim");
  };
  handlers_["prompt_tuning"] = [](const BackendRequest& req, int) {
    return "Answer with full confidence (candidate " + text::hex_digest(field(req, "history")).substr(0, 4) + ").";
  };
}

void MockBackend::on(const std::string& kind, Handler h) { handlers_[kind] = std::move(h); }

std::string MockBackend::context_digest(const std::vector<Message>& messages) {
  std::string blob;
  for (const auto& m : messages) {
    blob += m.role;
    blob.push_back('\x1f');
    blob += m.content;
    blob.push_back('\x1e');
  }
  return text::hex_digest(blob);
}

double MockBackend::unit(const BackendRequest& req, int index, std::uint64_t salt) const {
  std::string key = context_digest(req.messages) + "|" + std::to_string(req.temperature) + "|" + std::to_string(index) +
                    "|" + std::to_string(salt);
  return hash_unit(text::fnv1a(key, 0xcbf29ce484222325ULL ^ seed_));
}

std::vector<std::string> MockBackend::tokenize(const std::string& s) {
  auto words = text::split_whitespace(s);
  for (std::size_t i = 1; i < words.size(); ++i) words[i] = " " + words[i];
  return words;
}

double MockBackend::jaccard(const std::string& a, const std::string& b) {
  auto norm = [](const std::string& s) {
    std::set<std::string> out;
    for (auto w : text::split_whitespace(text::to_lower(s))) {
      while (!w.empty() && std::ispunct(static_cast<unsigned char>(w.back()))) w.pop_back();
      if (!w.empty()) out.insert(w);
    }
    return out;
  };
  auto sa = norm(a), sb = norm(b);
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& w : sa) inter += sb.count(w);
  return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

double MockBackend::token_logprob(const std::string& ctx, std::size_t pos, const std::string& tok) const {
  std::string key = ctx + "|" + std::to_string(pos) + "|" + tok;
  // Spread over roughly [-2.5, -0.01].
  return -(0.01 + 2.49 * hash_unit(text::fnv1a(key, 0x84222325cbf29ce4ULL ^ seed_)));
}

Generation MockBackend::make_generation(const std::string& ctx, const std::string& text) const {
  Generation g;
  g.text = text;
  auto toks = tokenize(text);
  for (std::size_t i = 0; i < toks.size(); ++i) g.tokens.push_back({toks[i], token_logprob(ctx, i, toks[i])});
  return g;
}

BackendResponse MockBackend::generate(const BackendRequest& req) {
  if (req.n < 1) throw ValidationError("n must be >= 1");
  if (req.temperature < 0.0) throw ValidationError("temperature must be >= 0");
  std::string kind = req.task ? req.task->kind : "answer";
  auto it = handlers_.find(kind);
  if (it == handlers_.end()) it = handlers_.find("answer");
  const std::string ctx = context_digest(req.messages);
  BackendResponse resp;
  for (int i = 0; i < req.n; ++i) {
    // Zero temperature: every copy is the greedy output.
    int index = req.temperature > 0.0 ? i : 0;
    Generation g = make_generation(ctx, it->second(req, index));
    if (kind == "p_true" && forced_p_true_) {
      for (auto& t : g.tokens)
        if (text::to_lower(text::trim(t.text)) == "true") t.logprob = std::log(*forced_p_true_);
    }
    if (!req.want_logprobs) g.tokens.clear();
    resp.usage.completion_tokens += static_cast<int>(g.tokens.size());
    resp.generations.push_back(std::move(g));
  }
  for (const auto& m : req.messages) resp.usage.prompt_tokens += static_cast<int>(tokenize(m.content).size());
  return resp;
}

SimilarityJudgment MockBackend::similarity(const std::string& a, const std::string& b, SimilarityKind) {
  double j = jaccard(a, b);
  return {j, j};
}

Generation MockBackend::teacher_force(const std::vector<Message>& messages, const std::string& completion) {
  return make_generation(context_digest(messages), completion);
}

}  // namespace uekit
