#include "uekit/longform.hpp"

#include <fstream>
#include <set>

#include "json.hpp"
#include "uekit/errors.hpp"
#include "uekit/sequence_scorers.hpp"
#include "uekit/text.hpp"

namespace uekit {

namespace {

std::vector<std::string> list_call(Backend& backend, const PromptSet& prompts, const std::string& tmpl,
                                   const std::string& payload) {
  std::map<std::string, std::string> fields{{"text", payload}};
  auto messages = prompts.render(tmpl, fields);
  for (int attempt = 0;; ++attempt) {
    std::string reply = complete(backend, messages, TaskAnnotation{tmpl, fields}, 0.0, 1024);
    try {
      return text::parse_string_list(reply);
    } catch (const ParseError&) {
      if (attempt >= 1) throw;
      messages.push_back({"assistant", reply});
      messages.push_back({"user", "Reply with only a python list of strings."});
    }
  }
}

std::map<std::string, std::string> answer_fields(const std::string& question) { return {{"question", question}}; }

}  // namespace

std::vector<std::string> decompose(const std::string& answer, Backend& backend, const PromptSet& prompts) {
  if (text::trim(answer).empty()) throw ValidationError("cannot decompose an empty answer");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& sentence : list_call(backend, prompts, "decompose_step1", answer))
    for (auto claim : list_call(backend, prompts, "decompose_step2", sentence)) {
      claim = text::trim(claim);
      if (claim.empty()) continue;
      if (seen.insert(text::to_lower(claim)).second) out.push_back(claim);
    }
  return out;
}

ClaimScorer lns_claim_scorer() {
  return [](const std::string&, const Generation& g) { return lns(g); };
}

std::string to_string(ClaimStrategy s) {
  switch (s) {
    case ClaimStrategy::Naive: return "naive";
    case ClaimStrategy::QG: return "qg";
    case ClaimStrategy::QAG: return "qag";
  }
  return "?";
}

ClaimStrategy parse_claim_strategy(const std::string& s) {
  auto l = text::to_lower(s);
  if (l == "naive") return ClaimStrategy::Naive;
  if (l == "qg") return ClaimStrategy::QG;
  if (l == "qag") return ClaimStrategy::QAG;
  throw ValidationError("unknown claim strategy \"" + s + "\"");
}

std::string to_string(Aggregation a) {
  switch (a) {
    case Aggregation::Min: return "min";
    case Aggregation::Max: return "max";
    case Aggregation::Mean: return "mean";
  }
  return "?";
}

Aggregation parse_aggregation(const std::string& s) {
  auto l = text::to_lower(s);
  if (l == "min") return Aggregation::Min;
  if (l == "max") return Aggregation::Max;
  if (l == "mean" || l == "avg") return Aggregation::Mean;
  throw ValidationError("unknown aggregation \"" + s + "\"");
}

double strategy_naive(const QueryRecord& x, const std::string& claim, const ClaimScorer& scorer, Backend& backend) {
  if (text::trim(claim).empty()) throw ValidationError("empty claim");
  Generation forced = backend.teacher_force({{"user", x.prompt}}, claim);
  return scorer(x.prompt, forced);
}

std::vector<std::string> generate_claim_questions(const QueryRecord& x, const std::string& claim, Backend& backend,
                                                  const PromptSet& prompts, const LongformParams& p) {
  if (p.n_questions < 1) throw ValidationError("need at least one question per claim");
  std::map<std::string, std::string> fields{{"main_question", x.prompt}, {"claim", claim}};
  BackendRequest req;
  req.messages = prompts.render("question_gen", fields);
  req.n = p.n_questions;
  req.temperature = p.question_temperature;
  req.max_tokens = 128;
  req.task = TaskAnnotation{"question_gen", fields};
  auto resp = backend.generate(req);
  std::vector<std::string> qs;
  for (const auto& g : resp.generations) qs.push_back(text::trim(g.text));
  return qs;
}

std::vector<double> strategy_qg(const QueryRecord& x, const std::string& claim, const ClaimScorer& scorer,
                                Backend& backend, const PromptSet& prompts, const LongformParams& p,
                                std::vector<ClaimQuestion>* trail) {
  if (text::trim(claim).empty()) throw ValidationError("empty claim");
  std::vector<double> scores;
  for (const auto& q : generate_claim_questions(x, claim, backend, prompts, p)) {
    Generation forced = backend.teacher_force(prompts.render("claim_answer", answer_fields(q)), claim);
    scores.push_back(scorer(q, forced));
    if (trail) trail->push_back({q, std::nullopt, std::nullopt});
  }
  return scores;
}

std::vector<double> strategy_qag(const QueryRecord& x, const std::string& claim, const ClaimScorer& scorer,
                                 Backend& backend, const PromptSet& prompts, const LongformParams& p,
                                 std::vector<ClaimQuestion>* trail) {
  if (text::trim(claim).empty()) throw ValidationError("empty claim");
  std::vector<double> scores;
  for (const auto& q : generate_claim_questions(x, claim, backend, prompts, p)) {
    auto fields = answer_fields(q);
    auto messages = prompts.render("claim_answer", fields);
    BackendRequest req;
    req.messages = messages;
    req.temperature = 0.0;
    req.max_tokens = 128;
    req.task = TaskAnnotation{"claim_answer", fields};
    Generation y = backend.generate(req).generations.at(0);
    y.text = text::trim(y.text);
    bool aligned = bidirectional_entails(backend.similarity(claim, y.text, p.kind), p.align_threshold);
    // Re-force the answer so scorers see the same token view as QG.
    scores.push_back(aligned ? scorer(q, backend.teacher_force(messages, y.text)) : kSentinel);
    if (trail) trail->push_back({q, y, aligned});
  }
  return scores;
}

double aggregate(const std::vector<double>& scores, Aggregation mode) {
  if (scores.empty()) throw ValidationError("cannot aggregate an empty score list");
  std::size_t finite = 0;
  double mn = kSentinel, mx = -kSentinel, sum = 0.0;
  bool any_sentinel = false;
  for (double s : scores) {
    if (is_sentinel(s)) {
      any_sentinel = true;
      continue;
    }
    ++finite;
    mn = std::min(mn, s);
    mx = std::max(mx, s);
    sum += s;
  }
  switch (mode) {
    case Aggregation::Max: return any_sentinel ? kSentinel : mx;
    case Aggregation::Min: return finite ? mn : kSentinel;
    case Aggregation::Mean: return finite ? sum / static_cast<double>(finite) : kSentinel;
  }
  return kSentinel;
}

double ClaimRecord::aggregate(Aggregation a) const { return uekit::aggregate(scores, a); }

ClaimLabeler file_labeler(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open claim labels " + path);
  auto table = std::make_shared<std::map<std::string, int>>();
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      (*table)[text::to_lower(text::trim(j.at("claim").get<std::string>()))] = j.at("label").get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad claim label: ") + e.what(), n);
    }
  }
  return [table](const ClaimRecord& c) {
    auto it = table->find(text::to_lower(text::trim(c.claim_text)));
    if (it == table->end()) throw ValidationError("no label for claim \"" + c.claim_text + "\"");
    return it->second;
  };
}

ClaimRecord score_claim(const QueryRecord& x, const std::string& claim, ClaimStrategy s, const ClaimScorer& scorer,
                        Backend& backend, const PromptSet& prompts, const LongformParams& p) {
  ClaimRecord r;
  r.claim_text = claim;
  r.parent_query = x;
  r.strategy = s;
  switch (s) {
    case ClaimStrategy::Naive: r.scores = {strategy_naive(x, claim, scorer, backend)}; break;
    case ClaimStrategy::QG: r.scores = strategy_qg(x, claim, scorer, backend, prompts, p, &r.questions); break;
    case ClaimStrategy::QAG: r.scores = strategy_qag(x, claim, scorer, backend, prompts, p, &r.questions); break;
  }
  return r;
}

std::vector<ClaimEvalRow> evaluate_claims(const std::vector<ClaimRecord>& claims) {
  std::map<ClaimStrategy, std::vector<const ClaimRecord*>> by;
  for (const auto& c : claims) {
    if (!c.label) throw ValidationError("claim \"" + c.claim_text + "\" has no label");
    by[c.strategy].push_back(&c);
  }
  std::vector<ClaimEvalRow> rows;
  for (const auto& [s, list] : by)
    for (auto a : {Aggregation::Min, Aggregation::Max, Aggregation::Mean}) {
      ScoredDataset d;
      for (const auto* c : list) {
        d.scores.push_back(c->aggregate(a));
        d.labels.push_back(*c->label);
      }
      rows.push_back({to_string(s), to_string(a), prr(d), list.size()});
      if (s == ClaimStrategy::Naive) break;  // one score per claim: aggregations coincide
    }
  return rows;
}

std::string claim_to_json(const ClaimRecord& c) {
  nlohmann::ordered_json j;
  j["claim"] = c.claim_text;
  j["query_id"] = c.parent_query.id;
  j["strategy"] = to_string(c.strategy);
  nlohmann::ordered_json qs = nlohmann::ordered_json::array();
  for (const auto& q : c.questions) {
    nlohmann::ordered_json e;
    e["question"] = q.question;
    if (q.answer) e["answer"] = q.answer->text;
    if (q.aligned) e["aligned"] = *q.aligned;
    qs.push_back(std::move(e));
  }
  j["questions"] = std::move(qs);
  j["scores"] = c.scores;
  j["label"] = c.label ? nlohmann::ordered_json(*c.label) : nlohmann::ordered_json(nullptr);
  return j.dump();
}

}  // namespace uekit
