#include "uekit/transforms.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "uekit/errors.hpp"
#include "uekit/text.hpp"

namespace uekit {

QueryRecord apply_context(const QueryRecord& x, const std::vector<std::pair<std::string, std::string>>& history,
                          const std::string& tag) {
  if (history.empty()) throw ValidationError("context history must not be empty");
  QueryRecord out = x;
  std::string prefix;
  for (const auto& [q, a] : history) prefix += "Question: " + q + "\nAnswer: " + a + "\n\n";
  out.prompt = prefix + x.prompt;
  out.transform_tag = tag;
  return out;
}

LabeledDataset apply_context_dataset(const LabeledDataset& ds, bool similar, int pairs, std::uint64_t seed) {
  if (pairs < 1) throw ValidationError("history_pairs must be >= 1");
  LabeledDataset out = ds;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::vector<std::size_t> pool;
    for (std::size_t j = 0; j < ds.size(); ++j)
      if (j != i && (ds.entries[j].query.dataset_tag == ds.entries[i].query.dataset_tag) == similar) pool.push_back(j);
    if (pool.size() < static_cast<std::size_t>(pairs))
      throw ValidationError("not enough " + std::string(similar ? "same" : "other") + "-dataset queries to build context for " +
                            ds.entries[i].query.id);
    for (int k = 0; k < pairs; ++k) {  // partial Fisher-Yates
      std::size_t j = static_cast<std::size_t>(k) + static_cast<std::size_t>(rng() % (pool.size() - static_cast<std::size_t>(k)));
      std::swap(pool[static_cast<std::size_t>(k)], pool[j]);
    }
    std::vector<std::pair<std::string, std::string>> history;
    for (int k = 0; k < pairs; ++k) {
      const auto& h = ds.entries[pool[static_cast<std::size_t>(k)]];
      history.emplace_back(h.query.prompt, h.samples.empty() ? h.greedy.text : h.samples.front().text);
    }
    out.entries[i].query = apply_context(ds.entries[i].query, history, similar ? "context_similar" : "context_dissimilar");
  }
  return out;
}

std::string to_string(TypoOp op) {
  switch (op) {
    case TypoOp::Replace: return "replace";
    case TypoOp::Swap: return "swap";
    case TypoOp::Erase: return "erase";
    case TypoOp::Insert: return "insert";
  }
  return "?";
}

std::string typo(const std::string& input, int count, std::uint64_t seed, std::vector<TypoEdit>* trail) {
  if (count < 1 || count > 2) throw ValidationError("typo count must be 1 or 2");
  std::u32string s = text::utf8_decode(input);
  auto is_ws = [](char32_t c) { return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f'; };
  std::size_t b = 0, e = s.size();
  while (b < e && is_ws(s[b])) ++b;
  while (e > b && is_ws(s[e - 1])) --e;
  if (e - b < 2) throw ValidationError("prompt too short for a typo (needs 2 characters)");

  std::mt19937_64 rng(seed);
  auto draw = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto letter = [&](char32_t avoid) {
    char32_t c;
    do c = U'a' + static_cast<char32_t>(draw(26));
    while (c == avoid);
    return c;
  };
  for (int k = 0; k < count; ++k) {
    std::size_t len = e - b;
    auto op = static_cast<TypoOp>(draw(4));
    if (op == TypoOp::Erase && len < 2) op = TypoOp::Insert;  // never empty the span
    std::size_t pos = 0;
    switch (op) {
      case TypoOp::Replace:
        pos = b + draw(len);
        s[pos] = letter(s[pos]);
        break;
      case TypoOp::Swap: {
        if (len < 2) {
          op = TypoOp::Insert;
          pos = b + draw(len + 1);
          s.insert(s.begin() + static_cast<std::ptrdiff_t>(pos), letter(0));
          ++e;
          break;
        }
        // Prefer a pair whose swap is visible.
        std::vector<std::size_t> visible;
        for (std::size_t i = b; i + 1 < e; ++i)
          if (s[i] != s[i + 1]) visible.push_back(i);
        pos = visible.empty() ? b + draw(len - 1) : visible[draw(visible.size())];
        std::swap(s[pos], s[pos + 1]);
        break;
      }
      case TypoOp::Erase:
        pos = b + draw(len);
        s.erase(s.begin() + static_cast<std::ptrdiff_t>(pos));
        --e;
        break;
      case TypoOp::Insert:
        pos = b + draw(len + 1);
        s.insert(s.begin() + static_cast<std::ptrdiff_t>(pos), letter(0));
        ++e;
        break;
    }
    if (trail) trail->push_back({op, pos});
  }
  return text::utf8_encode(s);
}

QueryRecord apply_typo(const QueryRecord& x, int count, std::uint64_t seed) {
  QueryRecord out = x;
  out.prompt = typo(x.prompt, count, seed);
  out.transform_tag = "typo";
  return out;
}

QueryRecord apply_adversarial(const QueryRecord& x, const std::string& text) {
  QueryRecord out = x;
  if (!text.empty()) out.prompt = text + " " + x.prompt;
  out.transform_tag = "adversarial";
  return out;
}

std::string to_string(TransformKind k) {
  switch (k) {
    case TransformKind::ContextSimilar: return "context_similar";
    case TransformKind::ContextDissimilar: return "context_dissimilar";
    case TransformKind::Typo: return "typo";
    case TransformKind::Adversarial: return "adversarial";
  }
  return "?";
}

TransformKind parse_transform(const std::string& s) {
  auto l = text::to_lower(s);
  for (auto k : {TransformKind::ContextSimilar, TransformKind::ContextDissimilar, TransformKind::Typo, TransformKind::Adversarial})
    if (to_string(k) == l) return k;
  throw ValidationError("unknown transform \"" + s + "\"");
}

LabeledDataset apply_transform(const LabeledDataset& ds, const TransformSpec& spec) {
  switch (spec.kind) {
    case TransformKind::ContextSimilar: return apply_context_dataset(ds, true, spec.history_pairs, spec.seed);
    case TransformKind::ContextDissimilar: return apply_context_dataset(ds, false, spec.history_pairs, spec.seed);
    case TransformKind::Typo: {
      LabeledDataset out = ds;
      for (std::size_t i = 0; i < ds.size(); ++i)
        // Per-query seed so one query's edits do not depend on its position.
        out.entries[i].query = apply_typo(ds.entries[i].query, spec.typo_count,
                                          spec.seed ^ text::fnv1a(ds.entries[i].query.id));
      return out;
    }
    case TransformKind::Adversarial: {
      LabeledDataset out = ds;
      for (auto& t : out.entries) t.query = apply_adversarial(t.query, spec.adversarial_text);
      return out;
    }
  }
  return ds;
}

double CandidateResult::mean_prr() const {
  if (prr.empty()) return 0.0;
  double s = 0.0;
  for (double v : prr) s += v;
  return s / static_cast<double>(prr.size());
}

SearchResult adversarial_search(const CandidateEvaluator& eval, Backend& backend, const PromptSet& prompts,
                                const std::vector<std::string>& probe_methods, const SearchParams& p) {
  SearchResult r;
  r.best_prompt = p.initial_prompt;
  r.best = eval(p.initial_prompt);
  r.history.push_back({p.initial_prompt, r.best, true});
  const double floor = r.best.accuracy - p.accuracy_budget;
  for (int it = 0; it < p.iterations; ++it) {
    std::ostringstream hist;
    for (const auto& h : r.history) {
      hist << "Prompt: " << (h.prompt.empty() ? "(none)" : h.prompt) << "\n";
      for (std::size_t m = 0; m < probe_methods.size() && m < h.result.prr.size(); ++m)
        hist << "  " << probe_methods[m] << " PRR: " << h.result.prr[m] << "\n";
      hist << "  Accuracy: " << h.result.accuracy << "\n\n";
    }
    std::map<std::string, std::string> fields{{"history", hist.str()}, {"iteration", std::to_string(it)}};
    std::string cand = text::trim(complete(backend, prompts.render("prompt_tuning", fields),
                                           TaskAnnotation{"prompt_tuning", fields}, 1.0, 256));
    CandidateResult res = eval(cand);
    bool ok = res.accuracy >= floor - 1e-12;
    r.history.push_back({cand, res, ok});
    if (ok && res.mean_prr() < r.best.mean_prr()) {
      r.best = res;
      r.best_prompt = cand;
    }
  }
  return r;
}

}  // namespace uekit
