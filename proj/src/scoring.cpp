#include "uekit/scoring.hpp"

#include <numeric>

#include "uekit/errors.hpp"
#include "uekit/internal_scorers.hpp"
#include "uekit/sequence_scorers.hpp"
#include "uekit/text.hpp"

namespace uekit {

TraceScorer::TraceScorer(Backend& backend, PromptSet prompts, ScoringParams params)
    : backend_(backend), prompts_(std::move(prompts)), params_(params) {}

double TraceScorer::score_one(const GenerationTrace& t, Method m) const { return score(t, {m}).at(m); }

std::map<Method, double> TraceScorer::score(const GenerationTrace& t, const std::vector<Method>& methods) const {
  auto problems = validate_trace(t, methods);
  if (!problems.empty()) throw ValidationError("trace " + t.query.id + ": " + text::join(problems, "; "));

  // Built lazily, once per trace.
  std::optional<SimilarityMatrix> with_greedy;  // [greedy, samples...]
  std::optional<SimilarityMatrix> relevance;    // samples only, relevance kind
  auto nli_all = [&]() -> const SimilarityMatrix& {
    if (!with_greedy) {
      std::vector<std::string> texts{t.greedy.text};
      for (const auto& s : t.samples) texts.push_back(s.text);
      with_greedy = build_similarity_matrix(backend_, texts, params_.similarity_kind);
    }
    return *with_greedy;
  };
  auto nli_samples = [&]() {
    std::vector<std::size_t> idx(t.samples.size());
    std::iota(idx.begin(), idx.end(), std::size_t{1});
    return nli_all().select(idx);
  };
  auto rel_samples = [&]() -> const SimilarityMatrix& {
    if (!relevance) {
      if (params_.relevance_kind == params_.similarity_kind) {
        relevance = nli_samples();
      } else {
        std::vector<std::string> texts;
        for (const auto& s : t.samples) texts.push_back(s.text);
        relevance = build_similarity_matrix(backend_, texts, params_.relevance_kind);
      }
    }
    return *relevance;
  };

  std::map<Method, double> out;
  for (Method m : methods) {
    if (out.count(m)) continue;
    double v = 0.0;
    switch (m) {
      case Method::Lns: v = lns(t.greedy); break;
      case Method::Mars:
        v = weighted_lns(t.greedy, token_importance_weights(t.query.prompt, t.greedy, backend_, params_.relevance_kind));
        break;
      case Method::Entropy: v = mc_entropy(t); break;
      case Method::SemanticEntropy: v = semantic_entropy(t, nli_samples(), params_.cluster_threshold); break;
      case Method::SentSar: v = sentsar(t, rel_samples(), params_.sentsar_temperature); break;
      case Method::Sar: v = sar(t, rel_samples(), backend_, params_.sentsar_temperature, params_.relevance_kind); break;
      case Method::DegMat: v = degmat(build_graph(nli_samples())); break;
      case Method::DegMatC: v = degmat_c(build_graph(nli_all()), 0); break;
      case Method::SumEigV: v = sum_eigv(build_graph(nli_samples())); break;
      case Method::Kle: v = kle(build_graph(nli_samples()), params_.kle_t); break;
      case Method::Eccentricity: v = eccentricity(build_graph(nli_samples()), params_.eccentricity); break;
      case Method::EccentricityC: v = eccentricity_c(build_graph(nli_all()), 0, params_.eccentricity); break;
      case Method::SelfDetection:
        v = self_detection(t, backend_, prompts_,
                           {params_.n_paraphrases, params_.cluster_threshold, params_.similarity_kind});
        break;
      case Method::PTrue: v = p_true(t, backend_, prompts_); break;
      case Method::VerbalizedConfidence:
        v = verbalized_confidence(t, backend_, prompts_, params_.verbalized_retries);
        break;
      case Method::AttentionScore: v = attention_score(t.greedy, params_.attention_flip); break;
      case Method::Inside: v = inside_eigenscore(t, params_.inside_alpha); break;
      case Method::Lars:
      case Method::Saplma: v = external_score(t, method_id(m)); break;
    }
    out[m] = v;
  }
  return out;
}

}  // namespace uekit
