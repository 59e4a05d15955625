#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uekit/backend.hpp"
#include "uekit/consistency_scorers.hpp"
#include "uekit/method.hpp"
#include "uekit/prompts.hpp"
#include "uekit/trace.hpp"

namespace uekit {

struct ScoringParams {
  SimilarityKind similarity_kind = SimilarityKind::NliEntailment;
  /// Similarity used inside token weighting (MARS, SAR) and SentSAR.
  SimilarityKind relevance_kind = SimilarityKind::Continuous;
  double cluster_threshold = 0.5;
  double sentsar_temperature = 1.0;
  double kle_t = 0.3;
  EccentricityParams eccentricity;
  double inside_alpha = 1e-3;
  bool attention_flip = false;
  int n_paraphrases = 5;
  int verbalized_retries = 1;
};

/// Scores one trace for a list of methods, sharing the similarity matrix
/// between graph methods. Values are in the common orientation (higher =
/// more uncertain).
///
/// Set-level graph methods see the B samples. DegMat-C and Eccentricity-C
/// score the greedy answer as node 0 of a graph over [greedy, samples...].
class TraceScorer {
 public:
  TraceScorer(Backend& backend, PromptSet prompts, ScoringParams params = {});

  std::map<Method, double> score(const GenerationTrace& t, const std::vector<Method>& methods) const;
  double score_one(const GenerationTrace& t, Method m) const;

  const ScoringParams& params() const { return params_; }
  const PromptSet& prompts() const { return prompts_; }
  Backend& backend() const { return backend_; }

 private:
  Backend& backend_;
  PromptSet prompts_;
  ScoringParams params_;
};

}  // namespace uekit
