#pragma once

#include <string>
#include <vector>

#include "uekit/backend.hpp"
#include "uekit/method.hpp"
#include "uekit/prompts.hpp"
#include "uekit/trace.hpp"

namespace uekit {

/// -(1/L) sum logprob.
double lns(const Generation& g);

/// -(1/L) sum w_l * logprob_l. Weights are used as given.
double weighted_lns(const Generation& g, const std::vector<double>& w);

/// Token weights from how much dropping each token changes the text:
/// raw_l = 1 - sim(query + answer without token l, query + answer), then
/// rescaled to sum to L. All-zero raw weights fall back to uniform.
/// Approximates the SAR/MARS relevance weighting; not the original recipe.
std::vector<double> token_importance_weights(const std::string& query, const Generation& g, Backend& backend,
                                             SimilarityKind kind = SimilarityKind::Continuous);

/// Mean of lns over the samples.
double mc_entropy(const GenerationTrace& t);

struct SemanticClusters {
  std::vector<int> assignment;        // sample -> cluster id
  std::vector<double> cluster_prob;   // sums to 1
  std::vector<std::size_t> sizes;
};

/// Scans samples in order; each joins the first cluster whose first member
/// it bidirectionally entails above `threshold`, else opens a new one.
/// `probs` are the per-sample sequence probabilities to pool.
SemanticClusters semantic_clusters(const std::vector<double>& probs, const SimilarityMatrix& sim,
                                   double threshold = 0.5);
SemanticClusters semantic_clusters(const GenerationTrace& t, const SimilarityMatrix& sim, double threshold = 0.5);

/// Length-normalized sequence probability exp(-lns) of each sample.
std::vector<double> sample_probabilities(const GenerationTrace& t);

/// -(1/|C|) sum ln P(c).
double semantic_entropy(const SemanticClusters& c);
double semantic_entropy(const GenerationTrace& t, const SimilarityMatrix& sim, double threshold = 0.5);

/// -(1/B) sum ln(p_b + sum_{j!=b} s(b,j) p_j / temperature), s = mean of both
/// directions. No renormalization across samples.
double sentsar(const std::vector<double>& probs, const SimilarityMatrix& sim, double temperature = 1.0);
double sentsar(const GenerationTrace& t, const SimilarityMatrix& sim, double temperature = 1.0);

/// sentsar over p_b = exp(-weighted_lns(sample_b, token weights)).
double sar(const GenerationTrace& t, const SimilarityMatrix& sim, Backend& backend, double temperature = 1.0,
           SimilarityKind kind = SimilarityKind::Continuous);

/// Probability the model puts on "true" for the greedy answer, given the
/// samples as brainstormed ideas. Reads the first "true"/"false" token;
/// a "false" token with probability q counts as 1 - q.
double p_true_probability(const GenerationTrace& t, Backend& backend, const PromptSet& prompts);
/// -ln P(true); P(true) = 0 gives the sentinel.
double p_true(const GenerationTrace& t, Backend& backend, const PromptSet& prompts);

/// First integer in the reply, required to be in [0,100]. Throws ParseError.
int parse_confidence(const std::string& reply);
/// 1 - score/100, after up to `retries` extra attempts on unparseable output.
double verbalized_confidence(const GenerationTrace& t, Backend& backend, const PromptSet& prompts, int retries = 1);

/// Negated externally computed confidence (LARS, SAPLMA, ...).
double external_score(const GenerationTrace& t, const std::string& method_id);

}  // namespace uekit
