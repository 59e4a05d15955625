#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uekit/backend.hpp"
#include "uekit/metrics.hpp"
#include "uekit/prompts.hpp"
#include "uekit/trace.hpp"

namespace uekit {

/// Splits a long answer into atomic claims: one step-1 call over the whole
/// text, one step-2 call per step-1 claim. Order is kept, duplicates are
/// dropped case-insensitively, an empty step-2 list drops that sentence.
/// Each call is retried once when its reply is not a list literal.
std::vector<std::string> decompose(const std::string& answer, Backend& backend, const PromptSet& prompts);

/// Scores a (question, response) pair. For probability-based methods the
/// response arrives teacher-forced, so its tokens carry logprobs.
using ClaimScorer = std::function<double(const std::string& question, const Generation& response)>;

/// LNS of the forced response.
ClaimScorer lns_claim_scorer();

enum class ClaimStrategy { Naive, QG, QAG };
std::string to_string(ClaimStrategy s);
ClaimStrategy parse_claim_strategy(const std::string& s);

enum class Aggregation { Min, Max, Mean };
std::string to_string(Aggregation a);
Aggregation parse_aggregation(const std::string& s);

struct ClaimQuestion {
  std::string question;
  std::optional<Generation> answer;  // QAG only
  std::optional<bool> aligned;       // QAG only
};

struct ClaimRecord {
  std::string claim_text;
  QueryRecord parent_query;
  ClaimStrategy strategy = ClaimStrategy::Naive;
  std::vector<ClaimQuestion> questions;
  std::vector<double> scores;
  std::optional<int> label;
  double aggregate(Aggregation a) const;
};

struct LongformParams {
  int n_questions = 5;
  double align_threshold = 0.5;
  SimilarityKind kind = SimilarityKind::NliEntailment;
  double question_temperature = 1.0;
};

/// U(x, c): the claim teacher-forced as the reply to the original query.
double strategy_naive(const QueryRecord& x, const std::string& claim, const ClaimScorer& scorer, Backend& backend);

/// Generates n_q questions whose answer is the claim (one request, n = n_q),
/// then scores the claim, teacher-forced under the single-claim answer
/// prompt, for each question.
std::vector<double> strategy_qg(const QueryRecord& x, const std::string& claim, const ClaimScorer& scorer,
                                Backend& backend, const PromptSet& prompts, const LongformParams& p = {},
                                std::vector<ClaimQuestion>* trail = nullptr);

/// As QG, but the model answers each question itself. An answer that
/// bidirectionally entails the claim is scored; otherwise the sentinel.
std::vector<double> strategy_qag(const QueryRecord& x, const std::string& claim, const ClaimScorer& scorer,
                                 Backend& backend, const PromptSet& prompts, const LongformParams& p = {},
                                 std::vector<ClaimQuestion>* trail = nullptr);

std::vector<std::string> generate_claim_questions(const QueryRecord& x, const std::string& claim, Backend& backend,
                                                  const PromptSet& prompts, const LongformParams& p);

/// Sentinel-aware: min and mean skip sentinels unless all are sentinels;
/// max saturates on any sentinel.
double aggregate(const std::vector<double>& scores, Aggregation mode);

/// Returns 0 (supported) or 1 (unsupported) for a claim.
using ClaimLabeler = std::function<int(const ClaimRecord&)>;
/// Looks claims up in a JSONL file of {"claim": ..., "label": 0|1}.
ClaimLabeler file_labeler(const std::string& path);

ClaimRecord score_claim(const QueryRecord& x, const std::string& claim, ClaimStrategy s, const ClaimScorer& scorer,
                        Backend& backend, const PromptSet& prompts, const LongformParams& p = {});

struct ClaimEvalRow {
  std::string strategy;
  std::string aggregation;
  double prr = 0.0;
  std::size_t claims = 0;
};

/// PRR over the pooled claims per (strategy, aggregation). Every claim
/// must carry a label.
std::vector<ClaimEvalRow> evaluate_claims(const std::vector<ClaimRecord>& claims);

std::string claim_to_json(const ClaimRecord& c);

}  // namespace uekit
