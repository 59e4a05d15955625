#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uekit/backend.hpp"
#include "uekit/method.hpp"
#include "uekit/metrics.hpp"
#include "uekit/scoring.hpp"
#include "uekit/trace.hpp"

namespace uekit {

/// One line of a scores file.
struct ScoreRow {
  std::string id;
  std::optional<int> label;
  std::string dataset_tag;
  std::map<std::string, double> scores;  // method id -> value
  bool operator==(const ScoreRow&) const = default;
};

/// Runs `fn(i)` for i in [0, n) on up to `parallelism` threads. The first
/// exception thrown is rethrown after all workers stop.
void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn);

/// Scores every trace; output order follows the dataset.
std::vector<ScoreRow> score_dataset(const LabeledDataset& ds, const std::vector<Method>& methods,
                                    const TraceScorer& scorer, int parallelism = 1);

std::string format_score_row(const ScoreRow& r);
ScoreRow parse_score_row(const std::string& line, std::size_t line_no = 0);
void write_scores(const std::vector<ScoreRow>& rows, std::ostream& out);
std::vector<ScoreRow> read_scores(std::istream& in);
void save_scores(const std::vector<ScoreRow>& rows, const std::string& path);
std::vector<ScoreRow> load_scores(const std::string& path);

/// Scores and labels of one method, skipping rows without a label.
ScoredDataset column(const std::vector<ScoreRow>& rows, const std::string& method_id);

struct GenerationParams {
  int B = 5;
  double temperature = 1.0;
  int max_tokens = 256;
  bool label = true;      // ask the judge for a correctness label
  int parallelism = 1;
};

/// Builds traces for bare queries: greedy answer at temperature 0, B
/// samples in one n=B request, optional judge label.
LabeledDataset generate_dataset(const std::vector<QueryRecord>& queries, Backend& backend, const PromptSet& prompts,
                                const GenerationParams& p = {});

}  // namespace uekit
