#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace uekit {

/// Reserved "infinite uncertainty" value. Sorts above every finite score and
/// survives a JSON round trip unchanged.
inline constexpr double kSentinel = std::numeric_limits<double>::max();
inline bool is_sentinel(double v) { return v >= kSentinel; }

struct TokenEvent {
  std::string text;
  double logprob = 0.0;
  bool operator==(const TokenEvent&) const = default;
};

struct Generation {
  std::string text;
  std::vector<TokenEvent> tokens;
  std::optional<std::vector<double>> hidden;               // d values
  std::optional<std::vector<std::vector<double>>> attention;  // one diagonal per head
  bool operator==(const Generation&) const = default;
};

struct QueryRecord {
  std::string id;
  std::string prompt;
  std::vector<std::string> ground_truths;
  std::string dataset_tag;
  std::optional<std::string> transform_tag;
  bool operator==(const QueryRecord&) const = default;
};

struct SamplingParams {
  double temperature = 1.0;
  int B = 5;
  bool operator==(const SamplingParams&) const = default;
};

/// One query with everything the scorers consume. `label` is 0 for a correct
/// answer, 1 for a hallucination.
struct GenerationTrace {
  QueryRecord query;
  Generation greedy;
  std::vector<Generation> samples;
  SamplingParams sampling;
  std::optional<std::vector<Generation>> paraphrase_answers;
  std::map<std::string, double> external_scores;
  std::optional<int> label;
  // Unrecognised top-level fields, kept as serialized JSON in file order.
  std::vector<std::pair<std::string, std::string>> extra;
  bool operator==(const GenerationTrace&) const = default;
};

struct LabeledDataset {
  std::vector<GenerationTrace> entries;
  std::size_t size() const { return entries.size(); }
  bool operator==(const LabeledDataset&) const = default;
};

/// Parses one dataset line. `line_no` is only used in error messages.
GenerationTrace parse_trace_line(const std::string& line, std::size_t line_no = 0);
std::string format_trace_line(const GenerationTrace& t);

LabeledDataset read_dataset(std::istream& in);
void write_dataset(const LabeledDataset& ds, std::ostream& out);
LabeledDataset load_dataset(const std::string& path);
void save_dataset(const LabeledDataset& ds, const std::string& path);

/// Sum of token logprobs divided by token count. Throws on empty tokens.
double mean_logprob(const Generation& g);

}  // namespace uekit
