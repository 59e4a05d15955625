#include "uekit/pipeline.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "uekit/errors.hpp"
#include "uekit/metrics.hpp"

namespace uekit {

using ojson = nlohmann::ordered_json;

void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, parallelism)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      while (!failed) {
        std::size_t i = next++;
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<ScoreRow> score_dataset(const LabeledDataset& ds, const std::vector<Method>& methods,
                                    const TraceScorer& scorer, int parallelism) {
  std::vector<ScoreRow> rows(ds.size());
  parallel_for(ds.size(), parallelism, [&](std::size_t i) {
    const auto& t = ds.entries[i];
    ScoreRow r{t.query.id, t.label, t.query.dataset_tag, {}};
    for (const auto& [m, v] : scorer.score(t, methods)) r.scores[method_id(m)] = v;
    rows[i] = std::move(r);
  });
  return rows;
}

std::string format_score_row(const ScoreRow& r) {
  ojson j;
  j["id"] = r.id;
  j["label"] = r.label ? ojson(*r.label) : ojson(nullptr);
  j["dataset_tag"] = r.dataset_tag;
  ojson s = ojson::object();
  for (const auto& [k, v] : r.scores) s[k] = v;
  j["scores"] = std::move(s);
  return j.dump();
}

ScoreRow parse_score_row(const std::string& line, std::size_t line_no) {
  try {
    auto j = ojson::parse(line);
    ScoreRow r;
    r.id = j.at("id").get<std::string>();
    if (j.contains("label") && !j["label"].is_null()) r.label = j["label"].get<int>();
    r.dataset_tag = j.value("dataset_tag", "");
    for (const auto& [k, v] : j.at("scores").items()) r.scores[k] = v.get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad score row: ") + e.what(), line_no);
  }
}

void write_scores(const std::vector<ScoreRow>& rows, std::ostream& out) {
  for (const auto& r : rows) out << format_score_row(r) << '\n';
}

std::vector<ScoreRow> read_scores(std::istream& in) {
  std::vector<ScoreRow> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(parse_score_row(line, n));
  }
  return rows;
}

void save_scores(const std::vector<ScoreRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  write_scores(rows, out);
}

std::vector<ScoreRow> load_scores(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_scores(in);
}

ScoredDataset column(const std::vector<ScoreRow>& rows, const std::string& id) {
  ScoredDataset d;
  for (const auto& r : rows) {
    if (!r.label) continue;
    auto it = r.scores.find(id);
    if (it == r.scores.end()) throw ValidationError("row " + r.id + " has no score for " + id);
    d.scores.push_back(it->second);
    d.labels.push_back(*r.label);
  }
  return d;
}

LabeledDataset generate_dataset(const std::vector<QueryRecord>& queries, Backend& backend, const PromptSet& prompts,
                                const GenerationParams& p) {
  LabeledDataset ds;
  ds.entries.resize(queries.size());
  parallel_for(queries.size(), p.parallelism, [&](std::size_t i) {
    const auto& q = queries[i];
    GenerationTrace t;
    t.query = q;
    std::map<std::string, std::string> fields{{"question", q.prompt}};
    BackendRequest greedy;
    greedy.messages = {{"user", q.prompt}};
    greedy.max_tokens = p.max_tokens;
    greedy.temperature = 0.0;
    greedy.task = TaskAnnotation{"answer", fields};
    t.greedy = backend.generate(greedy).generations.at(0);
    if (p.B > 0) {
      BackendRequest s = greedy;
      s.temperature = p.temperature;
      s.n = p.B;
      t.samples = backend.generate(s).generations;
    }
    t.sampling = {p.temperature, static_cast<int>(t.samples.size())};
    if (p.label && !q.ground_truths.empty()) t.label = judge_correctness(backend, prompts, q, t.greedy.text);
    ds.entries[i] = std::move(t);
  });
  return ds;
}

}  // namespace uekit
