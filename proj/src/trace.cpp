#include "uekit/trace.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "uekit/errors.hpp"

namespace uekit {

using ojson = nlohmann::ordered_json;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{"id",      "prompt",     "ground_truths",   "dataset_tag",
                                          "transform_tag", "greedy", "samples", "sampling",
                                          "paraphrases",   "external_scores", "label"};
  return keys;
}

ojson gen_to_json(const Generation& g) {
  ojson j;
  j["text"] = g.text;
  ojson toks = ojson::array();
  for (const auto& t : g.tokens) toks.push_back(ojson{{"t", t.text}, {"lp", t.logprob}});
  j["tokens"] = std::move(toks);
  if (g.hidden) j["hidden"] = *g.hidden;
  if (g.attention) j["attn"] = *g.attention;
  return j;
}

double number(const ojson& v, const char* what, std::size_t line) {
  if (!v.is_number()) throw ParseError(std::string(what) + " must be a number", line);
  return v.get<double>();
}

Generation gen_from_json(const ojson& j, const std::string& where, std::size_t line) {
  if (!j.is_object()) throw ParseError(where + " must be an object", line);
  Generation g;
  if (!j.contains("text") || !j["text"].is_string()) throw ParseError(where + ".text missing", line);
  g.text = j["text"].get<std::string>();
  if (j.contains("tokens")) {
    const auto& toks = j["tokens"];
    if (!toks.is_array()) throw ParseError(where + ".tokens must be an array", line);
    for (const auto& t : toks) {
      if (!t.is_object() || !t.contains("t") || !t.contains("lp") || !t["t"].is_string())
        throw ParseError(where + ".tokens entries need t and lp", line);
      double lp = number(t["lp"], "lp", line);
      if (!std::isfinite(lp) || lp > 0.0)
        throw ValidationError(where + ": logprob must be finite and <= 0", line);
      g.tokens.push_back({t["t"].get<std::string>(), lp});
    }
  }
  if (j.contains("hidden") && !j["hidden"].is_null()) {
    std::vector<double> h;
    for (const auto& v : j["hidden"]) h.push_back(number(v, "hidden", line));
    g.hidden = std::move(h);
  }
  if (j.contains("attn") && !j["attn"].is_null()) {
    std::vector<std::vector<double>> heads;
    for (const auto& head : j["attn"]) {
      std::vector<double> diag;
      for (const auto& v : head) {
        double x = number(v, "attn", line);
        if (!(x > 0.0)) throw ValidationError(where + ": attention diagonal entries must be > 0", line);
        diag.push_back(x);
      }
      heads.push_back(std::move(diag));
    }
    g.attention = std::move(heads);
  }
  return g;
}

}  // namespace

GenerationTrace parse_trace_line(const std::string& line, std::size_t line_no) {
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw ParseError("record must be a JSON object", line_no);

  GenerationTrace t;
  auto req_str = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw ParseError(std::string("missing string field ") + key, line_no);
    return j[key].get<std::string>();
  };
  t.query.id = req_str("id");
  t.query.prompt = req_str("prompt");
  if (t.query.prompt.empty()) throw ValidationError("prompt must be nonempty", line_no);
  if (j.contains("ground_truths")) {
    if (!j["ground_truths"].is_array()) throw ParseError("ground_truths must be an array", line_no);
    for (const auto& g : j["ground_truths"]) {
      if (!g.is_string()) throw ParseError("ground_truths entries must be strings", line_no);
      t.query.ground_truths.push_back(g.get<std::string>());
    }
  }
  if (j.contains("dataset_tag")) t.query.dataset_tag = req_str("dataset_tag");
  if (j.contains("transform_tag") && !j["transform_tag"].is_null()) t.query.transform_tag = req_str("transform_tag");
  if (!j.contains("greedy")) throw ParseError("missing greedy generation", line_no);
  t.greedy = gen_from_json(j["greedy"], "greedy", line_no);
  if (j.contains("samples")) {
    if (!j["samples"].is_array()) throw ParseError("samples must be an array", line_no);
    std::size_t k = 0;
    for (const auto& s : j["samples"]) t.samples.push_back(gen_from_json(s, "samples[" + std::to_string(k++) + "]", line_no));
  }
  if (j.contains("sampling") && j["sampling"].is_object()) {
    const auto& s = j["sampling"];
    if (s.contains("temp")) t.sampling.temperature = number(s["temp"], "sampling.temp", line_no);
    if (s.contains("B")) {
      if (!s["B"].is_number_integer()) throw ParseError("sampling.B must be an integer", line_no);
      t.sampling.B = s["B"].get<int>();
    }
  } else {
    t.sampling.B = static_cast<int>(t.samples.size());
  }
  if (t.sampling.B != static_cast<int>(t.samples.size()))
    throw ValidationError("sampling.B = " + std::to_string(t.sampling.B) + " but " +
                              std::to_string(t.samples.size()) + " samples present",
                          line_no);
  if (j.contains("paraphrases") && !j["paraphrases"].is_null()) {
    std::vector<Generation> ps;
    std::size_t k = 0;
    for (const auto& p : j["paraphrases"]) ps.push_back(gen_from_json(p, "paraphrases[" + std::to_string(k++) + "]", line_no));
    t.paraphrase_answers = std::move(ps);
  }
  if (j.contains("external_scores")) {
    if (!j["external_scores"].is_object()) throw ParseError("external_scores must be an object", line_no);
    for (const auto& [k, v] : j["external_scores"].items()) t.external_scores[k] = number(v, "external score", line_no);
  }
  if (j.contains("label") && !j["label"].is_null()) {
    if (!j["label"].is_number_integer()) throw ParseError("label must be 0, 1 or null", line_no);
    int l = j["label"].get<int>();
    if (l != 0 && l != 1) throw ValidationError("label must be 0 or 1", line_no);
    t.label = l;
  }
  for (const auto& [k, v] : j.items())
    if (!known_keys().count(k)) t.extra.emplace_back(k, v.dump());
  return t;
}

std::string format_trace_line(const GenerationTrace& t) {
  ojson j;
  j["id"] = t.query.id;
  j["prompt"] = t.query.prompt;
  j["ground_truths"] = t.query.ground_truths;
  j["dataset_tag"] = t.query.dataset_tag;
  j["transform_tag"] = t.query.transform_tag ? ojson(*t.query.transform_tag) : ojson(nullptr);
  j["greedy"] = gen_to_json(t.greedy);
  ojson samples = ojson::array();
  for (const auto& s : t.samples) samples.push_back(gen_to_json(s));
  j["samples"] = std::move(samples);
  j["sampling"] = ojson{{"temp", t.sampling.temperature}, {"B", t.sampling.B}};
  if (t.paraphrase_answers) {
    ojson ps = ojson::array();
    for (const auto& p : *t.paraphrase_answers) ps.push_back(gen_to_json(p));
    j["paraphrases"] = std::move(ps);
  } else {
    j["paraphrases"] = nullptr;
  }
  ojson ext = ojson::object();
  for (const auto& [k, v] : t.external_scores) ext[k] = v;
  j["external_scores"] = std::move(ext);
  j["label"] = t.label ? ojson(*t.label) : ojson(nullptr);
  for (const auto& [k, v] : t.extra) j[k] = ojson::parse(v);
  return j.dump();
}

LabeledDataset read_dataset(std::istream& in) {
  LabeledDataset ds;
  std::map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    auto t = parse_trace_line(line, line_no);
    auto [it, fresh] = seen.emplace(t.query.id, line_no);
    if (!fresh)
      throw ValidationError("duplicate id \"" + t.query.id + "\" (first seen on line " + std::to_string(it->second) + ")",
                            line_no);
    ds.entries.push_back(std::move(t));
  }
  return ds;
}

void write_dataset(const LabeledDataset& ds, std::ostream& out) {
  for (const auto& t : ds.entries) out << format_trace_line(t) << '\n';
}

LabeledDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset " + path);
  return read_dataset(in);
}

void save_dataset(const LabeledDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write dataset " + path);
  write_dataset(ds, out);
  if (!out) throw Error("write failed for " + path);
}

double mean_logprob(const Generation& g) {
  if (g.tokens.empty()) throw ValidationError("generation has no tokens");
  double s = 0.0;
  for (const auto& t : g.tokens) s += t.logprob;
  return s / static_cast<double>(g.tokens.size());
}

}  // namespace uekit
