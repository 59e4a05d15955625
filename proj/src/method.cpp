#include "uekit/method.hpp"

#include <cctype>
#include <set>

#include "uekit/errors.hpp"

namespace uekit {

const std::vector<MethodInfo>& all_methods() {
  static const std::vector<MethodInfo> table{
      {Method::Lns, "lns", "LNS", false, false, false},
      {Method::Mars, "mars", "MARS", false, true, false},
      {Method::Lars, "lars", "LARS", true, false, false},
      {Method::Entropy, "entropy", "Entropy", false, false, false},
      {Method::SemanticEntropy, "semantic_entropy", "SemanticEntropy", false, true, true},
      {Method::SentSar, "sentsar", "SentSAR", false, true, true},
      {Method::Sar, "sar", "SAR", false, true, true},
      {Method::DegMat, "degmat", "DegMat", false, true, true},
      {Method::DegMatC, "degmat_c", "DegMat-C", true, true, true},
      {Method::SumEigV, "sum_eigv", "SumEigV", false, true, true},
      {Method::Kle, "kle", "KLE", false, true, true},
      {Method::Eccentricity, "eccentricity", "Eccentricity", false, true, true},
      {Method::EccentricityC, "eccentricity_c", "Eccentricity-C", true, true, true},
      {Method::SelfDetection, "self_detection", "SelfDetection", false, true, false},
      {Method::PTrue, "p_true", "P(true)", true, true, false},
      {Method::VerbalizedConfidence, "verbalized_confidence", "VerbalizedConfidence", true, true, false},
      {Method::AttentionScore, "attention_score", "AttentionScore", false, false, false},
      {Method::Inside, "inside", "INSIDE", false, false, false},
      {Method::Saplma, "saplma", "SAPLMA", true, false, false},
  };
  return table;
}

const MethodInfo& method_info(Method m) { return all_methods()[static_cast<std::size_t>(m)]; }

std::string method_id(Method m) { return method_info(m).id; }

namespace {
std::string squash(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '_' || c == '-' || c == ' ' || c == '(' || c == ')') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}
}  // namespace

Method parse_method(std::string_view name) {
  auto key = squash(name);
  for (const auto& info : all_methods())
    if (squash(info.id) == key || squash(info.display) == key) return info.method;
  throw ValidationError("unknown method \"" + std::string(name) + "\"");
}

std::vector<Method> parse_method_list(std::string_view s) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    auto piece = s.substr(start, comma == std::string_view::npos ? s.npos : comma - start);
    std::size_t b = piece.find_first_not_of(" \t"), e = piece.find_last_not_of(" \t");
    if (b != std::string_view::npos) out.push_back(parse_method(piece.substr(b, e - b + 1)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> validate_trace(const GenerationTrace& t, const std::vector<Method>& required) {
  std::vector<std::string> problems;
  std::set<std::string> seen;
  auto add = [&](std::string msg) {
    if (seen.insert(msg).second) problems.push_back(std::move(msg));
  };
  auto samples_with_tokens = [&](const char* who) {
    if (t.samples.empty()) {
      add(std::string(who) + ": samples required");
      return;
    }
    for (const auto& g : t.samples)
      if (g.tokens.empty()) add(std::string(who) + ": sample tokens required");
  };
  for (Method m : required) {
    const char* id = method_info(m).id;
    switch (m) {
      case Method::Lns:
      case Method::Mars:
        if (t.greedy.tokens.empty()) add(std::string(id) + ": greedy tokens required");
        break;
      case Method::Entropy:
      case Method::SemanticEntropy:
      case Method::SentSar:
      case Method::Sar:
        samples_with_tokens(id);
        break;
      case Method::DegMat:
      case Method::DegMatC:
      case Method::SumEigV:
      case Method::Kle:
      case Method::Eccentricity:
      case Method::EccentricityC:
        if (t.samples.empty()) add(std::string(id) + ": samples required");
        break;
      case Method::Inside:
        if (t.samples.empty()) add(std::string(id) + ": hidden_state required (no samples)");
        for (const auto& g : t.samples)
          if (!g.hidden) add(std::string(id) + ": hidden_state required on every sample");
        break;
      case Method::AttentionScore:
        if (!t.greedy.attention) add(std::string(id) + ": greedy attention_diagonals required");
        break;
      case Method::Lars:
      case Method::Saplma:
        if (!t.external_scores.count(id)) add(std::string(id) + ": external score \"" + id + "\" required");
        break;
      case Method::SelfDetection:
      case Method::PTrue:
      case Method::VerbalizedConfidence:
        break;
    }
  }
  return problems;
}

}  // namespace uekit
