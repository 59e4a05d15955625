#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "uekit/trace.hpp"

namespace uekit {

enum class Method {
  Lns,
  Mars,
  Lars,
  Entropy,
  SemanticEntropy,
  SentSar,
  Sar,
  DegMat,
  DegMatC,
  SumEigV,
  Kle,
  Eccentricity,
  EccentricityC,
  SelfDetection,
  PTrue,
  VerbalizedConfidence,
  AttentionScore,
  Inside,
  Saplma,
};

struct MethodInfo {
  Method method;
  const char* id;        // stable lowercase id used in files and flags
  const char* display;   // human-readable name for reports
  bool confidence_style; // raw value is a confidence; stored negated
  bool needs_backend;    // issues model calls at scoring time
  bool needs_similarity; // consumes the sample similarity matrix
};

const std::vector<MethodInfo>& all_methods();
const MethodInfo& method_info(Method m);
std::string method_id(Method m);

/// Accepts ids and display names, case-insensitively, ignoring '_' and '-'.
Method parse_method(std::string_view name);
std::vector<Method> parse_method_list(std::string_view comma_separated);

/// Missing prerequisites for scoring `t` with `required`; empty means ok.
std::vector<std::string> validate_trace(const GenerationTrace& t, const std::vector<Method>& required);

}  // namespace uekit
