#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "uekit/trace.hpp"

namespace th {

inline uekit::Generation gen(const std::string& text, const std::vector<double>& lps) {
  uekit::Generation g;
  g.text = text;
  for (std::size_t i = 0; i < lps.size(); ++i) g.tokens.push_back({(i ? " t" : "t") + std::to_string(i), lps[i]});
  return g;
}

inline uekit::GenerationTrace trace(const std::string& id, const std::vector<std::vector<double>>& sample_lps = {}) {
  uekit::GenerationTrace t;
  t.query.id = id;
  t.query.prompt = "What is " + id + "?";
  t.query.ground_truths = {"answer " + id};
  t.query.dataset_tag = "unit";
  t.greedy = gen("greedy " + id, {-0.5, -0.25});
  for (std::size_t b = 0; b < sample_lps.size(); ++b)
    t.samples.push_back(gen("sample " + std::to_string(b), sample_lps[b]));
  t.sampling.B = static_cast<int>(t.samples.size());
  return t;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("uekit_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

}  // namespace th
