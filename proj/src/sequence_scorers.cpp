#include "uekit/sequence_scorers.hpp"

#include <cctype>
#include <cmath>

#include "uekit/errors.hpp"
#include "uekit/text.hpp"

namespace uekit {

double lns(const Generation& g) { return -mean_logprob(g); }

double weighted_lns(const Generation& g, const std::vector<double>& w) {
  if (g.tokens.empty()) throw ValidationError("generation has no tokens");
  if (w.size() != g.tokens.size())
    throw ValidationError("weight length " + std::to_string(w.size()) + " != token count " + std::to_string(g.tokens.size()));
  double s = 0.0;
  for (std::size_t l = 0; l < w.size(); ++l) s += w[l] * g.tokens[l].logprob;
  return -s / static_cast<double>(w.size());
}

std::vector<double> token_importance_weights(const std::string& query, const Generation& g, Backend& backend,
                                             SimilarityKind kind) {
  const std::size_t L = g.tokens.size();
  if (L == 0) throw ValidationError("generation has no tokens");
  std::string full;
  for (const auto& t : g.tokens) full += t.text;
  const std::string base = query + " " + full;
  std::vector<double> raw(L);
  double total = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    std::string without;
    for (std::size_t k = 0; k < L; ++k)
      if (k != l) without += g.tokens[k].text;
    auto s = backend.similarity(query + " " + without, base, kind);
    raw[l] = std::max(0.0, 1.0 - 0.5 * (s.entail_forward + s.entail_backward));
    total += raw[l];
  }
  if (total <= 0.0) return std::vector<double>(L, 1.0);
  for (auto& w : raw) w *= static_cast<double>(L) / total;
  return raw;
}

double mc_entropy(const GenerationTrace& t) {
  if (t.samples.empty()) throw ValidationError("entropy needs at least one sample");
  double s = 0.0;
  for (const auto& g : t.samples) s += lns(g);
  return s / static_cast<double>(t.samples.size());
}

std::vector<double> sample_probabilities(const GenerationTrace& t) {
  std::vector<double> p;
  for (const auto& g : t.samples) p.push_back(std::exp(-lns(g)));
  return p;
}

SemanticClusters semantic_clusters(const std::vector<double>& probs, const SimilarityMatrix& sim, double threshold) {
  const std::size_t B = probs.size();
  if (sim.size() != B) throw ValidationError("similarity matrix does not cover every sample");
  SemanticClusters c;
  std::vector<std::size_t> reps;
  std::vector<double> mass;
  for (std::size_t b = 0; b < B; ++b) {
    int found = -1;
    for (std::size_t k = 0; k < reps.size(); ++k) {
      auto r = static_cast<Eigen::Index>(reps[k]), i = static_cast<Eigen::Index>(b);
      if (bidirectional_entails({sim.forward(r, i), sim.forward(i, r)}, threshold)) {
        found = static_cast<int>(k);
        break;
      }
    }
    if (found < 0) {
      found = static_cast<int>(reps.size());
      reps.push_back(b);
      mass.push_back(0.0);
      c.sizes.push_back(0);
    }
    c.assignment.push_back(found);
    mass[static_cast<std::size_t>(found)] += probs[b];
    ++c.sizes[static_cast<std::size_t>(found)];
  }
  double total = 0.0;
  for (double m : mass) total += m;
  for (double m : mass) c.cluster_prob.push_back(total > 0.0 ? m / total : 1.0 / static_cast<double>(mass.size()));
  return c;
}

SemanticClusters semantic_clusters(const GenerationTrace& t, const SimilarityMatrix& sim, double threshold) {
  return semantic_clusters(sample_probabilities(t), sim, threshold);
}

double semantic_entropy(const SemanticClusters& c) {
  if (c.cluster_prob.empty()) throw ValidationError("no clusters");
  double s = 0.0;
  for (double p : c.cluster_prob) s += std::log(p);
  double h = -s / static_cast<double>(c.cluster_prob.size());
  return h < 0.0 ? 0.0 : h;  // -0.0 and rounding noise for a single cluster
}

double semantic_entropy(const GenerationTrace& t, const SimilarityMatrix& sim, double threshold) {
  if (t.samples.empty()) throw ValidationError("semantic entropy needs at least one sample");
  return semantic_entropy(semantic_clusters(t, sim, threshold));
}

double sentsar(const std::vector<double>& probs, const SimilarityMatrix& sim, double temperature) {
  const std::size_t B = probs.size();
  if (B == 0) throw ValidationError("SentSAR needs at least one sample");
  if (sim.size() != B) throw ValidationError("similarity matrix does not cover every sample");
  if (!(temperature > 0.0)) throw ValidationError("SentSAR temperature must be > 0");
  double s = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    double boosted = probs[b];
    for (std::size_t j = 0; j < B; ++j) {
      if (j == b) continue;
      auto bi = static_cast<Eigen::Index>(b), ji = static_cast<Eigen::Index>(j);
      double r = 0.5 * (sim.forward(bi, ji) + sim.forward(ji, bi));
      boosted += r * probs[j] / temperature;
    }
    s += std::log(boosted);
  }
  return -s / static_cast<double>(B);
}

double sentsar(const GenerationTrace& t, const SimilarityMatrix& sim, double temperature) {
  return sentsar(sample_probabilities(t), sim, temperature);
}

double sar(const GenerationTrace& t, const SimilarityMatrix& sim, Backend& backend, double temperature,
           SimilarityKind kind) {
  std::vector<double> probs;
  for (const auto& g : t.samples) {
    auto w = token_importance_weights(t.query.prompt, g, backend, kind);
    probs.push_back(std::exp(-weighted_lns(g, w)));
  }
  return sentsar(probs, sim, temperature);
}

double p_true_probability(const GenerationTrace& t, Backend& backend, const PromptSet& prompts) {
  std::string ideas;
  for (const auto& s : t.samples) ideas += "\n" + s.text;
  std::map<std::string, std::string> fields{
      {"question", t.query.prompt}, {"sampled_generations", ideas}, {"generated_text", t.greedy.text}};
  BackendRequest req;
  req.messages = prompts.render("p_true", fields);
  req.max_tokens = 16;
  req.temperature = 0.0;
  req.want_logprobs = true;
  req.task = TaskAnnotation{"p_true", fields};
  auto resp = backend.generate(req);
  if (resp.generations.empty()) throw BackendError("backend returned no generations");
  for (const auto& tok : resp.generations.front().tokens) {
    std::string w = text::to_lower(text::trim(tok.text));
    while (!w.empty() && std::ispunct(static_cast<unsigned char>(w.back()))) w.pop_back();
    if (w == "true") return std::exp(tok.logprob);
    if (w == "false") return 1.0 - std::exp(tok.logprob);
  }
  throw ParseError("P(true) reply has no \"true\"/\"false\" token: \"" + resp.generations.front().text + "\"");
}

double p_true(const GenerationTrace& t, Backend& backend, const PromptSet& prompts) {
  double p = p_true_probability(t, backend, prompts);
  if (!(p > 0.0)) return kSentinel;
  double u = -std::log(p);
  return u <= 0.0 ? 0.0 : u;
}

int parse_confidence(const std::string& reply) {
  for (std::size_t i = 0; i < reply.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(reply[i]))) continue;
    std::size_t j = i;
    while (j < reply.size() && std::isdigit(static_cast<unsigned char>(reply[j]))) ++j;
    if (j - i > 3) throw ParseError("confidence out of range: \"" + reply + "\"");
    int v = std::stoi(reply.substr(i, j - i));
    if (v > 100) throw ParseError("confidence out of range: \"" + reply + "\"");
    return v;
  }
  throw ParseError("no confidence number in \"" + reply + "\"");
}

double verbalized_confidence(const GenerationTrace& t, Backend& backend, const PromptSet& prompts, int retries) {
  std::map<std::string, std::string> fields{{"question", t.query.prompt}, {"generated_text", t.greedy.text}};
  auto messages = prompts.render("verbalized_confidence", fields);
  for (int attempt = 0;; ++attempt) {
    std::string reply = complete(backend, messages, TaskAnnotation{"verbalized_confidence", fields}, 0.0, 8);
    try {
      return 1.0 - parse_confidence(reply) / 100.0;
    } catch (const ParseError&) {
      if (attempt >= retries) throw;
      messages.push_back({"assistant", reply});
      messages.push_back({"user", "Reply with only a number between 0 and 100."});
    }
  }
}

double external_score(const GenerationTrace& t, const std::string& method_id) {
  auto it = t.external_scores.find(method_id);
  if (it == t.external_scores.end()) throw ValidationError("trace " + t.query.id + " has no external score \"" + method_id + "\"");
  return -it->second;
}

}  // namespace uekit
