#include <cmath>
#include <random>

#include "../oracles/eigen_oracle.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "uekit/consistency_scorers.hpp"
#include "uekit/errors.hpp"
#include "uekit/internal_scorers.hpp"
#include "uekit/mock_backend.hpp"
#include "uekit/scoring.hpp"
#include "uekit/sequence_scorers.hpp"
#include "uekit/spectral.hpp"

using namespace uekit;
using doctest::Approx;

namespace {

SimilarityMatrix sym(const Eigen::MatrixXd& w) { return make_similarity_matrix(w); }

Eigen::MatrixXd ones(int m) { return Eigen::MatrixXd::Ones(m, m); }
Eigen::MatrixXd eye(int m) { return Eigen::MatrixXd::Identity(m, m); }

/// Every symmetric unit-diagonal W with m <= 3 and off-diagonal entries
/// on a grid, plus seeded random ones.
std::vector<Eigen::MatrixXd> small_graphs() {
  std::vector<Eigen::MatrixXd> out{Eigen::MatrixXd::Ones(1, 1)};
  const double grid[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (double a : grid) {
    Eigen::MatrixXd w = eye(2);
    w(0, 1) = w(1, 0) = a;
    out.push_back(w);
  }
  for (double a : grid)
    for (double b : grid)
      for (double c : grid) {
        Eigen::MatrixXd w = eye(3);
        w(0, 1) = w(1, 0) = a;
        w(0, 2) = w(2, 0) = b;
        w(1, 2) = w(2, 1) = c;
        out.push_back(w);
      }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int r = 0; r < 60; ++r) {
    int m = 2 + r % 2;
    Eigen::MatrixXd w = eye(m);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) w(i, j) = w(j, i) = u(rng);
    out.push_back(w);
  }
  return out;
}

}  // namespace

TEST_SUITE("sequence") {

TEST_CASE("lns") {
  CHECK(lns(th::gen("a", {-1.0})) == 1.0);
  CHECK(lns(th::gen("a b", {-1.0, -3.0})) == 2.0);
  CHECK(lns(th::gen("a b", {0.0, 0.0})) == 0.0);
  CHECK_THROWS_AS(lns(th::gen("", {})), ValidationError);
  CHECK(lns(th::gen("x", {-0.3, -1.7, -0.2})) == Approx(lns(th::gen("x", {-1.7, -0.2, -0.3}))).epsilon(1e-15));
}

TEST_CASE("weighted lns") {
  auto g = th::gen("ab", {-1.0, -5.0});
  CHECK(weighted_lns(g, {1.0, 1.0}) == lns(g));
  CHECK(weighted_lns(g, {2.0, 0.0}) == 1.0);
  CHECK(weighted_lns(g, {0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(weighted_lns(g, {1.0}), ValidationError);
}

TEST_CASE("token importance weights") {
  MockBackend m;
  Generation one{"a", {{"a", -1.0}}};
  CHECK(token_importance_weights("q", one, m) == std::vector<double>{1.0});

  // Dropping either copy of "b" leaves the word set unchanged.
  Generation rep{"a b b", {{"a", -1.0}, {" b", -1.0}, {" b", -1.0}}};
  auto w = token_importance_weights("q", rep, m);
  CHECK(w[1] == 0.0);
  CHECK(w[2] == 0.0);
  CHECK(w[0] == Approx(3.0));

  Generation distinct{"a b c", {{"a", -1.0}, {" b", -2.0}, {" c", -3.0}}};
  auto u = token_importance_weights("q", distinct, m);
  for (double x : u) CHECK(x == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mc entropy") {
  CHECK(mc_entropy(th::trace("e", {{-2.0}})) == 2.0);
  CHECK(mc_entropy(th::trace("e", {{-1.0}, {-3.0}})) == 2.0);
  CHECK(mc_entropy(th::trace("e", {{-0.5}, {-0.5}, {-0.5}})) == 0.5);
  CHECK_THROWS(mc_entropy(th::trace("e")));
}

TEST_CASE("semantic clusters") {
  auto t = th::trace("c", {{-1.0}, {-1.0}, {-1.0}});
  auto one = semantic_clusters(t, sym(ones(3)));
  CHECK(one.cluster_prob.size() == 1);
  CHECK(one.cluster_prob[0] == Approx(1.0));
  CHECK(semantic_entropy(one) == 0.0);

  auto three = semantic_clusters(t, sym(eye(3)));
  CHECK(three.cluster_prob.size() == 3);
  CHECK(three.assignment == std::vector<int>{0, 1, 2});

  Eigen::MatrixXd w = eye(3);
  w(0, 2) = w(2, 0) = 0.9;
  auto two = semantic_clusters(t, sym(w));
  REQUIRE(two.cluster_prob.size() == 2);
  CHECK(two.cluster_prob[0] == Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(two.cluster_prob[1] == Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(two.assignment == std::vector<int>{0, 1, 0});
  CHECK(semantic_entropy(two) == Approx(-(std::log(2.0 / 3.0) + std::log(1.0 / 3.0)) / 2.0).epsilon(1e-12));
  CHECK(semantic_entropy(two) == Approx(0.7520).epsilon(1e-4));

  SemanticClusters half{{0, 1}, {0.5, 0.5}, {1, 1}};
  CHECK(semantic_entropy(half) == Approx(std::log(2.0)).epsilon(1e-15));

  // Exactly at the threshold is not entailment.
  Eigen::MatrixXd edge = eye(2);
  edge(0, 1) = edge(1, 0) = 0.5;
  CHECK(semantic_clusters(th::trace("c", {{-1.0}, {-1.0}}), sym(edge)).cluster_prob.size() == 2);
}

TEST_CASE("sentsar") {
  auto t = th::trace("s", {{-0.4, -1.0}, {-2.0}, {-0.1}});
  CHECK(sentsar(t, sym(eye(3))) == Approx(mc_entropy(t)).epsilon(1e-12));
  CHECK(sentsar(th::trace("s", {{-1.3}}), sym(ones(1))) == Approx(1.3).epsilon(1e-15));

  // All-identical samples give the lowest value over a grid of similarity patterns.
  std::vector<double> p{0.2, 0.5, 0.7};
  double identical = sentsar(p, sym(ones(3)));
  const double grid[] = {0.0, 0.5, 1.0};
  for (double a : grid)
    for (double b : grid)
      for (double c : grid) {
        Eigen::MatrixXd w = eye(3);
        w(0, 1) = w(1, 0) = a;
        w(0, 2) = w(2, 0) = b;
        w(1, 2) = w(2, 1) = c;
        CHECK(identical <= sentsar(p, sym(w)) + 1e-15);
      }
}

TEST_CASE("sar") {
  MockBackend m;
  // Words are all distinct, so the mock gives uniform token weights.
  GenerationTrace t = th::trace("s");
  t.samples = {Generation{"a b c", {{"a", -0.2}, {" b", -1.0}, {" c", -0.6}}},
               Generation{"d e", {{"d", -1.5}, {" e", -0.5}}}};
  t.sampling.B = 2;
  CHECK(sar(t, sym(eye(2)), m) == Approx(mc_entropy(t)).epsilon(1e-12));

  GenerationTrace single = t;
  single.samples.resize(1);
  single.sampling.B = 1;
  CHECK(sar(single, sym(ones(1)), m) == Approx(lns(single.samples[0])).epsilon(1e-12));

  // Composition: weights from one call, sentsar on the reweighted probabilities.
  GenerationTrace mixed = t;
  mixed.samples[0] = Generation{"a b b", {{"a", -0.2}, {" b", -1.0}, {" b", -0.6}}};
  auto sim = build_similarity_matrix(m, {mixed.samples[0].text, mixed.samples[1].text}, SimilarityKind::Continuous);
  std::vector<double> probs;
  for (const auto& g : mixed.samples)
    probs.push_back(std::exp(-weighted_lns(g, token_importance_weights(mixed.query.prompt, g, m))));
  CHECK(sar(mixed, sim, m) == Approx(sentsar(probs, sim)).epsilon(1e-14));
}

TEST_CASE("p_true") {
  PromptSet prompts;
  auto t = th::trace("p", {{-1.0}});
  MockBackend m;
  m.force_p_true(1.0);
  CHECK(p_true(t, m, prompts) == 0.0);
  m.force_p_true(std::exp(-2.0));
  CHECK(p_true(t, m, prompts) == Approx(2.0).epsilon(1e-12));
  m.force_p_true(0.0);
  CHECK(is_sentinel(p_true(t, m, prompts)));

  MockBackend f;
  f.on("p_true", [](const BackendRequest&, int) { return std::string("False"); });
  double q = std::exp(f.generate({{{"user", "x"}}, 16, 0.0, 1, true, TaskAnnotation{"p_true", {}}}).generations[0].tokens[0].logprob);
  (void)q;
  double pf = p_true_probability(t, f, prompts);
  CHECK(pf > 0.0);
  CHECK(pf < 1.0);

  MockBackend n;
  n.on("p_true", [](const BackendRequest&, int) { return std::string("no idea"); });
  CHECK_THROWS_AS(p_true(t, n, prompts), ParseError);
}

TEST_CASE("verbalized confidence") {
  PromptSet prompts;
  auto t = th::trace("v", {{-1.0}});
  for (auto [reply, want] : std::vector<std::pair<std::string, double>>{{"100", 0.0}, {"0", 1.0}, {"85", 0.15}}) {
    MockBackend m;
    m.on("verbalized_confidence", [reply = reply](const BackendRequest&, int) { return reply; });
    CHECK(verbalized_confidence(t, m, prompts) == Approx(want).epsilon(1e-15));
  }
  CHECK(parse_confidence("I'd say 70.") == 70);
  CHECK_THROWS_AS(parse_confidence("150"), ParseError);
  CHECK_THROWS_AS(parse_confidence("high"), ParseError);

  int calls = 0;
  MockBackend retry;
  retry.on("verbalized_confidence", [&](const BackendRequest&, int) { return ++calls == 1 ? std::string("hmm") : std::string("40"); });
  CHECK(verbalized_confidence(t, retry, prompts) == Approx(0.6));
  CHECK(calls == 2);

  MockBackend never;
  never.on("verbalized_confidence", [](const BackendRequest&, int) { return std::string("dunno"); });
  CHECK_THROWS_AS(verbalized_confidence(t, never, prompts), ParseError);
}

TEST_CASE("external scores") {
  auto a = th::trace("x");
  a.external_scores["lars"] = 0.9;
  CHECK(external_score(a, "lars") == -0.9);
  CHECK_THROWS(external_score(a, "saplma"));
  auto lo = th::trace("lo"), hi = th::trace("hi");
  lo.external_scores["saplma"] = 0.2;
  hi.external_scores["saplma"] = 0.8;
  CHECK(external_score(lo, "saplma") > external_score(hi, "saplma"));
}

}  // TEST_SUITE

TEST_SUITE("consistency") {

TEST_CASE("graph construction") {
  auto g = build_graph(sym(ones(3)));
  CHECK(g.degree == Eigen::VectorXd::Constant(3, 3.0));
  CHECK(g.L_unnorm.rowwise().sum().cwiseAbs().maxCoeff() < 1e-15);
  CHECK(build_graph(sym(eye(2))).L_norm.cwiseAbs().maxCoeff() == 0.0);

  Eigen::MatrixXd f = eye(2);
  f(0, 1) = 0.6;
  f(1, 0) = 0.4;
  CHECK(build_graph(make_similarity_matrix(f)).W(0, 1) == Approx(0.5).epsilon(1e-15));
  CHECK(build_graph(make_similarity_matrix(f)).W(1, 0) == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("degree matrix") {
  CHECK(degmat(build_graph(sym(ones(5)))) == 0.0);
  CHECK(degmat(build_graph(sym(eye(4)))) == 0.75);
  CHECK(degmat(build_graph(sym(ones(1)))) == 0.0);
  CHECK(degmat_c(build_graph(sym(ones(5))), 2) == -1.0);
  CHECK(degmat_c_confidence(build_graph(sym(eye(4))), 0) == 0.25);
  CHECK_THROWS(degmat_c(build_graph(sym(eye(4))), 4));
}

TEST_CASE("sum of eigenvalues") {
  CHECK(sum_eigv(build_graph(sym(ones(5)))) == Approx(1.0).epsilon(1e-12));
  CHECK(sum_eigv(build_graph(sym(eye(3)))) == Approx(3.0).epsilon(1e-12));
  CHECK(sum_eigv(build_graph(sym(ones(1)))) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eccentricity") {
  CHECK(eccentricity(build_graph(sym(ones(4)))) == Approx(0.0).epsilon(1e-12));
  for (std::size_t j = 0; j < 4; ++j) CHECK(eccentricity_c(build_graph(sym(ones(4))), j, {4, 0.9}) < 1e-12);
  CHECK(eccentricity(build_graph(sym(eye(3))), {0, 0.9}) == 0.0);
  CHECK(eccentricity_c(build_graph(sym(eye(3))), 1, {0, 0.9}) == 0.0);
  CHECK_THROWS(eccentricity(build_graph(sym(eye(3))), {4, 0.9}));

  // m = 2, W = I: L_norm = 0, so the eigenspace is all of R^2 and the
  // canonical first vector is e_0. Centered rows are (1/2) and (-1/2).
  auto g = build_graph(sym(eye(2)));
  EccentricityParams k1{1, 0.9};
  CHECK(eccentricity(g, k1) == Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(eccentricity_c(g, 0, k1) == Approx(0.5).epsilon(1e-12));
  CHECK(eccentricity_c(g, 1, k1) == Approx(eccentricity_c(g, 0, k1)).epsilon(1e-12));

  // m = 2 with off-diagonal a: L_norm = [[1, -a], [-a, 1]] with eigenvectors
  // (1, 1)/sqrt2 for 1 - a and (1, -1)/sqrt2 for 1 + a.
  Eigen::MatrixXd w = eye(2);
  w(0, 1) = w(1, 0) = 0.3;
  auto g2 = build_graph(sym(w));
  CHECK(eccentricity(g2, {1, 2.0}) == Approx(0.0).epsilon(1e-12));
  CHECK(eccentricity(g2, {2, 2.0}) == Approx(1.0).epsilon(1e-12));
  CHECK(eccentricity_c(g2, 0, {2, 2.0}) == Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("kernel language entropy") {
  CHECK(kle(build_graph(sym(ones(1)))) == Approx(0.0).epsilon(1e-12));
  for (int m = 2; m <= 6; ++m) CHECK(kle(build_graph(sym(eye(m)))) == Approx(std::log(m)).epsilon(1e-12));
  double big_t = kle(build_graph(sym(ones(4))), 5.0);
  CHECK(big_t > 0.0);
  CHECK(big_t < std::log(4.0));
  auto k = normalized_heat_kernel(build_graph(sym(ones(4))), 0.3);
  CHECK(k.trace() == Approx(1.0).epsilon(1e-12));
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS(von_neumann_entropy(bad));
}

TEST_CASE("self detection") {
  CHECK(cluster_size_entropy({5}) == 0.0);
  CHECK(cluster_size_entropy({3, 2}) == Approx(0.6730).epsilon(1e-4));
  CHECK(cluster_size_entropy({1, 1, 1, 1, 1}) == Approx(std::log(5.0)).epsilon(1e-12));

  MockBackend m;
  PromptSet prompts;
  auto t = th::trace("s", {{-1.0}});
  // Paraphrases differ, but every answer is made identical.
  m.on("answer", [](const BackendRequest&, int) { return std::string("Paris"); });
  CHECK(self_detection(t, m, prompts) == 0.0);

  auto rec = th::trace("s2", {{-1.0}});
  rec.paraphrase_answers = std::vector<Generation>{
      th::gen("red apple", {-1}), th::gen("red apple", {-1}), th::gen("red apple", {-1}),
      th::gen("blue sky", {-1}), th::gen("blue sky", {-1})};
  CHECK(self_detection(rec, m, prompts) == Approx(0.6730).epsilon(1e-4));
}

TEST_CASE("eigen results match the characteristic-polynomial oracle") {
  for (const auto& w : small_graphs()) {
    const int m = static_cast<int>(w.rows());
    auto g = build_graph(sym(w));
    CAPTURE(w);
    CHECK(std::abs(degmat(g) - oracle::degmat(w)) < 1e-8);
    CHECK(std::abs(sum_eigv(g) - oracle::sum_eigv(w)) < 1e-8);
    CHECK(std::abs(kle(g, 0.3) - oracle::kle(w, 0.3)) < 1e-8);
    for (int k = 1; k <= m; ++k)
      for (double thr : {0.9, 2.5}) {
        CHECK(std::abs(eccentricity(g, {k, thr}) - oracle::eccentricity(w, k, thr)) < 1e-8);
        for (int j = 0; j < m; ++j)
          CHECK(std::abs(eccentricity_c(g, static_cast<std::size_t>(j), {k, thr}) - oracle::eccentricity_c(w, j, k, thr)) <
                1e-8);
      }
    // Spectrum of L_norm itself.
    auto e = sym_eigen(g.L_norm);
    auto roots = oracle::char_poly_roots(oracle::l_norm(w));
    for (int i = 0; i < m; ++i) CHECK(std::abs(e.values(i) - roots[static_cast<std::size_t>(i)]) < 1e-8);
  }
}

TEST_CASE("graph score properties") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int r = 0; r < 40; ++r) {
    int m = 2 + r % 5;
    Eigen::MatrixXd w = eye(m);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) w(i, j) = w(j, i) = u(rng);
    auto g = build_graph(sym(w));
    double dm = degmat(g), se = sum_eigv(g), kl = kle(g);
    CHECK(dm >= 0.0);
    CHECK(dm <= (m - 1.0) / m + 1e-12);
    CHECK(se >= -1e-12);
    CHECK(se <= m + 1e-12);
    CHECK(kl >= -1e-12);
    CHECK(kl <= std::log(m) + 1e-9);
    auto ev = sym_eigen(g.L_norm).values;
    CHECK(ev.minCoeff() >= -1e-9);
    CHECK(ev.maxCoeff() <= 2.0 + 1e-9);

    // Raising an edge never raises degmat.
    Eigen::MatrixXd w2 = w;
    w2(0, 1) = w2(1, 0) = std::min(1.0, w(0, 1) + 0.2);
    CHECK(degmat(build_graph(sym(w2))) <= dm + 1e-15);

    // Reversing sample order permutes per-sample scores and leaves set scores alone.
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) p(i, m - 1 - i) = 1.0;
    auto gp = build_graph(sym(p * w * p.transpose()));
    CHECK(std::abs(degmat(gp) - dm) < 1e-9);
    CHECK(std::abs(sum_eigv(gp) - se) < 1e-9);
    CHECK(std::abs(kle(gp) - kl) < 1e-9);
    EccentricityParams all{m, 2.5};
    CHECK(std::abs(eccentricity(gp, all) - eccentricity(g, all)) < 1e-9);
    for (int j = 0; j < m; ++j) {
      CHECK(std::abs(degmat_c(gp, static_cast<std::size_t>(m - 1 - j)) - degmat_c(g, static_cast<std::size_t>(j))) < 1e-9);
      CHECK(std::abs(eccentricity_c(gp, static_cast<std::size_t>(m - 1 - j), all) -
                     eccentricity_c(g, static_cast<std::size_t>(j), all)) < 1e-9);
    }
  }
}

}  // TEST_SUITE

TEST_SUITE("internal") {

TEST_CASE("inside eigenscore") {
  CHECK(inside_eigenscore(Eigen::MatrixXd::Zero(4, 3), 0.001) == Approx(std::log(0.001)).epsilon(1e-12));

  Eigen::MatrixXd z(3, 1);
  z << 1.0, 2.0, 6.0;
  double c = z.squaredNorm() - z.sum() * z.sum() / 3.0;
  CHECK(inside_eigenscore(z, 0.001) == Approx(std::log(c + 0.001)).epsilon(1e-12));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int r = 0; r < 20; ++r) {
    // Two copies of one hidden state collapse the spread; two independent ones do not.
    Eigen::MatrixXd distinct(40, 2);
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 2; ++j) distinct(i, j) = n(rng);
    Eigen::MatrixXd dup = distinct;
    dup.col(1) = dup.col(0);
    CHECK(inside_eigenscore(dup) < inside_eigenscore(distinct));

    Eigen::MatrixXd big(5, 4);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 4; ++j) big(i, j) = n(rng);
    Eigen::MatrixXd perm = big;
    perm.col(0).swap(perm.col(3));
    CHECK(inside_eigenscore(perm) == Approx(inside_eigenscore(big)).epsilon(1e-12));

    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(5, 5) - Eigen::MatrixXd::Constant(5, 5, 1.0 / 5.0);
    Eigen::MatrixXd sigma = big.transpose() * J * big;
    CHECK(sym_eigen(sigma).values.minCoeff() >= -1e-10);
  }
  CHECK_THROWS(inside_eigenscore(Eigen::MatrixXd::Zero(2, 2), 0.0));
}

TEST_CASE("attention score") {
  Generation g;
  g.attention = std::vector<std::vector<double>>{{1.0, 1.0, 1.0}};
  CHECK(attention_score(g) == 0.0);
  CHECK(attention_score_raw({{std::exp(-1.0), std::exp(-2.0)}}) == Approx(3.0).epsilon(1e-15));
  CHECK_THROWS(attention_score_raw({{0.5, 0.0}}));
  std::vector<std::vector<double>> a{{0.3, 0.9}}, b{{0.5}, {0.2, 0.7}};
  auto ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  CHECK(attention_score_raw(ab) == Approx(attention_score_raw(a) + attention_score_raw(b)).epsilon(1e-14));
  Generation h;
  h.attention = a;
  CHECK(attention_score(h, true) == -attention_score(h, false));
  CHECK_THROWS(attention_score(Generation{}));
}

}  // TEST_SUITE

TEST_SUITE("scoring") {

TEST_CASE("every method through the trace scorer") {
  MockBackend m(2);
  PromptSet prompts;
  TraceScorer scorer(m, prompts);
  auto resp = m.generate({{{"user", "Where?"}}, 64, 1.0, 5, true, std::nullopt});
  GenerationTrace t = th::trace("all");
  t.query.prompt = "Where?";
  t.greedy = m.generate({{{"user", "Where?"}}, 64, 0.0, 1, true, std::nullopt}).generations[0];
  t.samples = resp.generations;
  t.sampling.B = 5;
  t.greedy.hidden = std::vector<double>{0.1, 0.2, 0.3};
  t.greedy.attention = std::vector<std::vector<double>>{{0.5, 0.25}};
  for (auto& s : t.samples) s.hidden = std::vector<double>{0.3, -0.2, 0.1};
  t.external_scores = {{"lars", 0.7}, {"saplma", 0.4}};

  std::vector<Method> all;
  for (const auto& mi : all_methods()) all.push_back(mi.method);
  auto scores = scorer.score(t, all);
  CHECK(scores.size() == 19);
  for (auto [meth, v] : scores) {
    CAPTURE(method_id(meth));
    CHECK(std::isfinite(v));
  }
  CHECK(scores[Method::Lns] == lns(t.greedy));
  CHECK(scores[Method::Lars] == -0.7);
  CHECK(scores[Method::Entropy] == mc_entropy(t));

  // Greedy is node 0 of the -C graphs.
  std::vector<std::string> texts{t.greedy.text};
  for (const auto& s : t.samples) texts.push_back(s.text);
  auto g = build_graph(build_similarity_matrix(m, texts));
  CHECK(scores[Method::DegMatC] == Approx(-degmat_c_confidence(g, 0)).epsilon(1e-15));

  // Scoring twice gives the same numbers.
  CHECK(scorer.score(t, all) == scores);
}

TEST_CASE("missing prerequisites are rejected") {
  MockBackend m;
  TraceScorer scorer(m, PromptSet{});
  CHECK_THROWS_AS(scorer.score(th::trace("x"), {Method::Inside}), ValidationError);
}

}  // TEST_SUITE
