// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "../fixtures/blizzard.hpp"
#include "../oracles/eigen_oracle.hpp"
#include "../oracles/metric_oracles.hpp"
#include "uekit/cli.hpp"
#include "uekit/consistency_scorers.hpp"
#include "uekit/ensemble.hpp"
#include "uekit/internal_scorers.hpp"
#include "uekit/longform.hpp"
#include "uekit/metrics.hpp"
#include "uekit/mock_backend.hpp"
#include "uekit/pipeline.hpp"
#include "uekit/trace.hpp"
#include "uekit/transforms.hpp"

using namespace uekit;

namespace {

using Clock = std::chrono::steady_clock;

/// Collects failures for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::size_t checks = 0;
  void operator()(bool ok, const std::string& what) {
    ++checks;
    if (!ok && failures.size() < 5) failures.push_back(what);
    else if (!ok) failures.back() = "... " + what;
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s.precision(17);
    s << what << ": got " << got << ", want " << want;
    (*this)(std::abs(got - want) <= tol, s.str());
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<Eigen::MatrixXd> small_graphs() {
  std::vector<Eigen::MatrixXd> out{Eigen::MatrixXd::Ones(1, 1)};
  const double grid[] = {0.0, 0.2, 0.5, 0.8, 1.0};
  for (double a : grid) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(2, 2);
    w(0, 1) = w(1, 0) = a;
    out.push_back(w);
  }
  for (double a : grid)
    for (double b : grid)
      for (double c : grid) {
        Eigen::MatrixXd w = Eigen::MatrixXd::Identity(3, 3);
        w(0, 1) = w(1, 0) = a;
        w(0, 2) = w(2, 0) = b;
        w(1, 2) = w(2, 1) = c;
        out.push_back(w);
      }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int r = 0; r < 200; ++r) {
    const int m = 2 + r % 2;
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) w(i, j) = w(j, i) = u(rng);
    out.push_back(w);
  }
  return out;
}

void ac1(Check& c) {
  auto t0 = Clock::now();
  for (const auto& w : small_graphs()) {
    auto g = build_graph_from_weights(w);
    const int m = static_cast<int>(w.rows());
    std::ostringstream id;
    id << "m=" << m << " W=[" << w.reshaped().transpose() << "]";
    c.near(degmat(g), oracle::degmat(w), 1e-8, "DegMat " + id.str());
    c.near(sum_eigv(g), oracle::sum_eigv(w), 1e-8, "SumEigV " + id.str());
    c.near(kle(g, 0.3), oracle::kle(w, 0.3), 1e-8, "KLE " + id.str());
    for (int j = 0; j < m; ++j)
      c.near(degmat_c(g, static_cast<std::size_t>(j)), -w.row(j).sum() / m, 1e-8, "DegMat-C " + id.str());
    for (int k = 0; k <= m; ++k)
      for (double thr : {0.9, 2.5}) {
        EccentricityParams p{k, thr};
        c.near(eccentricity(g, p), oracle::eccentricity(w, k, thr), 1e-8, "Eccentricity " + id.str());
        for (int j = 0; j < m; ++j)
          c.near(eccentricity_c(g, static_cast<std::size_t>(j), p), oracle::eccentricity_c(w, j, k, thr), 1e-8,
                 "Eccentricity-C " + id.str());
      }
  }
  c.near(degmat(build_graph_from_weights(Eigen::MatrixXd::Ones(4, 4))), 0.0, 0.0, "DegMat(all ones)");
  c.near(sum_eigv(build_graph_from_weights(Eigen::MatrixXd::Ones(5, 5))), 1.0, 1e-12, "SumEigV(all ones, m=5)");
  for (int m = 1; m <= 6; ++m)
    c.near(kle(build_graph_from_weights(Eigen::MatrixXd::Identity(m, m))), std::log(m), 1e-12, "KLE(I)");
  c.near(cluster_size_entropy({3, 2}), 0.6730, 1e-4, "SelfDetection(3,2)");
  double dt = seconds_since(t0);
  c(dt < 5.0, "runtime " + std::to_string(dt) + " s");
}

void ac2(Check& c) {
  for (int d : {1, 4, 16})
    for (int b : {2, 5, 10})
      c.near(inside_eigenscore(Eigen::MatrixXd::Zero(d, b), 0.001), std::log(0.001), 1e-6, "INSIDE(Z=0)");
  c.near(std::log(0.001), -6.9078, 1e-4, "ln(0.001)");
}

ScoredDataset random_ds(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ScoredDataset d;
  for (std::size_t i = 0; i < n; ++i) {
    d.scores.push_back(u(rng));
    d.labels.push_back(u(rng) < 0.4 ? 1 : 0);
  }
  return d;
}

void ac3(Check& c) {
  // One draw of random-score PRR at n = 1000 has sd ~0.05, so the band
  // applies to the mean over the seeds.
  std::vector<double> random_prr;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto d = random_ds(1000, 1000 + seed);
    ScoredDataset oracle_order{std::vector<double>(d.labels.begin(), d.labels.end()), d.labels};
    c(prr(oracle_order) == 1.0, "PRR(oracle ordering) != 1");
    random_prr.push_back(prr(d));

    const std::vector<std::function<double(double)>> maps{
        [](double x) { return std::exp(x); }, [](double x) { return 3.0 * x - 7.0; },
        [](double x) { return x * x * x; }};
    double base_a = auroc(d), base_p = prr(d);
    for (const auto& f : maps) {
      ScoredDataset t = d;
      for (auto& s : t.scores) s = f(s);
      c.near(auroc(t), base_a, 1e-9, "AUROC under monotone map");
      c.near(prr(t), base_p, 1e-9, "PRR under monotone map");
    }
  }
  double mean = mean_sd(random_prr).first;
  std::ostringstream s;
  s << "mean PRR(random) over seeds 1000-1004 = " << mean << " (per seed:";
  for (double v : random_prr) s << " " << v;
  s << ")";
  c(mean >= -0.05 && mean <= 0.05, s.str());
}

void ac4(Check& c) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto d = random_ds(50 + 10 * seed, seed);
    if (d.positives() == 0) continue;
    double a = are(d, d, recall_targets());
    c(a <= 1.0 / static_cast<double>(d.positives()) + 1e-12,
      "ARE(cal,cal) = " + std::to_string(a) + " with " + std::to_string(d.positives()) + " positives");
  }
  auto cal = random_ds(200, 99);
  ScoredDataset test = cal;
  for (auto& s : test.scores) s += 50.0;
  auto targets = recall_targets();
  double want = 0.0;
  for (double r : targets) want += std::abs(r - oracle::test_recalls(cal, test, r).front());
  want /= static_cast<double>(targets.size());
  double got = are(cal, test, targets);
  c.near(got, want, 1e-12, "ARE(shifted) vs enumeration");
  c(got >= 0.4, "ARE(shifted) = " + std::to_string(got));

  auto big = random_ds(1000, 5);
  auto moved = big;
  for (auto& s : moved.scores) s = 0.7 * s + 0.2;
  auto t0 = Clock::now();
  are(big, moved, recall_targets());
  double dt = seconds_since(t0);
  c(dt < 1.0, "1001-target ARE took " + std::to_string(dt) + " s");
}

void ac5(Check& c) {
  std::mt19937_64 rng(5);
  auto check = [&](const std::vector<double>& x, const std::vector<int>& y) {
    auto fit = fit_isotonic(x, y);
    auto want = oracle::isotonic_brute(x, std::vector<double>(y.begin(), y.end()));
    for (std::size_t i = 0; i < x.size(); ++i) c.near(fit(x[i]), want[i], 1e-9, "isotonic n=" + std::to_string(x.size()));
  };
  for (std::size_t n = 1; n <= 8; ++n) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<int> y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = (mask >> i) & 1u;
      std::vector<double> distinct(n), tied(n), shuffled(n);
      for (std::size_t i = 0; i < n; ++i) {
        distinct[i] = static_cast<double>(i);
        tied[i] = static_cast<double>(rng() % 3);
        shuffled[i] = static_cast<double>(rng() % 1000) / 7.0;
      }
      check(distinct, y);
      check(tied, y);
      check(shuffled, y);
    }
  }
}

struct Fixture {
  ScoreMatrix x;
  std::vector<int> y;
};

Fixture noisy(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Fixture f;
  for (std::size_t i = 0; i < n; ++i) {
    int l = z(rng) > 0.3;
    std::vector<double> row;
    for (std::size_t j = 0; j < k; ++j) row.push_back(z(rng) + l * (0.5 + 0.4 * static_cast<double>(j)));
    f.x.push_back(row);
    f.y.push_back(l);
  }
  return f;
}

ScoredDataset col(const std::vector<double>& s, const std::vector<int>& y) { return {s, y}; }

void ac6(Check& c) {
  auto cal = noisy(150, 1, 61);
  auto test = noisy(400, 1, 62);
  const std::size_t K = 4;
  auto widen = [&](const ScoreMatrix& m) {
    ScoreMatrix out;
    for (const auto& r : m) out.push_back(std::vector<double>(K, r[0]));
    return out;
  };
  std::vector<std::string> roster{"m1", "m2", "m3", "m4"};
  for (auto pre : {PreprocessKind::Raw, PreprocessKind::ZNorm, PreprocessKind::Isotonic}) {
    double single = prr(col(fit_ensemble({"m1"}, cal.x, cal.y, pre, CombinerKind::Mean).predict(test.x), test.y));
    for (auto comb : {CombinerKind::Max, CombinerKind::Min, CombinerKind::Mean, CombinerKind::WeightedMean,
                      CombinerKind::Linear}) {
      auto m = fit_ensemble(roster, widen(cal.x), cal.y, pre, comb);
      c.near(prr(col(m.predict(widen(test.x)), test.y)), single, 1e-9,
             "identical methods, " + to_string(pre) + ":" + to_string(comb));
    }
  }
  auto f = noisy(150, 3, 63), g = noisy(400, 3, 64);
  for (std::size_t i = 0; i < f.x.size(); ++i) f.x[i][2] = f.y[i];
  for (std::size_t i = 0; i < g.x.size(); ++i) g.x[i][2] = g.y[i];
  auto rows = ensemble_study({"a", "b", "oracle"}, f.x, f.y, g.x, g.y);
  c(rows.size() == 22, "study rows " + std::to_string(rows.size()));
  c(rows[0].combiner == "oracle" && rows[0].prr == 1.0, "best single is not the oracle at PRR 1");
  for (std::size_t i = 1; i < rows.size(); ++i)
    c(rows[i].prr <= 1.0 + 1e-12, rows[i].preprocessor + ":" + rows[i].combiner + " exceeds best single");
}

void ac7(Check& c) {
  PromptSet prompts;
  MockBackend m;
  fixture::script_blizzard(m);
  auto claims = decompose(fixture::blizzard_answer(), m, prompts);
  c(claims.size() == 17, "decomposed into " + std::to_string(claims.size()) + " claims");
  c(claims == fixture::blizzard_claims(), "claim text differs from the fixture");

  MockBackend echo;
  echo.on("claim_answer", [](const BackendRequest& req, int) {
    const auto& q = req.task->fields.at("question");
    return q.substr(q.find("about: ") + 7);
  });
  QueryRecord x{"blizzard", fixture::kBlizzardQuestion, {}, "longfact", std::nullopt};
  for (const auto& claim : fixture::blizzard_claims()) {
    auto qg = strategy_qg(x, claim, lns_claim_scorer(), echo, prompts);
    auto qag = strategy_qag(x, claim, lns_claim_scorer(), echo, prompts);
    c(qg == qag, "QAG != QG for: " + claim);
  }

  std::mt19937_64 rng(7);
  std::normal_distribution<double> z(0.0, 2.0);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> v(1 + static_cast<std::size_t>(t % 9));
    for (auto& s : v) s = z(rng);
    double lo = aggregate(v, Aggregation::Min), mid = aggregate(v, Aggregation::Mean), hi = aggregate(v, Aggregation::Max);
    c(lo <= mid + 1e-12 && mid <= hi + 1e-12, "min <= mean <= max violated");
  }
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  int rc = cli_main(args, o, e);
  if (rc != 0) std::cerr << "cli: " << e.str();
  return rc;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ac8(Check& c) {
  auto dir = std::filesystem::temp_directory_path() / "uekit_acceptance_ac8";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto p = [&](const std::string& name) { return (dir / name).string(); };

  // Labelled traces generated once by the mock backend.
  MockBackend gen(11);
  PromptSet prompts;
  std::vector<QueryRecord> qs;
  for (int i = 0; i < 12; ++i)
    qs.push_back({"q" + std::to_string(i), "What is item " + std::to_string(i) + "?", {"x"}, "fixture", std::nullopt});
  GenerationParams gp;
  gp.B = 4;
  gp.label = false;
  auto ds = generate_dataset(qs, gen, prompts, gp);
  for (std::size_t i = 0; i < ds.size(); ++i) ds.entries[i].label = static_cast<int>(i % 3 == 0);
  save_dataset(ds, p("ds.jsonl"));

  std::ofstream(p("record.json")) << "{\"backend\": {\"seed\": 1}, \"replay\": {\"mode\": \"record\", \"store\": \""
                                  << p("store.jsonl") << "\"}}";
  std::ofstream(p("replay.json")) << "{\"backend\": {\"seed\": 2}, \"replay\": {\"mode\": \"replay\", \"store\": \""
                                  << p("store.jsonl") << "\"}}";
  const std::string methods = "lns,mars,sar,degmat_c,eccentricity,kle,semantic_entropy,p_true,verbalized_confidence,self_detection";
  for (const std::string tag : {"record", "replay"}) {
    c(cli({"-c", p(tag + ".json"), "score", "--in", p("ds.jsonl"), "--out", p(tag + "_scores.jsonl"), "--methods",
           methods}) == 0,
      tag + " score failed");
    c(cli({"-c", p(tag + ".json"), "evaluate", "--in", p(tag + "_scores.jsonl"), "--metric", "all", "--out",
           p(tag + "_report.csv")}) == 0,
      tag + " evaluate failed");
  }
  auto a = slurp(p("record_report.csv")), b = slurp(p("replay_report.csv"));
  c(!a.empty() && a == b, "replayed report differs");
  c(slurp(p("record_scores.jsonl")) == slurp(p("replay_scores.jsonl")), "replayed scores differ");

  for (const std::string run : {"1", "2"})
    c(cli({"transform", "--kind", "typo", "--in", p("ds.jsonl"), "--out", p("typo" + run + ".jsonl"), "--seed", "17"}) == 0,
      "typo transform failed");
  auto t1 = slurp(p("typo1.jsonl"));
  c(!t1.empty() && t1 == slurp(p("typo2.jsonl")), "typo transform differs between invocations");
}

void ac9(Check& c) {
  const std::string q = "In which year did the first person walk on the Moon?";
  std::map<TypoOp, int> freq;
  const int draws = 4000;
  for (int s = 0; s < draws; ++s) {
    std::vector<TypoEdit> trail;
    typo(q, 1, static_cast<std::uint64_t>(s), &trail);
    for (const auto& e : trail) ++freq[e.op];
  }
  for (auto op : {TypoOp::Replace, TypoOp::Swap, TypoOp::Erase, TypoOp::Insert}) {
    double f = freq[op] / static_cast<double>(draws);
    c(std::abs(f - 0.25) <= 0.03, to_string(op) + " frequency " + std::to_string(f));
  }

  LabeledDataset ds;
  for (int i = 0; i < 1000; ++i) {
    GenerationTrace t;
    t.query = {"id" + std::to_string(i), "Question number " + std::to_string(i) + "?",
               {"answer " + std::to_string(i), "alt " + std::to_string(i)}, i % 4 ? "trivia" : "coqa", std::nullopt};
    t.greedy.text = "answer " + std::to_string(i);
    t.greedy.tokens = {{"answer", -0.1}, {" " + std::to_string(i), -0.2}};
    ds.entries.push_back(t);
  }
  for (auto kind : {TransformKind::ContextSimilar, TransformKind::ContextDissimilar, TransformKind::Typo,
                    TransformKind::Adversarial}) {
    TransformSpec spec;
    spec.kind = kind;
    spec.seed = 9;
    auto out = apply_transform(ds, spec);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < ds.size() && i < out.size(); ++i)
      kept += out.entries[i].query.id == ds.entries[i].query.id &&
              out.entries[i].query.ground_truths == ds.entries[i].query.ground_truths;
    c(out.size() == ds.size() && kept == ds.size(),
      to_string(kind) + " kept ids and ground truths on " + std::to_string(kept) + " of 1000");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"AC1 consistency scorers match the eigen oracle", ac1},
      {"AC2 INSIDE with a zero hidden-state matrix", ac2},
      {"AC3 PRR and AUROC endpoints and invariance", ac3},
      {"AC4 ARE self-calibration and shift", ac4},
      {"AC5 isotonic regression vs brute force", ac5},
      {"AC6 ensembles of identical methods and an oracle", ac6},
      {"AC7 long-form pipeline on the mock backend", ac7},
      {"AC8 record/replay determinism", ac8},
      {"AC9 transform statistics", ac9},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    std::string error;
    try {
      fn(c);
    } catch (const std::exception& e) {
      error = e.what();
    }
    bool ok = error.empty() && c.failures.empty();
    std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << c.checks << " checks)";
    if (!error.empty()) std::cout << ": exception: " << error;
    for (const auto& f : c.failures) std::cout << "\n    " << f;
    std::cout << std::endl;
    failed += !ok;
  }
  return failed ? 1 : 0;
}
