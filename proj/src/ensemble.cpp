#include "uekit/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "json.hpp"
#include "uekit/errors.hpp"
#include "uekit/text.hpp"
#include "uekit/trace.hpp"

namespace uekit {

using ojson = nlohmann::ordered_json;

namespace {

std::size_t width(const ScoreMatrix& m) {
  if (m.empty()) throw ValidationError("empty score matrix");
  std::size_t k = m.front().size();
  for (const auto& row : m)
    if (row.size() != k) throw ValidationError("score rows differ in length");
  return k;
}

void check_labels(const ScoreMatrix& x, const std::vector<int>& labels) {
  if (x.size() != labels.size()) throw ValidationError("score matrix and labels differ in length");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

// ---------------------------------------------------------------- isotonic

double IsotonicMap::operator()(double v) const {
  if (x.empty()) throw ValidationError("isotonic map is empty");
  auto it = std::upper_bound(x.begin(), x.end(), v);
  if (it == x.begin()) return y.front();
  return y[static_cast<std::size_t>(it - x.begin()) - 1];
}

IsotonicMap fit_isotonic(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.empty()) throw ValidationError("isotonic fit needs data");
  if (scores.size() != labels.size()) throw ValidationError("scores and labels differ in length");
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  struct Block {
    double x, sum, w;
  };
  std::vector<Block> st;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    Block b{scores[idx[i]], 0.0, 0.0};
    while (j < idx.size() && scores[idx[j]] == b.x) {
      b.sum += labels[idx[j]];
      b.w += 1.0;
      ++j;
    }
    st.push_back(b);
    while (st.size() > 1) {
      auto& hi = st[st.size() - 1];
      auto& lo = st[st.size() - 2];
      if (lo.sum / lo.w <= hi.sum / hi.w) break;
      lo.sum += hi.sum;
      lo.w += hi.w;
      st.pop_back();
    }
    i = j;
  }
  IsotonicMap m;
  for (const auto& b : st) {
    m.x.push_back(b.x);
    m.y.push_back(b.sum / b.w);
  }
  return m;
}

// ------------------------------------------------------------ preprocessing

std::string to_string(PreprocessKind k) {
  switch (k) {
    case PreprocessKind::Raw: return "raw";
    case PreprocessKind::ZNorm: return "znorm";
    case PreprocessKind::Isotonic: return "isotonic";
  }
  return "?";
}

PreprocessKind parse_preprocess(const std::string& s) {
  auto l = text::to_lower(s);
  if (l == "raw" || l == "none") return PreprocessKind::Raw;
  if (l == "znorm" || l == "z" || l == "standard") return PreprocessKind::ZNorm;
  if (l == "isotonic" || l == "iso") return PreprocessKind::Isotonic;
  throw ValidationError("unknown preprocessor \"" + s + "\"");
}

std::vector<double> Preprocessor::apply(const std::vector<double>& v) const {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    switch (kind) {
      case PreprocessKind::Raw: out[i] = v[i]; break;
      case PreprocessKind::ZNorm:
        if (i >= mu.size()) throw ValidationError("score vector longer than roster");
        out[i] = is_sentinel(v[i]) ? 3.0 : (v[i] - mu[i]) / sigma[i];
        break;
      case PreprocessKind::Isotonic:
        if (i >= iso.size()) throw ValidationError("score vector longer than roster");
        out[i] = iso[i](v[i]);
        break;
    }
  }
  return out;
}

ScoreMatrix Preprocessor::apply(const ScoreMatrix& m) const {
  ScoreMatrix out;
  out.reserve(m.size());
  for (const auto& row : m) out.push_back(apply(row));
  return out;
}

Preprocessor fit_raw(std::size_t) { return {}; }

Preprocessor fit_znorm(const ScoreMatrix& cal) {
  const std::size_t k = width(cal);
  Preprocessor p;
  p.kind = PreprocessKind::ZNorm;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> col;
    for (const auto& row : cal)
      if (!is_sentinel(row[j])) col.push_back(row[j]);
    if (col.size() < 2) throw ValidationError("z-normalization needs two finite values in column " + std::to_string(j));
    double mu = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
    double ss = 0.0;
    for (double v : col) ss += (v - mu) * (v - mu);
    double sigma = std::sqrt(ss / static_cast<double>(col.size()));
    if (!(sigma > 0.0)) throw ValidationError("column " + std::to_string(j) + " is constant; cannot z-normalize");
    p.mu.push_back(mu);
    p.sigma.push_back(sigma);
  }
  return p;
}

Preprocessor fit_isotonic_preprocessor(const ScoreMatrix& cal, const std::vector<int>& labels) {
  const std::size_t k = width(cal);
  check_labels(cal, labels);
  Preprocessor p;
  p.kind = PreprocessKind::Isotonic;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> col;
    for (const auto& row : cal) col.push_back(row[j]);
    p.iso.push_back(fit_isotonic(col, labels));
  }
  return p;
}

Preprocessor fit_preprocessor(PreprocessKind kind, const ScoreMatrix& cal, const std::vector<int>& labels) {
  switch (kind) {
    case PreprocessKind::Raw: return fit_raw(width(cal));
    case PreprocessKind::ZNorm: return fit_znorm(cal);
    case PreprocessKind::Isotonic: return fit_isotonic_preprocessor(cal, labels);
  }
  return {};
}

// ---------------------------------------------------------------- combiners

std::string to_string(CombinerKind k) {
  switch (k) {
    case CombinerKind::Max: return "max";
    case CombinerKind::Min: return "min";
    case CombinerKind::Mean: return "mean";
    case CombinerKind::WeightedMean: return "wmean";
    case CombinerKind::Voting: return "voting";
    case CombinerKind::Linear: return "linear";
    case CombinerKind::Tree: return "tree";
  }
  return "?";
}

CombinerKind parse_combiner(const std::string& s) {
  auto l = text::to_lower(s);
  for (auto k : all_combiners())
    if (to_string(k) == l) return k;
  if (l == "weighted_mean" || l == "weighted") return CombinerKind::WeightedMean;
  if (l == "vote") return CombinerKind::Voting;
  if (l == "logistic") return CombinerKind::Linear;
  if (l == "decision_tree") return CombinerKind::Tree;
  throw ValidationError("unknown combiner \"" + s + "\"");
}

const std::vector<CombinerKind>& all_combiners() {
  static const std::vector<CombinerKind> all{CombinerKind::Max,    CombinerKind::Min,    CombinerKind::Mean,
                                             CombinerKind::WeightedMean, CombinerKind::Voting, CombinerKind::Linear,
                                             CombinerKind::Tree};
  return all;
}

double combine_simple(CombinerKind k, const std::vector<double>& v, const std::vector<double>& weights,
                      const std::vector<double>& thresholds) {
  if (v.empty()) throw ValidationError("empty score vector");
  std::size_t finite = 0;
  bool any_sentinel = false;
  for (double x : v) is_sentinel(x) ? (void)(any_sentinel = true) : (void)++finite;
  switch (k) {
    case CombinerKind::Max:
      return any_sentinel ? kSentinel : *std::max_element(v.begin(), v.end());
    case CombinerKind::Min: {
      if (!finite) return kSentinel;
      double m = kSentinel;
      for (double x : v)
        if (!is_sentinel(x)) m = std::min(m, x);
      return m;
    }
    case CombinerKind::Mean: {
      if (!finite) return kSentinel;
      double s = 0.0;
      for (double x : v)
        if (!is_sentinel(x)) s += x;
      return s / static_cast<double>(finite);
    }
    case CombinerKind::WeightedMean: {
      if (weights.size() != v.size()) throw ValidationError("weight count does not match roster");
      if (!finite) return kSentinel;
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i)
        if (!is_sentinel(v[i])) s += weights[i] * v[i];
      return s;
    }
    case CombinerKind::Voting: {
      if (thresholds.size() != v.size()) throw ValidationError("threshold count does not match roster");
      double c = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] > thresholds[i]) c += 1.0;
      return c;
    }
    default:
      throw ValidationError("combiner " + to_string(k) + " needs a fitted model");
  }
}

// ------------------------------------------------------------------ linear

double LinearModel::predict(const std::vector<double>& v) const {
  if (v.size() != beta.size()) throw ValidationError("score vector does not match the linear model");
  double z = intercept;
  for (std::size_t i = 0; i < v.size(); ++i) z += beta[i] * (is_sentinel(v[i]) ? fill[i] : v[i]);
  return sigmoid(z);
}

LinearModel fit_linear(const ScoreMatrix& x, const std::vector<int>& labels, const LinearParams& p) {
  const std::size_t k = width(x);
  check_labels(x, labels);
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto K = static_cast<Eigen::Index>(k);
  LinearModel model;
  model.fill.assign(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    bool seen = false;
    for (const auto& row : x)
      if (!is_sentinel(row[j])) {
        model.fill[j] = seen ? std::max(model.fill[j], row[j]) : row[j];
        seen = true;
      }
  }
  Eigen::MatrixXd X(n, K + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = x[static_cast<std::size_t>(i)];
    X(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < K; ++j) {
      double v = row[static_cast<std::size_t>(j)];
      X(i, j + 1) = is_sentinel(v) ? model.fill[static_cast<std::size_t>(j)] : v;
    }
    y(i) = labels[static_cast<std::size_t>(i)];
  }
  // Lipschitz constant of the gradient: max eig(X^T X)/(4n) + lambda.
  Eigen::MatrixXd gram = X.transpose() * X / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const double step = 1.0 / (0.25 * es.eigenvalues().maxCoeff() + p.lambda);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(K + 1);
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(K + 1, p.lambda);
  penalty(0) = 0.0;
  int it = 0;
  for (; it < p.max_iter; ++it) {
    Eigen::VectorXd z = X * w;
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r(i) = sigmoid(z(i)) - y(i);
    Eigen::VectorXd g = X.transpose() * r / static_cast<double>(n) + penalty.cwiseProduct(w);
    if (g.norm() < p.tol) {
      model.converged = true;
      break;
    }
    w -= step * g;
  }
  model.iterations = it;
  model.intercept = w(0);
  for (Eigen::Index j = 0; j < K; ++j) model.beta.push_back(w(j + 1));
  return model;
}

// -------------------------------------------------------------------- tree

double TreeModel::predict(const std::vector<double>& v) const {
  if (nodes.empty()) throw ValidationError("empty tree");
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const auto& nd = nodes[static_cast<std::size_t>(i)];
    if (static_cast<std::size_t>(nd.feature) >= v.size()) throw ValidationError("score vector does not match the tree");
    i = v[static_cast<std::size_t>(nd.feature)] <= nd.split ? nd.left : nd.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

int TreeModel::depth() const {
  std::function<int(int)> rec = [&](int i) -> int {
    const auto& nd = nodes[static_cast<std::size_t>(i)];
    if (nd.feature < 0) return 0;
    return 1 + std::max(rec(nd.left), rec(nd.right));
  };
  return nodes.empty() ? 0 : rec(0);
}

namespace {

double gini(double pos, double n) {
  if (n <= 0) return 0.0;
  double p = pos / n;
  return 2.0 * p * (1.0 - p);
}

int grow(TreeModel& t, const ScoreMatrix& x, const std::vector<int>& labels, const std::vector<std::size_t>& rows,
         int depth, const TreeParams& p) {
  const double n = static_cast<double>(rows.size());
  double pos = 0.0;
  for (auto r : rows) pos += labels[r];
  int id = static_cast<int>(t.nodes.size());
  t.nodes.push_back({});
  t.nodes.back().value = n > 0 ? pos / n : 0.0;
  t.nodes.back().count = rows.size();
  const double parent = gini(pos, n);
  if (depth >= p.max_depth || parent == 0.0 || rows.size() < 2 * p.min_leaf) return id;

  const std::size_t k = x.front().size();
  int best_f = -1;
  double best_split = 0.0, best_imp = parent - 1e-12;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::pair<double, int>> col;
    for (auto r : rows) col.emplace_back(x[r][f], labels[r]);
    std::sort(col.begin(), col.end());
    double left_n = 0.0, left_pos = 0.0;
    for (std::size_t i = 0; i + 1 < col.size(); ++i) {
      left_n += 1.0;
      left_pos += col[i].second;
      if (col[i].first == col[i + 1].first) continue;
      if (left_n < static_cast<double>(p.min_leaf) || n - left_n < static_cast<double>(p.min_leaf)) continue;
      double imp = (left_n * gini(left_pos, left_n) + (n - left_n) * gini(pos - left_pos, n - left_n)) / n;
      if (imp < best_imp - 1e-12) {
        best_imp = imp;
        best_f = static_cast<int>(f);
        best_split = col[i].first / 2.0 + col[i + 1].first / 2.0;
      }
    }
  }
  if (best_f < 0) return id;
  std::vector<std::size_t> l, r;
  for (auto row : rows) (x[row][static_cast<std::size_t>(best_f)] <= best_split ? l : r).push_back(row);
  int left = grow(t, x, labels, l, depth + 1, p);
  int right = grow(t, x, labels, r, depth + 1, p);
  auto& nd = t.nodes[static_cast<std::size_t>(id)];
  nd.feature = best_f;
  nd.split = best_split;
  nd.left = left;
  nd.right = right;
  return id;
}

}  // namespace

TreeModel fit_tree(const ScoreMatrix& x, const std::vector<int>& labels, const TreeParams& p) {
  width(x);
  check_labels(x, labels);
  if (p.max_depth < 0 || p.min_leaf < 1) throw ValidationError("bad tree parameters");
  TreeModel t;
  std::vector<std::size_t> rows(x.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  grow(t, x, labels, rows, 0, p);
  return t;
}

// ---------------------------------------------------------------- ensemble

double EnsembleModel::combine(const std::vector<double>& v) const {
  if (v.size() != roster.size())
    throw ValidationError("score vector has " + std::to_string(v.size()) + " entries, roster has " + std::to_string(roster.size()));
  switch (combiner) {
    case CombinerKind::Linear: return linear.predict(v);
    case CombinerKind::Tree: return tree.predict(v);
    default: return combine_simple(combiner, v, weights, thresholds);
  }
}

double EnsembleModel::predict(const std::vector<double>& raw) const { return combine(pre.apply(raw)); }

std::vector<double> EnsembleModel::predict(const ScoreMatrix& raw) const {
  std::vector<double> out;
  out.reserve(raw.size());
  for (const auto& r : raw) out.push_back(predict(r));
  return out;
}

EnsembleModel fit_ensemble(const std::vector<std::string>& roster, const ScoreMatrix& cal, const std::vector<int>& labels,
                           PreprocessKind pre, CombinerKind comb, const EnsembleParams& p) {
  if (width(cal) != roster.size()) throw ValidationError("calibration matrix does not match the roster");
  check_labels(cal, labels);
  EnsembleModel m;
  m.roster = roster;
  m.combiner = comb;
  m.pre = fit_preprocessor(pre, cal, labels);
  ScoreMatrix x = m.pre.apply(cal);
  auto column_data = [&](std::size_t j) {
    ScoredDataset d;
    for (std::size_t i = 0; i < x.size(); ++i) {
      d.scores.push_back(x[i][j]);
      d.labels.push_back(labels[i]);
    }
    return d;
  };
  switch (comb) {
    case CombinerKind::WeightedMean:
      for (std::size_t j = 0; j < roster.size(); ++j) m.weights.push_back(prr(column_data(j)));
      break;
    case CombinerKind::Voting:
      for (std::size_t j = 0; j < roster.size(); ++j) m.thresholds.push_back(threshold_at_recall(column_data(j), p.voting_recall));
      break;
    case CombinerKind::Linear: m.linear = fit_linear(x, labels, p.linear); break;
    case CombinerKind::Tree: m.tree = fit_tree(x, labels, p.tree); break;
    default: break;
  }
  return m;
}

// ----------------------------------------------------------- serialization

std::string ensemble_to_json(const EnsembleModel& m) {
  ojson j;
  j["format_version"] = 1;
  j["roster"] = m.roster;
  ojson pre;
  pre["kind"] = to_string(m.pre.kind);
  if (m.pre.kind == PreprocessKind::ZNorm) {
    pre["mu"] = m.pre.mu;
    pre["sigma"] = m.pre.sigma;
  }
  if (m.pre.kind == PreprocessKind::Isotonic) {
    ojson maps = ojson::array();
    for (const auto& iso : m.pre.iso) maps.push_back({{"x", iso.x}, {"y", iso.y}});
    pre["isotonic"] = std::move(maps);
  }
  j["preprocessor"] = std::move(pre);
  j["combiner"] = to_string(m.combiner);
  if (m.combiner == CombinerKind::WeightedMean) j["weights"] = m.weights;
  if (m.combiner == CombinerKind::Voting) j["thresholds"] = m.thresholds;
  if (m.combiner == CombinerKind::Linear)
    j["linear"] = {{"intercept", m.linear.intercept}, {"beta", m.linear.beta},          {"fill", m.linear.fill},
                   {"converged", m.linear.converged}, {"iterations", m.linear.iterations}};
  if (m.combiner == CombinerKind::Tree) {
    ojson nodes = ojson::array();
    for (const auto& nd : m.tree.nodes)
      nodes.push_back({{"feature", nd.feature}, {"split", nd.split}, {"left", nd.left}, {"right", nd.right},
                       {"value", nd.value}, {"count", nd.count}});
    j["tree"] = std::move(nodes);
  }
  return j.dump(2);
}

EnsembleModel ensemble_from_json(const std::string& s) {
  try {
    auto j = ojson::parse(s);
    if (j.at("format_version").get<int>() != 1) throw ParseError("unsupported ensemble format version");
    EnsembleModel m;
    m.roster = j.at("roster").get<std::vector<std::string>>();
    const auto& pre = j.at("preprocessor");
    m.pre.kind = parse_preprocess(pre.at("kind").get<std::string>());
    if (m.pre.kind == PreprocessKind::ZNorm) {
      m.pre.mu = pre.at("mu").get<std::vector<double>>();
      m.pre.sigma = pre.at("sigma").get<std::vector<double>>();
    }
    if (m.pre.kind == PreprocessKind::Isotonic)
      for (const auto& iso : pre.at("isotonic"))
        m.pre.iso.push_back({iso.at("x").get<std::vector<double>>(), iso.at("y").get<std::vector<double>>()});
    m.combiner = parse_combiner(j.at("combiner").get<std::string>());
    if (j.contains("weights")) m.weights = j["weights"].get<std::vector<double>>();
    if (j.contains("thresholds")) m.thresholds = j["thresholds"].get<std::vector<double>>();
    if (j.contains("linear")) {
      const auto& l = j["linear"];
      m.linear.intercept = l.at("intercept").get<double>();
      m.linear.beta = l.at("beta").get<std::vector<double>>();
      m.linear.fill = l.at("fill").get<std::vector<double>>();
      m.linear.converged = l.value("converged", false);
      m.linear.iterations = l.value("iterations", 0);
    }
    if (j.contains("tree"))
      for (const auto& nd : j["tree"])
        m.tree.nodes.push_back({nd.at("feature").get<int>(), nd.at("split").get<double>(), nd.at("left").get<int>(),
                                nd.at("right").get<int>(), nd.at("value").get<double>(), nd.at("count").get<std::size_t>()});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad ensemble model: ") + e.what());
  }
}

void save_ensemble(const EnsembleModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << ensemble_to_json(m) << '\n';
}

EnsembleModel load_ensemble(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ensemble_from_json(ss.str());
}

// -------------------------------------------------------------------- study

std::vector<EnsembleStudyRow> ensemble_study(const std::vector<std::string>& roster, const ScoreMatrix& cal,
                                             const std::vector<int>& cal_labels, const ScoreMatrix& test,
                                             const std::vector<int>& test_labels, const EnsembleParams& p) {
  if (width(test) != roster.size()) throw ValidationError("test matrix does not match the roster");
  check_labels(test, test_labels);
  std::vector<EnsembleStudyRow> rows;
  EnsembleStudyRow best{"best_single", "", -std::numeric_limits<double>::infinity()};
  for (std::size_t j = 0; j < roster.size(); ++j) {
    ScoredDataset d;
    for (std::size_t i = 0; i < test.size(); ++i) {
      d.scores.push_back(test[i][j]);
      d.labels.push_back(test_labels[i]);
    }
    double v = prr(d);
    if (v > best.prr) best = {"best_single", roster[j], v};
  }
  rows.push_back(best);
  for (auto pre : {PreprocessKind::Raw, PreprocessKind::ZNorm, PreprocessKind::Isotonic})
    for (auto comb : all_combiners()) {
      auto model = fit_ensemble(roster, cal, cal_labels, pre, comb, p);
      rows.push_back({to_string(pre), to_string(comb), prr({model.predict(test), test_labels})});
    }
  return rows;
}

}  // namespace uekit
