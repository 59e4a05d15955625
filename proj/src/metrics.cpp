#include "uekit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uekit/errors.hpp"

namespace uekit {

namespace {

void check(const ScoredDataset& d) {
  if (d.scores.size() != d.labels.size()) throw ValidationError("scores and labels differ in length");
  for (int l : d.labels)
    if (l != 0 && l != 1) throw ValidationError("labels must be 0 or 1");
}

void need_both_classes(const ScoredDataset& d) {
  check(d);
  std::size_t p = d.positives();
  if (p == 0 || p == d.size()) throw MetricError("metric needs both correct and incorrect examples");
}

// Indices sorted by descending score.
std::vector<std::size_t> order_desc(const std::vector<double>& s) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  return idx;
}

}  // namespace

std::size_t ScoredDataset::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

double auroc(const ScoredDataset& d) {
  need_both_classes(d);
  const std::size_t n = d.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d.scores[a] < d.scores[b]; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && d.scores[idx[j]] == d.scores[idx[i]]) ++j;
    double mid = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (d.labels[idx[k]] == 1) rank_sum += mid;
    i = j;
  }
  const double P = static_cast<double>(d.positives()), N = static_cast<double>(n) - P;
  return (rank_sum - P * (P + 1.0) / 2.0) / (P * N);
}

std::vector<double> rejection_curve(const ScoredDataset& d) {
  check(d);
  const std::size_t n = d.size();
  if (n == 0) throw MetricError("empty dataset");
  auto idx = order_desc(d.scores);
  double correct = static_cast<double>(n - d.positives());
  std::vector<double> prec(n + 1);
  prec[0] = correct / static_cast<double>(n);
  std::size_t r = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    double block_correct = 0.0;
    while (j < n && d.scores[idx[j]] == d.scores[idx[i]]) block_correct += d.labels[idx[j++]] == 0 ? 1.0 : 0.0;
    const double s = static_cast<double>(j - i);
    for (std::size_t k = 1; k <= j - i; ++k) {
      ++r;
      if (r == n) break;
      double removed = static_cast<double>(k) * block_correct / s;
      prec[r] = (correct - removed) / static_cast<double>(n - r);
    }
    correct -= block_correct;
    i = j;
  }
  prec[n] = n >= 1 ? prec[n - 1] : prec[0];
  return prec;
}

std::vector<double> oracle_rejection_curve(const ScoredDataset& d) {
  ScoredDataset o{std::vector<double>(d.labels.begin(), d.labels.end()), d.labels};
  return rejection_curve(o);
}

double curve_area(const std::vector<double>& p) {
  if (p.size() < 2) throw MetricError("curve needs at least two points");
  const double n = static_cast<double>(p.size() - 1);
  double a = 0.0;
  for (std::size_t r = 0; r + 1 < p.size(); ++r) a += 0.5 * (p[r] + p[r + 1]);
  return a / n;
}

PrrResult prr_detail(const ScoredDataset& d) {
  need_both_classes(d);
  PrrResult out;
  out.auc_score = curve_area(rejection_curve(d));
  out.auc_oracle = curve_area(oracle_rejection_curve(d));
  out.auc_random = static_cast<double>(d.size() - d.positives()) / static_cast<double>(d.size());
  double denom = out.auc_oracle - out.auc_random;
  if (!(denom > 0.0)) throw MetricError("PRR undefined: oracle curve does not beat random");
  out.prr = (out.auc_score - out.auc_random) / denom;
  return out;
}

double prr(const ScoredDataset& d) { return prr_detail(d).prr; }

RecallCalibrator::RecallCalibrator(const ScoredDataset& cal) {
  check(cal);
  if (cal.size() == 0) throw MetricError("empty calibration set");
  for (std::size_t i = 0; i < cal.size(); ++i)
    if (cal.labels[i] == 1) pos_.push_back(cal.scores[i]);
  if (pos_.empty()) throw MetricError("calibration set has no positives");
  std::sort(pos_.begin(), pos_.end(), std::greater<>());
  auto [mn, mx] = std::minmax_element(cal.scores.begin(), cal.scores.end());
  lo_ = *mn - 1.0;
  hi_ = *mx + 1.0;
}

std::size_t RecallCalibrator::cut(double r_star) const {
  const std::size_t P = pos_.size();
  double want = std::ceil(std::clamp(r_star, 0.0, 1.0) * static_cast<double>(P) - 1e-9);
  std::size_t k = static_cast<std::size_t>(std::max(0.0, want));
  if (k == 0) return 0;
  if (k >= P) return P;
  // A threshold cannot split tied scores: keep the whole tie group above.
  while (k < P && pos_[k] == pos_[k - 1]) ++k;
  return k;
}

double RecallCalibrator::threshold(double r_star) const {
  std::size_t k = cut(r_star);
  if (k == 0) return hi_;
  if (k == pos_.size()) return lo_;
  return pos_[k - 1] / 2.0 + pos_[k] / 2.0;
}

double RecallCalibrator::threshold_random(double r_star, std::mt19937_64& rng) const {
  std::size_t k = cut(r_star);
  double a = k == pos_.size() ? lo_ : pos_[k];        // lower end, included
  double b = k == 0 ? hi_ : pos_[k - 1];             // upper end, excluded
  if (k == 0) a = pos_[0];
  std::uniform_real_distribution<double> u(a, b);
  double t = u(rng);
  return t >= b ? a : t;
}

double threshold_at_recall(const ScoredDataset& cal, double r_star) { return RecallCalibrator(cal).threshold(r_star); }

double recall_at(const ScoredDataset& d, double t) {
  check(d);
  std::size_t pos = 0, hit = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.labels[i] == 1) {
      ++pos;
      if (d.scores[i] > t) ++hit;
    }
  if (pos == 0) throw MetricError("no positives");
  return static_cast<double>(hit) / static_cast<double>(pos);
}

std::vector<double> recall_targets(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw ValidationError("recall target step must be in (0, 1]");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::llround(1.0 / step));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(std::min(1.0, static_cast<double>(i) * step));
  return out;
}

double are(const ScoredDataset& cal, const ScoredDataset& test, const std::vector<double>& targets) {
  if (targets.empty()) throw ValidationError("no recall targets");
  RecallCalibrator calib(cal);
  check(test);
  std::vector<double> tp;
  for (std::size_t i = 0; i < test.size(); ++i)
    if (test.labels[i] == 1) tp.push_back(test.scores[i]);
  if (tp.empty()) throw MetricError("test set has no positives");
  std::sort(tp.begin(), tp.end());
  double err = 0.0;
  for (double r : targets) {
    double t = calib.threshold(r);
    auto above = static_cast<double>(tp.end() - std::upper_bound(tp.begin(), tp.end(), t));
    err += std::abs(r - above / static_cast<double>(tp.size()));
  }
  return err / static_cast<double>(targets.size());
}

std::pair<double, double> mean_sd(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

std::vector<ReportRow> shift_study(const std::vector<std::string>& methods,
                                   const std::map<std::string, std::map<std::string, ScoredDataset>>& cal_sets,
                                   const std::map<std::string, ScoredDataset>& test, const ShiftStudyParams& p) {
  std::vector<ReportRow> rows;
  for (const auto& m : methods) {
    auto tit = test.find(m);
    if (tit == test.end()) throw ValidationError("test set has no scores for " + m);
    for (const auto& [name, per_method] : cal_sets) {
      auto cit = per_method.find(m);
      if (cit == per_method.end()) throw ValidationError("calibration set " + name + " has no scores for " + m);
      const ScoredDataset& cal = cit->second;
      std::vector<double> values;
      for (auto seed : p.seeds) {
        std::mt19937_64 rng(seed);
        ScoredDataset sub;
        const std::size_t n = cal.size();
        if (p.cal_size == 0 || p.cal_size >= n) {
          for (std::size_t i = 0; i < n; ++i) {
            std::size_t j = static_cast<std::size_t>(rng() % n);
            sub.scores.push_back(cal.scores[j]);
            sub.labels.push_back(cal.labels[j]);
          }
        } else {
          std::vector<std::size_t> idx(n);
          std::iota(idx.begin(), idx.end(), std::size_t{0});
          for (std::size_t i = 0; i < p.cal_size; ++i) {  // partial Fisher-Yates
            std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
            std::swap(idx[i], idx[j]);
            sub.scores.push_back(cal.scores[idx[i]]);
            sub.labels.push_back(cal.labels[idx[i]]);
          }
        }
        if (sub.positives() == 0) continue;  // unusable draw
        values.push_back(are(sub, tit->second, p.targets));
      }
      auto [mean, sd] = mean_sd(values);
      rows.push_back({m, name, "are", mean, sd, static_cast<int>(values.size())});
    }
  }
  return rows;
}

}  // namespace uekit
