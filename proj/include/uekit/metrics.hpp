#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace uekit {

/// Uncertainty scores with labels (1 = incorrect, the positive class).
struct ScoredDataset {
  std::vector<double> scores;
  std::vector<int> labels;
  std::size_t size() const { return scores.size(); }
  std::size_t positives() const;
};

/// P(score of a random positive > score of a random negative), ties 1/2.
double auroc(const ScoredDataset& d);

/// Precision of the retained set after rejecting r = 0..n highest-uncertainty
/// items. Inside a block of tied scores the expected value over orderings is
/// used. precision(n) repeats precision(n-1).
std::vector<double> rejection_curve(const ScoredDataset& d);
/// Same, for the ordering that rejects every incorrect item first.
std::vector<double> oracle_rejection_curve(const ScoredDataset& d);
/// Trapezoid area of a curve sampled at r/n.
double curve_area(const std::vector<double>& precision);

struct PrrResult {
  double prr = 0.0;
  double auc_score = 0.0;
  double auc_random = 0.0;
  double auc_oracle = 0.0;
};
PrrResult prr_detail(const ScoredDataset& d);
double prr(const ScoredDataset& d);

/// Threshold t whose recall (fraction of positives with score > t) is the
/// smallest achievable value >= r_star. t sits midway between adjacent
/// positive scores; beyond the ends it is max(all) + 1 or min(all) - 1.
class RecallCalibrator {
 public:
  explicit RecallCalibrator(const ScoredDataset& cal);
  double threshold(double r_star) const;
  /// Uniform draw from the whole interval of thresholds giving that recall.
  double threshold_random(double r_star, std::mt19937_64& rng) const;
  std::size_t positives() const { return pos_.size(); }

 private:
  std::size_t cut(double r_star) const;  // number of positives kept above t
  std::vector<double> pos_;                // descending
  double lo_ = 0.0, hi_ = 0.0;
};

double threshold_at_recall(const ScoredDataset& cal, double r_star);
double recall_at(const ScoredDataset& d, double t);

/// {0, step, 2 step, ..., 1}.
std::vector<double> recall_targets(double step = 0.001);

/// Mean |r* - recall on test| with thresholds set on `cal`.
double are(const ScoredDataset& cal, const ScoredDataset& test, const std::vector<double>& targets);

struct ReportRow {
  std::string method;
  std::string cal_set;
  std::string metric;
  double mean = 0.0;
  double sd = 0.0;
  int seed_count = 0;
};

struct ShiftStudyParams {
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  /// Rows drawn (without replacement) from each calibration set per seed;
  /// 0 means a same-size bootstrap sample.
  std::size_t cal_size = 0;
  std::vector<double> targets = recall_targets();
};

/// ARE of every (method, calibration set) against the test set.
/// cal_sets: name -> method -> data. test: method -> data.
std::vector<ReportRow> shift_study(const std::vector<std::string>& methods,
                                   const std::map<std::string, std::map<std::string, ScoredDataset>>& cal_sets,
                                   const std::map<std::string, ScoredDataset>& test, const ShiftStudyParams& p = {});

/// Mean and sample standard deviation (0 for fewer than two values).
std::pair<double, double> mean_sd(const std::vector<double>& v);

}  // namespace uekit
