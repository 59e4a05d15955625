#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uekit/metrics.hpp"

namespace uekit {

/// Rows are traces, columns follow the method roster.
using ScoreMatrix = std::vector<std::vector<double>>;

struct IsotonicMap {
  std::vector<double> x;  // ascending block lower ends
  std::vector<double> y;  // nondecreasing levels in [0,1]
  double operator()(double v) const;
};

/// Pool-adjacent-violators fit of a nondecreasing map score -> P(label = 1).
/// Equal scores form one block. Lookup is stepwise constant, clamped.
IsotonicMap fit_isotonic(const std::vector<double>& scores, const std::vector<int>& labels);

enum class PreprocessKind { Raw, ZNorm, Isotonic };
std::string to_string(PreprocessKind k);
PreprocessKind parse_preprocess(const std::string& s);

/// Per-method preprocessing. Z-normalization uses the population standard
/// deviation of finite values; sentinels map to +3 afterwards.
struct Preprocessor {
  PreprocessKind kind = PreprocessKind::Raw;
  std::vector<double> mu, sigma;
  std::vector<IsotonicMap> iso;

  std::vector<double> apply(const std::vector<double>& v) const;
  ScoreMatrix apply(const ScoreMatrix& m) const;
};

Preprocessor fit_raw(std::size_t k);
Preprocessor fit_znorm(const ScoreMatrix& cal);
Preprocessor fit_isotonic_preprocessor(const ScoreMatrix& cal, const std::vector<int>& labels);
Preprocessor fit_preprocessor(PreprocessKind kind, const ScoreMatrix& cal, const std::vector<int>& labels);

enum class CombinerKind { Max, Min, Mean, WeightedMean, Voting, Linear, Tree };
std::string to_string(CombinerKind k);
CombinerKind parse_combiner(const std::string& s);
const std::vector<CombinerKind>& all_combiners();

struct LinearModel {
  std::vector<double> beta;  // one per feature
  double intercept = 0.0;
  std::vector<double> fill;  // replaces sentinels, per feature
  bool converged = false;
  int iterations = 0;
  double predict(const std::vector<double>& v) const;  // P(incorrect)
};

struct LinearParams {
  double lambda = 1e-3;  // ridge penalty (lambda / 2) ||beta||^2, intercept free
  int max_iter = 20000;
  double tol = 1e-7;  // on the gradient norm
};

/// Logistic regression by full-batch gradient descent from zero.
LinearModel fit_linear(const ScoreMatrix& x, const std::vector<int>& labels, const LinearParams& p = {});

struct TreeNode {
  int feature = -1;  // -1: leaf
  double split = 0.0;  // go left when value <= split
  int left = -1, right = -1;
  double value = 0.0;  // incorrectness rate of the training rows here
  std::size_t count = 0;
};

struct TreeModel {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double predict(const std::vector<double>& v) const;
  int depth() const;
};

struct TreeParams {
  int max_depth = 3;
  std::size_t min_leaf = 5;
};

/// Greedy Gini splits at midpoints between distinct values. Ties go to the
/// lowest feature, then the lowest threshold. A split must lower impurity.
TreeModel fit_tree(const ScoreMatrix& x, const std::vector<int>& labels, const TreeParams& p = {});

struct EnsembleModel {
  std::vector<std::string> roster;
  Preprocessor pre;
  CombinerKind combiner = CombinerKind::Mean;
  std::vector<double> weights;     // weighted mean
  std::vector<double> thresholds;  // voting
  LinearModel linear;
  TreeModel tree;

  /// Combines one preprocessed score vector.
  double combine(const std::vector<double>& v) const;
  /// Preprocesses, then combines.
  double predict(const std::vector<double>& raw) const;
  std::vector<double> predict(const ScoreMatrix& raw) const;
};

/// Sentinel-aware combination of an already-preprocessed vector.
double combine_simple(CombinerKind k, const std::vector<double>& v, const std::vector<double>& weights = {},
                      const std::vector<double>& thresholds = {});

struct EnsembleParams {
  LinearParams linear;
  TreeParams tree;
  double voting_recall = 0.5;
};

EnsembleModel fit_ensemble(const std::vector<std::string>& roster, const ScoreMatrix& cal, const std::vector<int>& labels,
                           PreprocessKind pre, CombinerKind comb, const EnsembleParams& p = {});

std::string ensemble_to_json(const EnsembleModel& m);
EnsembleModel ensemble_from_json(const std::string& s);
void save_ensemble(const EnsembleModel& m, const std::string& path);
EnsembleModel load_ensemble(const std::string& path);

struct EnsembleStudyRow {
  std::string preprocessor;  // "-" for single methods
  std::string combiner;      // method id for the single-method baseline
  double prr = 0.0;
};

/// PRR on the test set of the best single method and of every
/// preprocessor x combiner pair fitted on the calibration set.
std::vector<EnsembleStudyRow> ensemble_study(const std::vector<std::string>& roster, const ScoreMatrix& cal,
                                             const std::vector<int>& cal_labels, const ScoreMatrix& test,
                                             const std::vector<int>& test_labels, const EnsembleParams& p = {});

}  // namespace uekit
