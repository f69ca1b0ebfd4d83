#pragma once

#include <span>
#include <vector>

#include "tdop/ea/cache.hpp"

namespace tdop::ea {

// r[v-1] = 1-based position of node v in the route, n for nodes not visited.
std::vector<int> rank_features(std::span<const int> route, int n);

struct ClassifierParams {
  int rounds = 60;
  int max_depth = 3;
  double learning_rate = 0.2;
  int min_leaf = 5;
  double l2 = 1.0;
  double label_threshold = 0.5;  // infeasible fraction at or above this is a positive
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  int threshold = 0; // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double value = 0.0;
};

/// Boosted regression trees on the logistic loss; outputs P(infeasible).
class FeasibilityClassifier {
 public:
  FeasibilityClassifier() = default;

  static FeasibilityClassifier fit(const std::vector<std::vector<int>>& x, const std::vector<int>& y,
                                   const ClassifierParams& params = {});

  double predict(std::span<const int> features) const;
  double predict_route(std::span<const int> route) const;

  bool trained() const noexcept { return n_ > 0; }
  int node_count() const noexcept { return n_; }

 private:
  double raw(std::span<const int> features) const;

  int n_ = 0;  // instance size, fixes the feature width
  double bias_ = 0.0;
  double shrink_ = 1.0;
  std::vector<std::vector<TreeNode>> trees_;
};

// Labels every cached route by its infeasible fraction.
FeasibilityClassifier train_classifier(const EvalCache& cache, const ClassifierParams& params = {});

}  // namespace tdop::ea
