#pragma once

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tdop/ea/cache.hpp"

namespace tdop::ea {

int levenshtein(std::span<const int> a, std::span<const int> b);

// Edit distance between the effective prefixes of two full tours.
int levenshtein_active(std::span<const int> tour_a, std::span<const int> tour_b);

inline double edit_kernel(double theta, int distance) { return std::exp(-theta * distance); }

struct GpParams {
  std::vector<double> theta_grid{0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0};
  int refine_steps = 20;
  std::vector<double> nugget_grid{1e-6, 1e-4, 1e-2, 1e-1};
  double jitter = 1e-8;
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Ordinary Kriging over routes with kernel exp(-theta * edit distance).
class GaussianProcess {
 public:
  static GaussianProcess fit(std::vector<Route> x, std::vector<double> y, const GpParams& params = {});

  Prediction predict(std::span<const int> route) const;

  double theta() const noexcept { return theta_; }
  double nugget() const noexcept { return nugget_; }
  std::size_t size() const noexcept { return x_.size(); }

 private:
  std::vector<Route> x_;
  double theta_ = 1.0;
  double nugget_ = 1e-6;
  double mu_ = 0.0;
  double sigma2_ = 0.0;
  Eigen::VectorXd alpha_;  // R^-1 (y - mu)
  double one_rinv_one_ = 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

// Partition into groups of at most `cap` points. Each group grows from the
// first unassigned point (in input order) by taking its nearest unassigned
// neighbours.
std::vector<std::vector<std::size_t>> medoid_clusters(std::span<const Route> points, std::size_t cap);

struct SurrogateParams {
  std::size_t cluster_cap = 200;
  std::size_t max_points = 600;  // best cached routes used for training
  GpParams gp;
};

class SurrogateEnsemble {
 public:
  static SurrogateEnsemble fit(std::vector<Route> x, std::vector<double> y, const SurrogateParams& params = {});

  // Clusters weighted by 1 / predictive variance.
  Prediction predict(std::span<const int> route) const;

  std::span<const GaussianProcess> members() const noexcept { return members_; }
  bool empty() const noexcept { return members_.empty(); }

 private:
  std::vector<GaussianProcess> members_;
};

SurrogateEnsemble fit_surrogate(const EvalCache& cache, const SurrogateParams& params = {});

}  // namespace tdop::ea
