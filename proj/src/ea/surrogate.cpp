#include "tdop/ea/surrogate.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "tdop/errors.hpp"
#include "tdop/simulator.hpp"

namespace tdop::ea {

int levenshtein(std::span<const int> a, std::span<const int> b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

int levenshtein_active(std::span<const int> tour_a, std::span<const int> tour_b) {
  const auto pa = effective_prefix(tour_a);
  const auto pb = effective_prefix(tour_b);
  // drop the depot at both ends
  const auto inner = [](const auto& p) {
    return std::span<const int>(p).subspan(1, p.size() >= 2 ? p.size() - 2 : 0);
  };
  return levenshtein(inner(pa), inner(pb));
}

namespace {

struct Fit {
  double nll = std::numeric_limits<double>::infinity();
  double theta = 1.0;
  double nugget = 1e-6;
};

Eigen::MatrixXd correlation(const Eigen::MatrixXi& dist, double theta, double diag) {
  const auto m = dist.rows();
  Eigen::MatrixXd r(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) r(i, j) = edit_kernel(theta, dist(i, j));
    r(i, i) += diag;
  }
  return r;
}

// Negative concentrated log likelihood (constants dropped).
double neg_log_likelihood(const Eigen::MatrixXi& dist, const Eigen::VectorXd& y, double theta, double diag) {
  const auto m = y.size();
  Eigen::LLT<Eigen::MatrixXd> llt(correlation(dist, theta, diag));
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(m);
  const Eigen::VectorXd ri1 = llt.solve(one);
  const double mu = ri1.dot(y) / ri1.dot(one);
  const Eigen::VectorXd res = y - mu * one;
  const double sigma2 = std::max(res.dot(llt.solve(res)) / static_cast<double>(m), 1e-12);
  const Eigen::MatrixXd l = llt.matrixL();
  const double logdet = 2.0 * l.diagonal().array().log().sum();
  return static_cast<double>(m) * std::log(sigma2) + logdet;
}

}  // namespace

GaussianProcess GaussianProcess::fit(std::vector<Route> x, std::vector<double> y, const GpParams& params) {
  if (x.empty() || x.size() != y.size()) throw InvalidInput("surrogate needs matching non-empty data");
  const auto m = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXi dist(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    dist(i, i) = 0;
    for (Eigen::Index j = 0; j < i; ++j) {
      dist(i, j) = dist(j, i) = levenshtein(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]);
    }
  }
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), m);

  Fit best;
  std::size_t best_k = 0;
  for (double nug : params.nugget_grid) {
    for (std::size_t k = 0; k < params.theta_grid.size(); ++k) {
      const double nll = neg_log_likelihood(dist, yv, params.theta_grid[k], nug + params.jitter);
      if (nll < best.nll) {
        best = {nll, params.theta_grid[k], nug};
        best_k = k;
      }
    }
  }
  // golden-section refinement in log theta between the neighbouring grid points
  if (params.theta_grid.size() > 1 && params.refine_steps > 0) {
    const auto& g = params.theta_grid;
    double lo = std::log(g[best_k == 0 ? 0 : best_k - 1]);
    double hi = std::log(g[std::min(best_k + 1, g.size() - 1)]);
    const double diag = best.nugget + params.jitter;
    const auto f = [&](double lt) { return neg_log_likelihood(dist, yv, std::exp(lt), diag); };
    constexpr double kGolden = 0.6180339887498949;
    double a = hi - kGolden * (hi - lo), b = lo + kGolden * (hi - lo);
    double fa = f(a), fb = f(b);
    for (int s = 0; s < params.refine_steps; ++s) {
      if (fa < fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - kGolden * (hi - lo);
        fa = f(a);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + kGolden * (hi - lo);
        fb = f(b);
      }
    }
    const double lt = fa < fb ? a : b;
    const double v = std::min(fa, fb);
    if (v < best.nll) best = {v, std::exp(lt), best.nugget};
  }

  GaussianProcess gp;
  gp.theta_ = best.theta;
  gp.nugget_ = best.nugget;
  gp.llt_.compute(correlation(dist, best.theta, best.nugget + params.jitter));
  if (gp.llt_.info() != Eigen::Success) {
    // fall back to a heavy nugget, always positive definite
    gp.nugget_ = 1.0;
    gp.llt_.compute(correlation(dist, best.theta, 1.0));
  }
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(m);
  const Eigen::VectorXd ri1 = gp.llt_.solve(one);
  gp.one_rinv_one_ = ri1.dot(one);
  gp.mu_ = ri1.dot(yv) / gp.one_rinv_one_;
  const Eigen::VectorXd res = yv - gp.mu_ * one;
  gp.alpha_ = gp.llt_.solve(res);
  gp.sigma2_ = std::max(res.dot(gp.alpha_) / static_cast<double>(m), 1e-12);
  gp.x_ = std::move(x);
  return gp;
}

Prediction GaussianProcess::predict(std::span<const int> route) const {
  const auto m = static_cast<Eigen::Index>(x_.size());
  Eigen::VectorXd r(m);
  for (Eigen::Index i = 0; i < m; ++i) r(i) = edit_kernel(theta_, levenshtein(route, x_[static_cast<std::size_t>(i)]));
  const Eigen::VectorXd rir = llt_.solve(r);
  const double u = 1.0 - rir.sum();
  Prediction p;
  p.mean = mu_ + r.dot(alpha_);
  p.variance = std::max(sigma2_ * (1.0 + nugget_ - r.dot(rir) + u * u / one_rinv_one_), 1e-12);
  return p;
}

std::vector<std::vector<std::size_t>> medoid_clusters(std::span<const Route> points, std::size_t cap) {
  if (cap == 0) throw InvalidInput("cluster cap must be positive");
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> taken(points.size(), false);
  std::vector<std::pair<int, std::size_t>> cand;
  for (std::size_t seed = 0; seed < points.size(); ++seed) {
    if (taken[seed]) continue;
    cand.clear();
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (!taken[j]) cand.emplace_back(levenshtein(points[seed], points[j]), j);
    }
    const auto take = std::min(cap, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end());
    auto& group = out.emplace_back();
    for (std::size_t k = 0; k < take; ++k) {
      group.push_back(cand[k].second);
      taken[cand[k].second] = true;
    }
  }
  return out;
}

SurrogateEnsemble SurrogateEnsemble::fit(std::vector<Route> x, std::vector<double> y, const SurrogateParams& params) {
  if (x.size() != y.size()) throw InvalidInput("surrogate needs matching data");
  SurrogateEnsemble s;
  for (const auto& group : medoid_clusters(x, params.cluster_cap)) {
    std::vector<Route> gx;
    std::vector<double> gy;
    for (auto i : group) {
      gx.push_back(x[i]);
      gy.push_back(y[i]);
    }
    s.members_.push_back(GaussianProcess::fit(std::move(gx), std::move(gy), params.gp));
  }
  return s;
}

Prediction SurrogateEnsemble::predict(std::span<const int> route) const {
  if (members_.empty()) return {};
  double wsum = 0, mean = 0;
  for (const auto& gp : members_) {
    const auto p = gp.predict(route);
    const double w = 1.0 / p.variance;
    wsum += w;
    mean += w * p.mean;
  }
  return {mean / wsum, 1.0 / wsum};
}

SurrogateEnsemble fit_surrogate(const EvalCache& cache, const SurrogateParams& params) {
  std::vector<const CacheEntry*> pool;
  for (const auto& e : cache.entries()) {
    if (e.count > 0) pool.push_back(&e);
  }
  // best first; ties broken by cache order so the fit is reproducible
  std::stable_sort(pool.begin(), pool.end(), [](const auto* a, const auto* b) { return a->mean() > b->mean(); });
  if (pool.size() > params.max_points) pool.resize(params.max_points);
  std::vector<Route> x;
  std::vector<double> y;
  for (const auto* e : pool) {
    x.push_back(e->route);
    y.push_back(e->mean());
  }
  if (x.empty()) return {};
  return SurrogateEnsemble::fit(std::move(x), std::move(y), params);
}

}  // namespace tdop::ea
