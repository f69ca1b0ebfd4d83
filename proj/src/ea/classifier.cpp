#include "tdop/ea/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "tdop/errors.hpp"

namespace tdop::ea {

std::vector<int> rank_features(std::span<const int> route, int n) {
  std::vector<int> r(static_cast<std::size_t>(n - 1), n);
  for (std::size_t k = 0; k < route.size(); ++k) r[static_cast<std::size_t>(route[k] - 1)] = static_cast<int>(k) + 1;
  return r;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct Builder {
  const std::vector<std::vector<int>>& x;
  const std::vector<double>& g;
  const std::vector<double>& h;
  const ClassifierParams& p;
  int max_value;
  std::vector<TreeNode> nodes;

  double leaf_value(const std::vector<std::size_t>& rows) const {
    double gs = 0, hs = 0;
    for (auto i : rows) {
      gs += g[i];
      hs += h[i];
    }
    return -gs / (hs + p.l2);
  }

  int build(const std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(TreeNode{.value = leaf_value(rows)});
    if (depth >= p.max_depth || static_cast<int>(rows.size()) < 2 * p.min_leaf) return id;

    double gt = 0, ht = 0;
    for (auto i : rows) {
      gt += g[i];
      ht += h[i];
    }
    const double parent = gt * gt / (ht + p.l2);
    double best_gain = 1e-12;
    int best_f = -1, best_t = 0;
    const auto width = x.front().size();
    std::vector<double> hg(static_cast<std::size_t>(max_value) + 1), hh(hg.size());
    std::vector<int> hc(hg.size());
    for (std::size_t f = 0; f < width; ++f) {
      std::fill(hg.begin(), hg.end(), 0.0);
      std::fill(hh.begin(), hh.end(), 0.0);
      std::fill(hc.begin(), hc.end(), 0);
      for (auto i : rows) {
        const auto v = static_cast<std::size_t>(x[i][f]);
        hg[v] += g[i];
        hh[v] += h[i];
        ++hc[v];
      }
      double gl = 0, hl = 0;
      int cl = 0;
      for (int t = 0; t < max_value; ++t) {
        gl += hg[static_cast<std::size_t>(t)];
        hl += hh[static_cast<std::size_t>(t)];
        cl += hc[static_cast<std::size_t>(t)];
        const int cr = static_cast<int>(rows.size()) - cl;
        if (cl < p.min_leaf || cr < p.min_leaf) continue;
        const double gr = gt - gl, hr = ht - hl;
        const double gain = gl * gl / (hl + p.l2) + gr * gr / (hr + p.l2) - parent;
        if (gain > best_gain) {
          best_gain = gain;
          best_f = static_cast<int>(f);
          best_t = t;
        }
      }
    }
    if (best_f < 0) return id;

    std::vector<std::size_t> lrows, rrows;
    for (auto i : rows) (x[i][static_cast<std::size_t>(best_f)] <= best_t ? lrows : rrows).push_back(i);
    const int l = build(lrows, depth + 1);
    const int r = build(rrows, depth + 1);
    nodes[static_cast<std::size_t>(id)].feature = best_f;
    nodes[static_cast<std::size_t>(id)].threshold = best_t;
    nodes[static_cast<std::size_t>(id)].left = l;
    nodes[static_cast<std::size_t>(id)].right = r;
    return id;
  }
};

double tree_value(const std::vector<TreeNode>& t, std::span<const int> x) {
  std::size_t k = 0;
  while (t[k].feature >= 0) {
    k = static_cast<std::size_t>(x[static_cast<std::size_t>(t[k].feature)] <= t[k].threshold ? t[k].left : t[k].right);
  }
  return t[k].value;
}

}  // namespace

FeasibilityClassifier FeasibilityClassifier::fit(const std::vector<std::vector<int>>& x, const std::vector<int>& y,
                                                 const ClassifierParams& params) {
  if (x.empty() || x.size() != y.size()) throw InvalidInput("classifier needs matching non-empty data");
  FeasibilityClassifier c;
  c.n_ = static_cast<int>(x.front().size()) + 1;
  c.shrink_ = params.learning_rate;
  const auto m = x.size();
  const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
  // smoothed prior; with a single class this is the whole model
  c.bias_ = std::log((pos + 0.5) / (static_cast<double>(m) - pos + 0.5));
  if (pos == 0 || pos == static_cast<double>(m)) return c;

  std::vector<double> f(m, c.bias_), g(m), h(m);
  std::vector<std::size_t> all(m);
  for (std::size_t i = 0; i < m; ++i) all[i] = i;
  for (int round = 0; round < params.rounds; ++round) {
    for (std::size_t i = 0; i < m; ++i) {
      const double pr = sigmoid(f[i]);
      g[i] = pr - y[i];
      h[i] = std::max(pr * (1 - pr), 1e-6);
    }
    Builder b{x, g, h, params, c.n_, {}};
    b.build(all, 0);
    for (std::size_t i = 0; i < m; ++i) f[i] += c.shrink_ * tree_value(b.nodes, x[i]);
    c.trees_.push_back(std::move(b.nodes));
  }
  return c;
}

double FeasibilityClassifier::raw(std::span<const int> features) const {
  double z = bias_;
  for (const auto& t : trees_) z += shrink_ * tree_value(t, features);
  return z;
}

double FeasibilityClassifier::predict(std::span<const int> features) const {
  if (!trained()) return 0.0;
  return sigmoid(raw(features));
}

double FeasibilityClassifier::predict_route(std::span<const int> route) const {
  if (!trained()) return 0.0;
  return predict(rank_features(route, n_));
}

FeasibilityClassifier train_classifier(const EvalCache& cache, const ClassifierParams& params) {
  const int n = cache.instance().n;
  std::vector<std::vector<int>> x;
  std::vector<int> y;
  for (const auto& e : cache.entries()) {
    if (e.count == 0) continue;
    x.push_back(rank_features(e.route, n));
    y.push_back(e.infeasible_fraction() >= params.label_threshold ? 1 : 0);
  }
  if (x.empty()) return {};
  return FeasibilityClassifier::fit(x, y, params);
}

}  // namespace tdop::ea
