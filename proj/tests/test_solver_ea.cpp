#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "oracles/edit_distance.hpp"
#include "support.hpp"
#include "tdop/ea/solver.hpp"
#include "tdop/errors.hpp"
#include "tdop/scoring.hpp"

using namespace tdop;
using namespace tdop::ea;

namespace {

bool is_permutation_of(const std::vector<int>& child, std::vector<int> ref) {
  auto c = child;
  std::sort(c.begin(), c.end());
  std::sort(ref.begin(), ref.end());
  return c == ref;
}

std::vector<int> random_perm(int len, Rng& rng) {
  std::vector<int> p(static_cast<std::size_t>(len));
  std::iota(p.begin(), p.end(), 0);
  shuffle(p.begin(), p.end(), rng);
  return p;
}

// smaller schedule for tests that run the whole pipeline several times
EaConfig quick_config() {
  EaConfig c;
  c.population = 20;
  c.offspring = 40;
  c.phases = {{1, 400, Filter::none},        {10, 400, Filter::none},      {100, 400, Filter::none},
              {100, 400, Filter::classifier}, {100, 200, Filter::surrogate}, {200, 200, Filter::surrogate},
              {200, 200, Filter::combined}};
  c.reduce_repeats = 200;
  c.final_top = 30;
  c.final_fidelity = 2000;
  c.surrogate.max_points = 150;
  return c;
}

}  // namespace

TEST_CASE("evaluation cache") {
  const auto inst = generate_instance({.n = 12, .window = 60}, 4);
  EvalCache cache(inst, 77);
  const Route r{3, 7, 1};

  SUBCASE("repeat request is free") {
    cache.estimate(r, 50);
    const auto calls = cache.simulator_calls();
    cache.estimate(r, 50);
    cache.estimate(r, 20);
    CHECK(cache.simulator_calls() == calls);
  }
  SUBCASE("top-up runs exactly the missing samples") {
    cache.estimate(r, 1);
    CHECK(cache.simulator_calls() == 1);
    cache.estimate(r, 10);
    CHECK(cache.simulator_calls() == 10);
    CHECK(cache.find(r)->levels.size() == 2);
  }
  SUBCASE("stored mean replays from the sample streams") {
    cache.estimate(r, 7);
    cache.estimate(r, 300);
    const auto rep = evaluate_monte_carlo(inst, tour_from_route(inst.n, r), 300, 77, 0);
    CHECK(cache.find(r)->sum == rep.total);
    CHECK(cache.find(r)->levels.at(7).mean ==
          doctest::Approx(evaluate_monte_carlo(inst, tour_from_route(inst.n, r), 7, 77, 0).mean()));
  }
  SUBCASE("batch results do not depend on threads") {
    EvalCache a(inst, 5), b(inst, 5);
    std::vector<Route> routes;
    Rng rng(3);
    for (int k = 0; k < 40; ++k) routes.push_back(route_of(random_genome(std::vector<int>{1, 2, 3, 4, 5, 6}, 2, rng)));
    a.estimate_batch(routes, 64, 1);
    b.estimate_batch(routes, 64, 8);
    for (const auto& x : routes) CHECK(a.find(x)->sum == b.find(x)->sum);
    CHECK(a.simulator_calls() == b.simulator_calls());
  }
  SUBCASE("agrees with the exhaustive oracle at full fidelity") {
    const auto small = generate_instance({.n = 6, .window = 60}, 21);
    const auto best = brute_force_best_tour(small, 10000, 13);
    EvalCache c(small, 13);
    const auto p = effective_prefix(best.tour);
    const Route route(p.begin() + 1, p.end() - 1);
    CHECK(c.estimate(route, 10000) == doctest::Approx(best.mean()));
  }
  SUBCASE("fidelity must be positive") { CHECK_THROWS_AS(cache.estimate(r, 0), InvalidInput); }
}

TEST_CASE("permutation crossovers") {
  Rng rng(8);
  SUBCASE("children are permutations") {
    for (int k = 0; k < 300; ++k) {
      const int len = 2 + static_cast<int>(rng.below(12));
      const auto a = random_perm(len, rng), b = random_perm(len, rng);
      auto lo = rng.below(a.size()), hi = rng.below(a.size());
      if (lo > hi) std::swap(lo, hi);
      std::vector<bool> keep(a.size());
      for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = rng.bernoulli(0.5);
      CHECK(is_permutation_of(cycle_crossover(a, b), a));
      CHECK(is_permutation_of(order_crossover(a, b, lo, hi), a));
      CHECK(is_permutation_of(position_crossover(a, b, keep), a));
      CHECK(is_permutation_of(alternating_position_crossover(a, b), a));
    }
  }
  SUBCASE("identical parents") {
    const std::vector<int> a{3, 0, 4, 1, 2};
    CHECK(cycle_crossover(a, a) == a);
    CHECK(order_crossover(a, a, 1, 3) == a);
    CHECK(position_crossover(a, a, {true, false, true, false, false}) == a);
    CHECK(alternating_position_crossover(a, a) == a);
  }
  SUBCASE("worked examples") {
    const std::vector<int> a{1, 2, 3, 4, 5, 6, 7, 8}, b{8, 5, 2, 1, 3, 6, 4, 7};
    // cycles {0,7,6,3} from a, {1,4,2} from b, {5} from a
    CHECK(cycle_crossover(a, b) == std::vector<int>{1, 5, 2, 4, 3, 6, 7, 8});
    // segment 3..5 of a, then b from position 6 onward skipping used values
    CHECK(order_crossover(a, b, 3, 5) == std::vector<int>{2, 1, 3, 4, 5, 6, 7, 8});
    CHECK(alternating_position_crossover(a, b) == std::vector<int>{1, 8, 2, 5, 3, 4, 6, 7});
  }
}

TEST_CASE("self-adaptive variation") {
  const std::vector<int> active{1, 2, 3, 4, 5, 6, 7};
  Rng rng(2);
  StrategyParams params;

  SUBCASE("offspring are valid and visit at least two nodes") {
    std::vector<EaIndividual> pop;
    for (int k = 0; k < 10; ++k) {
      EaIndividual ind;
      ind.genome = random_genome(active, 2, rng);
      ind.recombination = kRecombinations[static_cast<std::size_t>(k % 4)];
      ind.mutation = kMutations[static_cast<std::size_t>(k % 2)];
      pop.push_back(ind);
    }
    auto ref = active;
    ref.push_back(kDepot);
    for (int k = 0; k < 2000; ++k) {
      const auto child = mutate(recombine(pop[rng.below(10)], pop[rng.below(10)], params, rng), params, rng);
      REQUIRE(is_permutation_of(child.genome, ref));
      CHECK(route_of(child.genome).size() >= 2);
      CHECK(child.rate >= params.rate_min);
      CHECK(child.rate <= params.rate_max);
      pop[rng.below(10)] = child;
    }
  }
  SUBCASE("zero learning rate keeps q") {
    params.learning_rate = 0.0;
    EaIndividual ind{random_genome(active, 2, rng), Recombination::order, Mutation::insert, 0.237};
    for (int k = 0; k < 50; ++k) {
      ind = mutate(ind, params, rng);
      CHECK(ind.rate == 0.237);
    }
  }
  SUBCASE("q is recombined by averaging") {
    EaIndividual a{random_genome(active, 2, rng), Recombination::cycle, Mutation::swap, 0.1};
    EaIndividual b{random_genome(active, 2, rng), Recombination::cycle, Mutation::swap, 0.3};
    CHECK(recombine(a, b, params, rng).rate == doctest::Approx(0.2));
  }
  SUBCASE("operator genes stay put with p = 0") {
    params.op_mutation_probability = 0.0;
    EaIndividual ind{random_genome(active, 2, rng), Recombination::position, Mutation::insert, 0.1};
    for (int k = 0; k < 100; ++k) {
      ind = mutate(ind, params, rng);
      CHECK(ind.recombination == Recombination::position);
      CHECK(ind.mutation == Mutation::insert);
    }
  }
  SUBCASE("swap never touches two inactive positions") {
    for (int k = 0; k < 500; ++k) {
      auto g = random_genome(active, 2, rng);
      const auto before = g;
      const auto d = depot_position(g);
      swap_mutation(g, rng);
      int changed_tail = 0;
      for (std::size_t i = d + 1; i < g.size(); ++i) changed_tail += g[i] != before[i] ? 1 : 0;
      CHECK(changed_tail <= 1);
    }
  }
}

TEST_CASE("dimension reduction") {
  // node 2 opens after T; node 3 sits on the depot with the depot's window
  const auto inst = test::make_instance({10, 40, 10, 30}, {10, 10, 10, 30}, {0, 300, 0, 0}, {200, 400, 200, 200},
                                        {0, 50, 40, 100}, 200);
  EvalCache cache(inst, 1);
  const auto active = reduce_dimension(cache, 1000, 0.1);
  CHECK(std::find(active.begin(), active.end(), 1) == active.end());
  CHECK(std::find(active.begin(), active.end(), 2) != active.end());
  CHECK(cache.simulator_calls() == 3000);
}

TEST_CASE("feasibility classifier") {
  SUBCASE("rank features") {
    CHECK(rank_features(std::vector<int>{3, 1}, 5) == std::vector<int>{2, 5, 1, 5});
  }
  SUBCASE("single class") {
    std::vector<std::vector<int>> x{{1, 2, 5}, {2, 1, 5}, {5, 1, 2}};
    const auto c = FeasibilityClassifier::fit(x, {0, 0, 0});
    for (const auto& r : x) CHECK(c.predict(r) <= 0.5);
  }
  SUBCASE("separable data") {
    // infeasible exactly when node 4 comes before node 2
    Rng rng(6);
    constexpr int n = 9;
    std::vector<std::vector<int>> x;
    std::vector<int> y;
    for (int k = 0; k < 600; ++k) {
      auto g = random_genome(std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8}, 2, rng);
      const auto f = rank_features(route_of(g), n);
      x.push_back(f);
      y.push_back(f[3] < f[1] ? 1 : 0);
    }
    const auto c = FeasibilityClassifier::fit(x, y);
    int right = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double p = c.predict(x[i]);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      right += (p > 0.5) == (y[i] == 1) ? 1 : 0;
    }
    CHECK(right >= 0.95 * static_cast<double>(x.size()));
  }
  SUBCASE("trained from a cache") {
    const auto inst = generate_instance({.n = 10, .window = 60}, 2);
    EvalCache cache(inst, 4);
    Rng rng(1);
    std::vector<int> all{1, 2, 3, 4, 5, 6, 7, 8, 9};
    for (int k = 0; k < 200; ++k) cache.estimate(route_of(random_genome(all, 2, rng)), 20);
    const auto c = train_classifier(cache);
    REQUIRE(c.trained());
    for (const auto& e : cache.entries()) {
      const double p = c.predict_route(e.route);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
}

TEST_CASE("edit distance") {
  SUBCASE("examples") {
    CHECK(levenshtein_active(test::ids({1, 2, 3, 1, 4}), test::ids({1, 2, 3, 1, 4})) == 0);
    CHECK(levenshtein_active(test::ids({1, 2, 3, 1, 4}), test::ids({1, 3, 2, 1, 4})) == 2);
    CHECK(levenshtein_active(test::ids({1, 1, 2, 3, 4}), test::ids({1, 4, 1, 2, 3})) == 1);
  }
  SUBCASE("matches the recursive definition and is a metric") {
    Rng rng(12);
    const auto pick = [&] {
      std::vector<int> v;
      const auto len = rng.below(6);
      for (std::size_t k = 0; k < len; ++k) v.push_back(1 + static_cast<int>(rng.below(5)));
      return v;
    };
    for (int k = 0; k < 400; ++k) {
      const auto a = pick(), b = pick(), c = pick();
      CHECK(levenshtein(a, b) == oracle::edit_distance(a, b));
      CHECK(levenshtein(a, b) == levenshtein(b, a));
      CHECK(levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c));
      CHECK((levenshtein(a, b) == 0) == (a == b));
    }
  }
}

TEST_CASE("Kriging surrogate") {
  SUBCASE("kernel") {
    for (double theta : {0.01, 0.5, 3.0}) {
      CHECK(edit_kernel(theta, 0) == 1.0);
      for (int d = 1; d < 10; ++d) {
        CHECK(edit_kernel(theta, d) > 0.0);
        CHECK(edit_kernel(theta, d) <= 1.0);
      }
    }
  }
  SUBCASE("interpolates its training data") {
    Rng rng(4);
    std::vector<Route> x;
    std::vector<double> y;
    std::set<Route> seen;
    while (x.size() < 40) {
      auto r = route_of(random_genome(std::vector<int>{1, 2, 3, 4, 5, 6, 7}, 2, rng));
      if (!seen.insert(r).second) continue;
      y.push_back(static_cast<double>(r.size()) - 0.3 * r.front());
      x.push_back(std::move(r));
    }
    const auto s = SurrogateEnsemble::fit(x, y, {.cluster_cap = 200, .max_points = 600, .gp = {}});
    REQUIRE(s.members().size() == 1);
    const double nugget = s.members()[0].nugget();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto p = s.predict(x[i]);
      CHECK(std::abs(p.mean - y[i]) <= 0.05 + 10 * nugget);
      CHECK(p.variance > 0.0);
    }
  }
  SUBCASE("clusters partition the points under the cap") {
    Rng rng(9);
    std::vector<Route> x;
    for (int k = 0; k < 130; ++k) x.push_back(route_of(random_genome(std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8}, 1, rng)));
    const auto groups = medoid_clusters(x, 25);
    std::vector<int> hits(x.size(), 0);
    for (const auto& g : groups) {
      CHECK(g.size() <= 25);
      for (auto i : g) ++hits[i];
    }
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK(groups.size() == 6);
  }
  SUBCASE("ensemble weights follow predictive variance") {
    std::vector<Route> x{{1}, {1, 2}, {2, 3}, {4, 5, 6}, {5, 6}, {6}};
    std::vector<double> y{1, 2, 3, 4, 5, 6};
    const auto s = SurrogateEnsemble::fit(x, y, {.cluster_cap = 3, .max_points = 600, .gp = {}});
    REQUIRE(s.members().size() == 2);
    const Route q{1, 2, 3};
    double wsum = 0, mean = 0;
    for (const auto& m : s.members()) {
      const auto p = m.predict(q);
      wsum += 1 / p.variance;
      mean += p.mean / p.variance;
    }
    CHECK(s.predict(q).mean == doctest::Approx(mean / wsum));
  }
}

TEST_CASE("evolutionary solver") {
  SUBCASE("small instances reach the exhaustive optimum") {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto inst = generate_instance({.n = 5 + static_cast<int>(s), .window = 60}, 40 + s);
      const auto r = solve(inst, quick_config(), 100 + s);
      const auto best = brute_force_best_tour(inst, 10000, 5);
      CHECK(evaluate_monte_carlo(inst, r.tour, 10000, 5).mean() >= best.mean() - 0.05);
    }
  }
  SUBCASE("simulator calls stay under the schedule bound") {
    const auto inst = generate_instance({.n = 12, .window = 60}, 3);
    const auto cfg = quick_config();
    const auto r = solve(inst, cfg, 9);
    CHECK(r.simulator_calls <= simulator_call_bound(cfg, inst.n));
    validate_tour(inst, r.tour);
  }
  SUBCASE("best mean never drops within a phase") {
    const auto inst = generate_instance({.n = 12, .window = 60}, 5);
    const auto r = solve(inst, quick_config(), 4);
    REQUIRE(!r.log.empty());
    for (std::size_t k = 1; k < r.log.size(); ++k) {
      if (r.log[k].phase == r.log[k - 1].phase) CHECK(r.log[k].best_mean >= r.log[k - 1].best_mean);
    }
  }
  SUBCASE("threads do not change the result") {
    const auto inst = generate_instance({.n = 10, .window = 60}, 8);
    const auto a = solve(inst, quick_config(), 1, 0, 1);
    const auto b = solve(inst, quick_config(), 1, 0, 8);
    CHECK(a.tour == b.tour);
    CHECK(a.mean == b.mean);
    CHECK(a.simulator_calls == b.simulator_calls);
  }
  SUBCASE("nothing reachable gives the immediate return") {
    auto inst = test::make_instance({0, 80, 20}, {0, 0, 0}, {0, 0, 0}, {500, 500, 500}, {0, 100, 50}, 100);
    inst.tw_low[1] = 150;
    inst.tw_low[2] = 150;
    const auto r = solve(inst, quick_config(), 2);
    CHECK(r.active.empty());
    CHECK(r.tour == test::ids({1, 1, 2, 3}));
    CHECK(r.mean == 0.0);
  }
  SUBCASE("random search respects its budget") {
    const auto inst = generate_instance({.n = 15, .window = 60}, 6);
    const auto r = random_search(inst, {.simulator_budget = 400000, .fidelity = 100, .final_top = 10, .final_fidelity = 1000}, 3);
    CHECK(r.simulator_calls <= 400000);
    validate_tour(inst, r.tour);
  }
}
