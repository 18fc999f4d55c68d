#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "bdt/dataset.hpp"
#include "bdt/likelihood.hpp"
#include "bdt/proposals.hpp"

namespace {

bdt::MoveConfig benchmark_moves() {
  bdt::MoveConfig cfg;
  cfg.p_birth = 0.1;
  cfg.p_death = 0.1;
  cfg.p_change_split = 0.1;
  cfg.p_change_rule = 0.7;
  return cfg;
}

// Random tree grown by valid splits; every terminal keeps at least one row.
bdt::DecisionTree grow_random(const bdt::Dataset& ds, int splits, std::mt19937_64& rng) {
  bdt::DecisionTree t = bdt::DecisionTree::single_terminal(ds);
  int done = 0;
  int guard = 0;
  while (done < splits && ++guard < 1000) {
    const auto terms = t.terminal_ids();
    const int target = terms[rng() % terms.size()];
    if (t.node(target).total < 2) continue;
    const int var = static_cast<int>(rng() % ds.m());
    const auto& nd = t.node(target);
    if (nd.fmax[var] <= nd.fmin[var]) continue;
    std::uniform_real_distribution<double> rd(nd.fmin[var], nd.fmax[var]);
    const double rule = rd(rng);
    t.split_terminal(ds, target, var, rule);
    const auto& parent = t.node(target);
    if (t.node(parent.left).total == 0 || t.node(parent.right).total == 0) {
      t.prune_split(target);
      continue;
    }
    ++done;
  }
  return t;
}

}  // namespace

TEST_CASE("move config validation") {
  bdt::MoveConfig bad = benchmark_moves();
  bad.p_change_rule = 0.6;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = benchmark_moves();
  bad.p_birth = -0.1;
  bad.p_change_rule = 0.9;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = benchmark_moves();
  bad.p_min = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_NOTHROW(benchmark_moves().validate());
}

TEST_CASE("move kind draw follows the configured mix") {
  const bdt::MoveConfig cfg = benchmark_moves();
  std::mt19937_64 rng(1);
  long counts[4] = {0, 0, 0, 0};
  const long n = 1000000;
  for (long i = 0; i < n; ++i) ++counts[static_cast<int>(bdt::draw_move_kind(cfg, rng))];
  CHECK(std::abs(counts[0] / double(n) - 0.1) < 0.005);
  CHECK(std::abs(counts[1] / double(n) - 0.1) < 0.005);
  CHECK(std::abs(counts[2] / double(n) - 0.1) < 0.005);
  CHECK(std::abs(counts[3] / double(n) - 0.7) < 0.005);
}

TEST_CASE("zero-mass kinds are never drawn") {
  bdt::MoveConfig cfg;
  cfg.p_birth = 0.2;
  cfg.p_death = 0.2;
  cfg.p_change_split = 0.0;
  cfg.p_change_rule = 0.6;
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100000; ++i)
    CHECK(bdt::draw_move_kind(cfg, rng) != bdt::MoveKind::change_split);
}

TEST_CASE("guarded draw never yields death on a stump") {
  const bdt::MoveConfig cfg = benchmark_moves();
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100000; ++i)
    CHECK(bdt::draw_move_kind(cfg, rng, 1) != bdt::MoveKind::death);
}

TEST_CASE("birth and death ratios on the smallest trees") {
  const bdt::Dataset ds = bdt::generate_xor3(50, 1);
  const bdt::MoveConfig cfg = benchmark_moves();  // p_birth == p_death
  const bdt::ChipmanPrior off;

  // Stump: one split candidate, the grown tree has one prunable node. The
  // pair ratio is exactly 1 both ways.
  bdt::DecisionTree stump = bdt::DecisionTree::single_terminal(ds);
  CHECK(std::exp(bdt::birth_log_ratio(stump, stump.root(), cfg, off)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  bdt::DecisionTree pair = stump;
  pair.split_terminal(ds, pair.root(), 0, 0.0);
  CHECK(std::exp(bdt::death_log_ratio(pair, pair.root(), cfg, off)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // Splitting a two-terminal tree into a chain: (k+1)/D_Q1 * S_2/S_3 = 3 * 2/5.
  const int leaf = pair.node(pair.root()).right;
  CHECK(std::exp(bdt::birth_log_ratio(pair, leaf, cfg, off)) ==
        doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("birth/death log ratios are exactly antisymmetric") {
  const bdt::Dataset ds = bdt::generate_xor3(150, 9);
  const bdt::MoveConfig cfg = benchmark_moves();
  bdt::ChipmanPrior chip;
  chip.gamma = 0.95;
  chip.delta = 2.0;

  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10000; ++rep) {
    bdt::DecisionTree t = grow_random(ds, static_cast<int>(rng() % 7), rng);
    const auto terms = t.terminal_ids();
    const int target = terms[rng() % terms.size()];
    chip.enabled = (rep % 2 == 1);

    const double birth = bdt::birth_log_ratio(t, target, cfg, chip);
    bdt::DecisionTree grown = t;
    grown.split_terminal(ds, target, 0, 0.0);
    const double death = bdt::death_log_ratio(grown, target, cfg, chip);
    CHECK(std::abs(birth + death) < 1e-10);
  }
}

TEST_CASE("birth ratio agrees with the structural prior route") {
  const bdt::Dataset ds = bdt::generate_xor3(150, 29);
  const bdt::MoveConfig cfg = benchmark_moves();
  const bdt::ChipmanPrior off;
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 300; ++rep) {
    bdt::DecisionTree t = grow_random(ds, static_cast<int>(rng() % 6), rng);
    const auto terms = t.terminal_ids();
    const int target = terms[rng() % terms.size()];
    const int var = static_cast<int>(rng() % ds.m());
    const double rule = ds.meta(var).observed_values[rng() % ds.meta(var).rule_count()];

    const double direct = bdt::birth_log_ratio(t, target, cfg, off);

    bdt::DecisionTree grown = t;
    grown.split_terminal(ds, target, var, rule);
    const double prior_delta = bdt::log_tree_prior(grown, ds) - bdt::log_tree_prior(t, ds);
    const double forward = std::log(cfg.p_birth) -
                           std::log(static_cast<double>(t.terminal_count())) -
                           std::log(static_cast<double>(ds.m())) -
                           std::log(static_cast<double>(ds.meta(var).rule_count()));
    const double backward = std::log(cfg.p_death) -
                            std::log(static_cast<double>(grown.prunable_ids().size()));
    CHECK(std::abs(direct - (prior_delta + backward - forward)) < 1e-10);
  }
}

TEST_CASE("proposal generation never mutates the tree") {
  const bdt::Dataset ds = bdt::generate_xor3(120, 19);
  std::mt19937_64 rng(7);
  bdt::DecisionTree t = grow_random(ds, 4, rng);
  const std::string before = t.serialize();
  const bdt::MoveConfig cfg = benchmark_moves();
  const bdt::ChipmanPrior off;
  for (int i = 0; i < 100000; ++i) {
    switch (i % 4) {
      case 0: bdt::propose_birth(t, ds, cfg, off, rng); break;
      case 1: bdt::propose_death(t, cfg, off, rng); break;
      case 2: bdt::propose_change_split(t, ds, cfg, rng); break;
      case 3: bdt::propose_change_rule(t, ds, cfg, rng); break;
    }
  }
  CHECK(t.serialize() == before);
}

TEST_CASE("change-split draws from the complement of the current variable") {
  std::mt19937_64 rng(23);

  // m = 2: the other variable is forced.
  std::vector<double> f2 = {0, 0, 1, 1, 2, 0, 3, 1, 4, 0, 5, 1};
  bdt::Dataset two(std::move(f2), 6, 2, {1, 2, 1, 2, 1, 2}, {"1", "2"});
  bdt::DecisionTree t2 = bdt::DecisionTree::single_terminal(two);
  t2.split_terminal(two, t2.root(), 1, 0.5);
  const bdt::MoveConfig cfg = benchmark_moves();
  for (int i = 0; i < 200; ++i)
    CHECK(bdt::propose_change_split(t2, two, cfg, rng).var == 0);

  // m = 3: the two alternatives are symmetric.
  const bdt::Dataset ds = bdt::generate_xor3(100, 3);
  bdt::DecisionTree t3 = bdt::DecisionTree::single_terminal(ds);
  t3.split_terminal(ds, t3.root(), 1, 0.0);
  long var0 = 0, var2 = 0;
  const long n = 100000;
  for (long i = 0; i < n; ++i) {
    const int v = bdt::propose_change_split(t3, ds, cfg, rng).var;
    CHECK(v != 1);
    (v == 0 ? var0 : var2) += 1;
  }
  CHECK(std::abs(var0 / double(n) - 0.5) < 0.01);
  CHECK(std::abs(var2 / double(n) - 0.5) < 0.01);

  // m = 1: move unavailable.
  const bdt::Dataset one = [] {
    std::vector<double> f = {0, 1, 2, 3, 4, 5};
    return bdt::Dataset(std::move(f), 6, 1, {1, 2, 1, 2, 1, 2}, {"1", "2"});
  }();
  bdt::DecisionTree t1 = bdt::DecisionTree::single_terminal(one);
  t1.split_terminal(one, t1.root(), 0, 2.5);
  CHECK_THROWS_AS(bdt::propose_change_split(t1, one, cfg, rng), std::runtime_error);
}

TEST_CASE("change-rule proposals center on the current rule") {
  const bdt::Dataset ds = bdt::generate_xor3(100, 3);
  bdt::DecisionTree t = bdt::DecisionTree::single_terminal(ds);
  t.split_terminal(ds, t.root(), 0, 0.1);

  bdt::MoveConfig cfg = benchmark_moves();
  cfg.rule_mode = bdt::RuleProposalMode::continuous_root_range;
  cfg.sigma_fraction = 0.1;
  const double sigma = 0.1 * (ds.meta(0).root_max() - ds.meta(0).root_min());

  std::mt19937_64 rng(11);
  const long n = 100000;
  double mean = 0.0;
  for (long i = 0; i < n; ++i) mean += bdt::propose_change_rule(t, ds, cfg, rng).rule;
  mean /= n;
  CHECK(std::abs(mean - 0.1) < 3.0 * sigma / std::sqrt(double(n)));

  cfg.rule_mode = bdt::RuleProposalMode::discrete_observed;
  for (int i = 0; i < 1000; ++i) {
    const double rule = bdt::propose_change_rule(t, ds, cfg, rng).rule;
    const auto& vals = ds.meta(0).observed_values;
    CHECK(std::binary_search(vals.begin(), vals.end(), rule));
  }
}

TEST_CASE("chipman split probability") {
  bdt::ChipmanPrior p;
  p.enabled = true;

  p.gamma = 0.5;
  p.delta = 0.0;
  CHECK(bdt::chipman_split_probability(0, p) == doctest::Approx(0.5));
  CHECK(bdt::chipman_split_probability(9, p) == doctest::Approx(0.5));

  p.gamma = 1.0;
  p.delta = 1.0;
  CHECK(bdt::chipman_split_probability(1, p) == doctest::Approx(0.5));

  p.gamma = 1.0;
  p.delta = 2.0;
  CHECK(bdt::chipman_split_probability(3, p) == doctest::Approx(1.0 / 16.0));

  CHECK_THROWS_AS(bdt::chipman_split_probability(-1, p), std::invalid_argument);
}

TEST_CASE("splitting range fraction behaves like a nested prior") {
  // Feature 1 is constant everywhere: its root range is zero.
  std::vector<double> f = {0, 0, 1, 0, 2, 0, 3, 0, 4, 0, 4, 0};
  bdt::Dataset ds(std::move(f), 6, 2, {1, 1, 2, 2, 1, 2}, {"1", "2"});
  bdt::DecisionTree t = bdt::DecisionTree::single_terminal(ds);
  CHECK(bdt::splitting_prior_ps(t, t.root(), 0, ds) == doctest::Approx(1.0));

  // Left child covers x1 in [0, 2]: half of the root range [0, 4].
  t.split_terminal(ds, t.root(), 0, 2.0);
  const int left = t.node(t.root()).left;
  CHECK(bdt::splitting_prior_ps(t, left, 0, ds) == doctest::Approx(0.5));

  // Feature 1 is constant: zero root range.
  CHECK_THROWS_AS(bdt::splitting_prior_ps(t, t.root(), 1, ds), std::runtime_error);
}

TEST_CASE("range fraction never increases toward the leaves") {
  const bdt::Dataset ds = bdt::generate_xor3(200, 13);
  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 50; ++rep) {
    bdt::DecisionTree t = grow_random(ds, 5, rng);
    for (int id : t.terminal_ids()) {
      for (int var = 0; var < ds.m(); ++var) {
        double prev = bdt::splitting_prior_ps(t, t.root(), var, ds);
        CHECK(prev <= 1.0);
        // Walk root -> leaf and check monotonicity at each step.
        std::vector<int> path;
        for (int cur = id; cur >= 0; cur = t.node(cur).parent) path.push_back(cur);
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
          const double here = bdt::splitting_prior_ps(t, *it, var, ds);
          CHECK(here <= prev + 1e-12);
          prev = here;
        }
      }
    }
  }
}
