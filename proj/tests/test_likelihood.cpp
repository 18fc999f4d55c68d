#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>
#include <vector>

#include "bdt/dataset.hpp"
#include "bdt/likelihood.hpp"
#include "bdt/tree.hpp"

namespace {

// Composite-Simpson integration of the class-1 leaf probability against the
// Beta prior: an oracle for the two-class marginal that never touches the
// closed form under test.
double simpson_marginal(long long m1, long long m2, double a1, double a2) {
  const double norm = std::tgamma(a1 + a2) / (std::tgamma(a1) * std::tgamma(a2));
  auto f = [&](double p) {
    if (p == 0.0) return (m1 + a1 - 1.0) > 0.0 ? 0.0 : (a1 == 1.0 && m1 == 0 ? norm : 0.0);
    if (p == 1.0) return (m2 + a2 - 1.0) > 0.0 ? 0.0 : (a2 == 1.0 && m2 == 0 ? norm : 0.0);
    return norm * std::pow(p, m1 + a1 - 1.0) * std::pow(1.0 - p, m2 + a2 - 1.0);
  };
  const int n = 1 << 20;
  const double h = 1.0 / n;
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

bdt::Dataset tiny_dataset(const std::vector<int>& labels) {
  std::vector<double> feats;
  for (std::size_t i = 0; i < labels.size(); ++i) feats.push_back(static_cast<double>(i));
  return bdt::Dataset(std::move(feats), static_cast<int>(labels.size()), 1,
                      labels, {"1", "2"});
}

}  // namespace

TEST_CASE("terminal marginal matches hand values") {
  const bdt::DirichletPrior prior = bdt::DirichletPrior::symmetric(2, 1.0);
  const long long c21[2] = {2, 1};
  CHECK(bdt::terminal_log_marginal(std::span<const long long>(c21, 2), prior) ==
        doctest::Approx(std::log(1.0 / 12.0)).epsilon(1e-12));
  const long long c00[2] = {0, 0};
  CHECK(bdt::terminal_log_marginal(std::span<const long long>(c00, 2), prior) ==
        doctest::Approx(0.0).epsilon(1e-15));

  const bdt::DirichletPrior prior3 = bdt::DirichletPrior::symmetric(3, 1.0);
  const long long c123[3] = {1, 2, 3};
  CHECK(bdt::terminal_log_marginal(std::span<const long long>(c123, 3), prior3) ==
        doctest::Approx(std::log(1.0 / 1680.0)).epsilon(1e-12));
}

TEST_CASE("terminal marginal matches the quadrature oracle") {
  struct Case {
    long long m1, m2;
    double a1, a2;
  };
  const Case cases[] = {{4, 2, 1.0, 1.0}, {5, 1, 1.0, 1.0}, {3, 3, 1.0, 1.0},
                        {6, 0, 1.0, 1.0}, {4, 2, 2.5, 0.7}, {2, 2, 0.5, 0.5}};
  for (const Case& c : cases) {
    bdt::DirichletPrior prior;
    prior.alpha = {c.a1, c.a2};
    const long long counts[2] = {c.m1, c.m2};
    const double got = bdt::terminal_log_marginal(std::span<const long long>(counts, 2), prior);
    const double oracle = std::log(simpson_marginal(c.m1, c.m2, c.a1, c.a2));
    CHECK(std::abs(got - oracle) < 1e-10);
  }
}

TEST_CASE("tree marginal is additive over terminals") {
  const bdt::Dataset ds = tiny_dataset({1, 1, 2, 2, 1, 2});
  const bdt::DirichletPrior prior = bdt::DirichletPrior::symmetric(2, 1.0);
  bdt::DecisionTree t = bdt::DecisionTree::single_terminal(ds);
  t.split_terminal(ds, t.root(), 0, 2.5);
  double sum = 0.0;
  for (int id : t.terminal_ids())
    sum += bdt::terminal_log_marginal(t.node(id).class_counts, prior);
  CHECK(bdt::log_marginal_likelihood(t, prior) == doctest::Approx(sum).epsilon(1e-14));
}

TEST_CASE("pooling pure data is favored, separating mixed data is favored") {
  std::mt19937_64 rng(4);
  for (double a : {0.5, 1.0, 2.0}) {
    const bdt::DirichletPrior prior = bdt::DirichletPrior::symmetric(2, a);
    for (int rep = 0; rep < 200; ++rep) {
      // Splitting a single-class terminal never raises the marginal; it is
      // exactly neutral when one side stays empty.
      const long long m = 1 + static_cast<long long>(rng() % 400);
      const long long split = static_cast<long long>(rng() % (m + 1));
      const long long whole[2] = {m, 0};
      const long long left[2] = {split, 0};
      const long long right[2] = {m - split, 0};
      const double before =
          bdt::terminal_log_marginal(std::span<const long long>(whole, 2), prior);
      const double after =
          bdt::terminal_log_marginal(std::span<const long long>(left, 2), prior) +
          bdt::terminal_log_marginal(std::span<const long long>(right, 2), prior);
      CHECK(after <= before + 1e-12);
      if (split == 0 || split == m) CHECK(after == doctest::Approx(before).epsilon(1e-12));

      // Splitting a two-class terminal into its pure halves never lowers it.
      const long long n2 = 1 + static_cast<long long>(rng() % 400);
      const long long mixed[2] = {m, n2};
      const long long pure1[2] = {m, 0};
      const long long pure2[2] = {0, n2};
      const double pooled =
          bdt::terminal_log_marginal(std::span<const long long>(mixed, 2), prior);
      const double separated =
          bdt::terminal_log_marginal(std::span<const long long>(pure1, 2), prior) +
          bdt::terminal_log_marginal(std::span<const long long>(pure2, 2), prior);
      CHECK(separated >= pooled - 1e-12);
    }
  }
}

TEST_CASE("log_catalan matches direct binomial evaluation") {
  CHECK(bdt::log_catalan(1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(bdt::log_catalan(3) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  CHECK(bdt::log_catalan(25) ==
        doctest::Approx(std::log(4861946401452.0)).epsilon(1e-12));

  for (int k = 1; k <= 50; ++k) {
    // log C(2k, k) as a plain product, no gamma functions involved.
    double oracle = 0.0;
    for (int i = 1; i <= k; ++i)
      oracle += std::log(static_cast<double>(k + i)) - std::log(static_cast<double>(i));
    oracle -= std::log(static_cast<double>(k + 1));
    const double got = bdt::log_catalan(k);
    CHECK(std::abs(got - oracle) <= 1e-9 * std::max(1.0, std::abs(oracle)));
  }
  CHECK_THROWS_AS(bdt::log_catalan(0), std::invalid_argument);
}

TEST_CASE("log_catalan satisfies the Catalan recurrence up to k=1000") {
  for (int k = 1; k <= 1000; ++k) {
    const double lhs = bdt::log_catalan(k + 1);
    const double rhs = bdt::log_catalan(k) + std::log(2.0 * (2.0 * k + 1.0) / (k + 2.0));
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("terminal class posterior") {
  const bdt::DirichletPrior prior = bdt::DirichletPrior::symmetric(2, 1.0);
  const long long zero[2] = {0, 0};
  CHECK(bdt::terminal_class_posterior(std::span<const long long>(zero, 2), prior) ==
        std::vector<double>{0.5, 0.5});
  const long long c31[2] = {3, 1};
  const auto p31 = bdt::terminal_class_posterior(std::span<const long long>(c31, 2), prior);
  CHECK(p31[0] == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
  CHECK(p31[1] == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
  const long long c100[2] = {100, 0};
  const auto p100 = bdt::terminal_class_posterior(std::span<const long long>(c100, 2), prior);
  CHECK(p100[0] == doctest::Approx(101.0 / 102.0).epsilon(1e-15));
  CHECK(p100[1] == doctest::Approx(1.0 / 102.0).epsilon(1e-15));

  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 100; ++rep) {
    const int c = 2 + static_cast<int>(rng() % 5);
    bdt::DirichletPrior pr;
    std::vector<long long> counts(c);
    for (int j = 0; j < c; ++j) {
      pr.alpha.push_back(0.1 + (rng() % 1000) / 250.0);
      counts[j] = static_cast<long long>(rng() % 1000000);
    }
    const auto phi = bdt::terminal_class_posterior(counts, pr);
    double sum = 0.0;
    for (double v : phi) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("tree prior: base case and split ratio") {
  const bdt::Dataset ds = bdt::generate_xor3(100, 13);
  bdt::DecisionTree t = bdt::DecisionTree::single_terminal(ds);
  CHECK(bdt::log_tree_prior(t, ds) ==
        doctest::Approx(-std::log(99.0)).epsilon(1e-12));

  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const double before = bdt::log_tree_prior(t, ds);
    const int k = t.terminal_count();
    const auto terms = t.terminal_ids();
    const int target = terms[rng() % terms.size()];
    const int var = static_cast<int>(rng() % 3);
    std::uniform_real_distribution<double> rd(ds.meta(var).root_min(),
                                              ds.meta(var).root_max());
    t.split_terminal(ds, target, var, rd(rng));
    const double after = bdt::log_tree_prior(t, ds);
    const double expect = before -
                          std::log(static_cast<double>(ds.meta(var).rule_count())) -
                          std::log(3.0) + std::log((k + 1.0) / k) +
                          bdt::log_catalan(k) - bdt::log_catalan(k + 1);
    CHECK(after == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("tree prior depends only on size and the (var, rule) multiset") {
  const bdt::Dataset ds = bdt::generate_xor3(80, 3);
  // Chain leaning right vs chain leaning left with the same two splits.
  bdt::DecisionTree a = bdt::DecisionTree::single_terminal(ds);
  a.split_terminal(ds, a.root(), 0, 0.1);
  a.split_terminal(ds, a.node(a.root()).right, 1, -0.2);
  bdt::DecisionTree b = bdt::DecisionTree::single_terminal(ds);
  b.split_terminal(ds, b.root(), 1, -0.2);
  b.split_terminal(ds, b.node(b.root()).left, 0, 0.1);
  CHECK(bdt::log_tree_prior(a, ds) ==
        doctest::Approx(bdt::log_tree_prior(b, ds)).epsilon(1e-12));
}

TEST_CASE("dirichlet prior validation") {
  CHECK_THROWS_AS(bdt::DirichletPrior::symmetric(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bdt::DirichletPrior::symmetric(2, -1.0), std::invalid_argument);
  bdt::DirichletPrior empty;
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
}
