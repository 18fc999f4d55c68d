#include "bdt/likelihood.hpp"

#include <cmath>
#include <stdexcept>

namespace bdt {

DirichletPrior DirichletPrior::symmetric(int classes, double value) {
  DirichletPrior p;
  p.alpha.assign(classes, value);
  p.validate();
  return p;
}

double DirichletPrior::sum() const {
  double s = 0.0;
  for (double a : alpha) s += a;
  return s;
}

void DirichletPrior::validate() const {
  if (alpha.empty()) throw std::invalid_argument("Dirichlet prior needs at least one class");
  for (double a : alpha)
    if (!(a > 0.0)) throw std::invalid_argument("Dirichlet alpha entries must be positive");
}

double log_catalan(int k) {
  if (k < 1) throw std::invalid_argument("log_catalan: k must be >= 1");
  return std::lgamma(2.0 * k + 1.0) - 2.0 * std::lgamma(k + 1.0) - std::log(k + 1.0);
}

double terminal_log_marginal(std::span<const long long> counts,
                             const DirichletPrior& prior) {
  const double a_sum = prior.sum();
  double value = std::lgamma(a_sum);
  long long total = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    value -= std::lgamma(prior.alpha[j]);
    value += std::lgamma(static_cast<double>(counts[j]) + prior.alpha[j]);
    total += counts[j];
  }
  value -= std::lgamma(static_cast<double>(total) + a_sum);
  return value;
}

double log_marginal_likelihood(const DecisionTree& tree, const DirichletPrior& prior) {
  double value = 0.0;
  for (int id : tree.terminal_ids())
    value += terminal_log_marginal(tree.node(id).class_counts, prior);
  return value;
}

std::vector<double> terminal_class_posterior(std::span<const long long> counts,
                                             const DirichletPrior& prior) {
  prior.validate();
  const double a_sum = prior.sum();
  long long total = 0;
  for (long long c : counts) total += c;
  std::vector<double> phi(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j)
    phi[j] = (static_cast<double>(counts[j]) + prior.alpha[j]) /
             (static_cast<double>(total) + a_sum);
  return phi;
}

double log_tree_prior(const DecisionTree& tree, const Dataset& ds) {
  const int k = tree.terminal_count();
  const int max_terminals = ds.n() - 1;
  double value = std::log(static_cast<double>(k)) - log_catalan(k) -
                 std::log(static_cast<double>(max_terminals));
  for (int id : tree.splitting_ids()) {
    const Node& nd = tree.node(id);
    value -= std::log(static_cast<double>(ds.meta(nd.var).rule_count()));
    value -= std::log(static_cast<double>(ds.m()));
  }
  return value;
}

}  // namespace bdt
