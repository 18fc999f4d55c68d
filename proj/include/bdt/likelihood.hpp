#ifndef BDT_LIKELIHOOD_HPP
#define BDT_LIKELIHOOD_HPP

#include <span>
#include <vector>

#include "bdt/dataset.hpp"
#include "bdt/tree.hpp"

namespace bdt {

struct DirichletPrior {
  std::vector<double> alpha;  // all entries > 0

  static DirichletPrior symmetric(int classes, double value = 1.0);
  double sum() const;
  void validate() const;
};

/// log of the Catalan number C(2k, k) / (k + 1), the number of binary tree
/// shapes with k terminals. Computed through lgamma.
double log_catalan(int k);

/// Marginal log likelihood contribution of a single terminal with the given
/// class counts, leaf probabilities integrated out under the Dirichlet prior.
double terminal_log_marginal(std::span<const long long> counts,
                             const DirichletPrior& prior);

/// Sum of terminal_log_marginal over all terminals of the tree.
double log_marginal_likelihood(const DecisionTree& tree,
                               const DirichletPrior& prior);

/// Posterior mean class probabilities of a terminal:
/// (m_j + alpha_j) / (n + sum alpha).
std::vector<double> terminal_class_posterior(std::span<const long long> counts,
                                             const DirichletPrior& prior);

/// Structural log prior of a tree: each split contributes a uniform draw
/// over features and over that feature's candidate rules; tree shapes of a
/// given size are weighted through the Catalan count, and the terminal count
/// is uniform up to n - 1.
double log_tree_prior(const DecisionTree& tree, const Dataset& ds);

}  // namespace bdt

#endif  // BDT_LIKELIHOOD_HPP
