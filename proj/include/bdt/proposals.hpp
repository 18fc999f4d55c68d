#ifndef BDT_PROPOSALS_HPP
#define BDT_PROPOSALS_HPP

#include <random>
#include <string>

#include "bdt/dataset.hpp"
#include "bdt/tree.hpp"

namespace bdt {

enum class MoveKind { birth, death, change_split, change_rule };

std::string to_string(MoveKind kind);

enum class RuleProposalMode {
  discrete_observed,     // uniform over the feature's observed values
  continuous_root_range  // uniform over the feature's full training range
};

struct MoveConfig {
  double p_birth = 0.1;
  double p_death = 0.1;
  double p_change_split = 0.1;
  double p_change_rule = 0.7;
  long long p_min = 5;           // minimum data points per partition
  double sigma_fraction = 0.1;   // change-rule step: sigma_j = fraction * root range
  RuleProposalMode rule_mode = RuleProposalMode::discrete_observed;

  void validate() const;  // probabilities >= 0 summing to 1, p_min >= 1
};

/// Depth-dependent split prior p_split(d) = gamma * (1 + d)^(-delta).
/// When enabled it multiplies the birth/death ratios.
struct ChipmanPrior {
  double gamma = 0.95;
  double delta = 2.0;
  bool enabled = false;
};

double chipman_split_probability(int depth, const ChipmanPrior& prior);

struct MoveProposal {
  MoveKind kind = MoveKind::birth;
  int target = -1;    // terminal (birth) or splitting node (death/change)
  int var = -1;       // birth/change
  double rule = 0.0;  // birth/change
  double log_ratio = 0.0;  // log of proposal x structural-prior ratio
};

/// Categorical draw over the four move kinds.
MoveKind draw_move_kind(const MoveConfig& cfg, std::mt19937_64& rng);
/// Same, but death is redrawn while the tree is a single terminal.
MoveKind draw_move_kind(const MoveConfig& cfg, std::mt19937_64& rng,
                        int terminal_count);

/// Combined proposal/prior log ratio of splitting `terminal`, sized so that
/// it is the exact negation of the matching death ratio on the grown tree.
double birth_log_ratio(const DecisionTree& tree, int terminal,
                       const MoveConfig& cfg, const ChipmanPrior& chipman);
double death_log_ratio(const DecisionTree& tree, int node,
                       const MoveConfig& cfg, const ChipmanPrior& chipman);
/// Same death ratio from explicit state, for death-style transitions whose
/// source tree is no longer at hand (sweeping conversions).
double death_log_ratio(int terminal_count, int prunable_count, int node_depth,
                       const MoveConfig& cfg, const ChipmanPrior& chipman);

MoveProposal propose_birth(const DecisionTree& tree, const Dataset& ds,
                           const MoveConfig& cfg, const ChipmanPrior& chipman,
                           std::mt19937_64& rng);
MoveProposal propose_death(const DecisionTree& tree, const MoveConfig& cfg,
                           const ChipmanPrior& chipman, std::mt19937_64& rng);
MoveProposal propose_change_split(const DecisionTree& tree, const Dataset& ds,
                                  const MoveConfig& cfg, std::mt19937_64& rng);
MoveProposal propose_change_rule(const DecisionTree& tree, const Dataset& ds,
                                 const MoveConfig& cfg, std::mt19937_64& rng);

/// Fraction of a feature's training range still covered by the data at a
/// node; 1 at the root, shrinking toward the leaves. Reporting only.
double splitting_prior_ps(const DecisionTree& tree, int node, int var,
                          const Dataset& ds);

}  // namespace bdt

#endif  // BDT_PROPOSALS_HPP
