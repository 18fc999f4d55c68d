#include "bdt/proposals.hpp"

#include <cmath>
#include <stdexcept>

#include "bdt/likelihood.hpp"

namespace bdt {

std::string to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::birth: return "birth";
    case MoveKind::death: return "death";
    case MoveKind::change_split: return "change_split";
    case MoveKind::change_rule: return "change_rule";
  }
  return "?";
}

void MoveConfig::validate() const {
  const double probs[4] = {p_birth, p_death, p_change_split, p_change_rule};
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::invalid_argument("move probabilities must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("move probabilities must sum to 1");
  if (p_min < 1) throw std::invalid_argument("p_min must be >= 1");
  if (!(sigma_fraction > 0.0)) throw std::invalid_argument("sigma_fraction must be > 0");
}

double chipman_split_probability(int depth, const ChipmanPrior& prior) {
  if (depth < 0) throw std::invalid_argument("depth must be >= 0");
  const double p = prior.gamma * std::pow(1.0 + depth, -prior.delta);
  return std::min(p, 1.0);
}

namespace {

int pick(const std::vector<int>& ids, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> d(0, ids.size() - 1);
  return ids[d(rng)];
}

double draw_rule(const FeatureMeta& meta, RuleProposalMode mode, std::mt19937_64& rng) {
  if (mode == RuleProposalMode::discrete_observed) {
    std::uniform_int_distribution<std::size_t> d(0, meta.observed_values.size() - 1);
    return meta.observed_values[d(rng)];
  }
  std::uniform_real_distribution<double> d(meta.root_min(), meta.root_max());
  return d(rng);
}

// Prior-ratio contribution of replacing a depth-d terminal by a split with
// two depth-(d+1) terminals.
double chipman_birth_term(int depth, const ChipmanPrior& prior) {
  if (!prior.enabled) return 0.0;
  const double p_here = chipman_split_probability(depth, prior);
  const double p_child = chipman_split_probability(depth + 1, prior);
  return std::log(p_here) + 2.0 * std::log1p(-p_child) - std::log1p(-p_here);
}

}  // namespace

MoveKind draw_move_kind(const MoveConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  if (u < cfg.p_birth) return MoveKind::birth;
  if (u < cfg.p_birth + cfg.p_death) return MoveKind::death;
  if (u < cfg.p_birth + cfg.p_death + cfg.p_change_split) return MoveKind::change_split;
  return MoveKind::change_rule;
}

MoveKind draw_move_kind(const MoveConfig& cfg, std::mt19937_64& rng, int terminal_count) {
  for (;;) {
    const MoveKind kind = draw_move_kind(cfg, rng);
    if (kind == MoveKind::death && terminal_count == 1) continue;
    return kind;
  }
}

double birth_log_ratio(const DecisionTree& tree, int terminal,
                       const MoveConfig& cfg, const ChipmanPrior& chipman) {
  const int k = tree.terminal_count();
  int prunable_after = static_cast<int>(tree.prunable_ids().size()) + 1;
  const int parent = tree.node(terminal).parent;
  if (parent >= 0) {
    const Node& par = tree.node(parent);
    if (tree.node(par.left).kind == NodeKind::terminal &&
        tree.node(par.right).kind == NodeKind::terminal)
      --prunable_after;
  }
  double value = std::log(cfg.p_death) - std::log(cfg.p_birth) +
                 std::log(static_cast<double>(k + 1)) -
                 std::log(static_cast<double>(prunable_after)) +
                 log_catalan(k) - log_catalan(k + 1);
  value += chipman_birth_term(tree.depth(terminal), chipman);
  return value;
}

double death_log_ratio(int terminal_count, int prunable_count, int node_depth,
                       const MoveConfig& cfg, const ChipmanPrior& chipman) {
  double value = std::log(cfg.p_birth) - std::log(cfg.p_death) +
                 std::log(static_cast<double>(prunable_count)) -
                 std::log(static_cast<double>(terminal_count)) +
                 log_catalan(terminal_count) - log_catalan(terminal_count - 1);
  value -= chipman_birth_term(node_depth, chipman);
  return value;
}

double death_log_ratio(const DecisionTree& tree, int node,
                       const MoveConfig& cfg, const ChipmanPrior& chipman) {
  return death_log_ratio(tree.terminal_count(),
                         static_cast<int>(tree.prunable_ids().size()),
                         tree.depth(node), cfg, chipman);
}

MoveProposal propose_birth(const DecisionTree& tree, const Dataset& ds,
                           const MoveConfig& cfg, const ChipmanPrior& chipman,
                           std::mt19937_64& rng) {
  if (tree.terminal_count() >= ds.n() - 1)
    throw std::runtime_error("propose_birth: tree is at the terminal-count cap");
  MoveProposal mp;
  mp.kind = MoveKind::birth;
  mp.target = pick(tree.terminal_ids(), rng);
  std::uniform_int_distribution<int> var_d(0, ds.m() - 1);
  mp.var = var_d(rng);
  mp.rule = draw_rule(ds.meta(mp.var), cfg.rule_mode, rng);
  mp.log_ratio = birth_log_ratio(tree, mp.target, cfg, chipman);
  return mp;
}

MoveProposal propose_death(const DecisionTree& tree, const MoveConfig& cfg,
                           const ChipmanPrior& chipman, std::mt19937_64& rng) {
  if (tree.terminal_count() < 2)
    throw std::runtime_error("propose_death: single-terminal tree");
  MoveProposal mp;
  mp.kind = MoveKind::death;
  mp.target = pick(tree.prunable_ids(), rng);
  mp.log_ratio = death_log_ratio(tree, mp.target, cfg, chipman);
  return mp;
}

MoveProposal propose_change_split(const DecisionTree& tree, const Dataset& ds,
                                  const MoveConfig& cfg, std::mt19937_64& rng) {
  if (tree.terminal_count() < 2)
    throw std::runtime_error("propose_change_split: single-terminal tree");
  if (ds.m() < 2)
    throw std::runtime_error("propose_change_split: no alternative variable");
  MoveProposal mp;
  mp.kind = MoveKind::change_split;
  mp.target = pick(tree.splitting_ids(), rng);
  const int current = tree.node(mp.target).var;
  std::uniform_int_distribution<int> var_d(0, ds.m() - 2);
  int var = var_d(rng);
  if (var >= current) ++var;  // uniform over the complement of the current one
  mp.var = var;
  mp.rule = draw_rule(ds.meta(var), cfg.rule_mode, rng);
  mp.log_ratio = 0.0;  // symmetric kernel
  return mp;
}

MoveProposal propose_change_rule(const DecisionTree& tree, const Dataset& ds,
                                 const MoveConfig& cfg, std::mt19937_64& rng) {
  if (tree.terminal_count() < 2)
    throw std::runtime_error("propose_change_rule: single-terminal tree");
  MoveProposal mp;
  mp.kind = MoveKind::change_rule;
  mp.target = pick(tree.splitting_ids(), rng);
  mp.var = tree.node(mp.target).var;
  const FeatureMeta& meta = ds.meta(mp.var);
  if (cfg.rule_mode == RuleProposalMode::discrete_observed) {
    mp.rule = draw_rule(meta, cfg.rule_mode, rng);
  } else {
    const double sigma = cfg.sigma_fraction * (meta.root_max() - meta.root_min());
    std::normal_distribution<double> step(0.0, 1.0);
    mp.rule = tree.node(mp.target).rule + sigma * step(rng);
  }
  mp.log_ratio = 0.0;  // symmetric kernel
  return mp;
}

double splitting_prior_ps(const DecisionTree& tree, int node, int var,
                          const Dataset& ds) {
  const FeatureMeta& meta = ds.meta(var);
  const double root_range = meta.root_max() - meta.root_min();
  if (!(root_range > 0.0))
    throw std::runtime_error("splitting_prior_ps: zero root range");
  const Node& nd = tree.node(node);
  if (nd.fmax[var] < nd.fmin[var]) return 0.0;  // node holds no data
  const double ratio = (nd.fmax[var] - nd.fmin[var]) / root_range;
  return std::clamp(ratio, 0.0, 1.0);
}

}  // namespace bdt
