#ifndef BDT_TREE_HPP
#define BDT_TREE_HPP

#include <span>
#include <string>
#include <vector>

#include "bdt/dataset.hpp"

namespace bdt {

enum class NodeKind { splitting, terminal };

struct Node {
  NodeKind kind = NodeKind::terminal;
  int parent = -1;
  int left = -1;
  int right = -1;
  int var = -1;       // splitting nodes
  double rule = 0.0;  // splitting nodes: x[var] <= rule goes left
  std::vector<long long> class_counts;  // terminal nodes
  long long total = 0;                  // terminal nodes, sum of class_counts
  std::vector<int> rows;                // terminal nodes of live trees
  std::vector<double> fmin, fmax;       // per-feature bounds of data at node
  bool alive = true;
};

struct TreeStats {
  int terminal_count = 0;           // k
  int prunable_count = 0;           // splits with two terminal children
  std::vector<int> depth;           // by node id, -1 for dead slots; root = 0
};

/// Indexed binary decision tree over a fixed training dataset. Live trees
/// carry the row partition at every terminal; trees read back from disk are
/// frozen (counts and rules only) and support routing but not mutation.
class DecisionTree {
 public:
  DecisionTree() = default;

  static DecisionTree single_terminal(const Dataset& ds);

  int root() const { return root_; }
  int terminal_count() const { return terminal_count_; }
  int node_count() const { return 2 * terminal_count_ - 1; }
  const Node& node(int id) const { return nodes_[id]; }
  bool live() const { return !assignment_.empty(); }

  /// Descends from the root: left iff x[var] <= rule. Returns terminal id.
  int route(std::span<const double> x) const;
  int route_row(const Dataset& ds, int row) const;

  std::vector<int> terminal_ids() const;
  std::vector<int> splitting_ids() const;
  std::vector<int> prunable_ids() const;
  int depth(int id) const;
  TreeStats stats() const;
  long long min_partition_count() const;
  std::vector<int> deficient_terminals(long long p_min) const;
  const std::vector<int>& assignment() const { return assignment_; }

  /// Turns a terminal into a split with two fresh terminal children and
  /// partitions its rows. Either child may end up empty.
  void split_terminal(const Dataset& ds, int id, int var, double rule);

  /// Merges a split whose two children are both terminal back into one
  /// terminal. Exact inverse of split_terminal on counts and topology.
  void prune_split(int id);

  /// Reassigns a split's variable and rule and reroutes every datum in its
  /// subtree; descendant counts and bounds are rebuilt.
  void change_split(const Dataset& ds, int id, int var, double rule);

  /// Deletes one terminal: its parent split is replaced by the sibling
  /// subtree and the terminal's rows are rerouted through it.
  void remove_terminal(const Dataset& ds, int id);

  /// Compacted copy with nodes renumbered in preorder.
  DecisionTree clone_compact() const;

  /// Line-delimited text, one node per line in preorder.
  std::string serialize() const;
  static DecisionTree deserialize(const std::string& text);

  /// Recomputes the partition from scratch by routing and cross-checks
  /// assignment, counts, totals and bound nesting. Throws on any mismatch.
  void check_consistency(const Dataset& ds) const;

 private:
  int new_node();
  void reset_bounds(Node& nd, int m) const;
  void grow_bounds(Node& nd, std::span<const double> x) const;
  int descend_from(int id, std::span<const double> x) const;
  void collect_rows(int id, std::vector<int>& out) const;
  void serialize_node(int id, std::string& out) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  int terminal_count_ = 0;
  std::vector<int> assignment_;  // datum -> terminal id (live trees)
};

}  // namespace bdt

#endif  // BDT_TREE_HPP
