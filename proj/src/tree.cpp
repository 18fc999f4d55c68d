#include "bdt/tree.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bdt {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

DecisionTree DecisionTree::single_terminal(const Dataset& ds) {
  DecisionTree t;
  t.nodes_.resize(1);
  Node& nd = t.nodes_[0];
  nd.kind = NodeKind::terminal;
  nd.class_counts.assign(ds.class_count(), 0);
  nd.rows.resize(ds.n());
  for (int i = 0; i < ds.n(); ++i) {
    nd.rows[i] = i;
    ++nd.class_counts[ds.label(i) - 1];
  }
  nd.total = ds.n();
  t.reset_bounds(nd, ds.m());
  for (int i = 0; i < ds.n(); ++i) t.grow_bounds(nd, ds.row(i));
  t.root_ = 0;
  t.terminal_count_ = 1;
  t.assignment_.assign(ds.n(), 0);
  return t;
}

void DecisionTree::reset_bounds(Node& nd, int m) const {
  nd.fmin.assign(m, std::numeric_limits<double>::infinity());
  nd.fmax.assign(m, -std::numeric_limits<double>::infinity());
}

void DecisionTree::grow_bounds(Node& nd, std::span<const double> x) const {
  for (std::size_t j = 0; j < x.size(); ++j) {
    nd.fmin[j] = std::min(nd.fmin[j], x[j]);
    nd.fmax[j] = std::max(nd.fmax[j], x[j]);
  }
}

int DecisionTree::descend_from(int id, std::span<const double> x) const {
  int cur = id;
  while (nodes_[cur].kind == NodeKind::splitting) {
    const Node& nd = nodes_[cur];
    cur = (x[nd.var] <= nd.rule) ? nd.left : nd.right;
    if (cur < 0) throw std::runtime_error("malformed tree: missing child");
  }
  return cur;
}

int DecisionTree::route(std::span<const double> x) const { return descend_from(root_, x); }

int DecisionTree::route_row(const Dataset& ds, int row) const {
  return descend_from(root_, ds.row(row));
}

std::vector<int> DecisionTree::terminal_ids() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
    if (nodes_[i].alive && nodes_[i].kind == NodeKind::terminal) out.push_back(i);
  return out;
}

std::vector<int> DecisionTree::splitting_ids() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i)
    if (nodes_[i].alive && nodes_[i].kind == NodeKind::splitting) out.push_back(i);
  return out;
}

std::vector<int> DecisionTree::prunable_ids() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    const Node& nd = nodes_[i];
    if (nd.alive && nd.kind == NodeKind::splitting &&
        nodes_[nd.left].kind == NodeKind::terminal &&
        nodes_[nd.right].kind == NodeKind::terminal)
      out.push_back(i);
  }
  return out;
}

int DecisionTree::depth(int id) const {
  int d = 0;
  for (int cur = id; nodes_[cur].parent >= 0; cur = nodes_[cur].parent) ++d;
  return d;
}

TreeStats DecisionTree::stats() const {
  TreeStats st;
  st.terminal_count = terminal_count_;
  st.prunable_count = static_cast<int>(prunable_ids().size());
  st.depth.assign(nodes_.size(), -1);
  // Depths in one preorder pass.
  std::vector<int> stack{root_};
  st.depth[root_] = 0;
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    const Node& nd = nodes_[id];
    if (nd.kind == NodeKind::splitting) {
      st.depth[nd.left] = st.depth[id] + 1;
      st.depth[nd.right] = st.depth[id] + 1;
      stack.push_back(nd.right);
      stack.push_back(nd.left);
    }
  }
  return st;
}

long long DecisionTree::min_partition_count() const {
  long long best = std::numeric_limits<long long>::max();
  for (int id : terminal_ids()) best = std::min(best, nodes_[id].total);
  return best;
}

std::vector<int> DecisionTree::deficient_terminals(long long p_min) const {
  std::vector<int> out;
  for (int id : terminal_ids())
    if (nodes_[id].total < p_min) out.push_back(id);
  return out;
}

int DecisionTree::new_node() {
  nodes_.emplace_back();
  return static_cast<int>(nodes_.size()) - 1;
}

void DecisionTree::split_terminal(const Dataset& ds, int id, int var, double rule) {
  if (id < 0 || id >= static_cast<int>(nodes_.size()) || !nodes_[id].alive ||
      nodes_[id].kind != NodeKind::terminal)
    throw std::runtime_error("split_terminal: target is not a live terminal");
  if (!live()) throw std::runtime_error("split_terminal: frozen tree");

  const int li = new_node();
  const int ri = new_node();
  Node& parent = nodes_[id];
  Node& l = nodes_[li];
  Node& r = nodes_[ri];
  l.kind = r.kind = NodeKind::terminal;
  l.parent = r.parent = id;
  l.class_counts.assign(ds.class_count(), 0);
  r.class_counts.assign(ds.class_count(), 0);
  reset_bounds(l, ds.m());
  reset_bounds(r, ds.m());
  for (int row : parent.rows) {
    Node& child = (ds.value(row, var) <= rule) ? l : r;
    child.rows.push_back(row);
    ++child.class_counts[ds.label(row) - 1];
    ++child.total;
    grow_bounds(child, ds.row(row));
    assignment_[row] = (&child == &l) ? li : ri;
  }
  parent.kind = NodeKind::splitting;
  parent.var = var;
  parent.rule = rule;
  parent.left = li;
  parent.right = ri;
  parent.rows.clear();
  parent.rows.shrink_to_fit();
  parent.class_counts.clear();
  parent.total = 0;
  ++terminal_count_;
}

void DecisionTree::prune_split(int id) {
  if (id < 0 || id >= static_cast<int>(nodes_.size()) || !nodes_[id].alive ||
      nodes_[id].kind != NodeKind::splitting)
    throw std::runtime_error("prune_split: target is not a live split");
  Node& nd = nodes_[id];
  Node& l = nodes_[nd.left];
  Node& r = nodes_[nd.right];
  if (l.kind != NodeKind::terminal || r.kind != NodeKind::terminal)
    throw std::runtime_error("prune_split: children are not both terminal");

  nd.kind = NodeKind::terminal;
  nd.class_counts.assign(l.class_counts.size(), 0);
  for (std::size_t c = 0; c < nd.class_counts.size(); ++c)
    nd.class_counts[c] = l.class_counts[c] + r.class_counts[c];
  nd.total = l.total + r.total;
  nd.rows.clear();
  nd.rows.reserve(l.rows.size() + r.rows.size());
  nd.rows.insert(nd.rows.end(), l.rows.begin(), l.rows.end());
  nd.rows.insert(nd.rows.end(), r.rows.begin(), r.rows.end());
  for (int row : nd.rows) assignment_[row] = id;
  l.alive = r.alive = false;
  nd.left = nd.right = -1;
  nd.var = -1;
  --terminal_count_;
}

void DecisionTree::collect_rows(int id, std::vector<int>& out) const {
  const Node& nd = nodes_[id];
  if (nd.kind == NodeKind::terminal) {
    out.insert(out.end(), nd.rows.begin(), nd.rows.end());
  } else {
    collect_rows(nd.left, out);
    collect_rows(nd.right, out);
  }
}

void DecisionTree::change_split(const Dataset& ds, int id, int var, double rule) {
  if (id < 0 || id >= static_cast<int>(nodes_.size()) || !nodes_[id].alive ||
      nodes_[id].kind != NodeKind::splitting)
    throw std::runtime_error("change_split: target is not a live split");
  if (!live()) throw std::runtime_error("change_split: frozen tree");

  std::vector<int> rows;
  collect_rows(id, rows);
  nodes_[id].var = var;
  nodes_[id].rule = rule;

  // Clear everything below the changed node, then reroute its data. The
  // changed node's own bounds are untouched: the same rows still reach it.
  std::vector<int> stack{nodes_[id].left, nodes_[id].right};
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    Node& nd = nodes_[cur];
    if (nd.kind == NodeKind::splitting) {
      stack.push_back(nd.left);
      stack.push_back(nd.right);
    } else {
      nd.rows.clear();
      std::fill(nd.class_counts.begin(), nd.class_counts.end(), 0);
      nd.total = 0;
    }
    reset_bounds(nd, ds.m());
  }
  for (int row : rows) {
    auto x = ds.row(row);
    int cur = id;
    while (nodes_[cur].kind == NodeKind::splitting) {
      Node& nd = nodes_[cur];
      cur = (x[nd.var] <= nd.rule) ? nd.left : nd.right;
      grow_bounds(nodes_[cur], x);
    }
    Node& leaf = nodes_[cur];
    leaf.rows.push_back(row);
    ++leaf.class_counts[ds.label(row) - 1];
    ++leaf.total;
    assignment_[row] = cur;
  }
}

void DecisionTree::remove_terminal(const Dataset& ds, int id) {
  if (id < 0 || id >= static_cast<int>(nodes_.size()) || !nodes_[id].alive ||
      nodes_[id].kind != NodeKind::terminal)
    throw std::runtime_error("remove_terminal: target is not a live terminal");
  const int pid = nodes_[id].parent;
  if (pid < 0) throw std::runtime_error("remove_terminal: cannot remove the root");

  Node& parent = nodes_[pid];
  const int sid = (parent.left == id) ? parent.right : parent.left;
  const std::vector<int> orphan_rows = nodes_[id].rows;

  // Promote the sibling into the parent's slot.
  const int gid = parent.parent;
  nodes_[sid].parent = gid;
  if (gid < 0) {
    root_ = sid;
  } else if (nodes_[gid].left == pid) {
    nodes_[gid].left = sid;
  } else {
    nodes_[gid].right = sid;
  }
  nodes_[pid].alive = false;
  nodes_[id].alive = false;
  --terminal_count_;

  // Reroute the removed terminal's rows through the promoted subtree,
  // extending bounds along each routing path.
  for (int row : orphan_rows) {
    auto x = ds.row(row);
    int cur = sid;
    grow_bounds(nodes_[cur], x);
    while (nodes_[cur].kind == NodeKind::splitting) {
      Node& nd = nodes_[cur];
      cur = (x[nd.var] <= nd.rule) ? nd.left : nd.right;
      grow_bounds(nodes_[cur], x);
    }
    Node& leaf = nodes_[cur];
    leaf.rows.push_back(row);
    ++leaf.class_counts[ds.label(row) - 1];
    ++leaf.total;
    assignment_[row] = cur;
  }
}

DecisionTree DecisionTree::clone_compact() const {
  DecisionTree out;
  out.terminal_count_ = terminal_count_;
  out.assignment_.assign(assignment_.size(), -1);
  out.nodes_.reserve(2 * terminal_count_ - 1);

  // Preorder copy with renumbering.
  struct Item {
    int src;
    int dst_parent;
    bool as_left;
  };
  std::vector<Item> stack{{root_, -1, false}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    const Node& src = nodes_[it.src];
    const int dst = static_cast<int>(out.nodes_.size());
    out.nodes_.push_back(src);
    Node& copy = out.nodes_.back();
    copy.parent = it.dst_parent;
    copy.left = copy.right = -1;
    if (it.dst_parent < 0) {
      out.root_ = dst;
    } else if (it.as_left) {
      out.nodes_[it.dst_parent].left = dst;
    } else {
      out.nodes_[it.dst_parent].right = dst;
    }
    if (src.kind == NodeKind::splitting) {
      // Right pushed first so the left subtree is emitted first.
      stack.push_back({src.right, dst, false});
      stack.push_back({src.left, dst, true});
    } else {
      for (int row : copy.rows) out.assignment_[row] = dst;
    }
  }
  return out;
}

void DecisionTree::serialize_node(int id, std::string& out) const {
  // Emitted ids are preorder positions, so two trees with the same shape,
  // rules and counts serialize to identical text regardless of their
  // internal numbering.
  struct Item {
    int src;
    int emitted_parent;
  };
  int next_id = 0;
  std::vector<Item> stack{{id, -1}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    const Node& nd = nodes_[it.src];
    const int emitted = next_id++;
    out += std::to_string(emitted);
    if (nd.kind == NodeKind::splitting) {
      out += " split parent=" + std::to_string(it.emitted_parent);
      out += " var=" + std::to_string(nd.var);
      out += " rule=" + format_double(nd.rule);
      out += "\n";
      stack.push_back({nd.right, emitted});
      stack.push_back({nd.left, emitted});
    } else {
      out += " leaf parent=" + std::to_string(it.emitted_parent);
      out += " counts=";
      for (std::size_t c = 0; c < nd.class_counts.size(); ++c) {
        if (c) out += ",";
        out += std::to_string(nd.class_counts[c]);
      }
      out += "\n";
    }
  }
}

std::string DecisionTree::serialize() const {
  std::string out;
  serialize_node(root_, out);
  return out;
}

DecisionTree DecisionTree::deserialize(const std::string& text) {
  DecisionTree t;
  std::istringstream in(text);
  std::string line;
  std::vector<int> id_map;  // file id -> node index
  auto map_id = [&](int file_id) -> int& {
    if (file_id >= static_cast<int>(id_map.size())) id_map.resize(file_id + 1, -1);
    return id_map[file_id];
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int file_id;
    std::string kind, parent_tok, rest;
    if (!(ls >> file_id >> kind >> parent_tok))
      throw std::runtime_error("bad tree record: " + line);
    if (parent_tok.rfind("parent=", 0) != 0)
      throw std::runtime_error("bad tree record: " + line);
    const int file_parent = std::stoi(parent_tok.substr(7));

    const int idx = static_cast<int>(t.nodes_.size());
    t.nodes_.emplace_back();
    map_id(file_id) = idx;
    Node& nd = t.nodes_[idx];
    if (file_parent < 0) {
      nd.parent = -1;
      t.root_ = idx;
    } else {
      if (file_parent >= static_cast<int>(id_map.size()) || id_map[file_parent] < 0)
        throw std::runtime_error("tree record references unknown parent");
      nd.parent = id_map[file_parent];
      Node& par = t.nodes_[nd.parent];
      if (par.kind != NodeKind::splitting)
        throw std::runtime_error("tree record parent is not a split");
      // Preorder: the left child arrives before the right one.
      (par.left < 0 ? par.left : par.right) = idx;
    }
    if (kind == "split") {
      std::string var_tok, rule_tok;
      if (!(ls >> var_tok >> rule_tok) || var_tok.rfind("var=", 0) != 0 ||
          rule_tok.rfind("rule=", 0) != 0)
        throw std::runtime_error("bad split record: " + line);
      nd.kind = NodeKind::splitting;
      nd.var = std::stoi(var_tok.substr(4));
      nd.rule = std::stod(rule_tok.substr(5));
    } else if (kind == "leaf") {
      std::string counts_tok;
      if (!(ls >> counts_tok) || counts_tok.rfind("counts=", 0) != 0)
        throw std::runtime_error("bad leaf record: " + line);
      nd.kind = NodeKind::terminal;
      std::istringstream cs(counts_tok.substr(7));
      std::string cell;
      while (std::getline(cs, cell, ',')) {
        nd.class_counts.push_back(std::stoll(cell));
        nd.total += nd.class_counts.back();
      }
      ++t.terminal_count_;
    } else {
      throw std::runtime_error("unknown node kind: " + kind);
    }
  }
  if (t.nodes_.empty()) throw std::runtime_error("empty tree text");
  for (const Node& nd : t.nodes_)
    if (nd.kind == NodeKind::splitting && (nd.left < 0 || nd.right < 0))
      throw std::runtime_error("split node missing a child");
  return t;
}

void DecisionTree::check_consistency(const Dataset& ds) const {
  if (!live()) throw std::runtime_error("check_consistency: frozen tree");
  if (static_cast<int>(assignment_.size()) != ds.n())
    throw std::runtime_error("assignment length mismatch");

  int terminals = 0, splits = 0;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    const Node& nd = nodes_[i];
    if (!nd.alive) continue;
    if (nd.kind == NodeKind::terminal) {
      ++terminals;
      long long total = 0;
      for (long long c : nd.class_counts) total += c;
      if (total != nd.total) throw std::runtime_error("terminal count total mismatch");
    } else {
      ++splits;
      if (nd.left < 0 || nd.right < 0) throw std::runtime_error("split missing child");
      if (nodes_[nd.left].parent != i || nodes_[nd.right].parent != i)
        throw std::runtime_error("child parent link mismatch");
      // Bound nesting.
      for (int child : {nd.left, nd.right}) {
        const Node& ch = nodes_[child];
        if (ch.total == 0 && ch.kind == NodeKind::terminal) continue;
        for (int j = 0; j < ds.m(); ++j) {
          if (ch.fmin[j] < nd.fmin[j] - 0.0 || ch.fmax[j] > nd.fmax[j] + 0.0)
            throw std::runtime_error("child bounds exceed parent bounds");
        }
      }
    }
  }
  if (terminals != terminal_count_) throw std::runtime_error("terminal count mismatch");
  if (splits != terminals - 1) throw std::runtime_error("split/terminal identity violated");

  // Recompute the partition from scratch by routing.
  std::vector<long long> seen_totals(nodes_.size(), 0);
  for (int i = 0; i < ds.n(); ++i) {
    const int leaf = route_row(ds, i);
    if (assignment_[i] != leaf) throw std::runtime_error("assignment mismatch at row");
    ++seen_totals[leaf];
  }
  for (int id : terminal_ids()) {
    if (seen_totals[id] != nodes_[id].total)
      throw std::runtime_error("routed totals disagree with stored totals");
    // The stored rows must route here too.
    for (int row : nodes_[id].rows)
      if (assignment_[row] != id) throw std::runtime_error("row list disagrees with assignment");
  }
}

}  // namespace bdt
