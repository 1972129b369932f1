#pragma once

#include <string>
#include <vector>

namespace acee::scm {

// Directed acyclic graph over named nodes, each observed or hidden.
class Dag {
 public:
  int add_node(std::string label, bool hidden = false);
  void add_edge(int parent, int child);
  void add_edge(const std::string& parent, const std::string& child);

  int node_count() const { return static_cast<int>(labels_.size()); }
  const std::string& label(int v) const { return labels_.at(v); }
  bool hidden(int v) const { return hidden_.at(v); }
  int index_of(const std::string& label) const;  // -1 when absent

  const std::vector<int>& parents(int v) const { return parents_.at(v); }
  const std::vector<int>& children(int v) const { return children_.at(v); }
  bool has_edge(int parent, int child) const;
  std::vector<std::pair<int, int>> edges() const;

  bool is_acyclic() const;
  // Throws when the graph is cyclic.
  std::vector<int> topological_order() const;

  std::vector<char> descendants(int v) const;  // strict, indexed by node
  bool reachable(int from, int to) const;      // directed path, from != to

  std::vector<int> observed_nodes() const;
  std::vector<int> hidden_nodes() const;

 private:
  std::vector<std::string> labels_;
  std::vector<char> hidden_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
};

// True iff cond blocks every path between a and b (the two blocking rules:
// an arrow-emitting node on the path is in cond, or a collider is outside
// cond with no descendant in cond). Sets must be disjoint.
bool d_separated(const Dag& dag, const std::vector<int>& a, const std::vector<int>& b,
                 const std::vector<int>& cond);

// Back-door admissibility of s for the ordered pair (k, j): no element of s
// descends from k, and s blocks every back-door path from k to j.
bool is_admissible(const Dag& dag, int k, int j, const std::vector<int>& s);

// Projection onto a DAG where every hidden node is a source: observed edges
// for completely hidden directed paths (direct edges included), plus one new
// hidden source per maximal observed set of size >= 2 sharing a hidden
// common cause.
Dag canonical_exogenous_dag(const Dag& dag);

}  // namespace acee::scm
