#include "acee/scm/dag.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace acee::scm {

int Dag::add_node(std::string label, bool hidden) {
  if (index_of(label) >= 0) throw std::invalid_argument("Dag: duplicate node label " + label);
  labels_.push_back(std::move(label));
  hidden_.push_back(hidden ? 1 : 0);
  parents_.emplace_back();
  children_.emplace_back();
  return node_count() - 1;
}

void Dag::add_edge(int parent, int child) {
  if (parent < 0 || parent >= node_count() || child < 0 || child >= node_count())
    throw std::out_of_range("Dag::add_edge: node index out of range");
  if (parent == child) throw std::invalid_argument("Dag::add_edge: self-loop");
  if (has_edge(parent, child)) return;
  parents_[child].push_back(parent);
  children_[parent].push_back(child);
}

void Dag::add_edge(const std::string& parent, const std::string& child) {
  const int p = index_of(parent);
  const int c = index_of(child);
  if (p < 0 || c < 0) throw std::invalid_argument("Dag::add_edge: unknown label");
  add_edge(p, c);
}

int Dag::index_of(const std::string& label) const {
  for (int v = 0; v < node_count(); ++v)
    if (labels_[v] == label) return v;
  return -1;
}

bool Dag::has_edge(int parent, int child) const {
  const auto& ps = parents_.at(child);
  return std::find(ps.begin(), ps.end(), parent) != ps.end();
}

std::vector<std::pair<int, int>> Dag::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int c = 0; c < node_count(); ++c)
    for (int p : parents_[c]) out.emplace_back(p, c);
  return out;
}

std::vector<int> Dag::topological_order() const {
  std::vector<int> indeg(node_count(), 0);
  for (int v = 0; v < node_count(); ++v) indeg[v] = static_cast<int>(parents_[v].size());
  std::deque<int> ready;
  for (int v = 0; v < node_count(); ++v)
    if (indeg[v] == 0) ready.push_back(v);
  std::vector<int> order;
  order.reserve(node_count());
  while (!ready.empty()) {
    const int v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (int c : children_[v])
      if (--indeg[c] == 0) ready.push_back(c);
  }
  if (static_cast<int>(order.size()) != node_count())
    throw std::runtime_error("Dag: graph contains a cycle");
  return order;
}

bool Dag::is_acyclic() const {
  try {
    topological_order();
  } catch (const std::runtime_error&) {
    return false;
  }
  return true;
}

std::vector<char> Dag::descendants(int v) const {
  std::vector<char> seen(node_count(), 0);
  std::deque<int> frontier{v};
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop_front();
    for (int c : children_[u])
      if (!seen[c]) {
        seen[c] = 1;
        frontier.push_back(c);
      }
  }
  return seen;
}

bool Dag::reachable(int from, int to) const { return descendants(from)[to] != 0; }

std::vector<int> Dag::observed_nodes() const {
  std::vector<int> out;
  for (int v = 0; v < node_count(); ++v)
    if (!hidden_[v]) out.push_back(v);
  return out;
}

std::vector<int> Dag::hidden_nodes() const {
  std::vector<int> out;
  for (int v = 0; v < node_count(); ++v)
    if (hidden_[v]) out.push_back(v);
  return out;
}

namespace {

std::vector<char> as_mask(const Dag& dag, const std::vector<int>& nodes) {
  std::vector<char> mask(dag.node_count(), 0);
  for (int v : nodes) {
    if (v < 0 || v >= dag.node_count()) throw std::out_of_range("node index out of range");
    mask[v] = 1;
  }
  return mask;
}

}  // namespace

bool d_separated(const Dag& dag, const std::vector<int>& a, const std::vector<int>& b,
                 const std::vector<int>& cond) {
  const std::vector<char> in_a = as_mask(dag, a);
  const std::vector<char> in_b = as_mask(dag, b);
  const std::vector<char> in_c = as_mask(dag, cond);
  for (int v = 0; v < dag.node_count(); ++v)
    if ((in_a[v] && (in_b[v] || in_c[v])) || (in_b[v] && in_c[v]))
      throw std::invalid_argument("d_separated: sets must be disjoint");

  // ancestors of cond (inclusive), used for collider activation
  std::vector<char> anc(dag.node_count(), 0);
  {
    std::deque<int> frontier;
    for (int v : cond) {
      anc[v] = 1;
      frontier.push_back(v);
    }
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop_front();
      for (int p : dag.parents(u))
        if (!anc[p]) {
          anc[p] = 1;
          frontier.push_back(p);
        }
    }
  }

  // reachability over (node, direction) states; direction up = entered from a
  // child, down = entered from a parent
  enum { kUp = 0, kDown = 1 };
  std::vector<char> visited(2 * dag.node_count(), 0);
  std::deque<std::pair<int, int>> frontier;
  for (int v : a) frontier.emplace_back(v, kUp);

  while (!frontier.empty()) {
    auto [v, dir] = frontier.front();
    frontier.pop_front();
    if (visited[2 * v + dir]) continue;
    visited[2 * v + dir] = 1;
    if (in_b[v]) return false;  // active trail reached b

    if (dir == kUp) {
      if (!in_c[v]) {
        for (int p : dag.parents(v)) frontier.emplace_back(p, kUp);
        for (int c : dag.children(v)) frontier.emplace_back(c, kDown);
      }
    } else {
      if (!in_c[v])
        for (int c : dag.children(v)) frontier.emplace_back(c, kDown);
      if (anc[v])  // collider with a descendant (or itself) in cond
        for (int p : dag.parents(v)) frontier.emplace_back(p, kUp);
    }
  }
  return true;
}

bool is_admissible(const Dag& dag, int k, int j, const std::vector<int>& s) {
  if (k == j) throw std::invalid_argument("is_admissible: k equals j");
  if (k < 0 || k >= dag.node_count() || j < 0 || j >= dag.node_count())
    throw std::out_of_range("is_admissible: node index out of range");
  for (int v : s)
    if (v == j) throw std::invalid_argument("is_admissible: s contains the target node");

  const std::vector<char> desc = dag.descendants(k);
  for (int v : s)
    if (v == k || desc[v]) return false;

  // with k's outgoing edges removed, every remaining k--j path is a back-door
  // path; blocking them all is d-separation in that graph. Removing out(k)
  // only deletes descendant relations through k, which cannot matter for
  // collider activation once s holds no descendant of k.
  Dag cut;
  for (int v = 0; v < dag.node_count(); ++v) cut.add_node(dag.label(v), dag.hidden(v));
  for (auto [p, c] : dag.edges())
    if (p != k) cut.add_edge(p, c);
  return d_separated(cut, {k}, {j}, s);
}

Dag canonical_exogenous_dag(const Dag& dag) {
  if (!dag.is_acyclic()) throw std::invalid_argument("canonical_exogenous_dag: cyclic input");

  const std::vector<int> observed = dag.observed_nodes();
  Dag out;
  std::vector<int> new_id(dag.node_count(), -1);
  for (int v : observed) new_id[v] = out.add_node(dag.label(v), false);

  // hidden-reach[v] = observed nodes reachable from v through hidden-only
  // intermediates, computed bottom-up in reverse topological order
  const std::vector<int> order = dag.topological_order();
  std::vector<std::set<int>> hidden_reach(dag.node_count());
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int v = *it;
    for (int c : dag.children(v)) {
      if (!dag.hidden(c))
        hidden_reach[v].insert(c);
      else
        hidden_reach[v].insert(hidden_reach[c].begin(), hidden_reach[c].end());
    }
  }

  // completely hidden paths between observed nodes (m = 0 intermediates, a
  // direct edge, included)
  for (int v : observed)
    for (int t : hidden_reach[v]) out.add_edge(new_id[v], new_id[t]);

  // maximal observed sets sharing a hidden common cause: per hidden node, the
  // observed set it reaches through hidden-only paths; keep distinct maximal
  // sets of size >= 2 (a hidden cause of a single node folds into its noise)
  std::vector<std::set<int>> cause_sets;
  for (int h : dag.hidden_nodes())
    if (hidden_reach[h].size() >= 2) cause_sets.push_back(hidden_reach[h]);
  std::sort(cause_sets.begin(), cause_sets.end());
  cause_sets.erase(std::unique(cause_sets.begin(), cause_sets.end()), cause_sets.end());
  std::vector<std::set<int>> maximal;
  for (const auto& c : cause_sets) {
    bool strictly_contained = false;
    for (const auto& other : cause_sets)
      if (c != other && std::includes(other.begin(), other.end(), c.begin(), c.end())) {
        strictly_contained = true;
        break;
      }
    if (!strictly_contained) maximal.push_back(c);
  }

  int next = 1;
  for (const auto& c : maximal) {
    std::string name;
    do {
      name = "H" + std::to_string(next++);
    } while (out.index_of(name) >= 0 || dag.index_of(name) >= 0);
    const int h = out.add_node(name, true);
    for (int t : c) out.add_edge(h, new_id[t]);
  }
  return out;
}

}  // namespace acee::scm
