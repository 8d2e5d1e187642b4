#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "agf/automaton.hpp"
#include "agf/error.hpp"

namespace agf {
namespace {

struct Node {
  std::int64_t total = 0;
  std::int64_t final = 0;
  std::map<std::string, int> child;
  std::map<std::string, std::int64_t> count;
  std::string in_symbol;
  int parent = -1;
  bool alive = true;
};

class RedBlue {
 public:
  RedBlue(const Automaton& tree, const LearnParams& p) : p_(p), bound_(std::sqrt(0.5 * std::log(2.0 / p.merge_alpha))) {
    nodes_.resize(tree.states().size());
    for (const auto& s : tree.states()) {
      nodes_[s.id].total = s.total;
      nodes_[s.id].final = s.final;
    }
    for (const auto& t : tree.transitions()) {
      nodes_[t.from].child[t.symbol] = t.to;
      nodes_[t.from].count[t.symbol] = t.count;
      nodes_[t.to].in_symbol = t.symbol;
      nodes_[t.to].parent = t.from;
    }
    root_ = tree.root();
  }

  void run() {
    std::set<int> red{root_};
    while (true) {
      std::set<int> blue;
      for (int r : red)
        for (const auto& [sym, c] : nodes_[r].child)
          if (!red.count(c)) blue.insert(c);
      int pick = -1;
      for (int b : blue) {
        if (nodes_[b].total < p_.state_count) continue;
        if (pick < 0 || nodes_[b].total > nodes_[pick].total) pick = b;
      }
      if (pick < 0) break;
      bool merged = false;
      for (int r : red) {
        if (r == root_ || nodes_[r].in_symbol != nodes_[pick].in_symbol) continue;
        if (!compatible(r, pick)) continue;
        merge(r, pick);
        merged = true;
        break;
      }
      if (!merged) red.insert(pick);
    }
  }

  Automaton result(Direction direction) const {
    std::vector<State> states;
    std::vector<Transition> transitions;
    std::set<int> seen{root_};
    std::vector<int> stack{root_};
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      const auto& n = nodes_[i];
      states.push_back({i, n.total, n.total - n.final, n.final, n.total < p_.sink_count});
      for (const auto& [sym, c] : n.child) {
        transitions.push_back({i, c, sym, n.count.at(sym), 0.0});
        if (seen.insert(c).second) stack.push_back(c);
      }
    }
    return canonicalize(Automaton(direction, root_, std::move(states), std::move(transitions), p_.sink_count));
  }

 private:
  bool differ(std::int64_t f1, std::int64_t n1, std::int64_t f2, std::int64_t n2) const {
    const double a = static_cast<double>(n1), b = static_cast<double>(n2);
    return std::abs(static_cast<double>(f1) / a - static_cast<double>(f2) / b) >
           bound_ * (1.0 / std::sqrt(a) + 1.0 / std::sqrt(b));
  }

  bool compatible(int r, int b) const {
    const auto& x = nodes_[r];
    const auto& y = nodes_[b];
    if (x.total < p_.sink_count || y.total < p_.sink_count) return true;
    if (differ(x.final, x.total, y.final, y.total)) return false;
    std::set<std::string> symbols;
    for (const auto& [s, c] : x.count) symbols.insert(s);
    for (const auto& [s, c] : y.count) symbols.insert(s);
    std::int64_t pool_x = 0, pool_y = 0;
    for (const auto& s : symbols) {
      const auto cx = x.count.count(s) ? x.count.at(s) : 0;
      const auto cy = y.count.count(s) ? y.count.at(s) : 0;
      if (cx < p_.symbol_count && cy < p_.symbol_count) {
        pool_x += cx;
        pool_y += cy;
      } else if (differ(cx, x.total, cy, y.total)) {
        return false;
      }
    }
    if (differ(pool_x, x.total, pool_y, y.total)) return false;
    for (const auto& [s, cy] : y.child) {
      const auto it = x.child.find(s);
      if (it != x.child.end() && !compatible(it->second, cy)) return false;
    }
    return true;
  }

  void merge(int r, int b) {
    auto& parent = nodes_[nodes_[b].parent];
    parent.child[nodes_[b].in_symbol] = r;
    fold(r, b);
  }

  void fold(int r, int b) {
    // b is the root of an unmerged tree, so recursion terminates.
    auto& x = nodes_[r];
    auto& y = nodes_[b];
    x.total += y.total;
    x.final += y.final;
    y.alive = false;
    for (const auto& [s, cy] : y.child) {
      const auto n = y.count.at(s);
      auto it = x.child.find(s);
      if (it == x.child.end()) {
        x.child[s] = cy;
        x.count[s] = n;
        nodes_[cy].parent = r;
      } else {
        x.count[s] += n;
        fold(it->second, cy);
      }
    }
  }

  LearnParams p_;
  double bound_;
  std::vector<Node> nodes_;
  int root_ = 0;
};

}  // namespace

Automaton learn(std::span<const std::vector<std::string>> sequences, Direction direction,
                const LearnParams& params) {
  params.validate();
  if (sequences.empty()) throw Error("cannot learn a model from zero traces");
  // Canonical numbering first so the result does not depend on input order.
  const auto tree = canonicalize(build_prefix_tree(sequences, direction, params.sink_count));
  RedBlue rb(tree, params);
  rb.run();
  return rb.result(direction);
}

}  // namespace agf
