#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace otlab {

/// Primal network simplex for uncapacitated min-cost flow with a block-search
/// pivot rule and a strongly feasible spanning tree (thread/parent
/// representation with an artificial root). Arcs may be appended after a
/// run; the next run resumes from the current basis, which is what column
/// generation needs.
///
/// Potentials follow the convention reduced_cost(a) = cost(a) + pi(src) - pi(dst);
/// at optimality every arc has a nonnegative reduced cost and tree arcs have
/// reduced cost zero.
template <class Flow>
class NetworkSimplex {
 public:
  enum class Status { optimal, infeasible, unbounded, iteration_limit };

  /// `artificial_cost` must exceed the cost of any simple path in the full
  /// problem (including arcs appended later).
  NetworkSimplex(int nodes, double artificial_cost) : nodes_(nodes), art_cost_(artificial_cost) {
    supply_.assign(nodes, Flow(0));
  }

  void set_supply(int node, Flow s) { supply_[node] = s; }

  int add_arc(int from, int to, double cost) {
    src_.push_back(from);
    dst_.push_back(to);
    cost_.push_back(cost);
    flow_.push_back(Flow(0));
    state_.push_back(kLower);
    return static_cast<int>(src_.size()) - kArtificialBase() - 1;
  }

  int arc_count() const { return static_cast<int>(src_.size()) - kArtificialBase(); }
  int arc_source(int a) const { return src_[a + kArtificialBase()]; }
  int arc_target(int a) const { return dst_[a + kArtificialBase()]; }
  double arc_cost(int a) const { return cost_[a + kArtificialBase()]; }
  Flow flow(int a) const { return flow_[a + kArtificialBase()]; }
  double potential(int node) const { return pi_[node]; }
  double reduced_cost(int a) const {
    const int e = a + kArtificialBase();
    return cost_[e] + pi_[src_[e]] - pi_[dst_[e]];
  }
  long long pivots() const { return pivots_; }

  Status run(long long max_pivots = std::numeric_limits<long long>::max()) {
    if (!initialized_) {
      Flow sum = Flow(0);
      for (Flow f : supply_) sum += f;
      if (art_flow_significant(sum)) return Status::infeasible;
      initialize();
    }
    block_ = std::max<int>(kMinBlock, static_cast<int>(std::sqrt(static_cast<double>(src_.size()))));
    long long local = 0;
    while (find_entering()) {
      if (local++ >= max_pivots) return Status::iteration_limit;
      ++pivots_;
      if (!pivot()) return Status::unbounded;
    }
    return feasible() ? Status::optimal : Status::infeasible;
  }

  /// True when no artificial root arc carries flow.
  bool feasible() const {
    if (!initialized_) return false;
    for (int u = 0; u < nodes_; ++u)
      if (flow_[u] != Flow(0) && art_flow_significant(flow_[u])) return false;
    return true;
  }

 private:
  static constexpr int kTree = 0;
  static constexpr int kLower = 1;
  static constexpr int kMinBlock = 10;

  // The first `nodes_` arcs are the artificial root arcs, created lazily.
  int kArtificialBase() const { return initialized_ ? nodes_ : reserved_; }

  static Flow infinity() {
    if constexpr (std::numeric_limits<Flow>::has_infinity) return std::numeric_limits<Flow>::infinity();
    else return std::numeric_limits<Flow>::max();
  }

  bool art_flow_significant(Flow f) const {
    if constexpr (std::numeric_limits<Flow>::is_integer) return f != 0;
    else return std::abs(f) > 1e-9 * std::max<Flow>(Flow(1), total_supply_);
  }

  void initialize() {
    // Insert the artificial arcs in front of the user arcs.
    std::vector<int> s(nodes_), d(nodes_);
    std::vector<double> c(nodes_);
    src_.insert(src_.begin(), s.begin(), s.end());
    dst_.insert(dst_.begin(), d.begin(), d.end());
    cost_.insert(cost_.begin(), c.begin(), c.end());
    flow_.insert(flow_.begin(), nodes_, Flow(0));
    state_.insert(state_.begin(), nodes_, kTree);

    const int root = nodes_;
    parent_.assign(nodes_ + 1, -1);
    pred_.assign(nodes_ + 1, -1);
    thread_.assign(nodes_ + 1, 0);
    rev_thread_.assign(nodes_ + 1, 0);
    succ_num_.assign(nodes_ + 1, 1);
    last_succ_.assign(nodes_ + 1, 0);
    forward_.assign(nodes_ + 1, 0);
    pi_.assign(nodes_ + 1, 0.0);

    thread_[root] = 0;
    rev_thread_[0] = root;
    succ_num_[root] = nodes_ + 1;
    last_succ_[root] = root - 1;
    total_supply_ = Flow(0);
    for (int u = 0; u < nodes_; ++u) {
      parent_[u] = root;
      pred_[u] = u;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      last_succ_[u] = u;
      if (supply_[u] >= Flow(0)) {
        total_supply_ += supply_[u];
        forward_[u] = 1;
        src_[u] = u;
        dst_[u] = root;
        flow_[u] = supply_[u];
        cost_[u] = 0.0;
        pi_[u] = 0.0;
      } else {
        forward_[u] = 0;
        src_[u] = root;
        dst_[u] = u;
        flow_[u] = -supply_[u];
        cost_[u] = art_cost_;
        pi_[u] = art_cost_;
      }
    }
    initialized_ = true;
    next_arc_ = nodes_;
  }

  bool find_entering() {
    const int first = nodes_;
    const int total = static_cast<int>(src_.size());
    const int count = total - first;
    if (count <= 0) return false;
    if (next_arc_ < first || next_arc_ >= total) next_arc_ = first;
    double best = 0.0;
    int cnt = block_;
    int e = next_arc_;
    for (int i = 0; i < count; ++i, ++e) {
      if (e == total) e = first;
      if (state_[e] == kLower) {
        const double rc = cost_[e] + pi_[src_[e]] - pi_[dst_[e]];
        if (rc < best) {
          best = rc;
          in_arc_ = e;
        }
      }
      if (--cnt == 0) {
        if (best < -tolerance(in_arc_)) {
          next_arc_ = e + 1;
          return true;
        }
        cnt = block_;
      }
    }
    if (best < -tolerance(in_arc_)) {
      next_arc_ = e;
      return true;
    }
    return false;
  }

  double tolerance(int e) const {
    const double a = std::max({std::abs(pi_[src_[e]]), std::abs(pi_[dst_[e]]), std::abs(cost_[e]), 1.0});
    return 1e-13 * a;
  }

  bool pivot() {
    // Join node of the cycle closed by the entering arc.
    int u = src_[in_arc_], v = dst_[in_arc_];
    while (u != v) {
      if (succ_num_[u] < succ_num_[v]) u = parent_[u];
      else v = parent_[v];
    }
    join_ = u;

    // Leaving arc: the last blocking arc in cycle orientation keeps the
    // tree strongly feasible.
    const int first = src_[in_arc_], second = dst_[in_arc_];
    delta_ = infinity();
    int result = 0;
    for (int w = first; w != join_; w = parent_[w]) {
      const Flow d = forward_[w] ? flow_[pred_[w]] : infinity();
      if (d < delta_) {
        delta_ = d;
        u_out_ = w;
        result = 1;
      }
    }
    for (int w = second; w != join_; w = parent_[w]) {
      const Flow d = forward_[w] ? infinity() : flow_[pred_[w]];
      if (d <= delta_) {
        delta_ = d;
        u_out_ = w;
        result = 2;
      }
    }
    if (result == 0 || delta_ == infinity()) return false;
    if (result == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }

    if (delta_ > Flow(0)) {
      flow_[in_arc_] += delta_;
      for (int w = src_[in_arc_]; w != join_; w = parent_[w]) flow_[pred_[w]] += forward_[w] ? -delta_ : delta_;
      for (int w = dst_[in_arc_]; w != join_; w = parent_[w]) flow_[pred_[w]] += forward_[w] ? delta_ : -delta_;
    }
    state_[in_arc_] = kTree;
    state_[pred_[u_out_]] = kLower;
    update_tree();
    update_potential();
    return true;
  }

  void update_tree() {
    int u = last_succ_[u_in_];
    const int old_rev_thread = rev_thread_[u_out_];
    const int old_succ_num = succ_num_[u_out_];
    const int old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];

    int right = thread_[u];
    int last = (old_rev_thread == v_in_) ? thread_[last_succ_[u_out_]] : thread_[v_in_];

    // Re-hang the stem nodes between u_in and u_out.
    int stem = u_in_, par_stem = v_in_;
    thread_[v_in_] = stem;
    dirty_.clear();
    dirty_.push_back(v_in_);
    while (stem != u_out_) {
      const int new_stem = parent_[stem];
      thread_[u] = new_stem;
      dirty_.push_back(u);

      const int w = rev_thread_[stem];
      thread_[w] = right;
      rev_thread_[right] = w;

      parent_[stem] = par_stem;
      par_stem = stem;
      stem = new_stem;

      u = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
      right = thread_[u];
    }
    parent_[u_out_] = par_stem;
    thread_[u] = last;
    rev_thread_[last] = u;
    last_succ_[u_out_] = u;

    if (old_rev_thread != v_in_) {
      thread_[old_rev_thread] = right;
      rev_thread_[right] = old_rev_thread;
    }
    for (int d : dirty_) rev_thread_[thread_[d]] = d;

    int tmp_sc = 0;
    const int tmp_ls = last_succ_[u_out_];
    for (u = u_out_; u != u_in_;) {
      const int w = parent_[u];
      pred_[u] = pred_[w];
      forward_[u] = !forward_[w];
      tmp_sc += succ_num_[u] - succ_num_[w];
      succ_num_[u] = tmp_sc;
      last_succ_[w] = tmp_ls;
      u = w;
    }
    pred_[u_in_] = in_arc_;
    forward_[u_in_] = (u_in_ == src_[in_arc_]);
    succ_num_[u_in_] = old_succ_num;

    int up_limit_in = -1, up_limit_out = -1;
    if (last_succ_[join_] == v_in_) up_limit_out = join_;
    else up_limit_in = join_;

    for (u = v_in_; u != up_limit_in && last_succ_[u] == v_in_; u = parent_[u]) last_succ_[u] = last_succ_[u_out_];
    const int replacement =
        (join_ != old_rev_thread && v_in_ != old_rev_thread) ? old_rev_thread : last_succ_[u_out_];
    for (u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) last_succ_[u] = replacement;

    for (u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potential() {
    const int e = pred_[u_in_];
    const double sigma = forward_[u_in_] ? pi_[v_in_] - pi_[u_in_] - cost_[e] : pi_[v_in_] - pi_[u_in_] + cost_[e];
    const int end = thread_[last_succ_[u_in_]];
    for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  int nodes_;
  double art_cost_;
  bool initialized_ = false;
  int reserved_ = 0;
  std::vector<Flow> supply_;
  Flow total_supply_ = Flow(0);

  std::vector<int> src_, dst_;
  std::vector<double> cost_;
  std::vector<Flow> flow_;
  std::vector<signed char> state_;

  std::vector<int> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_, dirty_;
  std::vector<char> forward_;
  std::vector<double> pi_;

  int next_arc_ = 0, block_ = kMinBlock;
  int in_arc_ = 0, join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0, v_out_ = 0;
  Flow delta_ = Flow(0);
  long long pivots_ = 0;
};

}  // namespace otlab
