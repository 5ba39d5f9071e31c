#include "adjstab/matching.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <utility>

namespace adjstab {

std::string_view to_string(AdjustmentKind kind) {
  switch (kind) {
    case AdjustmentKind::None: return "None";
    case AdjustmentKind::Count: return "Count";
    case AdjustmentKind::Mean: return "Mean";
    case AdjustmentKind::Greedy: return "Greedy";
    case AdjustmentKind::MBM: return "MBM";
    case AdjustmentKind::AverageCount: return "AverageCount";
  }
  return "Unknown";
}

namespace detail {

std::size_t hopcroft_karp(std::size_t n_left, std::size_t n_right,
                          std::span<const std::uint32_t> offsets,
                          std::span<const std::uint32_t> targets) {
  constexpr std::uint32_t kNil = std::numeric_limits<std::uint32_t>::max();
  constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> match_left(n_left, kNil);
  std::vector<std::uint32_t> match_right(n_right, kNil);
  std::vector<std::uint32_t> dist(n_left);
  std::vector<std::uint32_t> next_edge(n_left);
  std::vector<std::uint32_t> queue;
  queue.reserve(n_left);

  const auto bfs = [&] {
    queue.clear();
    for (std::uint32_t u = 0; u < n_left; ++u) {
      if (match_left[u] == kNil) {
        dist[u] = 0;
        queue.push_back(u);
      } else {
        dist[u] = kInf;
      }
    }
    bool reachable_free = false;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto u = queue[head];
      for (auto e = offsets[u]; e < offsets[u + 1]; ++e) {
        const auto w = match_right[targets[e]];
        if (w == kNil) {
          reachable_free = true;
        } else if (dist[w] == kInf) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
    }
    return reachable_free;
  };

  // Augments along a shortest alternating path from u, if one exists.
  const auto dfs = [&](auto&& self, std::uint32_t u) -> bool {
    for (auto& e = next_edge[u]; e < offsets[u + 1]; ++e) {
      const auto v = targets[e];
      const auto w = match_right[v];
      if (w == kNil || (dist[w] == dist[u] + 1 && self(self, w))) {
        match_left[u] = v;
        match_right[v] = u;
        ++e;
        return true;
      }
    }
    dist[u] = kInf;
    return false;
  };

  std::size_t size = 0;
  while (bfs()) {
    for (std::uint32_t u = 0; u < n_left; ++u) next_edge[u] = offsets[u];
    for (std::uint32_t u = 0; u < n_left; ++u)
      if (match_left[u] == kNil && dfs(dfs, u)) ++size;
  }
  return size;
}

std::size_t greedy_select(std::vector<GreedyEdge>& edges, std::size_t n_left,
                          std::size_t n_right, std::vector<std::uint8_t>& used) {
  std::sort(edges.begin(), edges.end(), [](const GreedyEdge& a, const GreedyEdge& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (a.key_lo != b.key_lo) return a.key_lo < b.key_lo;
    return a.key_hi < b.key_hi;
  });
  used.assign(n_left + n_right, 0);
  std::size_t taken = 0;
  for (const auto& e : edges) {
    auto& l = used[e.left];
    auto& r = used[n_left + e.right];
    if (l || r) continue;
    l = r = 1;
    ++taken;
  }
  return taken;
}

}  // namespace detail

bool ThresholdedBipartiteGraph::well_formed() const {
  std::set<std::string> l(left.begin(), left.end());
  if (l.size() != left.size()) return false;
  for (const auto& id : right)
    if (l.count(id)) return false;
  if (std::set<std::string>(right.begin(), right.end()).size() != right.size()) return false;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const auto& e : edges) {
    if (e.left >= left.size() || e.right >= right.size()) return false;
    if (!seen.emplace(e.left, e.right).second) return false;
  }
  return true;
}

namespace {

void check_universe(const FeatureSet& vi, const FeatureSet& vj, const SimilarityMatrix& sim) {
  if (vi.universe_size() != sim.size() || vj.universe_size() != sim.size())
    throw StabilityError(ErrorClass::UniverseMismatch,
                         "feature sets and similarity matrix use different universes");
}

}  // namespace

ThresholdedBipartiteGraph build_graph(const FeatureSet& vi, const FeatureSet& vj,
                                      const SimilarityMatrix& sim, double theta) {
  check_universe(vi, vj, sim);
  PairKernel kernel(sim, theta);
  kernel.split(vi.members(), vj.members());
  ThresholdedBipartiteGraph g;
  const auto& u = sim.universe();
  for (auto x : kernel.left()) g.left.push_back(u.id(x));
  for (auto y : kernel.right()) g.right.push_back(u.id(y));
  const auto left = kernel.left();
  const auto right = kernel.right();
  for (std::uint32_t a = 0; a < left.size(); ++a) {
    for (std::uint32_t b = 0; b < right.size(); ++b) {
      const double s = sim(left[a], right[b]);
      if (s >= theta) g.edges.push_back({a, b, s});
    }
  }
  return g;
}

std::size_t maximum_bipartite_matching(const ThresholdedBipartiteGraph& g) {
  const std::size_t nl = g.left.size();
  std::vector<std::uint32_t> offsets(nl + 1, 0);
  for (const auto& e : g.edges) ++offsets[e.left + 1];
  for (std::size_t u = 0; u < nl; ++u) offsets[u + 1] += offsets[u];
  std::vector<std::uint32_t> targets(g.edges.size());
  auto fill = offsets;
  for (const auto& e : g.edges) targets[fill[e.left]++] = e.right;
  return detail::hopcroft_karp(nl, g.right.size(), offsets, targets);
}

std::size_t greedy_matching(const ThresholdedBipartiteGraph& g) {
  // Rank every vertex id within the union of both sides.
  std::vector<std::string> all(g.left);
  all.insert(all.end(), g.right.begin(), g.right.end());
  std::sort(all.begin(), all.end());
  const auto key = [&](const std::string& id) {
    return static_cast<std::uint32_t>(std::lower_bound(all.begin(), all.end(), id) - all.begin());
  };
  std::vector<detail::GreedyEdge> edges;
  edges.reserve(g.edges.size());
  for (const auto& e : g.edges) {
    const auto kl = key(g.left[e.left]);
    const auto kr = key(g.right[e.right]);
    edges.push_back({e.similarity, std::min(kl, kr), std::max(kl, kr), e.left, e.right});
  }
  std::vector<std::uint8_t> used;
  return detail::greedy_select(edges, g.left.size(), g.right.size(), used);
}

std::size_t brute_force_matching(const ThresholdedBipartiteGraph& g) {
  if (g.edges.size() > kBruteForceEdgeLimit)
    throw StabilityError(ErrorClass::GraphTooLargeForOracle,
                         "brute force oracle accepts at most 25 edges, got " +
                             std::to_string(g.edges.size()));
  std::vector<std::uint8_t> used_l(g.left.size(), 0);
  std::vector<std::uint8_t> used_r(g.right.size(), 0);
  std::size_t best = 0;
  // Include/exclude each edge in turn; subsets that reuse a vertex are skipped.
  const auto search = [&](auto&& self, std::size_t k, std::size_t size) -> void {
    if (k == g.edges.size()) {
      best = std::max(best, size);
      return;
    }
    const auto& e = g.edges[k];
    if (!used_l[e.left] && !used_r[e.right]) {
      used_l[e.left] = used_r[e.right] = 1;
      self(self, k + 1, size + 1);
      used_l[e.left] = used_r[e.right] = 0;
    }
    self(self, k + 1, size);
  };
  search(search, 0, 0);
  return best;
}

std::size_t adj_count(const FeatureSet& vi, const FeatureSet& vj, const SimilarityMatrix& sim,
                      double theta) {
  check_universe(vi, vj, sim);
  PairKernel kernel(sim, theta);
  kernel.split(vi.members(), vj.members());
  return kernel.count();
}

double adj_mean(const FeatureSet& vi, const FeatureSet& vj, const SimilarityMatrix& sim,
                double theta) {
  check_universe(vi, vj, sim);
  PairKernel kernel(sim, theta);
  kernel.split(vi.members(), vj.members());
  return kernel.mean();
}

double adjustment(AdjustmentKind kind, const FeatureSet& vi, const FeatureSet& vj,
                  const SimilarityMatrix& sim, double theta) {
  check_universe(vi, vj, sim);
  if (kind == AdjustmentKind::None) return 0.0;
  PairKernel kernel(sim, theta);
  kernel.split(vi.members(), vj.members());
  return kernel.adjustment(kind);
}

// --- ThresholdIndex ---------------------------------------------------------

ThresholdIndex::ThresholdIndex(const SimilarityMatrix& sim, double theta)
    : sim_(&sim), theta_(theta) {
  const std::size_t p = sim.size();
  offsets_.assign(p + 1, 0);
  std::size_t total = 0;
  for (FeatureIndex i = 0; i < p; ++i) {
    const auto row = sim.row(i);
    for (FeatureIndex j = 0; j < p; ++j) total += j != i && row[j] >= theta;
  }
  if (total > p * p / 4) {
    dense_ = true;
    return;
  }
  targets_.reserve(total);
  values_.reserve(total);
  for (FeatureIndex i = 0; i < p; ++i) {
    const auto row = sim.row(i);
    for (FeatureIndex j = 0; j < p; ++j) {
      if (j != i && row[j] >= theta) {
        targets_.push_back(j);
        values_.push_back(row[j]);
      }
    }
    offsets_[i + 1] = targets_.size();
  }
}

// --- PairKernel -------------------------------------------------------------

PairKernel::PairKernel(const SimilarityMatrix& sim, double theta)
    : owned_(std::make_shared<ThresholdIndex>(sim, theta)),
      index_(owned_.get()),
      sim_(&sim),
      theta_(theta),
      mark_(sim.size(), 0),
      pos_(sim.size(), 0) {}

PairKernel::PairKernel(const ThresholdIndex& index)
    : index_(&index),
      sim_(&index.similarity()),
      theta_(index.theta()),
      mark_(sim_->size(), 0),
      pos_(sim_->size(), 0) {}

std::size_t PairKernel::split(std::span<const FeatureIndex> a, std::span<const FeatureIndex> b) {
  for (auto y : right_) pos_[y] = 0;
  left_.clear();
  right_.clear();
  for (auto x : a) mark_[x] = 1;
  std::size_t inter = 0;
  for (auto y : b) {
    if (mark_[y] == 1) {
      mark_[y] = 2;
      ++inter;
    } else {
      right_.push_back(y);
      pos_[y] = static_cast<std::uint32_t>(right_.size());
    }
  }
  for (auto x : a) {
    if (mark_[x] == 1) left_.push_back(x);
    mark_[x] = 0;
  }
  return inter;
}

bool PairKernel::use_lists() const {
  if (index_->dense()) return false;
  std::size_t work = 0;
  for (auto x : left_) work += index_->degree(x);
  return work <= left_.size() * right_.size();
}

std::pair<std::size_t, std::size_t> PairKernel::list_counts() {
  // The top bit of pos_ marks right features already reached.
  constexpr std::uint32_t kSeen = 0x80000000u;
  std::uint32_t* const pos = pos_.data();
  std::size_t a = 0;
  std::size_t b = 0;
  for (auto x : left_) {
    bool hit = false;
    for (auto y : index_->neighbors(x)) {
      const auto q = pos[y];
      if (q == 0) continue;
      hit = true;
      if ((q & kSeen) == 0) {
        pos[y] = q | kSeen;
        ++b;
      }
    }
    a += hit;
  }
  if (b > 0)
    for (auto y : right_) pos[y] &= ~kSeen;
  return {a, b};
}

std::size_t PairKernel::count_one_way(bool left_to_right) const {
  const auto from = left_to_right ? std::span<const FeatureIndex>(left_) : right_;
  const auto to = left_to_right ? std::span<const FeatureIndex>(right_) : left_;
  std::size_t n = 0;
  for (auto x : from) {
    const auto row = sim_->row(x);
    for (auto y : to) {
      if (row[y] >= theta_) {
        ++n;
        break;
      }
    }
  }
  return n;
}

std::size_t PairKernel::count() {
  if (left_.empty() || right_.empty()) return 0;
  if (use_lists()) {
    const auto [a, b] = list_counts();
    return std::min(a, b);
  }
  hit_rows_.clear();
  for (auto x : left_) {
    const auto row = sim_->row(x);
    for (auto y : right_) {
      if (row[y] >= theta_) {
        hit_rows_.push_back(x);
        break;
      }
    }
  }
  const std::size_t a = hit_rows_.size();
  // A right feature can only reach a left feature that reaches something.
  std::size_t b = 0;
  for (auto y : right_) {
    for (auto x : hit_rows_) {
      if ((*sim_)(x, y) >= theta_) {
        ++b;
        break;
      }
    }
    if (b == a) break;
  }
  return std::min(a, b);
}

double PairKernel::mean() {
  if (left_.empty() || right_.empty()) return 0.0;
  col_sum_.assign(right_.size(), 0.0);
  col_cnt_.assign(right_.size(), 0);
  const bool lists = use_lists();
  double m_left = 0.0;
  for (auto x : left_) {
    double sum = 0.0;
    std::uint32_t cnt = 0;
    const auto add = [&](std::size_t b, double s) {
      sum += s;
      ++cnt;
      col_sum_[b] += s;
      ++col_cnt_[b];
    };
    if (lists) {
      const auto nbrs = index_->neighbors(x);
      const auto vals = index_->similarities(x);
      for (std::size_t k = 0; k < nbrs.size(); ++k)
        if (const auto pos = pos_[nbrs[k]]) add(pos - 1, vals[k]);
    } else {
      const auto row = sim_->row(x);
      for (std::size_t b = 0; b < right_.size(); ++b)
        if (const double s = row[right_[b]]; s >= theta_) add(b, s);
    }
    if (cnt > 0) m_left += sum / cnt;
  }
  double m_right = 0.0;
  for (std::size_t b = 0; b < right_.size(); ++b)
    if (col_cnt_[b] > 0) m_right += col_sum_[b] / col_cnt_[b];
  return std::min(m_left, m_right);
}

std::size_t PairKernel::greedy() {
  greedy_edges_.clear();
  const auto ranks = sim_->universe().ranks();
  const auto push = [&](std::uint32_t a, std::uint32_t b, double s) {
    const auto ka = ranks[left_[a]];
    const auto kb = ranks[right_[b]];
    greedy_edges_.push_back({s, std::min(ka, kb), std::max(ka, kb), a, b});
  };
  const bool lists = !left_.empty() && !right_.empty() && use_lists();
  for (std::uint32_t a = 0; a < left_.size(); ++a) {
    if (lists) {
      const auto nbrs = index_->neighbors(left_[a]);
      const auto vals = index_->similarities(left_[a]);
      for (std::size_t k = 0; k < nbrs.size(); ++k)
        if (const auto pos = pos_[nbrs[k]]) push(a, pos - 1, vals[k]);
    } else {
      const auto row = sim_->row(left_[a]);
      for (std::uint32_t b = 0; b < right_.size(); ++b)
        if (const double s = row[right_[b]]; s >= theta_) push(a, b, s);
    }
  }
  return detail::greedy_select(greedy_edges_, left_.size(), right_.size(), used_);
}

std::size_t PairKernel::mbm() {
  if (left_.empty() || right_.empty()) return 0;
  offsets_.assign(left_.size() + 1, 0);
  targets_.clear();
  const bool lists = use_lists();
  for (std::uint32_t a = 0; a < left_.size(); ++a) {
    if (lists) {
      for (auto y : index_->neighbors(left_[a]))
        if (const auto pos = pos_[y]) targets_.push_back(pos - 1);
    } else {
      const auto row = sim_->row(left_[a]);
      for (std::uint32_t b = 0; b < right_.size(); ++b)
        if (row[right_[b]] >= theta_) targets_.push_back(b);
    }
    offsets_[a + 1] = static_cast<std::uint32_t>(targets_.size());
  }
  if (targets_.empty()) return 0;
  return detail::hopcroft_karp(left_.size(), right_.size(), offsets_, targets_);
}

double PairKernel::adjustment(AdjustmentKind kind) {
  switch (kind) {
    case AdjustmentKind::None: return 0.0;
    case AdjustmentKind::Count: return static_cast<double>(count());
    case AdjustmentKind::Mean: return mean();
    case AdjustmentKind::Greedy: return static_cast<double>(greedy());
    case AdjustmentKind::MBM: return static_cast<double>(mbm());
    case AdjustmentKind::AverageCount: {
      if (left_.empty() || right_.empty()) return 0.0;
      const auto [a, b] =
          use_lists() ? list_counts() : std::make_pair(count_one_way(true), count_one_way(false));
      return 0.5 * static_cast<double>(a + b);
    }
  }
  return 0.0;
}

}  // namespace adjstab
