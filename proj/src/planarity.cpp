#include "capalloc/planarity.hpp"

#include <algorithm>
#include <set>

namespace capalloc {

namespace {

// Left-right planarity test (Brandes' formulation). Oriented edges are
// indexed; -1 stands for "none".
struct LRTest {
  int n;
  std::vector<std::vector<int>> adj;  // vertex -> incident undirected edge ids
  std::vector<std::pair<int, int>> ends;

  std::vector<int> height;       // per vertex, -1 unvisited
  std::vector<int> parent_edge;  // per vertex, oriented edge id or -1

  // Per oriented edge (same index as undirected edge once oriented).
  std::vector<int> tail, head;  // orientation
  std::vector<char> oriented;
  std::vector<int> lowpt, lowpt2, nesting;
  std::vector<int> ref;
  std::vector<int> lowpt_edge;

  struct Interval {
    int low = -1, high = -1;
    bool empty() const { return low == -1 && high == -1; }
  };
  struct ConflictPair {
    Interval L, R;
    bool empty() const { return L.empty() && R.empty(); }
    void swap_sides() { std::swap(L, R); }
  };
  std::vector<ConflictPair> S;
  std::vector<int> stack_bottom;  // per oriented edge: stack height when pushed
  std::vector<std::vector<int>> ordered;  // per vertex: outgoing edges by nesting depth

  explicit LRTest(int nv, const std::vector<std::pair<int, int>>& es) : n(nv) {
    std::set<std::pair<int, int>> seen;
    for (auto [a, b] : es) {
      if (a == b) continue;
      auto key = std::minmax(a, b);
      if (!seen.insert({key.first, key.second}).second) continue;
      ends.emplace_back(a, b);
    }
    const int m = static_cast<int>(ends.size());
    adj.resize(n);
    for (int e = 0; e < m; ++e) {
      adj[ends[e].first].push_back(e);
      adj[ends[e].second].push_back(e);
    }
    height.assign(n, -1);
    parent_edge.assign(n, -1);
    tail.assign(m, -1);
    head.assign(m, -1);
    oriented.assign(m, 0);
    lowpt.assign(m, 0);
    lowpt2.assign(m, 0);
    nesting.assign(m, 0);
    ref.assign(m, -1);
    lowpt_edge.assign(m, -1);
    stack_bottom.assign(m, 0);
    ordered.resize(n);
  }

  void dfs_orient(int v) {
    const int pe = parent_edge[v];
    for (int e : adj[v]) {
      if (oriented[e]) continue;
      oriented[e] = 1;
      tail[e] = v;
      head[e] = ends[e].first == v ? ends[e].second : ends[e].first;
      const int w = head[e];
      lowpt[e] = height[v];
      lowpt2[e] = height[v];
      if (height[w] == -1) {
        parent_edge[w] = e;
        height[w] = height[v] + 1;
        dfs_orient(w);
      } else {
        lowpt[e] = height[w];
      }
      nesting[e] = 2 * lowpt[e] + (lowpt2[e] < height[v] ? 1 : 0);
      if (pe != -1) {
        if (lowpt[e] < lowpt[pe]) {
          lowpt2[pe] = std::min(lowpt[pe], lowpt2[e]);
          lowpt[pe] = lowpt[e];
        } else if (lowpt[e] > lowpt[pe]) {
          lowpt2[pe] = std::min(lowpt2[pe], lowpt[e]);
        } else {
          lowpt2[pe] = std::min(lowpt2[pe], lowpt2[e]);
        }
      }
    }
  }

  bool conflicting(const Interval& i, int b) const {
    return !i.empty() && lowpt[i.high] > lowpt[b];
  }

  int lowest(const ConflictPair& p) const {
    if (p.L.empty()) return lowpt[p.R.low];
    if (p.R.empty()) return lowpt[p.L.low];
    return std::min(lowpt[p.L.low], lowpt[p.R.low]);
  }

  bool add_constraints(int ei, int e) {
    ConflictPair p;
    // Merge the return edges of ei into p.R.
    while (static_cast<int>(S.size()) > stack_bottom[ei]) {
      ConflictPair q = S.back();
      S.pop_back();
      if (!q.L.empty()) q.swap_sides();
      if (!q.L.empty()) return false;
      if (lowpt[q.R.low] > lowpt[e]) {
        if (p.R.empty()) {
          p.R.high = q.R.high;
        } else {
          ref[p.R.low] = q.R.high;
        }
        p.R.low = q.R.low;
      } else {
        ref[q.R.low] = lowpt_edge[e];
      }
    }
    // Merge conflicting return edges of earlier siblings into p.L.
    while (!S.empty() && (conflicting(S.back().L, ei) || conflicting(S.back().R, ei))) {
      ConflictPair q = S.back();
      S.pop_back();
      if (conflicting(q.R, ei)) q.swap_sides();
      if (conflicting(q.R, ei)) return false;
      if (p.R.low != -1) ref[p.R.low] = q.R.high;
      if (q.R.low != -1) p.R.low = q.R.low;
      if (p.L.empty()) {
        p.L.high = q.L.high;
      } else {
        ref[p.L.low] = q.L.high;
      }
      p.L.low = q.L.low;
    }
    if (!p.empty()) S.push_back(p);
    return true;
  }

  void trim_back_edges(int u) {
    while (!S.empty() && lowest(S.back()) == height[u]) S.pop_back();
    if (S.empty()) return;
    ConflictPair p = S.back();
    S.pop_back();
    while (p.L.high != -1 && head[p.L.high] == u) p.L.high = ref[p.L.high];
    if (p.L.high == -1 && p.L.low != -1) {
      ref[p.L.low] = p.R.low;
      p.L.low = -1;
    }
    while (p.R.high != -1 && head[p.R.high] == u) p.R.high = ref[p.R.high];
    if (p.R.high == -1 && p.R.low != -1) {
      ref[p.R.low] = p.L.low;
      p.R.low = -1;
    }
    if (!p.empty()) S.push_back(p);
  }

  bool dfs_test(int v) {
    const int e = parent_edge[v];
    bool first = true;
    for (int ei : ordered[v]) {
      stack_bottom[ei] = static_cast<int>(S.size());
      const int w = head[ei];
      if (parent_edge[w] == ei) {
        if (!dfs_test(w)) return false;
      } else {
        lowpt_edge[ei] = ei;
        ConflictPair p;
        p.R.low = ei;
        p.R.high = ei;
        S.push_back(p);
      }
      if (lowpt[ei] < height[v]) {  // ei has a return edge
        if (first) {
          if (e != -1) lowpt_edge[e] = lowpt_edge[ei];
        } else {
          if (!add_constraints(ei, e)) return false;
        }
      }
      first = false;
    }
    if (e != -1) {
      const int u = tail[e];
      trim_back_edges(u);
      if (lowpt[e] < height[u]) {  // e has a return edge
        const int hl = S.empty() ? -1 : S.back().L.high;
        const int hr = S.empty() ? -1 : S.back().R.high;
        if (hl != -1 && (hr == -1 || lowpt[hl] > lowpt[hr])) {
          ref[e] = hl;
        } else {
          ref[e] = hr;
        }
      }
    }
    return true;
  }

  bool run() {
    if (n >= 3 && static_cast<int>(ends.size()) > 3 * n - 6) return false;
    for (int v = 0; v < n; ++v) {
      if (height[v] == -1) {
        height[v] = 0;
        dfs_orient(v);
      }
    }
    for (int v = 0; v < n; ++v) {
      auto& out = ordered[v];
      for (int e : adj[v]) {
        if (oriented[e] && tail[e] == v) out.push_back(e);
      }
      std::sort(out.begin(), out.end(),
                [&](int a, int b) { return nesting[a] != nesting[b] ? nesting[a] < nesting[b] : a < b; });
    }
    for (int v = 0; v < n; ++v) {
      if (parent_edge[v] == -1) {
        S.clear();
        if (!dfs_test(v)) return false;
      }
    }
    return true;
  }
};

}  // namespace

bool is_planar(int num_vertices, const std::vector<std::pair<int, int>>& edges) {
  if (num_vertices <= 0) return true;
  LRTest t(num_vertices, edges);
  return t.run();
}

}  // namespace capalloc
