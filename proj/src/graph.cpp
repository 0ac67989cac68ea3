#include "mtobs/graph.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace mtobs {

DirectedGraph::DirectedGraph(int node_count) : node_count_(node_count) {
  if (node_count < 0) throw std::invalid_argument("node_count must be >= 0");
}

void DirectedGraph::check_node(int node) const {
  if (node < 0 || node >= node_count_)
    throw std::out_of_range("node index " + std::to_string(node) +
                            " outside [0, " + std::to_string(node_count_) + ")");
}

void DirectedGraph::add_link(int src, int dst) {
  check_node(src);
  check_node(dst);
  auto [it, inserted] = links_.emplace(Link{src, dst}, std::nullopt);
  if (!inserted)
    throw std::invalid_argument("duplicate link (" + std::to_string(src) +
                                ", " + std::to_string(dst) + ")");
}

void DirectedGraph::add_link(int src, int dst, double weight) {
  add_link(src, dst);
  links_[{src, dst}] = weight;
}

bool DirectedGraph::has_link(int src, int dst) const {
  return links_.count({src, dst}) > 0;
}

std::optional<double> DirectedGraph::weight(int src, int dst) const {
  auto it = links_.find({src, dst});
  if (it == links_.end()) return std::nullopt;
  return it->second;
}

std::vector<Link> DirectedGraph::links() const {
  std::vector<Link> out;
  out.reserve(links_.size());
  for (const auto& [link, w] : links_) out.push_back(link);
  return out;
}

std::vector<int> DirectedGraph::in_neighbors(int node) const {
  check_node(node);
  std::vector<int> out;
  for (const auto& [link, w] : links_)
    if (link.second == node) out.push_back(link.first);
  return out;
}

std::vector<int> DirectedGraph::out_neighbors(int node) const {
  check_node(node);
  std::vector<int> out;
  for (const auto& [link, w] : links_)
    if (link.first == node) out.push_back(link.second);
  return out;
}

bool DirectedGraph::all_self_loops() const {
  for (int i = 0; i < node_count_; ++i)
    if (!has_self_loop(i)) return false;
  return true;
}

DirectedGraph DirectedGraph::symmetrized() const {
  DirectedGraph g(node_count_);
  for (const auto& [link, w] : links_) {
    if (!g.has_link(link.first, link.second)) g.add_link(link.first, link.second);
    if (link.first != link.second && !g.has_link(link.second, link.first))
      g.add_link(link.second, link.first);
  }
  return g;
}

DirectedGraph DirectedGraph::with_self_loops() const {
  DirectedGraph g = *this;
  for (int i = 0; i < node_count_; ++i)
    if (!g.has_self_loop(i)) g.add_link(i, i);
  return g;
}

DirectedGraph DirectedGraph::complete(int n) {
  if (n < 1) throw std::invalid_argument("complete(n) needs n >= 1");
  DirectedGraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) g.add_link(i, j);
  return g;
}

DirectedGraph DirectedGraph::cycle(int n) {
  if (n < 3) throw std::invalid_argument("cycle(n) needs n >= 3");
  DirectedGraph g(n);
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    g.add_link(i, j);
    g.add_link(j, i);
  }
  return g;
}

DirectedGraph DirectedGraph::star(int n) {
  if (n < 2) throw std::invalid_argument("star(n) needs n >= 2");
  DirectedGraph g(n);
  for (int i = 1; i < n; ++i) {
    g.add_link(0, i);
    g.add_link(i, 0);
  }
  return g;
}

DirectedGraph DirectedGraph::path(int n) {
  if (n < 2) throw std::invalid_argument("path(n) needs n >= 2");
  DirectedGraph g(n);
  for (int i = 0; i + 1 < n; ++i) {
    g.add_link(i, i + 1);
    g.add_link(i + 1, i);
  }
  return g;
}

DirectedGraph DirectedGraph::ring(int n, int m) {
  if (n < 3) throw std::invalid_argument("ring(n,m) needs n >= 3");
  if (m < 1) throw std::invalid_argument("ring(n,m) needs m >= 1");
  DirectedGraph g(n);
  for (int i = 0; i < n; ++i)
    for (int d = 1; d <= m; ++d) {
      int j = (i + d) % n;
      if (i == j) continue;  // m >= n wraps onto itself
      if (!g.has_link(i, j)) g.add_link(i, j);
      if (!g.has_link(j, i)) g.add_link(j, i);
    }
  return g;
}

DirectedGraph DirectedGraph::parse(std::istream& in) {
  std::string line;
  int n = -1;
  DirectedGraph g;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;  // blank
    if (n < 0) {
      if (first != "nodes")
        throw std::invalid_argument("line " + std::to_string(lineno) +
                                    ": expected 'nodes N' header");
      if (!(ls >> n) || n < 0)
        throw std::invalid_argument("line " + std::to_string(lineno) +
                                    ": bad node count");
      g = DirectedGraph(n);
      continue;
    }
    std::istringstream ls2(line);
    int i, j;
    double w;
    if (!(ls2 >> i >> j))
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": expected 'i j [w]'");
    if (ls2 >> w)
      g.add_link(i, j, w);
    else
      g.add_link(i, j);
  }
  if (n < 0) throw std::invalid_argument("missing 'nodes N' header");
  return g;
}

DirectedGraph DirectedGraph::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

std::string DirectedGraph::serialize() const {
  std::ostringstream out;
  out.precision(17);
  out << "nodes " << node_count_ << "\n";
  for (const auto& [link, w] : links_) {
    out << link.first << " " << link.second;
    if (w) out << " " << *w;
    out << "\n";
  }
  return out.str();
}

std::vector<int> SccDecomposition::parent_components() const {
  std::vector<int> out;
  for (int c = 0; c < static_cast<int>(parent_flags.size()); ++c)
    if (parent_flags[c]) out.push_back(c);
  return out;
}

namespace {

// Tarjan, iterative to keep deep graphs off the call stack.
struct TarjanState {
  const std::vector<std::vector<int>>& adj;
  std::vector<int> index, lowlink;
  std::vector<bool> on_stack;
  std::vector<int> stack;
  std::vector<std::vector<int>> components;
  int next_index = 0;

  explicit TarjanState(const std::vector<std::vector<int>>& a)
      : adj(a), index(a.size(), -1), lowlink(a.size(), 0), on_stack(a.size(), false) {}

  void run(int root) {
    // frames: (node, next child position)
    std::vector<std::pair<int, size_t>> frames{{root, 0}};
    while (!frames.empty()) {
      auto& [v, child] = frames.back();
      if (child == 0) {
        index[v] = lowlink[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      bool descended = false;
      while (child < adj[v].size()) {
        int w = adj[v][child++];
        if (index[w] < 0) {
          frames.emplace_back(w, 0);
          descended = true;
          break;
        }
        if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
      }
      if (descended) continue;
      if (lowlink[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
      int finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        int parent = frames.back().first;
        lowlink[parent] = std::min(lowlink[parent], lowlink[finished]);
      }
    }
  }
};

}  // namespace

SccDecomposition scc_decompose(const DirectedGraph& g) {
  const int n = g.node_count();
  std::vector<std::vector<int>> adj(n);
  for (const auto& [src, dst] : g.links())
    if (src != dst) adj[src].push_back(dst);

  TarjanState tarjan(adj);
  for (int v = 0; v < n; ++v)
    if (tarjan.index[v] < 0) tarjan.run(v);

  SccDecomposition d;
  d.components = std::move(tarjan.components);
  // normalize ordering: components sorted by smallest member
  std::sort(d.components.begin(), d.components.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  d.component_of.assign(n, -1);
  for (int c = 0; c < static_cast<int>(d.components.size()); ++c)
    for (int v : d.components[c]) d.component_of[v] = c;

  const int nc = static_cast<int>(d.components.size());
  d.condensation = DirectedGraph(nc);
  for (const auto& [src, dst] : g.links()) {
    int cs = d.component_of[src], cd = d.component_of[dst];
    if (cs != cd && !d.condensation.has_link(cs, cd))
      d.condensation.add_link(cs, cd);
  }
  d.parent_flags.assign(nc, true);
  for (const auto& [src, dst] : d.condensation.links()) d.parent_flags[src] = false;
  return d;
}

bool is_strongly_connected(const DirectedGraph& g) {
  if (g.node_count() < 1)
    throw std::invalid_argument("strong connectivity needs at least one node");
  return scc_decompose(g).components.size() == 1;
}

namespace {

// Dinic max-flow on unit/small integer capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : adj_(n), level_(n), iter_(n) {}

  void add_edge(int from, int to, int cap) {
    adj_[from].push_back({to, static_cast<int>(adj_[to].size()), cap});
    adj_[to].push_back({from, static_cast<int>(adj_[from].size()) - 1, 0});
  }

  int run(int s, int t) {
    int flow = 0;
    while (bfs(s, t)) {
      std::fill(iter_.begin(), iter_.end(), 0);
      while (int f = dfs(s, t, std::numeric_limits<int>::max())) flow += f;
    }
    return flow;
  }

 private:
  struct Edge {
    int to, rev, cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const Edge& e : adj_[v])
        if (e.cap > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[v] + 1;
          q.push(e.to);
        }
    }
    return level_[t] >= 0;
  }

  int dfs(int v, int t, int f) {
    if (v == t) return f;
    for (int& i = iter_[v]; i < static_cast<int>(adj_[v].size()); ++i) {
      Edge& e = adj_[v][i];
      if (e.cap > 0 && level_[v] < level_[e.to]) {
        int d = dfs(e.to, t, std::min(f, e.cap));
        if (d > 0) {
          e.cap -= d;
          adj_[e.to][e.rev].cap += d;
          return d;
        }
      }
    }
    return 0;
  }

  std::vector<std::vector<Edge>> adj_;
  std::vector<int> level_, iter_;
};

int link_disjoint_paths(const DirectedGraph& g, int s, int t) {
  MaxFlow mf(g.node_count());
  for (const auto& [src, dst] : g.links())
    if (src != dst) mf.add_edge(src, dst, 1);
  return mf.run(s, t);
}

// Node-split transform: v -> (v_in = 2v, v_out = 2v+1), internal capacity 1
// except at the endpoints.
int node_disjoint_paths(const DirectedGraph& g, int s, int t) {
  const int n = g.node_count();
  const int big = n * n + 1;
  MaxFlow mf(2 * n);
  for (int v = 0; v < n; ++v)
    mf.add_edge(2 * v, 2 * v + 1, (v == s || v == t) ? big : 1);
  for (const auto& [src, dst] : g.links())
    if (src != dst) mf.add_edge(2 * src + 1, 2 * dst, big);
  return mf.run(2 * s + 1, 2 * t);
}

}  // namespace

int link_disjoint_path_count(const DirectedGraph& g, int s, int t) {
  if (s < 0 || s >= g.node_count() || t < 0 || t >= g.node_count() || s == t)
    throw std::invalid_argument("need two distinct valid nodes");
  return link_disjoint_paths(g, s, t);
}

int node_disjoint_path_count(const DirectedGraph& g, int s, int t) {
  if (s < 0 || s >= g.node_count() || t < 0 || t >= g.node_count() || s == t)
    throw std::invalid_argument("need two distinct valid nodes");
  return node_disjoint_paths(g, s, t);
}

int link_connectivity(const DirectedGraph& g) {
  const int n = g.node_count();
  if (n < 2) throw std::invalid_argument("connectivity undefined");
  int best = std::numeric_limits<int>::max();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      best = std::min(best, link_disjoint_paths(g, i, j));
      if (best == 0) return 0;
    }
  return best;
}

int node_connectivity(const DirectedGraph& g) {
  const int n = g.node_count();
  if (n < 2) throw std::invalid_argument("connectivity undefined");
  int best = std::numeric_limits<int>::max();
  bool found_nonadjacent = false;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j || g.has_link(i, j)) continue;
      found_nonadjacent = true;
      best = std::min(best, node_disjoint_paths(g, i, j));
      if (best == 0) return 0;
    }
  if (!found_nonadjacent) return n - 1;  // complete: no removal disconnects
  return best;
}

DirectedGraph survives_removal(const DirectedGraph& g,
                               const std::set<int>& removed_nodes,
                               const std::set<Link>& removed_links) {
  for (int v : removed_nodes)
    if (v < 0 || v >= g.node_count())
      throw std::invalid_argument("cannot remove nonexistent node " +
                                  std::to_string(v));
  for (const auto& [src, dst] : removed_links)
    if (!g.has_link(src, dst))
      throw std::invalid_argument("cannot remove nonexistent link (" +
                                  std::to_string(src) + ", " +
                                  std::to_string(dst) + ")");

  std::vector<int> remap(g.node_count(), -1);
  int next = 0;
  for (int v = 0; v < g.node_count(); ++v)
    if (!removed_nodes.count(v)) remap[v] = next++;

  DirectedGraph out(next);
  for (const auto& [src, dst] : g.links()) {
    if (removed_links.count({src, dst})) continue;
    if (remap[src] < 0 || remap[dst] < 0) continue;
    auto w = g.weight(src, dst);
    if (w)
      out.add_link(remap[src], remap[dst], *w);
    else
      out.add_link(remap[src], remap[dst]);
  }
  return out;
}

}  // namespace mtobs
