#ifndef DOCOSIM_GRAPH_HPP
#define DOCOSIM_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace docosim
{

using Edge = std::pair<int, int>;

//
// Undirected, connected communication graph on nodes 0..n-1. Edges are stored
// normalized as (min, max) and deduplicated. Construction validates that no
// self-loops exist, all indices are in range, and the graph is connected.
//
class Graph
{
public:
  Graph(int n, const std::vector<Edge> &edges) : n_(n), adjacency_(n > 0 ? n : 0)
  {
    if (n < 1)
    {
      throw std::invalid_argument("graph: node count must be >= 1, got " +
                                  std::to_string(n));
    }
    std::set<Edge> unique;
    for (auto [i, j] : edges)
    {
      if (i < 0 || j < 0 || i >= n || j >= n)
      {
        throw std::invalid_argument("graph: edge (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") out of range for n=" +
                                    std::to_string(n));
      }
      if (i == j)
      {
        throw std::invalid_argument("graph: self-loop at node " + std::to_string(i));
      }
      unique.emplace(std::min(i, j), std::max(i, j));
    }
    edges_.assign(unique.begin(), unique.end());
    for (auto [i, j] : edges_)
    {
      adjacency_[i].push_back(j);
      adjacency_[j].push_back(i);
    }
    for (auto &nbrs : adjacency_)
    {
      std::sort(nbrs.begin(), nbrs.end());
    }
    if (!connected())
    {
      throw std::invalid_argument("graph: disconnected (n=" + std::to_string(n) + ", " +
                                  std::to_string(edges_.size()) + " edges)");
    }
  }

  int size() const { return n_; }
  const std::vector<Edge> &edges() const { return edges_; }
  const std::vector<int> &neighbors(int i) const { return adjacency_.at(i); }
  int degree(int i) const { return static_cast<int>(adjacency_.at(i).size()); }

  int max_degree() const
  {
    int d = 0;
    for (int i = 0; i < n_; i++)
    {
      d = std::max(d, degree(i));
    }
    return d;
  }

  bool has_edge(int i, int j) const
  {
    const auto &nbrs = adjacency_.at(i);
    return std::binary_search(nbrs.begin(), nbrs.end(), j);
  }

private:
  bool connected() const
  {
    std::vector<char> seen(n_, 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int visited = 1;
    while (!frontier.empty())
    {
      int u = frontier.front();
      frontier.pop();
      for (int v : adjacency_[u])
      {
        if (!seen[v])
        {
          seen[v] = 1;
          visited++;
          frontier.push(v);
        }
      }
    }
    return visited == n_;
  }

  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

// Ring on n nodes, each node joined to (i +/- 1) mod n. The lower-bound
// constructions need n = 2(m+1) with m >= 1, so only even n >= 4 is accepted.
inline Graph build_cycle(int n)
{
  if (n < 4 || n % 2 != 0)
  {
    throw std::invalid_argument("cycle: n must be even and >= 4, got " + std::to_string(n));
  }
  std::vector<Edge> edges;
  edges.reserve(n);
  for (int i = 0; i < n; i++)
  {
    edges.emplace_back(i, (i + 1) % n);
  }
  return Graph(n, edges);
}

inline Graph build_complete(int n)
{
  std::vector<Edge> edges;
  for (int i = 0; i < n; i++)
  {
    for (int j = i + 1; j < n; j++)
    {
      edges.emplace_back(i, j);
    }
  }
  return Graph(n, edges);
}

inline Graph build_path(int n)
{
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; i++)
  {
    edges.emplace_back(i, i + 1);
  }
  return Graph(n, edges);
}

inline Graph build_from_edges(int n, const std::vector<Edge> &edges)
{
  return Graph(n, edges);
}

}  // namespace docosim

#endif  // DOCOSIM_GRAPH_HPP
