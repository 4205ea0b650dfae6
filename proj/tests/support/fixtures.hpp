#pragma once

#include <gdeconv/graphs.hpp>

namespace fixtures {

inline gdeconv::Graph path3() { return gdeconv::Graph(3, {{0, 1}, {1, 2}}); }

// Triangle 0-1-2 with a pendant node 3 on node 0.
inline gdeconv::Graph triangle_pendant() {
  return gdeconv::Graph(4, {{0, 1}, {0, 2}, {1, 2}, {0, 3}});
}

inline gdeconv::Graph weighted_star() {
  return gdeconv::Graph(4, {{0, 1, 1.0}, {0, 2, 1.7}, {0, 3, 2.3}}, true);
}

inline gdeconv::Graph star3() { return gdeconv::Graph(4, {{0, 1}, {0, 2}, {0, 3}}); }

// Seven nodes whose adjacency eigenvector 3 (ascending) is u^(1,3).
inline gdeconv::Graph seven_node() {
  return gdeconv::Graph(7, {{0, 1}, {0, 3}, {0, 6}, {1, 2}, {2, 3}, {2, 5}, {4, 5}});
}

}  // namespace fixtures
