#pragma once

// Weighted directed graphs and their Laplacians. Edge (from j, to i) means
// node i listens to node j: it contributes -w to L(i, j) and +w to L(i, i).
// Node indices are 0-based here; file formats are 1-based.

#include "posctl/types.hpp"

#include <span>
#include <vector>

namespace posctl {

struct Edge {
    int from = 0;
    int to = 0;
    double weight = 1.0;
};

// Disjoint source components of the condensation: groups of nodes that no
// other node influences. Every stabilizing leader set hits each of them.
struct LeaderSubsets {
    std::vector<std::vector<int>> subsets;
};

using Partition = std::vector<std::vector<int>>;

// Strongly connected components, each sorted, ordered by smallest member.
Partition strongly_connected_components(int n, std::span<const Edge> edges);

// Weakly connected components of G(M), the graph of the off-diagonal
// nonzeros of a square matrix. Same ordering as above.
Partition weak_components(const Matrix& M);

class DirectedNetwork {
public:
    // Rejects self-loops, nonpositive weights and out-of-range nodes; parallel
    // edges are summed.
    DirectedNetwork(int n, std::vector<Edge> edges);

    int size() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Partition& components() const { return components_; }
    int component_of(int node) const { return component_of_[static_cast<std::size_t>(node)]; }

    Matrix laplacian() const;
    bool is_weakly_connected() const;
    bool is_strongly_connected() const { return components_.size() == 1; }
    bool is_balanced(double tol = 1e-12) const;
    const LeaderSubsets& leader_subsets() const { return leader_subsets_; }
    DirectedNetwork reverse() const;

private:
    int n_;
    std::vector<Edge> edges_;
    Partition components_;
    std::vector<int> component_of_;
    LeaderSubsets leader_subsets_;
};

}  // namespace posctl
