#include "posctl/netgraph.hpp"

#include "posctl/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace posctl {

namespace {

Partition canonical(Partition parts) {
    for (auto& p : parts) std::sort(p.begin(), p.end());
    std::sort(parts.begin(), parts.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return parts;
}

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
    Partition groups(int n) {
        std::map<int, std::vector<int>> by_root;
        for (int i = 0; i < n; ++i) by_root[find(i)].push_back(i);
        Partition out;
        for (auto& [root, members] : by_root) out.push_back(std::move(members));
        return canonical(std::move(out));
    }
};

}  // namespace

Partition strongly_connected_components(int n, std::span<const Edge> edges) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (const Edge& e : edges) adj[static_cast<std::size_t>(e.from)].push_back(e.to);

    // Iterative Tarjan.
    std::vector<int> index(static_cast<std::size_t>(n), -1);
    std::vector<int> low(static_cast<std::size_t>(n), 0);
    std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    std::vector<std::pair<int, std::size_t>> call;
    Partition out;
    int counter = 0;

    for (int root = 0; root < n; ++root) {
        if (index[static_cast<std::size_t>(root)] >= 0) continue;
        call.emplace_back(root, 0);
        while (!call.empty()) {
            auto& [v, next] = call.back();
            const auto vs = static_cast<std::size_t>(v);
            if (next == 0 && index[vs] < 0) {
                index[vs] = low[vs] = counter++;
                stack.push_back(v);
                on_stack[vs] = 1;
            }
            if (next < adj[vs].size()) {
                const int w = adj[vs][next++];
                const auto ws = static_cast<std::size_t>(w);
                if (index[ws] < 0) {
                    call.emplace_back(w, 0);
                } else if (on_stack[ws]) {
                    low[vs] = std::min(low[vs], index[ws]);
                }
                continue;
            }
            if (low[vs] == index[vs]) {
                std::vector<int> comp;
                int w = -1;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[static_cast<std::size_t>(w)] = 0;
                    comp.push_back(w);
                } while (w != v);
                out.push_back(std::move(comp));
            }
            const int finished = v;
            call.pop_back();
            if (!call.empty()) {
                const auto parent = static_cast<std::size_t>(call.back().first);
                low[parent] = std::min(low[parent], low[static_cast<std::size_t>(finished)]);
            }
        }
    }
    return canonical(std::move(out));
}

Partition weak_components(const Matrix& M) {
    if (M.rows() != M.cols()) throw Error(ErrorCode::DimensionMismatch, "weak_components expects a square matrix");
    const int n = static_cast<int>(M.rows());
    DisjointSet ds(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && M(i, j) != 0.0) ds.unite(i, j);
        }
    }
    return ds.groups(n);
}

DirectedNetwork::DirectedNetwork(int n, std::vector<Edge> edges) : n_(n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "network needs at least one node");
    std::map<std::pair<int, int>, double> merged;
    for (const Edge& e : edges) {
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
            throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
        }
        if (e.from == e.to) {
            throw Error(ErrorCode::InvalidArgument, "self-loop at node " + std::to_string(e.from + 1));
        }
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw Error(ErrorCode::InvalidArgument, "edge weights must be positive and finite");
        }
        merged[{e.to, e.from}] += e.weight;
    }
    for (const auto& [key, w] : merged) edges_.push_back(Edge{key.second, key.first, w});

    components_ = strongly_connected_components(n_, edges_);
    component_of_.assign(static_cast<std::size_t>(n_), -1);
    for (std::size_t c = 0; c < components_.size(); ++c) {
        for (int v : components_[c]) component_of_[static_cast<std::size_t>(v)] = static_cast<int>(c);
    }
    std::vector<char> influenced(components_.size(), 0);
    for (const Edge& e : edges_) {
        const int cf = component_of(e.from);
        const int ct = component_of(e.to);
        if (cf != ct) influenced[static_cast<std::size_t>(ct)] = 1;
    }
    for (std::size_t c = 0; c < components_.size(); ++c) {
        if (!influenced[c]) leader_subsets_.subsets.push_back(components_[c]);
    }
}

Matrix DirectedNetwork::laplacian() const {
    Matrix L = Matrix::Zero(n_, n_);
    for (const Edge& e : edges_) {
        L(e.to, e.from) -= e.weight;
        L(e.to, e.to) += e.weight;
    }
    return L;
}

bool DirectedNetwork::is_weakly_connected() const {
    DisjointSet ds(n_);
    for (const Edge& e : edges_) ds.unite(e.from, e.to);
    return ds.groups(n_).size() == 1;
}

bool DirectedNetwork::is_balanced(double tol) const {
    std::vector<double> in(static_cast<std::size_t>(n_), 0.0);
    std::vector<double> out(static_cast<std::size_t>(n_), 0.0);
    for (const Edge& e : edges_) {
        in[static_cast<std::size_t>(e.to)] += e.weight;
        out[static_cast<std::size_t>(e.from)] += e.weight;
    }
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (std::fabs(in[i] - out[i]) > tol * (1.0 + std::max(in[i], out[i]))) return false;
    }
    return true;
}

DirectedNetwork DirectedNetwork::reverse() const {
    std::vector<Edge> rev;
    rev.reserve(edges_.size());
    for (const Edge& e : edges_) rev.push_back(Edge{e.to, e.from, e.weight});
    return DirectedNetwork(n_, std::move(rev));
}

}  // namespace posctl
