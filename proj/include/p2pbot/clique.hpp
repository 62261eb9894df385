#pragma once

// Exact maximum-clique enumeration (Bron-Kerbosch with Tomita pivoting and a
// size bound). Intended for the small community subgraphs left after botnet
// filtering.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace p2pbot {

class AdjacencyMatrix {
public:
    explicit AdjacencyMatrix(std::size_t n = 0) : n_{n}, bits_(n * n, false) {}

    std::size_t size() const noexcept { return n_; }

    void connect(std::size_t i, std::size_t j) {
        if (i == j) return;
        bits_[i * n_ + j] = true;
        bits_[j * n_ + i] = true;
    }

    bool adjacent(std::size_t i, std::size_t j) const { return bits_[i * n_ + j]; }

private:
    std::size_t n_;
    std::vector<bool> bits_;
};

namespace detail {

class MaxCliqueSearch {
public:
    explicit MaxCliqueSearch(const AdjacencyMatrix& adj) : adj_{adj} {}

    std::vector<std::vector<std::size_t>> run() {
        std::vector<std::size_t> r, p(adj_.size()), x;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = i;
        expand(r, p, x);
        for (auto& c : found_) std::sort(c.begin(), c.end());
        std::sort(found_.begin(), found_.end());
        return std::move(found_);
    }

private:
    void expand(std::vector<std::size_t>& r, std::vector<std::size_t> p, std::vector<std::size_t> x) {
        if (r.size() + p.size() < best_) return;
        if (p.empty()) {
            if (!x.empty()) return;
            if (r.size() > best_) {
                best_ = r.size();
                found_.clear();
            }
            found_.push_back(r);
            return;
        }
        const std::size_t pivot = choose_pivot(p, x);
        std::vector<std::size_t> branch;
        for (std::size_t v : p)
            if (!adj_.adjacent(pivot, v)) branch.push_back(v);

        for (std::size_t v : branch) {
            std::vector<std::size_t> np, nx;
            for (std::size_t u : p)
                if (adj_.adjacent(v, u)) np.push_back(u);
            for (std::size_t u : x)
                if (adj_.adjacent(v, u)) nx.push_back(u);
            r.push_back(v);
            expand(r, std::move(np), std::move(nx));
            r.pop_back();
            p.erase(std::find(p.begin(), p.end(), v));
            x.push_back(v);
            if (r.size() + p.size() < best_) return;
        }
    }

    std::size_t choose_pivot(const std::vector<std::size_t>& p, const std::vector<std::size_t>& x) const {
        std::size_t best_u = p.front();
        std::size_t best_deg = 0;
        bool first = true;
        auto consider = [&](std::size_t u) {
            std::size_t d = 0;
            for (std::size_t v : p)
                if (adj_.adjacent(u, v)) ++d;
            if (first || d > best_deg) {
                best_u = u;
                best_deg = d;
                first = false;
            }
        };
        for (std::size_t u : p) consider(u);
        for (std::size_t u : x) consider(u);
        return best_u;
    }

    const AdjacencyMatrix& adj_;
    std::size_t best_ = 0;
    std::vector<std::vector<std::size_t>> found_;
};

}  // namespace detail

/// All cliques of maximum cardinality, each sorted, listed lexicographically.
/// An empty graph yields no cliques.
inline std::vector<std::vector<std::size_t>> maximum_cliques(const AdjacencyMatrix& adj) {
    if (adj.size() == 0) return {};
    return detail::MaxCliqueSearch{adj}.run();
}

}  // namespace p2pbot
