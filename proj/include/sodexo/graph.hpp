#pragma once

// Random social graphs with a prescribed degree distribution, wired by the
// configuration model.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sodexo/error.hpp"
#include "sodexo/model.hpp"

namespace sodexo {

struct DegreeStats {
    double mean = 0.0;
    int min = 0;
    int max = 0;
    std::map<int, std::uint64_t> histogram;
};

/// Undirected simple graph stored as sorted adjacency lists.
struct SocialGraph {
    std::vector<std::vector<std::uint32_t>> adjacency;
    /// Stub pairs that could not be rewired into a simple graph and were
    /// dropped. Non-zero means some nodes sit below their target degree.
    std::size_t dropped_edges = 0;
    /// Number of degree sequences drawn before an acceptable one was found.
    int attempts = 1;

    std::size_t node_count() const { return adjacency.size(); }

    std::size_t edge_count() const {
        std::size_t s = 0;
        for (const auto& a : adjacency) s += a.size();
        return s / 2;
    }

    bool near_regular() const { return dropped_edges > 0; }

    DegreeStats degree_stats() const {
        DegreeStats st;
        if (adjacency.empty()) return st;
        st.min = static_cast<int>(adjacency.front().size());
        double sum = 0.0;
        for (const auto& a : adjacency) {
            const int d = static_cast<int>(a.size());
            st.min = std::min(st.min, d);
            st.max = std::max(st.max, d);
            sum += d;
            ++st.histogram[d];
        }
        st.mean = sum / static_cast<double>(adjacency.size());
        return st;
    }

    /// One "u v" line per edge with u < v, 0-indexed.
    void write_edge_list(std::ostream& os) const {
        for (std::size_t u = 0; u < adjacency.size(); ++u)
            for (auto v : adjacency[u])
                if (u < v) os << u << ' ' << v << '\n';
    }
};

namespace detail {

inline std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

/// Pairs stubs uniformly at random, then removes self-loops and multi-edges
/// with degree-preserving double-edge swaps against randomly chosen good edges.
inline SocialGraph wire_configuration_model(const std::vector<int>& degrees, std::mt19937_64& rng) {
    std::vector<std::uint32_t> stubs;
    std::size_t total = 0;
    for (int d : degrees) total += static_cast<std::size_t>(d);
    stubs.reserve(total);
    for (std::size_t i = 0; i < degrees.size(); ++i)
        stubs.insert(stubs.end(), static_cast<std::size_t>(degrees[i]), static_cast<std::uint32_t>(i));
    std::shuffle(stubs.begin(), stubs.end(), rng);

    const std::size_t m = stubs.size() / 2;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges(m);
    std::unordered_map<std::uint64_t, int> count;
    count.reserve(m * 2);
    for (std::size_t i = 0; i < m; ++i) {
        edges[i] = {stubs[2 * i], stubs[2 * i + 1]};
        ++count[edge_key(edges[i].first, edges[i].second)];
    }

    std::vector<char> bad(m, 0);
    std::vector<std::size_t> bad_list;
    {
        std::unordered_map<std::uint64_t, int> seen;
        for (std::size_t i = 0; i < m; ++i) {
            auto [u, v] = edges[i];
            if (u == v || ++seen[edge_key(u, v)] > 1) {
                bad[i] = 1;
                bad_list.push_back(i);
            }
        }
    }

    SocialGraph g;
    std::vector<char> keep(m, 1);
    if (!bad_list.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, m - 1);
        std::bernoulli_distribution coin(0.5);
        const int max_tries = 1000;
        for (std::size_t i : bad_list) {
            bool fixed = false;
            for (int t = 0; t < max_tries && !fixed; ++t) {
                std::size_t j = pick(rng);
                if (j == i || bad[j] || !keep[j]) continue;
                auto [u, v] = edges[i];
                auto [x, y] = edges[j];
                if (coin(rng)) std::swap(x, y);
                if (u == x || v == y) continue;
                const auto k1 = edge_key(u, x), k2 = edge_key(v, y);
                if (k1 == k2 || count[k1] > 0 || count[k2] > 0) continue;
                --count[edge_key(u, v)];
                --count[edge_key(edges[j].first, edges[j].second)];
                ++count[k1];
                ++count[k2];
                edges[i] = {u, x};
                edges[j] = {v, y};
                bad[i] = 0;
                fixed = true;
            }
            if (!fixed) {
                keep[i] = 0;
                --count[edge_key(edges[i].first, edges[i].second)];
                ++g.dropped_edges;
            }
        }
    }

    g.adjacency.assign(degrees.size(), {});
    for (std::size_t i = 0; i < degrees.size(); ++i)
        g.adjacency[i].reserve(static_cast<std::size_t>(degrees[i]));
    for (std::size_t i = 0; i < m; ++i) {
        if (!keep[i]) continue;
        auto [u, v] = edges[i];
        g.adjacency[u].push_back(v);
        g.adjacency[v].push_back(u);
    }
    for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
    return g;
}

} // namespace detail

/// Builds a graph on round(dist.total()) nodes. Regular distributions give every
/// node the same degree; scale-free distributions draw i.i.d. degrees from the
/// truncated power law, redrawing (up to 100 times) until the degree sum is even
/// and the realized mean is within 5% of the law's mean.
inline SocialGraph generate_graph(const DegreeDistribution& dist, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(std::llround(dist.total()));
    if (n < 2) throw ModelError("generate_graph: need at least two nodes");
    std::mt19937_64 rng(seed);
    std::vector<int> degrees(n);

    int attempts = 1;
    if (dist.kind == DegreeKind::regular) {
        const int d = static_cast<int>(std::lround(dist.degree));
        if (d < 0 || static_cast<std::size_t>(d) >= n)
            throw ModelError("generate_graph: degree must lie in [0, N)");
        if ((static_cast<std::uint64_t>(d) * n) % 2 != 0)
            throw ModelError("generate_graph: N * d is odd; no graph realizes this degree sequence");
        std::fill(degrees.begin(), degrees.end(), d);
    } else {
        if (dist.d_min < 1 || dist.d_max < dist.d_min)
            throw ModelError("generate_graph: need 1 <= d_min <= d_max");
        if (static_cast<std::size_t>(dist.d_max) >= n)
            throw ModelError("generate_graph: d_max must be below N");
        std::vector<double> w;
        for (int d = dist.d_min; d <= dist.d_max; ++d)
            w.push_back(std::pow(static_cast<double>(d), -dist.gamma));
        std::discrete_distribution<int> law(w.begin(), w.end());
        const double target = dist.law_mean();
        bool ok = false;
        for (attempts = 1; attempts <= 100 && !ok; ++attempts) {
            std::uint64_t sum = 0;
            for (auto& d : degrees) {
                d = dist.d_min + law(rng);
                sum += static_cast<std::uint64_t>(d);
            }
            const double mean = static_cast<double>(sum) / static_cast<double>(n);
            ok = sum % 2 == 0 && std::abs(mean - target) <= 0.05 * target;
        }
        --attempts;
        if (!ok)
            throw ModelError("generate_graph: no feasible degree sequence after 100 attempts");
    }

    SocialGraph g = detail::wire_configuration_model(degrees, rng);
    g.attempts = attempts;
    return g;
}

} // namespace sodexo
