#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ksyg/cone_family.hpp"
#include "ksyg/layered_range_tree.hpp"

namespace ksyg {

/// Per point p and cone l, K_l(p): up to k points of P ∩ C_l(p) with the
/// smallest axis keys, ascending.
struct KSYGraph {
    int n = 0;
    int k = 0;
    int c = 0;
    std::vector<std::vector<std::vector<int>>> sel;  // sel[p][l]

    KSYGraph() = default;
    KSYGraph(int n_, int k_, int c_)
        : n(n_), k(k_), c(c_), sel(n_, std::vector<std::vector<int>>(c_)) {}

    /// Undirected edges (min, max) with multiplicity: one per selection.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        for (int p = 0; p < n; ++p)
            for (int l = 0; l < c; ++l)
                for (int q : sel[p][l]) out.emplace_back(std::min(p, q), std::max(p, q));
        std::sort(out.begin(), out.end());
        return out;
    }

    int edge_count() const {
        int m = 0;
        for (const auto& per : sel)
            for (const auto& s : per) m += static_cast<int>(s.size());
        return m;
    }

    bool has_edge(int p, int q) const {
        for (int l = 0; l < c; ++l) {
            for (int x : sel[p][l])
                if (x == q) return true;
            for (int x : sel[q][l])
                if (x == p) return true;
        }
        return false;
    }

    /// Order-insensitive digest of all selection sets (FNV-1a).
    std::uint64_t checksum() const {
        std::uint64_t h = 1469598103934665603ULL;
        auto mix = [&](std::uint64_t v) {
            for (int b = 0; b < 8; ++b) {
                h ^= (v >> (8 * b)) & 0xff;
                h *= 1099511628211ULL;
            }
        };
        mix(static_cast<std::uint64_t>(n));
        mix(static_cast<std::uint64_t>(c));
        for (int p = 0; p < n; ++p)
            for (int l = 0; l < c; ++l) {
                std::vector<int> s = sel[p][l];
                std::sort(s.begin(), s.end());
                mix(static_cast<std::uint64_t>(s.size()));
                for (int q : s) mix(static_cast<std::uint64_t>(q));
            }
        return h;
    }

    /// Same selections regardless of the order inside each K_l(p).
    bool same_sets(const KSYGraph& o) const {
        if (n != o.n || c != o.c) return false;
        for (int p = 0; p < n; ++p)
            for (int l = 0; l < c; ++l) {
                auto a = sel[p][l], b = o.sel[p][l];
                std::sort(a.begin(), a.end());
                std::sort(b.begin(), b.end());
                if (a != b) return false;
            }
        return true;
    }

    friend bool operator==(const KSYGraph& a, const KSYGraph& b) {
        return a.n == b.n && a.k == b.k && a.c == b.c && a.sel == b.sel;
    }
};

/// Ranks of the points in each perturbed frame coordinate and along the axis of cone l.
struct ConeRanks {
    std::vector<std::vector<int>> frame;  // frame[i][p]
    std::vector<int> axis;                // axis[p]
    std::vector<std::vector<int>> sorted_frame;
    std::vector<int> sorted_axis;
};

inline std::vector<int> rank_by(int n, const std::vector<FrameKey>& keys, std::vector<int>& order) {
    order.resize(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return keys[a] < keys[b]; });
    std::vector<int> rank(n);
    for (int i = 0; i < n; ++i) rank[order[i]] = i;
    return rank;
}

inline ConeRanks cone_ranks(const ConeFamily& fam, int l, const std::vector<Point>& pts) {
    const int n = static_cast<int>(pts.size());
    ConeRanks cr;
    cr.frame.resize(fam.dim);
    cr.sorted_frame.resize(fam.dim);
    std::vector<FrameKey> keys(n);
    for (int i = 0; i < fam.dim; ++i) {
        for (int p = 0; p < n; ++p) keys[p] = frame_key(fam, l, i, pts[p], p);
        cr.frame[i] = rank_by(n, keys, cr.sorted_frame[i]);
    }
    for (int p = 0; p < n; ++p) keys[p] = axis_key(fam, l, pts[p], p);
    cr.axis = rank_by(n, keys, cr.sorted_axis);
    return cr;
}

/// Static k-SYG via one layered range tree per cone.
inline KSYGraph build_ksyg(const std::vector<Point>& pts, int k, const ConeFamily& fam) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    const int n = static_cast<int>(pts.size());
    KSYGraph g(n, k, fam.c());
    for (int l = 0; l < fam.c(); ++l) {
        ConeRanks cr = cone_ranks(fam, l, pts);
        LayeredRangeTree tree(cr.frame, cr.axis);
        std::vector<int> t(fam.dim);
        for (int p = 0; p < n; ++p) {
            for (int i = 0; i < fam.dim; ++i) t[i] = cr.frame[i][p] + 1;
            std::vector<const std::vector<int>*> lists;
            for (int v : tree.canonical(t)) lists.push_back(&tree.node_points(v));
            g.sel[p][l] = select_first_k(lists, k, [&](int a, int b) { return cr.axis[a] < cr.axis[b]; });
        }
    }
    return g;
}

/// Incident k-SYG neighbours of every point (each neighbour once).
inline std::vector<std::vector<int>> incident_neighbors(const KSYGraph& g) {
    std::vector<std::vector<int>> adj(g.n);
    for (int p = 0; p < g.n; ++p)
        for (int l = 0; l < g.c; ++l)
            for (int q : g.sel[p][l]) {
                adj[p].push_back(q);
                adj[q].push_back(p);
            }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
}

/// All k nearest neighbours, ascending by (squared distance, id), read off
/// the k-SYG edges.
inline std::vector<std::vector<int>> report_all_knn_static(const std::vector<Point>& pts, int k,
                                                           const ConeFamily& fam) {
    const int n = static_cast<int>(pts.size());
    if (k >= n) throw std::invalid_argument("k must be smaller than n");
    KSYGraph g = build_ksyg(pts, k, fam);
    auto adj = incident_neighbors(g);
    std::vector<std::vector<int>> out(n);
    for (int p = 0; p < n; ++p) {
        std::vector<std::pair<Rational, int>> e;
        for (int q : adj[p]) e.emplace_back(distance_sq(pts[p], pts[q]), q);
        std::sort(e.begin(), e.end());
        for (int i = 0; i < k && i < static_cast<int>(e.size()); ++i) out[p].push_back(e[i].second);
    }
    return out;
}

}  // namespace ksyg
