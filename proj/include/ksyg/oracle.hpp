#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "ksyg/ksyg_static.hpp"

namespace ksyg {

/// Brute-force k-SYG: bucket every other point by cone, sort by axis key.
inline KSYGraph oracle_ksyg(const std::vector<Point>& pts, int k, const ConeFamily& fam) {
    const int n = static_cast<int>(pts.size());
    KSYGraph g(n, k, fam.c());
    for (int p = 0; p < n; ++p) {
        std::vector<std::vector<int>> bucket(fam.c());
        for (int q = 0; q < n; ++q)
            if (q != p) bucket[locate_cone(fam, pts[p], p, pts[q], q)].push_back(q);
        for (int l = 0; l < fam.c(); ++l) {
            auto& b = bucket[l];
            std::vector<std::pair<FrameKey, int>> keyed;
            for (int q : b) keyed.emplace_back(axis_key(fam, l, pts[q], q), q);
            std::sort(keyed.begin(), keyed.end(),
                      [](const auto& x, const auto& y) { return x.first < y.first; });
            for (int i = 0; i < k && i < static_cast<int>(keyed.size()); ++i) g.sel[p][l].push_back(keyed[i].second);
        }
    }
    return g;
}

/// Brute-force K_l(p) for every p in a single cone l.
inline std::vector<std::vector<int>> oracle_cone_selections(const std::vector<Point>& pts, int k, const ConeFamily& fam,
                                                            int l) {
    const int n = static_cast<int>(pts.size());
    std::vector<FrameKey> ax(n);
    for (int q = 0; q < n; ++q) ax[q] = axis_key(fam, l, pts[q], q);
    std::vector<std::vector<int>> out(n);
    for (int p = 0; p < n; ++p) {
        std::vector<int> members;
        for (int q = 0; q < n; ++q)
            if (q != p && in_cone(fam, l, pts[p], p, pts[q], q)) members.push_back(q);
        std::sort(members.begin(), members.end(), [&](int a, int b) { return ax[a] < ax[b]; });
        if (static_cast<int>(members.size()) > k) members.resize(k);
        out[p] = std::move(members);
    }
    return out;
}

/// Brute-force k nearest neighbours, ascending by (squared distance, id).
inline std::vector<std::vector<int>> oracle_knn(const std::vector<Point>& pts, int k) {
    const int n = static_cast<int>(pts.size());
    if (k >= n) throw std::invalid_argument("k must be smaller than n");
    std::vector<std::vector<int>> out(n);
    for (int p = 0; p < n; ++p) {
        std::vector<std::pair<Rational, int>> d;
        for (int q = 0; q < n; ++q)
            if (q != p) d.emplace_back(distance_sq(pts[p], pts[q]), q);
        std::partial_sort(d.begin(), d.begin() + k, d.end());
        for (int i = 0; i < k; ++i) out[p].push_back(d[i].second);
    }
    return out;
}

/// Points p with |pq| <= |p p_k|, p_k the k-th nearest of p inside P.
inline std::vector<int> oracle_rknn(const std::vector<Point>& pts, const Point& q, int k) {
    auto knn = oracle_knn(pts, k);
    std::vector<int> out;
    for (int p = 0; p < static_cast<int>(pts.size()); ++p)
        if (distance_sq(pts[p], q) <= distance_sq(pts[p], pts[knn[p].back()])) out.push_back(p);
    return out;
}

/// Squared distance from each point to its nearest neighbour.
inline std::vector<Rational> oracle_nn_distance_sq(const std::vector<Point>& pts) {
    const int n = static_cast<int>(pts.size());
    std::vector<Rational> out(n);
    for (int p = 0; p < n; ++p) {
        bool first = true;
        for (int q = 0; q < n; ++q) {
            if (q == p) continue;
            Rational d = distance_sq(pts[p], pts[q]);
            if (first || d < out[p]) out[p] = d;
            first = false;
        }
    }
    return out;
}

/// Closest pair (p < q) with the smallest squared distance, ties by ids.
inline std::pair<int, int> oracle_closest_pair(const std::vector<Point>& pts) {
    const int n = static_cast<int>(pts.size());
    if (n < 2) throw std::invalid_argument("need two points");
    std::pair<int, int> best{0, 1};
    Rational bd = distance_sq(pts[0], pts[1]);
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
            Rational d = distance_sq(pts[p], pts[q]);
            if (d < bd) {
                bd = d;
                best = {p, q};
            }
        }
    return best;
}

}  // namespace ksyg
