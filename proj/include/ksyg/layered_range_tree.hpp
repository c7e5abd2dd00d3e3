#pragma once

#include <algorithm>
#include <queue>
#include <vector>

namespace ksyg {

/// Static d-level range tree over integer ranks for dominance queries
/// "rank_i(q) >= t_i for every i". Level-d nodes keep their points sorted by
/// an extra x rank.
class LayeredRangeTree {
    struct Node {
        int min_r = 0, max_r = 0;
        int left = -1, right = -1;
        int assoc = -1;            // root of the next level, or -1 at the last level
        std::vector<int> members;  // last level only, ascending x rank
    };

public:
    LayeredRangeTree() = default;

    /// ranks[i][p]: rank of point p in coordinate i; xrank[p]: rank along the axis.
    LayeredRangeTree(std::vector<std::vector<int>> ranks, std::vector<int> xrank)
        : ranks_(std::move(ranks)), xrank_(std::move(xrank)) {
        const int n = static_cast<int>(xrank_.size());
        if (n == 0 || ranks_.empty()) return;
        std::vector<int> pts(n);
        for (int i = 0; i < n; ++i) pts[i] = i;
        root_ = build(0, std::move(pts));
    }

    int size() const { return static_cast<int>(xrank_.size()); }
    int levels() const { return static_cast<int>(ranks_.size()); }

    /// Last-level nodes whose point sets partition {q : rank_i(q) >= min_rank[i] for all i}.
    std::vector<int> canonical(const std::vector<int>& min_rank) const {
        std::vector<int> out;
        if (root_ >= 0) query(root_, 0, min_rank, out);
        return out;
    }

    const std::vector<int>& node_points(int id) const { return nodes_[id].members; }
    int node_count() const { return static_cast<int>(nodes_.size()); }

private:
    int build(int level, std::vector<int> pts) {
        const std::vector<int>& r = ranks_[level];
        std::sort(pts.begin(), pts.end(), [&](int a, int b) { return r[a] < r[b]; });
        int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        nodes_[id].min_r = r[pts.front()];
        nodes_[id].max_r = r[pts.back()];
        if (level + 1 < levels()) {
            int a = build(level + 1, pts);
            nodes_[id].assoc = a;
        } else {
            std::vector<int> m = pts;
            std::sort(m.begin(), m.end(), [&](int a, int b) { return xrank_[a] < xrank_[b]; });
            nodes_[id].members = std::move(m);
        }
        if (pts.size() > 1) {
            std::size_t half = pts.size() / 2;
            std::vector<int> lo(pts.begin(), pts.begin() + half), hi(pts.begin() + half, pts.end());
            int l = build(level, std::move(lo));
            nodes_[id].left = l;
            int h = build(level, std::move(hi));
            nodes_[id].right = h;
        }
        return id;
    }

    void query(int v, int level, const std::vector<int>& t, std::vector<int>& out) const {
        const Node& node = nodes_[v];
        if (node.max_r < t[level]) return;
        if (node.min_r >= t[level]) {
            if (node.assoc >= 0) query(node.assoc, level + 1, t, out);
            else out.push_back(v);
            return;
        }
        query(node.left, level, t, out);
        query(node.right, level, t, out);
    }

    std::vector<std::vector<int>> ranks_;
    std::vector<int> xrank_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

/// The k smallest elements (by `less`) of the union of ascending ranges,
/// ascending. Binary-heap merge; works for any container with forward iterators.
template <class Container, class Less>
std::vector<typename Container::value_type> select_first_k(const std::vector<const Container*>& lists, int k,
                                                           Less less) {
    using It = typename Container::const_iterator;
    struct Cursor {
        It it, end;
    };
    auto greater = [&](const Cursor& a, const Cursor& b) { return less(*b.it, *a.it); };
    std::priority_queue<Cursor, std::vector<Cursor>, decltype(greater)> heap(greater);
    for (const Container* c : lists)
        if (c->begin() != c->end()) heap.push(Cursor{c->begin(), c->end()});
    std::vector<typename Container::value_type> out;
    while (static_cast<int>(out.size()) < k && !heap.empty()) {
        Cursor cur = heap.top();
        heap.pop();
        out.push_back(*cur.it);
        if (++cur.it != cur.end) heap.push(cur);
    }
    return out;
}

template <class Container>
std::vector<typename Container::value_type> select_first_k(const std::vector<const Container*>& lists, int k) {
    using T = typename Container::value_type;
    return select_first_k(lists, k, [](const T& a, const T& b) { return a < b; });
}

}  // namespace ksyg
