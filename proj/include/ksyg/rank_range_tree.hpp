#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ksyg {

enum class Side { B, R };

/// Orders point ids by a shared rank array.
struct RankLess {
    const std::vector<int>* rank = nullptr;
    bool operator()(int a, int b) const { return (*rank)[a] < (*rank)[b]; }
};

using RankSet = std::set<int, RankLess>;

/// Rank-ordered set with a cursor on its k-th smallest element.
class KthSet {
public:
    KthSet(const std::vector<int>* rank, int k) : set_(RankLess{rank}), k_(k), kth_(set_.end()) {}
    KthSet(const KthSet&) = delete;
    KthSet& operator=(const KthSet&) = delete;

    void insert(int x) {
        auto [it, fresh] = set_.insert(x);
        if (!fresh) throw std::invalid_argument("point already in set");
        const int s = size();
        if (s < k_) kth_ = set_.end();
        else if (s == k_) kth_ = std::prev(set_.end());
        else if (set_.key_comp()(x, *kth_)) --kth_;
    }

    void erase(int x) {
        auto it = set_.find(x);
        if (it == set_.end() || *it != x) throw std::invalid_argument("point not in set");
        if (size() <= k_) {
            set_.erase(it);
            kth_ = set_.end();
            return;
        }
        if (!set_.key_comp()(*kth_, x)) ++kth_;
        set_.erase(it);
    }

    /// The k-th smallest, or -1 when fewer than k elements.
    int kth() const { return kth_ == set_.end() ? -1 : *kth_; }
    int first() const { return set_.empty() ? -1 : *set_.begin(); }
    bool contains(int x) const {
        auto it = set_.find(x);
        return it != set_.end() && *it == x;
    }
    /// x is a member ranked among the first k.
    bool within_first_k(int x) const { return contains(x) && (kth_ == set_.end() || !set_.key_comp()(*kth_, x)); }
    int size() const { return static_cast<int>(set_.size()); }
    bool empty() const { return set_.empty(); }
    const RankSet& items() const { return set_; }

private:
    RankSet set_;
    int k_;
    RankSet::iterator kth_;
};

/// Rank-based range tree for one cone. Each frame coordinate i gets a fixed
/// perfect binary tree over ranks 0..N-1; a pair is a d-tuple of internal
/// nodes (v_1..v_d). B holds the points whose rank leaf lies left of every
/// v_i, R those lying right of every v_i. Both sides are ordered by the x rank.
class RankRangeTree {
public:
    using Key = std::uint64_t;

    struct Pair {
        Pair(const std::vector<int>* xr, int k) : b(RankLess{xr}), r(xr, k) {}
        RankSet b;
        KthSet r;
        std::set<std::pair<int, int>> by_label;  // (label, id) for members of b; filled by the engine
        bool complete() const { return !b.empty() && !r.empty(); }
        bool vacant() const { return b.empty() && r.empty() && by_label.empty(); }
    };

    struct Membership {
        Key key;
        Side side;
        int point;
        bool gained;
    };
    struct KthChange {
        Key key;
        int before, after;
    };
    struct Delta {
        std::vector<Membership> membership;
        std::vector<KthChange> kth;
    };

    RankRangeTree(int dim, int k) : dim_(dim), k_(k) {
        if (dim < 1) throw std::invalid_argument("dimension must be positive");
        if (k < 1) throw std::invalid_argument("k must be at least 1");
    }
    RankRangeTree(const RankRangeTree&) = delete;
    RankRangeTree& operator=(const RankRangeTree&) = delete;

    /// frame_rank[i][p] and xrank[p] are permutations of 0..n-1.
    void build(std::vector<std::vector<int>> frame_rank, std::vector<int> xrank) {
        if (static_cast<int>(frame_rank.size()) != dim_) throw std::invalid_argument("rank table dimension mismatch");
        frame_ = std::move(frame_rank);
        xrank_ = std::move(xrank);
        n_ = static_cast<int>(xrank_.size());
        levels_ = 1;
        while ((1 << levels_) < n_) ++levels_;
        if (levels_ * dim_ > 64) throw std::invalid_argument("too many points for packed pair keys");
        pairs_.clear();
        for (int p = 0; p < n_; ++p) {
            for (Key key : keys_of(p, Side::B)) slot(key).b.insert(p);
            for (Key key : keys_of(p, Side::R)) slot(key).r.insert(p);
        }
    }

    int dim() const { return dim_; }
    int size() const { return n_; }
    int k() const { return k_; }
    /// Tree height per coordinate, ceil(log2 n) with a floor of 1.
    int levels() const { return levels_; }
    const std::vector<int>& xrank() const { return xrank_; }
    const std::vector<int>& frame_rank(int i) const { return frame_[i]; }

    /// Every key whose `s` side contains p, including pairs whose other side is empty.
    std::vector<Key> keys_of(int p, Side s) const {
        std::vector<Key> keys{0};
        const int bits = levels_;
        for (int i = 0; i < dim_; ++i) {
            std::vector<Key> nodes;
            for (Key v = (Key(1) << levels_) + frame_[i][p]; v > 1; v >>= 1)
                if (((v & 1) == 0) == (s == Side::B)) nodes.push_back(v >> 1);
            std::vector<Key> next;
            next.reserve(keys.size() * nodes.size());
            for (Key key : keys)
                for (Key v : nodes) next.push_back(key | (v << (i * bits)));
            keys.swap(next);
        }
        std::sort(keys.begin(), keys.end());
        return keys;
    }

    /// Pairs of the decomposition (both sides nonempty) whose side `s` holds p.
    std::vector<Key> pairs_containing(int p, Side s) const {
        if (p < 0 || p >= n_) throw std::out_of_range("unknown point");
        std::vector<Key> out;
        for (Key key : keys_of(p, s)) {
            const Pair* pr = find(key);
            if (pr && pr->complete()) out.push_back(key);
        }
        return out;
    }

    Pair* find(Key key) {
        auto it = pairs_.find(key);
        return it == pairs_.end() ? nullptr : &it->second;
    }
    const Pair* find(Key key) const {
        auto it = pairs_.find(key);
        return it == pairs_.end() ? nullptr : &it->second;
    }

    template <class F>
    void for_each_pair(F&& f) const {
        for (const auto& [key, pr] : pairs_)
            if (pr.complete()) f(key, pr);
    }

    std::size_t pair_count() const {
        std::size_t c = 0;
        for_each_pair([&](Key, const Pair&) { ++c; });
        return c;
    }

    /// p sits directly below q in coordinate i; afterwards q is below p.
    Delta swap_frame(int i, int p, int q) {
        if (i < 0 || i >= dim_) throw std::out_of_range("coordinate out of range");
        if (frame_[i][q] != frame_[i][p] + 1) throw std::invalid_argument("non-adjacent swap");
        Delta delta;
        std::vector<std::pair<Key, int>> kth_before;
        std::vector<Key> old_keys[2][2], new_keys[2][2];
        const int who[2] = {p, q};
        for (int a = 0; a < 2; ++a)
            for (int s = 0; s < 2; ++s) old_keys[a][s] = keys_of(who[a], s == 0 ? Side::B : Side::R);
        std::swap(frame_[i][p], frame_[i][q]);
        for (int a = 0; a < 2; ++a)
            for (int s = 0; s < 2; ++s) new_keys[a][s] = keys_of(who[a], s == 0 ? Side::B : Side::R);
        auto note_kth = [&](Key key, Pair& pr) {
            for (const auto& kb : kth_before)
                if (kb.first == key) return;
            kth_before.emplace_back(key, pr.r.kth());
        };
        for (int a = 0; a < 2; ++a)
            for (int s = 0; s < 2; ++s) {
                std::vector<Key> lost;
                std::set_difference(old_keys[a][s].begin(), old_keys[a][s].end(), new_keys[a][s].begin(),
                                    new_keys[a][s].end(), std::back_inserter(lost));
                for (Key key : lost) {
                    Pair& pr = pairs_.at(key);
                    if (s == 0) pr.b.erase(who[a]);
                    else {
                        note_kth(key, pr);
                        pr.r.erase(who[a]);
                    }
                    delta.membership.push_back({key, s == 0 ? Side::B : Side::R, who[a], false});
                    ++work_;
                }
            }
        for (int a = 0; a < 2; ++a)
            for (int s = 0; s < 2; ++s) {
                std::vector<Key> gained;
                std::set_difference(new_keys[a][s].begin(), new_keys[a][s].end(), old_keys[a][s].begin(),
                                    old_keys[a][s].end(), std::back_inserter(gained));
                for (Key key : gained) {
                    Pair& pr = slot(key);
                    if (s == 0) pr.b.insert(who[a]);
                    else {
                        note_kth(key, pr);
                        pr.r.insert(who[a]);
                    }
                    delta.membership.push_back({key, s == 0 ? Side::B : Side::R, who[a], true});
                    ++work_;
                }
            }
        for (const auto& [key, before] : kth_before) {
            Pair* pr = find(key);
            int after = pr->r.kth();
            if (after != before) delta.kth.push_back({key, before, after});
        }
        for (const auto& m : delta.membership)
            if (!m.gained) {
                auto it = pairs_.find(m.key);
                if (it != pairs_.end() && it->second.vacant()) pairs_.erase(it);
            }
        return delta;
    }

    /// p sits directly below q along the axis; afterwards q is below p.
    /// Memberships stay; only the order inside sets holding both changes.
    Delta swap_axis(int p, int q) {
        if (xrank_[q] != xrank_[p] + 1) throw std::invalid_argument("non-adjacent swap");
        Delta delta;
        std::vector<Pair*> both_b, both_r;
        for (Side s : {Side::B, Side::R}) {
            std::vector<Key> kp = keys_of(p, s), kq = keys_of(q, s), common;
            std::set_intersection(kp.begin(), kp.end(), kq.begin(), kq.end(), std::back_inserter(common));
            for (Key key : common) {
                Pair& pr = pairs_.at(key);
                ++work_;
                if (s == Side::B) {
                    pr.b.erase(p);
                    pr.b.erase(q);
                    both_b.push_back(&pr);
                } else {
                    delta.kth.push_back({key, pr.r.kth(), -1});
                    pr.r.erase(p);
                    pr.r.erase(q);
                    both_r.push_back(&pr);
                }
            }
        }
        std::swap(xrank_[p], xrank_[q]);
        for (Pair* pr : both_b) {
            pr->b.insert(p);
            pr->b.insert(q);
        }
        std::size_t w = 0;
        for (std::size_t j = 0; j < both_r.size(); ++j) {
            both_r[j]->r.insert(p);
            both_r[j]->r.insert(q);
            delta.kth[j].after = both_r[j]->r.kth();
            if (delta.kth[j].after != delta.kth[j].before) delta.kth[w++] = delta.kth[j];
        }
        delta.kth.resize(w);
        return delta;
    }

    std::uint64_t work() const { return work_; }

private:
    Pair& slot(Key key) {
        auto it = pairs_.find(key);
        if (it == pairs_.end()) it = pairs_.emplace(std::piecewise_construct, std::forward_as_tuple(key),
                                                    std::forward_as_tuple(&xrank_, k_)).first;
        return it->second;
    }

    int dim_;
    int k_;
    int n_ = 0;
    int levels_ = 1;
    std::vector<std::vector<int>> frame_;
    std::vector<int> xrank_;
    std::unordered_map<Key, Pair> pairs_;
    std::uint64_t work_ = 0;
};

}  // namespace ksyg
