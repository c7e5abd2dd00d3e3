#pragma once

#include <algorithm>
#include <climits>
#include <memory>
#include <string>
#include <vector>

#include "ksyg/ksyg_static.hpp"
#include "ksyg/kinetic_sorted_list.hpp"
#include "ksyg/rank_range_tree.hpp"

namespace ksyg {

struct SelectionChange {
    bool add = false;
    int p = 0;
    int l = 0;
    int q = 0;
    friend bool operator==(const SelectionChange&, const SelectionChange&) = default;
};

struct GraphDelta {
    std::vector<SelectionChange> changes;
    bool empty() const { return changes.empty(); }
};

/// Applies a delta to a graph; selections are kept as sets (order is
/// restored by the caller when needed).
inline void apply_delta(KSYGraph& g, const GraphDelta& delta) {
    for (const auto& c : delta.changes) {
        auto& s = g.sel.at(c.p).at(c.l);
        if (c.add) s.push_back(c.q);
        else {
            auto it = std::find(s.begin(), s.end(), c.q);
            if (it == s.end()) throw std::logic_error("delta removes a missing selection");
            s.erase(it);
        }
    }
}

/// The d frame lists, the axis list and the rank-based range tree of one cone.
class ConeFrame {
public:
    struct Step {
        bool applied = false;
        int coord = 0;  // 0..d-1 frame, d axis
        int low = -1;   // ranked directly below `high` before the swap
        int high = -1;
    };

    ConeFrame(EventQueue& queue, const ConeFamily& fam, int l, int coord_base, const std::vector<Trajectory>& traj,
              int k, CertificateKind axis_kind = CertificateKind::x_order)
        : base_(coord_base), tree_(fam.dim, k) {
        const int d = fam.dim;
        const int n = static_cast<int>(traj.size());
        for (int i = 0; i <= d; ++i) {
            lists_.emplace_back(queue, coord_base + i, i < d ? CertificateKind::u_order : axis_kind);
            std::vector<std::pair<int, KineticKey>> elems;
            for (int p = 0; p < n; ++p)
                elems.emplace_back(p, i < d ? frame_kinetic_key(fam, l, i, traj[p]) : axis_kinetic_key(fam, l, traj[p]));
            lists_.back().assign(std::move(elems));
        }
        std::vector<std::vector<int>> ranks(d, std::vector<int>(n));
        std::vector<int> xr(n);
        for (int p = 0; p < n; ++p) {
            for (int i = 0; i < d; ++i) ranks[i][p] = lists_[i].position(p);
            xr[p] = lists_[d].position(p);
        }
        tree_.build(std::move(ranks), std::move(xr));
    }

    Step apply(const Event& ev) {
        Step st;
        st.coord = ev.coord - base_;
        auto sw = lists_.at(st.coord).apply(ev);
        st.applied = sw.applied;
        st.low = sw.second;
        st.high = sw.first;
        return st;
    }

    RankRangeTree& tree() { return tree_; }
    const RankRangeTree& tree() const { return tree_; }
    const KineticSortedList& list(int i) const { return lists_.at(i); }
    int lists() const { return static_cast<int>(lists_.size()); }

    std::uint64_t list_work() const {
        std::uint64_t w = 0;
        for (const auto& s : lists_) w += s.work();
        return w;
    }

private:
    int base_;
    std::vector<KineticSortedList> lists_;
    RankRangeTree tree_;
};

/// Kinetic k-Semi-Yao graph. Point ids are indices into the trajectory
/// vector. Queue coordinates coord_base .. coord_base + c(d+1) - 1 belong to it.
class KineticKSYG {
public:
    struct Counts {
        std::uint64_t u_events = 0, x_events = 0, external = 0, internal = 0, stale = 0;
    };

    KineticKSYG(EventQueue& queue, const ConeFamily& fam, const std::vector<Trajectory>& traj, int k,
                int coord_base = 0)
        : fam_(fam), n_(static_cast<int>(traj.size())), k_(k), base_(coord_base) {
        if (k < 1) throw std::invalid_argument("k must be at least 1");
        for (int l = 0; l < fam.c(); ++l) {
            auto cone = std::make_unique<Cone>();
            cone->frame = std::make_unique<ConeFrame>(queue, fam, l, coord_base + l * (fam.dim + 1), traj, k);
            cone->sel.assign(n_, {});
            cone->label.assign(n_, -1);
            cone->link.assign(n_, {});
            for (int w = 0; w < n_; ++w) relink(*cone, w);
            cones_.push_back(std::move(cone));
        }
    }

    int n() const { return n_; }
    int k() const { return k_; }
    const ConeFamily& family() const { return fam_; }
    int coord_begin() const { return base_; }
    int coord_end() const { return base_ + fam_.c() * (fam_.dim + 1); }
    bool owns(int coord) const { return coord >= coord_begin() && coord < coord_end(); }
    int cone_of(int coord) const { return (coord - base_) / (fam_.dim + 1); }
    const ConeFrame& frame(int l) const { return *cones_.at(l)->frame; }
    const Counts& counts() const { return counts_; }

    /// Selections of p in cone l, unordered.
    const std::vector<int>& selection(int p, int l) const { return cones_.at(l)->sel.at(p); }
    /// The stored k-th point of cone l for w, or -1 when C_l(w) holds fewer than k points.
    int label(int w, int l) const { return cones_.at(l)->label.at(w); }

    /// Current graph, each K_l(p) ascending along the cone axis.
    KSYGraph graph() const {
        KSYGraph g(n_, k_, fam_.c());
        for (int l = 0; l < fam_.c(); ++l) {
            const auto& xr = cones_[l]->frame->tree().xrank();
            for (int p = 0; p < n_; ++p) {
                auto s = cones_[l]->sel[p];
                std::sort(s.begin(), s.end(), [&](int a, int b) { return xr[a] < xr[b]; });
                g.sel[p][l] = std::move(s);
            }
        }
        return g;
    }

    GraphDelta handle(const Event& ev) {
        const int l = cone_of(ev.coord);
        Cone& cone = *cones_.at(l);
        auto st = cone.frame->apply(ev);
        GraphDelta delta;
        if (!st.applied) {
            ++counts_.stale;
            return delta;
        }
        if (st.coord < fam_.dim) {
            ++counts_.u_events;
            u_swap(cone, l, st.coord, st.low, st.high, delta);
        } else {
            ++counts_.x_events;
            x_swap(cone, l, st.low, st.high, delta);
        }
        if (delta.empty()) ++counts_.internal;
        else ++counts_.external;
        return delta;
    }

    std::uint64_t work() const {
        std::uint64_t w = work_;
        for (const auto& c : cones_) w += c->frame->tree().work() + c->frame->list_work();
        return w;
    }

    /// Internal bookkeeping agrees with the range tree: Link(w) is exactly
    /// the B side memberships of w and every L(B_j) holds (label, w) entries.
    bool consistent(std::string* why = nullptr) const {
        auto fail = [&](const std::string& m) {
            if (why) *why = m;
            return false;
        };
        for (int l = 0; l < fam_.c(); ++l) {
            const Cone& cone = *cones_[l];
            const RankRangeTree& t = cone.frame->tree();
            std::size_t entries = 0;
            for (int w = 0; w < n_; ++w) {
                auto keys = t.keys_of(w, Side::B);
                if (keys.size() != cone.link[w].size()) return fail("link size of " + std::to_string(w));
                for (std::size_t j = 0; j < keys.size(); ++j) {
                    const RankRangeTree::Pair* pr = t.find(keys[j]);
                    if (pr != cone.link[w][j]) return fail("link target of " + std::to_string(w));
                    if (!pr->by_label.count({cone.label[w], w})) return fail("label entry of " + std::to_string(w));
                }
                entries += keys.size();
            }
            std::size_t stored = 0;
            t.for_each_pair([&](RankRangeTree::Key, const RankRangeTree::Pair& pr) { stored += pr.by_label.size(); });
            std::size_t partial = 0;
            for (int w = 0; w < n_; ++w)
                for (const auto* pr : cone.link[w]) partial += !pr->complete();
            if (stored + partial != entries) return fail("stray label entries in cone " + std::to_string(l));
        }
        return true;
    }

    /// Test hook: overwrites one stored selection without touching certificates.
    void inject_fault(int p, int l, int q) {
        auto& s = cones_.at(l)->sel.at(p);
        if (s.empty()) s.push_back(q);
        else s.back() = q;
    }

private:
    struct Cone {
        std::unique_ptr<ConeFrame> frame;
        std::vector<std::vector<int>> sel;
        std::vector<int> label;
        std::vector<std::vector<RankRangeTree::Pair*>> link;
    };

    std::vector<int> select(const Cone& cone, int w) {
        const auto& xr = cone.frame->tree().xrank();
        const auto& link = cone.link[w];
        work_ += link.size();
        if (k_ == 1) {
            int best = -1;
            for (const auto* pr : link) {
                int c = pr->r.first();
                if (c >= 0 && (best < 0 || xr[c] < xr[best])) best = c;
            }
            return best < 0 ? std::vector<int>{} : std::vector<int>{best};
        }
        std::vector<const RankSet*> lists;
        for (const auto* pr : link)
            if (!pr->r.empty()) lists.push_back(&pr->r.items());
        work_ += k_;
        return select_first_k(lists, k_, RankLess{&xr});
    }

    void unlink(Cone& cone, int w) {
        for (auto* pr : cone.link[w]) pr->by_label.erase({cone.label[w], w});
        work_ += cone.link[w].size();
        cone.link[w].clear();
    }

    void relink(Cone& cone, int w) {
        RankRangeTree& t = cone.frame->tree();
        auto& link = cone.link[w];
        link.clear();
        for (auto key : t.keys_of(w, Side::B)) link.push_back(t.find(key));
        cone.sel[w] = select(cone, w);
        cone.label[w] = static_cast<int>(cone.sel[w].size()) == k_ ? cone.sel[w].back() : -1;
        for (auto* pr : link) pr->by_label.emplace(cone.label[w], w);
        work_ += link.size();
    }

    void relabel(Cone& cone, int w, int label) {
        for (auto* pr : cone.link[w]) {
            pr->by_label.erase({cone.label[w], w});
            pr->by_label.emplace(label, w);
        }
        work_ += cone.link[w].size();
        cone.label[w] = label;
    }

    static void diff(int w, int l, const std::vector<int>& before, const std::vector<int>& after, GraphDelta& delta) {
        for (int q : before)
            if (std::find(after.begin(), after.end(), q) == after.end()) delta.changes.push_back({false, w, l, q});
        for (int q : after)
            if (std::find(before.begin(), before.end(), q) == before.end()) delta.changes.push_back({true, w, l, q});
    }

    // Frame coordinate i: `a` was directly below `b`. Only C_l(a) and C_l(b) change.
    void u_swap(Cone& cone, int l, int i, int a, int b, GraphDelta& delta) {
        std::vector<int> before_a = cone.sel[a], before_b = cone.sel[b];
        unlink(cone, a);
        unlink(cone, b);
        cone.frame->tree().swap_frame(i, a, b);
        relink(cone, a);
        relink(cone, b);
        diff(a, l, before_a, cone.sel[a], delta);
        diff(b, l, before_b, cone.sel[b], delta);
    }

    // Axis: `a` was directly below `b`; afterwards b precedes a.
    void x_swap(Cone& cone, int l, int a, int b, GraphDelta& delta) {
        RankRangeTree& t = cone.frame->tree();
        t.swap_axis(a, b);
        struct Relabel {
            int w, to;
            bool replaces;
        };
        std::vector<Relabel> todo;
        auto scan = [&](int member, int old_label, int new_label, bool replaces) {
            for (auto key : t.keys_of(member, Side::R)) {
                const RankRangeTree::Pair* pr = t.find(key);
                ++work_;
                if (!pr->r.within_first_k(member)) continue;
                for (auto it = pr->by_label.lower_bound({old_label, INT_MIN});
                     it != pr->by_label.end() && it->first == old_label; ++it) {
                    todo.push_back({it->second, new_label, replaces});
                    ++work_;
                }
            }
        };
        // Points whose k-th was a and that see b: b replaces a.
        scan(b, a, b, true);
        // Points whose k-th was b and that see a: same set, a becomes the k-th.
        if (k_ > 1) scan(a, b, a, false);
        for (const auto& r : todo) {
            relabel(cone, r.w, r.to);
            if (r.replaces) {
                auto& s = cone.sel[r.w];
                *std::find(s.begin(), s.end(), a) = b;
                delta.changes.push_back({false, r.w, l, a});
                delta.changes.push_back({true, r.w, l, b});
            }
        }
    }

    const ConeFamily& fam_;
    int n_;
    int k_;
    int base_;
    std::vector<std::unique_ptr<Cone>> cones_;
    Counts counts_;
    std::uint64_t work_ = 0;
};

}  // namespace ksyg
