#pragma once

#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "ksyg/kinetic_tournament.hpp"
#include "ksyg/ksyg_kinetic.hpp"

namespace ksyg {

struct NeighborChange {
    int p = 0;
    std::vector<int> before, after;
};

/// All k nearest neighbours on top of the kinetic k-SYG: per point a
/// tournament over incident edges (k = 1) or a kinetic sorted list of them
/// (k > 1), keyed by squared distance with ties to the smaller id.
class AllKNN {
public:
    AllKNN(EventQueue& queue, const std::vector<Trajectory>& traj, const KSYGraph& g, int coord_base)
        : traj_(traj), k_(g.k), base_(coord_base), mult_(traj.size()) {
        const int n = static_cast<int>(traj.size());
        for (int p = 0; p < n; ++p) {
            if (k_ == 1) tt_.emplace_back(queue, base_ + p);
            else lists_.emplace_back(queue, base_ + p, CertificateKind::edge_order);
        }
        GraphDelta all;
        for (int p = 0; p < g.n; ++p)
            for (int l = 0; l < g.c; ++l)
                for (int q : g.sel[p][l]) all.changes.push_back({true, p, l, q});
        apply(all);
    }

    int k() const { return k_; }
    int coord_begin() const { return base_; }
    int coord_end() const { return base_ + static_cast<int>(traj_.size()); }
    bool owns(int coord) const { return coord >= coord_begin() && coord < coord_end(); }

    /// Mirrors graph changes into the containers of both endpoints.
    std::vector<NeighborChange> apply(const GraphDelta& delta) {
        std::vector<int> touched;
        for (const auto& c : delta.changes) {
            touched.push_back(c.p);
            touched.push_back(c.q);
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        std::vector<std::vector<int>> before;
        for (int p : touched) before.push_back(neighbors(p));
        for (const auto& c : delta.changes) {
            if (c.add) {
                bump(c.p, c.q);
                bump(c.q, c.p);
            } else {
                drop(c.p, c.q);
                drop(c.q, c.p);
            }
        }
        std::vector<NeighborChange> out;
        for (std::size_t i = 0; i < touched.size(); ++i) {
            auto now = neighbors(touched[i]);
            if (now != before[i]) out.push_back({touched[i], std::move(before[i]), std::move(now)});
        }
        return out;
    }

    /// Handles a fired container certificate.
    std::vector<NeighborChange> handle(const Event& ev) {
        const int p = ev.coord - base_;
        auto before = neighbors(p);
        if (k_ == 1) tt_.at(p).apply(ev);
        else lists_.at(p).apply(ev);
        auto now = neighbors(p);
        if (now == before) return {};
        return {NeighborChange{p, std::move(before), std::move(now)}};
    }

    /// The (up to) k nearest of p, ascending by squared distance then id.
    std::vector<int> neighbors(int p) const {
        if (k_ == 1) {
            if (tt_.at(p).empty()) return {};
            return {tt_[p].winner()};
        }
        const auto& order = lists_.at(p).order();
        return std::vector<int>(order.begin(), order.begin() + std::min<std::size_t>(k_, order.size()));
    }

    /// p_k, or -1 when p has fewer than k incident neighbours.
    int kth_nearest(int p) const {
        auto nb = neighbors(p);
        return static_cast<int>(nb.size()) == k_ ? nb.back() : -1;
    }

    /// Container contents of p (incident k-SYG neighbours, each once).
    std::vector<int> elements(int p) const {
        std::vector<int> out;
        for (const auto& [q, m] : mult_.at(p)) out.push_back(q);
        return out;
    }

    /// Closest pair (p < q) just after the current time, ties by ids.
    std::optional<std::pair<int, int>> closest_pair(const Instant& now) const {
        std::optional<std::pair<int, int>> best;
        Polynomial best_d;
        for (int p = 0; p < static_cast<int>(traj_.size()); ++p) {
            auto nb = neighbors(p);
            if (nb.empty()) continue;
            std::pair<int, int> cand{std::min(p, nb[0]), std::max(p, nb[0])};
            Polynomial d = distance_sq_polynomial(traj_[p], traj_[nb[0]]);
            if (!best) {
                best = cand;
                best_d = d;
                continue;
            }
            int c = compare_after(KineticKey{{d}, 0}, KineticKey{{best_d}, 0}, now);
            if (c < 0 || (c == 0 && cand < *best)) {
                best = cand;
                best_d = std::move(d);
            }
        }
        return best;
    }

    std::uint64_t work() const {
        std::uint64_t w = 0;
        for (const auto& t : tt_) w += t.work();
        for (const auto& s : lists_) w += s.work();
        return w;
    }

private:
    KineticKey key(int p, int q) const { return KineticKey{{distance_sq_polynomial(traj_[p], traj_[q])}, q}; }

    void bump(int p, int q) {
        if (++mult_[p][q] > 1) return;
        if (k_ == 1) tt_[p].insert(q, key(p, q));
        else lists_[p].insert(q, key(p, q));
    }

    void drop(int p, int q) {
        auto it = mult_[p].find(q);
        if (it == mult_[p].end()) throw std::logic_error("edge not mirrored");
        if (--it->second > 0) return;
        mult_[p].erase(it);
        if (k_ == 1) tt_[p].erase(q);
        else lists_[p].erase(q);
    }

    const std::vector<Trajectory>& traj_;
    int k_;
    int base_;
    std::vector<std::map<int, int>> mult_;
    std::vector<KineticTournament> tt_;
    std::vector<KineticSortedList> lists_;
};

}  // namespace ksyg
