#pragma once

#include <algorithm>
#include <memory>
#include <numbers>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "ksyg/kinetic_tournament.hpp"
#include "ksyg/ksyg_kinetic.hpp"

namespace ksyg {

/// Cone angle used for a (1+eps) guarantee. Tunable; the bound is checked
/// empirically against the nearest-neighbour oracle.
inline double approx_theta(double epsilon) {
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    return std::min(std::numbers::pi / 3, epsilon / 2);
}

struct ApproxChange {
    int p = 0;
    int before = -1, after = -1;
};

/// Kinetic (1+eps)-nearest neighbours from the RNN graph: in every pair
/// (B_i, R_i) of cone l the edge joins the max-x_l point b_i of B_i to the
/// min-x_l point r_i of R_i. N_l(w) collects r_i over pairs with b_i = w,
/// ordered by x_l; its head n_l(w) enters a tournament KSL(w) over cones.
class ApproxNN {
public:
    /// fam should come from build_cone_family(d, approx_theta(epsilon)).
    /// Queue coordinates coord_base .. coord_end() - 1 belong to it.
    ApproxNN(EventQueue& queue, const ConeFamily& fam, const std::vector<Trajectory>& traj, double epsilon,
             int coord_base)
        : fam_(fam), traj_(traj), eps_(epsilon), n_(static_cast<int>(traj.size())), base_(coord_base) {
        const int c = fam_.c();
        ksl_base_ = base_ + c * (fam_.dim + 1);
        for (int l = 0; l < c; ++l) {
            auto cone = std::make_unique<Cone>();
            cone->frame = std::make_unique<ConeFrame>(queue, fam_, l, base_ + l * (fam_.dim + 1), traj_, 1,
                                                      CertificateKind::approx_axis);
            const std::vector<int>* xr = &cone->frame->tree().xrank();
            cone->nbr.assign(n_, std::multiset<int, RankLess>(RankLess{xr}));
            cones_.push_back(std::move(cone));
        }
        heads_.assign(n_, std::vector<int>(c, -1));
        for (int w = 0; w < n_; ++w) ksl_.emplace_back(queue, ksl_base_ + w);
        for (int l = 0; l < c; ++l) {
            Cone& cone = *cones_[l];
            cone.frame->tree().for_each_pair([&](RankRangeTree::Key key, const RankRangeTree::Pair& pr) {
                Edge e{*pr.b.rbegin(), pr.r.first()};
                cone.edges.emplace(key, e);
                cone.nbr[e.b].insert(e.r);
            });
            for (int w = 0; w < n_; ++w) refresh_head(l, w);
        }
    }

    int n() const { return n_; }
    double epsilon() const { return eps_; }
    const ConeFamily& family() const { return fam_; }
    int coord_begin() const { return base_; }
    int coord_end() const { return ksl_base_ + n_; }
    bool owns(int coord) const { return coord >= coord_begin() && coord < coord_end(); }

    /// q-hat for p, or -1 when p has no RNN edge (n = 1).
    int approx_nn(int p) const {
        const auto& t = ksl_.at(p);
        if (t.empty()) return -1;
        return heads_[p][t.winner()];
    }

    /// n_l(w), or -1 when N_l(w) is empty.
    int head(int w, int l) const { return heads_.at(w).at(l); }

    /// Distinct RNN edges (b, r) of cone l.
    std::vector<std::pair<int, int>> edges(int l) const {
        std::vector<std::pair<int, int>> out;
        for (const auto& [key, e] : cones_.at(l)->edges) out.emplace_back(e.b, e.r);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Number of pair edges in cone l incident to w (with multiplicity).
    int degree(int w, int l) const {
        int deg = 0;
        for (const auto& [key, e] : cones_.at(l)->edges) deg += (e.b == w) + (e.r == w);
        return deg;
    }

    const ConeFrame& frame(int l) const { return *cones_.at(l)->frame; }

    std::vector<ApproxChange> handle(const Event& ev) {
        if (ev.coord >= ksl_base_) {
            const int w = ev.coord - ksl_base_;
            int was = approx_nn(w);
            ksl_.at(w).apply(ev);
            int now = approx_nn(w);
            if (was == now) return {};
            return {ApproxChange{w, was, now}};
        }
        const int l = (ev.coord - base_) / (fam_.dim + 1);
        Cone& cone = *cones_.at(l);
        auto st = cone.frame->apply(ev);
        if (!st.applied) {
            ++stale_;
            return {};
        }
        const int p = st.low, q = st.high;
        RankRangeTree& tree = cone.frame->tree();
        std::vector<int> owners;
        auto unlink = [&](RankRangeTree::Key key) {
            auto it = cone.edges.find(key);
            if (it == cone.edges.end()) return;
            owners.push_back(it->second.b);
            cone.nbr[it->second.b].erase(cone.nbr[it->second.b].find(it->second.r));
            cone.edges.erase(it);
            ++work_;
        };
        // Edges through p or q leave before x ranks change; pairs that p or q
        // join during a u-swap keep valid x ranks and are unlinked afterwards.
        auto keys = touching(tree, p, q);
        for (auto key : keys) unlink(key);
        if (st.coord < fam_.dim) tree.swap_frame(st.coord, p, q);
        else tree.swap_axis(p, q);
        auto after = touching(tree, p, q);
        for (auto key : after) unlink(key);
        keys.insert(keys.end(), after.begin(), after.end());
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        for (auto key : keys) {
            const RankRangeTree::Pair* pr = tree.find(key);
            if (!pr || !pr->complete()) continue;
            Edge e{*pr->b.rbegin(), pr->r.first()};
            cone.edges.emplace(key, e);
            cone.nbr[e.b].insert(e.r);
            owners.push_back(e.b);
            ++work_;
        }
        std::sort(owners.begin(), owners.end());
        owners.erase(std::unique(owners.begin(), owners.end()), owners.end());
        std::vector<ApproxChange> out;
        for (int w : owners) {
            int was = approx_nn(w);
            refresh_head(l, w);
            int now = approx_nn(w);
            if (was != now) out.push_back({w, was, now});
        }
        return out;
    }

    std::uint64_t stale() const { return stale_; }

    std::uint64_t work() const {
        std::uint64_t w = work_;
        for (const auto& c : cones_) w += c->frame->tree().work() + c->frame->list_work();
        for (const auto& t : ksl_) w += t.work();
        return w;
    }

    /// Edges match the pairs and every head is the x_l-minimum of its set.
    bool consistent(std::string* why = nullptr) const {
        auto fail = [&](const std::string& m) {
            if (why) *why = m;
            return false;
        };
        for (int l = 0; l < fam_.c(); ++l) {
            const Cone& cone = *cones_[l];
            std::vector<std::multiset<int>> want(n_);
            std::size_t complete = 0;
            bool ok = true;
            cone.frame->tree().for_each_pair([&](RankRangeTree::Key key, const RankRangeTree::Pair& pr) {
                ++complete;
                auto it = cone.edges.find(key);
                if (it == cone.edges.end() || it->second.b != *pr.b.rbegin() || it->second.r != pr.r.first()) ok = false;
                want[*pr.b.rbegin()].insert(pr.r.first());
            });
            if (!ok || complete != cone.edges.size()) return fail("edges of cone " + std::to_string(l));
            for (int w = 0; w < n_; ++w) {
                std::multiset<int> got(cone.nbr[w].begin(), cone.nbr[w].end());
                if (got != want[w]) return fail("N_l of " + std::to_string(w));
                int h = cone.nbr[w].empty() ? -1 : *cone.nbr[w].begin();
                if (h != heads_[w][l]) return fail("head of " + std::to_string(w));
            }
        }
        return true;
    }

private:
    struct Edge {
        int b, r;
    };
    struct Cone {
        std::unique_ptr<ConeFrame> frame;
        std::unordered_map<RankRangeTree::Key, Edge> edges;  // complete pairs only
        std::vector<std::multiset<int, RankLess>> nbr;       // N_l(w), ascending x_l
    };

    static std::vector<RankRangeTree::Key> touching(const RankRangeTree& tree, int p, int q) {
        std::vector<RankRangeTree::Key> keys;
        for (int x : {p, q})
            for (Side s : {Side::B, Side::R}) {
                auto k = tree.keys_of(x, s);
                keys.insert(keys.end(), k.begin(), k.end());
            }
        return keys;
    }

    void refresh_head(int l, int w) {
        const auto& set = cones_[l]->nbr[w];
        int h = set.empty() ? -1 : *set.begin();
        if (h == heads_[w][l]) return;
        auto& t = ksl_[w];
        if (heads_[w][l] >= 0) t.erase(l);
        heads_[w][l] = h;
        if (h >= 0) t.insert(l, KineticKey{{distance_sq_polynomial(traj_[w], traj_[h])}, static_cast<long>(h) * fam_.c() + l});
        ++work_;
    }

    const ConeFamily& fam_;
    const std::vector<Trajectory>& traj_;
    double eps_;
    int n_;
    int base_;
    int ksl_base_ = 0;
    std::vector<std::unique_ptr<Cone>> cones_;
    std::vector<std::vector<int>> heads_;  // heads_[w][l] = n_l(w)
    std::vector<KineticTournament> ksl_;
    std::uint64_t work_ = 0;
    std::uint64_t stale_ = 0;
};

}  // namespace ksyg
