#pragma once

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <vector>

#include "ksyg/ksyg_static.hpp"

namespace ksyg {

/// Snapshot of P at one time for cone queries around an outside point q.
/// One layered range tree per cone; q takes the id n for tie-breaks.
class RkNNIndex {
public:
    RkNNIndex(const ConeFamily& fam, std::vector<Point> pts) : fam_(fam), pts_(std::move(pts)) {
        for (int l = 0; l < fam_.c(); ++l) {
            Cone cone;
            ConeRanks cr = cone_ranks(fam_, l, pts_);
            cone.sorted_keys.resize(fam_.dim);
            for (int i = 0; i < fam_.dim; ++i)
                for (int p : cr.sorted_frame[i]) cone.sorted_keys[i].push_back(frame_key(fam_, l, i, pts_[p], p));
            cone.axis = cr.axis;
            cone.tree = LayeredRangeTree(cr.frame, cr.axis);
            cones_.push_back(std::move(cone));
        }
    }

    int size() const { return static_cast<int>(pts_.size()); }
    const std::vector<Point>& points() const { return pts_; }

    /// K_l(q): the first k points of P in C_l(q) by x_l.
    std::vector<int> cone_selection(const Point& q, int l, int k) const {
        const Cone& cone = cones_.at(l);
        const int qid = size();
        std::vector<int> t(fam_.dim);
        for (int i = 0; i < fam_.dim; ++i) {
            FrameKey key = frame_key(fam_, l, i, q, qid);
            const auto& s = cone.sorted_keys[i];
            t[i] = static_cast<int>(std::lower_bound(s.begin(), s.end(), key) - s.begin());
        }
        std::vector<const std::vector<int>*> lists;
        for (int v : cone.tree.canonical(t)) lists.push_back(&cone.tree.node_points(v));
        return select_first_k(lists, k, [&](int a, int b) { return cone.axis[a] < cone.axis[b]; });
    }

    /// Union of K_l(q) over all cones, ascending ids.
    std::vector<int> candidates(const Point& q, int k) const {
        std::vector<int> out;
        for (int l = 0; l < fam_.c(); ++l) {
            auto s = cone_selection(q, l, k);
            out.insert(out.end(), s.begin(), s.end());
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    struct Cone {
        std::vector<std::vector<FrameKey>> sorted_keys;
        std::vector<int> axis;
        LayeredRangeTree tree;
    };

    const ConeFamily& fam_;
    std::vector<Point> pts_;
    std::vector<Cone> cones_;
};

struct RkNNAnswer {
    std::vector<int> answer;      // ascending ids
    std::vector<int> candidates;  // the union of the K_l(q)
};

/// Points p with |pq| <= |p p_k|. kth[p] is p's k-th nearest in P, or -1
/// when p has fewer than k other points (then q always qualifies).
inline RkNNAnswer answer_rknn(const RkNNIndex& index, const Point& q, int k, const std::vector<int>& kth) {
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    const auto& pts = index.points();
    for (const auto& p : pts)
        if (p == q) throw std::invalid_argument("query point coincides with a point of P");
    RkNNAnswer out;
    out.candidates = index.candidates(q, k);
    for (int p : out.candidates) {
        if (kth.at(p) < 0 || distance_sq(pts[p], q) <= distance_sq(pts[p], pts[kth[p]])) out.answer.push_back(p);
    }
    return out;
}

/// Caches the index of the most recent query time.
class RkNNQueries {
public:
    explicit RkNNQueries(const ConeFamily& fam) : fam_(fam) {}

    const RkNNIndex& at(const std::vector<Trajectory>& traj, const Rational& t) {
        if (!index_ || t != t_) {
            std::vector<Point> pts;
            for (const auto& tr : traj) pts.push_back(evaluate(tr, t));
            index_ = std::make_unique<RkNNIndex>(fam_, std::move(pts));
            t_ = t;
            ++builds_;
        }
        return *index_;
    }

    int builds() const { return builds_; }

private:
    const ConeFamily& fam_;
    Rational t_;
    std::unique_ptr<RkNNIndex> index_;
    int builds_ = 0;
};

}  // namespace ksyg
