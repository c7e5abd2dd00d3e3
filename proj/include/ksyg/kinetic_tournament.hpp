#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "ksyg/kinetic_key.hpp"

namespace ksyg {

/// Dynamic kinetic tournament (min at the root). Leaves live in a power-of-two
/// array; freed leaves are reused, the array doubles when full and is
/// compacted when fewer than a quarter of the leaves are occupied.
class KineticTournament {
public:
    KineticTournament(EventQueue& queue, int coord) : queue_(&queue), coord_(coord) {}

    KineticTournament(const KineticTournament&) = delete;
    KineticTournament& operator=(const KineticTournament&) = delete;
    KineticTournament(KineticTournament&&) = default;
    KineticTournament& operator=(KineticTournament&&) = default;
    ~KineticTournament() { drop_certificates(); }

    bool empty() const { return live_ == 0; }
    int size() const { return live_; }
    int coord() const { return coord_; }

    int winner() const {
        if (live_ == 0) throw std::out_of_range("empty tournament");
        return elem_[win_[1]];
    }

    bool contains(int id) const { return id >= 0 && id < static_cast<int>(leaf_of_.size()) && leaf_of_[id] >= 0; }
    const KineticKey& key(int id) const { return keys_[leaf_of_.at(id)]; }

    std::vector<int> elements() const {
        std::vector<int> out;
        for (int s = 0; s < cap_; ++s)
            if (elem_[s] >= 0) out.push_back(elem_[s]);
        return out;
    }

    void insert(int id, KineticKey key) {
        if (contains(id)) throw std::invalid_argument("id already present");
        if (live_ == cap_) rebuild(std::max(2, cap_ * 2));
        int s = 0;
        while (elem_[s] >= 0) ++s;
        if (id >= static_cast<int>(leaf_of_.size())) leaf_of_.resize(id + 1, -1);
        elem_[s] = id;
        keys_[s] = std::move(key);
        leaf_of_[id] = s;
        ++live_;
        update_path(s);
    }

    void erase(int id) {
        if (!contains(id)) throw std::invalid_argument("unknown id");
        int s = leaf_of_[id];
        elem_[s] = -1;
        leaf_of_[id] = -1;
        --live_;
        if (cap_ > 4 && live_ * 4 < cap_) {
            rebuild(cap_ / 2);
            return;
        }
        update_path(s);
    }

    /// Handles a popped match certificate. Returns true if the overall winner changed.
    bool apply(const Event& ev) {
        int v = ev.slot;
        if (v <= 0 || v >= cap_ || cert_seq_[v] != ev.seq) {
            std::fprintf(stderr, "ksyg: stale tournament certificate ignored\n");
            return false;
        }
        EventQueue::forget(cert_[v]);
        cert_seq_[v] = UINT64_MAX;
        int before = win_[1];
        for (int u = v; u >= 1; u /= 2) {
            ++work_;
            recompute(u);
        }
        return win_[1] != before;
    }

    std::uint64_t work() const { return work_; }

    /// Number of live certificates along the leaf-to-root path of id.
    int certificates_of(int id) const {
        int c = 0;
        for (int u = (leaf_of_.at(id) + cap_) / 2; u >= 1; u /= 2) c += cert_[u].live();
        return c;
    }

private:
    // Node v in [1, cap): internal; leaf slot s sits at node cap + s.
    int node_winner(int v) const { return v >= cap_ ? (elem_[v - cap_] >= 0 ? v - cap_ : -1) : win_[v]; }

    void recompute(int v) {
        queue_->deschedule(cert_[v]);
        cert_seq_[v] = UINT64_MAX;
        int a = node_winner(2 * v), b = node_winner(2 * v + 1);
        if (a < 0 || b < 0) {
            win_[v] = a < 0 ? b : a;
            return;
        }
        const Instant& now = queue_->now();
        if (compare_after(keys_[b], keys_[a], now) < 0) std::swap(a, b);
        win_[v] = a;
        Event ev;
        ev.coord = coord_;
        ev.a = elem_[a];
        ev.b = elem_[b];
        ev.slot = v;
        ev.kind = CertificateKind::tournament;
        cert_[v] = queue_->schedule(ev, order_failure(keys_[a], keys_[b], now));
        if (cert_[v].live()) cert_seq_[v] = cert_[v].event().seq;
    }

    void update_path(int s) {
        for (int v = (s + cap_) / 2; v >= 1; v /= 2) {
            ++work_;
            recompute(v);
        }
    }

    void drop_certificates() {
        for (auto& h : cert_) queue_->deschedule(h);
    }

    void rebuild(int cap) {
        drop_certificates();
        std::vector<int> old_elem = std::move(elem_);
        std::vector<KineticKey> old_keys = std::move(keys_);
        cap_ = cap;
        elem_.assign(cap_, -1);
        keys_.assign(cap_, KineticKey{});
        win_.assign(cap_, -1);
        cert_.assign(cap_, EventQueue::Handle());
        cert_seq_.assign(cap_, UINT64_MAX);
        int s = 0;
        for (std::size_t i = 0; i < old_elem.size(); ++i) {
            if (old_elem[i] < 0) continue;
            elem_[s] = old_elem[i];
            keys_[s] = std::move(old_keys[i]);
            leaf_of_[elem_[s]] = s;
            ++s;
        }
        for (int v = cap_ - 1; v >= 1; --v) {
            ++work_;
            recompute(v);
        }
    }

    EventQueue* queue_;
    int coord_;
    int cap_ = 0;
    int live_ = 0;
    std::vector<int> elem_;  // per leaf slot: element id or -1
    std::vector<KineticKey> keys_;
    std::vector<int> win_;   // per internal node: winning leaf slot or -1
    std::vector<EventQueue::Handle> cert_;
    std::vector<std::uint64_t> cert_seq_;
    std::vector<int> leaf_of_;
    std::uint64_t work_ = 0;
};

}  // namespace ksyg
