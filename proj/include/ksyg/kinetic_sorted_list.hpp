#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "ksyg/kinetic_key.hpp"

namespace ksyg {

/// Dynamic kinetic sorted list. Element ids are small nonnegative integers;
/// each adjacent pair carries one order certificate in the shared queue.
class KineticSortedList {
public:
    struct Swap {
        bool applied = false;
        int first = -1;   // id now in front
        int second = -1;  // id now behind
        int rank = -1;    // 0-based position of `first`
    };

    KineticSortedList(EventQueue& queue, int coord, CertificateKind kind)
        : queue_(&queue), coord_(coord), kind_(kind) {}

    KineticSortedList(const KineticSortedList&) = delete;
    KineticSortedList& operator=(const KineticSortedList&) = delete;
    KineticSortedList(KineticSortedList&&) = default;
    KineticSortedList& operator=(KineticSortedList&&) = default;

    ~KineticSortedList() { clear(); }

    /// Bulk load, sorting by key just after the current time.
    void assign(std::vector<std::pair<int, KineticKey>> elems) {
        clear();
        for (auto& [id, key] : elems) store_key(id, std::move(key));
        order_.clear();
        for (auto& e : elems) order_.push_back(e.first);
        const Instant& now = queue_->now();
        std::stable_sort(order_.begin(), order_.end(),
                         [&](int a, int b) { return compare_after(*keys_[a], *keys_[b], now) < 0; });
        for (std::size_t i = 0; i < order_.size(); ++i) pos_[order_[i]] = static_cast<int>(i);
        for (std::size_t i = 0; i + 1 < order_.size(); ++i) certify(static_cast<int>(i));
    }

    void clear() {
        for (auto& h : cert_) queue_->deschedule(h);
        cert_.clear();
        for (int id : order_) pos_[id] = -1;
        order_.clear();
    }

    int size() const { return static_cast<int>(order_.size()); }
    bool contains(int id) const { return id >= 0 && id < static_cast<int>(pos_.size()) && pos_[id] >= 0; }
    int position(int id) const { return pos_.at(id); }
    int at(int rank) const { return order_.at(rank); }
    const std::vector<int>& order() const { return order_; }
    const KineticKey& key(int id) const { return *keys_.at(id); }
    int coord() const { return coord_; }

    /// k-th smallest, 1-based.
    int kth(int k) const {
        if (k < 1 || k > size()) throw std::out_of_range("rank out of range");
        return order_[k - 1];
    }

    void insert(int id, KineticKey key) {
        if (contains(id)) throw std::invalid_argument("id already present");
        store_key(id, std::move(key));
        const Instant& now = queue_->now();
        int lo = 0, hi = size();
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            ++work_;
            if (compare_after(*keys_[order_[mid]], *keys_[id], now) < 0) lo = mid + 1; else hi = mid;
        }
        if (lo > 0) uncertify(lo - 1);
        // cert_[lo - 1] now empty; old certificates from lo on shift right.
        order_.insert(order_.begin() + lo, id);
        for (int i = lo; i < size(); ++i) pos_[order_[i]] = i;
        cert_.insert(cert_.begin() + std::min<int>(lo, static_cast<int>(cert_.size())), EventQueue::Handle());
        cert_.resize(std::max(0, size() - 1));
        if (lo > 0) certify(lo - 1);
        if (lo + 1 < size()) certify(lo);
    }

    void erase(int id) {
        if (!contains(id)) throw std::invalid_argument("unknown id");
        int r = pos_[id];
        if (r > 0) uncertify(r - 1);
        if (r + 1 < size()) uncertify(r);
        order_.erase(order_.begin() + r);
        if (r < static_cast<int>(cert_.size())) cert_.erase(cert_.begin() + r);
        else if (!cert_.empty()) cert_.pop_back();
        pos_[id] = -1;
        for (int i = r; i < size(); ++i) pos_[order_[i]] = i;
        cert_.resize(std::max(0, size() - 1));
        if (r > 0 && r < size()) certify(r - 1);
    }

    /// Handles a popped certificate of this list. Stale events are ignored.
    Swap apply(const Event& ev) {
        Swap out;
        if (!contains(ev.a) || !contains(ev.b) || pos_[ev.a] + 1 != pos_[ev.b]) {
            std::fprintf(stderr, "ksyg: stale list certificate ignored\n");
            return out;
        }
        int r = pos_[ev.a];
        EventQueue::forget(cert_[r]);
        ++work_;
        if (r > 0) uncertify(r - 1);
        if (r + 2 < size()) uncertify(r + 1);
        std::swap(order_[r], order_[r + 1]);
        pos_[order_[r]] = r;
        pos_[order_[r + 1]] = r + 1;
        if (r > 0) certify(r - 1);
        certify(r);
        if (r + 2 < size()) certify(r + 1);
        out.applied = true;
        out.first = order_[r];
        out.second = order_[r + 1];
        out.rank = r;
        return out;
    }

    std::uint64_t work() const { return work_; }
    int live_certificates() const {
        int c = 0;
        for (const auto& h : cert_) c += h.live();
        return c;
    }

private:
    void store_key(int id, KineticKey key) {
        if (id < 0) throw std::invalid_argument("negative id");
        if (id >= static_cast<int>(keys_.size())) {
            keys_.resize(id + 1);
            pos_.resize(id + 1, -1);
        }
        keys_[id] = std::move(key);
    }

    void certify(int r) {
        if (static_cast<int>(cert_.size()) < size() - 1) cert_.resize(size() - 1);
        int a = order_[r], b = order_[r + 1];
        Event ev;
        ev.coord = coord_;
        ev.a = a;
        ev.b = b;
        ev.kind = kind_;
        queue_->deschedule(cert_[r]);
        cert_[r] = queue_->schedule(ev, order_failure(*keys_[a], *keys_[b], queue_->now()));
        ++work_;
    }

    void uncertify(int r) {
        if (r < static_cast<int>(cert_.size())) queue_->deschedule(cert_[r]);
    }

    EventQueue* queue_;
    int coord_;
    CertificateKind kind_;
    std::vector<int> order_;
    std::vector<int> pos_;
    std::vector<std::optional<KineticKey>> keys_;
    std::vector<EventQueue::Handle> cert_;  // cert_[r] guards order_[r] < order_[r+1]
    std::uint64_t work_ = 0;
};

}  // namespace ksyg
