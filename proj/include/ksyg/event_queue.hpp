#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>

#include "ksyg/instant.hpp"

namespace ksyg {

enum class CertificateKind { u_order, x_order, tournament, edge_order, approx_axis };

inline const char* kind_name(CertificateKind k) {
    switch (k) {
        case CertificateKind::u_order: return "u-swap";
        case CertificateKind::x_order: return "x-swap";
        case CertificateKind::tournament: return "tournament";
        case CertificateKind::edge_order: return "list";
        case CertificateKind::approx_axis: return "approx";
    }
    return "?";
}

/// A scheduled certificate failure. `coord` identifies the owning structure
/// (and orders simultaneous events), `a`/`b` are the point ids involved and
/// `slot` is owner-private.
struct Event {
    Instant time;
    int coord = 0;
    int a = 0;
    int b = 0;
    int slot = 0;
    CertificateKind kind = CertificateKind::u_order;
    std::uint64_t seq = 0;
};

class EventQueue {
    struct Order {
        bool operator()(const Event& x, const Event& y) const {
            if (x.seq == y.seq) return false;
            int c = compare(x.time, y.time);
            if (c != 0) return c < 0;
            if (x.coord != y.coord) return x.coord < y.coord;
            int xl = std::min(x.a, x.b), yl = std::min(y.a, y.b);
            if (xl != yl) return xl < yl;
            int xh = std::max(x.a, x.b), yh = std::max(y.a, y.b);
            if (xh != yh) return xh < yh;
            return x.seq < y.seq;
        }
    };
    using Set = std::multiset<Event, Order>;

public:
    /// Handle to a pending certificate; an empty handle stands for an inert one.
    class Handle {
    public:
        Handle() = default;
        bool live() const { return it_.has_value(); }
        const Event& event() const { return **it_; }

    private:
        friend class EventQueue;
        explicit Handle(Set::iterator it) : it_(it) {}
        std::optional<Set::iterator> it_;
    };

    explicit EventQueue(Instant start = Instant(0)) : now_(std::move(start)) {}

    const Instant& now() const { return now_; }

    /// Schedules ev if `when` is set; otherwise counts it as inert.
    Handle schedule(Event ev, const std::optional<Instant>& when) {
        if (!when) {
            ++inert_;
            return {};
        }
        ++scheduled_;
        if (*when < now_) throw std::logic_error("certificate scheduled in the past");
        ev.time = *when;
        ev.seq = next_seq_++;
        return Handle(events_.insert(std::move(ev)));
    }

    void deschedule(Handle& h) {
        if (h.it_) {
            events_.erase(*h.it_);
            ++descheduled_;
        }
        h.it_.reset();
    }

    bool empty() const { return events_.empty(); }
    std::size_t size() const { return events_.size(); }
    const Event& top() const { return *events_.begin(); }

    /// Removes the earliest event and advances the clock to its time. The
    /// owner's handle becomes dangling and must be reset by the owner.
    Event pop() {
        if (events_.empty()) throw std::out_of_range("event queue exhausted");
        Event ev = *events_.begin();
        events_.erase(events_.begin());
        ++popped_;
        if (ev.time < now_) throw std::logic_error("event queue went backwards");
        now_ = ev.time;
        return ev;
    }

    /// Moves the clock forward without firing anything.
    void advance_clock(const Instant& t) {
        if (t < now_) throw std::logic_error("clock cannot go backwards");
        now_ = t;
    }

    static void forget(Handle& h) { h.it_.reset(); }

    std::uint64_t scheduled() const { return scheduled_; }
    std::uint64_t descheduled() const { return descheduled_; }
    std::uint64_t popped() const { return popped_; }
    std::uint64_t inert() const { return inert_; }

private:
    Set events_;
    Instant now_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t scheduled_ = 0, descheduled_ = 0, popped_ = 0, inert_ = 0;
};

}  // namespace ksyg
