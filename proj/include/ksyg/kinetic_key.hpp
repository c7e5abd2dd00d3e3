#pragma once

#include <optional>
#include <vector>

#include "ksyg/event_queue.hpp"

namespace ksyg {

/// Lexicographic key: polynomial levels compared first, then `tie`. Lower
/// levels break ties of identically equal higher levels (symbolic perturbation).
struct KineticKey {
    std::vector<Polynomial> levels;
    long tie = 0;
};

/// Order of a and b on (t, t + eps): negative if a comes first.
inline int compare_after(const KineticKey& a, const KineticKey& b, const Instant& t) {
    const std::size_t n = std::max(a.levels.size(), b.levels.size());
    for (std::size_t i = 0; i < n; ++i) {
        Polynomial d = (i < b.levels.size() ? b.levels[i] : Polynomial()) -
                       (i < a.levels.size() ? a.levels[i] : Polynomial());
        if (d.is_zero()) continue;
        return sign_after(d, t) > 0 ? -1 : 1;
    }
    return a.tie < b.tie ? -1 : (a.tie > b.tie ? 1 : 0);
}

/// The polynomial whose positivity certifies "a before b", or nullopt when the
/// order is fixed forever by identical levels.
inline std::optional<Polynomial> order_witness(const KineticKey& a, const KineticKey& b) {
    const std::size_t n = std::max(a.levels.size(), b.levels.size());
    for (std::size_t i = 0; i < n; ++i) {
        Polynomial d = (i < b.levels.size() ? b.levels[i] : Polynomial()) -
                       (i < a.levels.size() ? a.levels[i] : Polynomial());
        if (!d.is_zero()) return d;
    }
    return std::nullopt;
}

/// Failure time of the certificate "a before b" created at `now`.
inline std::optional<Instant> order_failure(const KineticKey& a, const KineticKey& b, const Instant& now) {
    auto w = order_witness(a, b);
    if (!w) return std::nullopt;
    return failure_time(*w, now);
}

}  // namespace ksyg
