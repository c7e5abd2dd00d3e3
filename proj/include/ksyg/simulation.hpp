#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "ksyg/all_knn.hpp"
#include "ksyg/approx_nn.hpp"
#include "ksyg/oracle.hpp"
#include "ksyg/rknn.hpp"
#include "ksyg/scenario.hpp"

namespace ksyg {

enum class TraceFormat { records, structured };

struct SimOptions {
    TraceFormat format = TraceFormat::records;
    bool verify = false;  // oracle checks after every event instant and at probes
    int probes = 100;     // random probe times (verify only)
    std::uint64_t seed = 1;
    /// Test hook: overwrite one selection right after construction, (p, l, q).
    std::optional<std::tuple<int, int, int>> fault;
};

struct Mismatch {
    std::string structure;
    std::string time;
    std::string expected;
    std::string actual;

    std::string to_string() const {
        return structure + " at t=" + time + ": expected " + expected + ", got " + actual;
    }
};

struct Metrics {
    int n = 0, dim = 0, k = 0, cones = 0, approx_cones = 0;
    std::map<std::string, std::uint64_t> events;  // by kind
    std::uint64_t engine_events = 0, external = 0, internal = 0, stale = 0;
    std::vector<std::uint64_t> work;  // engine work per applied engine event
    std::uint64_t max_list_swaps = 0;  // over the engine's coordinate lists
    std::uint64_t max_pair_swaps = 0;  // swaps of one pair in one list
    std::uint64_t graph_checksum = 0, knn_checksum = 0, approx_checksum = 0;
    int queries = 0;
    std::size_t max_rknn_answer = 0;

    double mean_work() const {
        if (work.empty()) return 0.0;
        double s = 0;
        for (auto w : work) s += static_cast<double>(w);
        return s / static_cast<double>(work.size());
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["n"] = n;
        j["dim"] = dim;
        j["k"] = k;
        j["cones"] = cones;
        if (approx_cones) j["approx_cones"] = approx_cones;
        j["events"] = events;
        j["engine_events"] = engine_events;
        j["external"] = external;
        j["internal"] = internal;
        j["stale"] = stale;
        std::uint64_t mx = 0;
        for (auto w : work) mx = std::max(mx, w);
        // At most 1000 evenly spaced samples.
        std::vector<std::uint64_t> samples;
        std::size_t step = std::max<std::size_t>(1, (work.size() + 999) / 1000);
        for (std::size_t i = 0; i < work.size(); i += step) samples.push_back(work[i]);
        j["work"] = {{"count", work.size()}, {"mean", mean_work()}, {"max", mx}, {"samples", samples}};
        j["max_list_swaps"] = max_list_swaps;
        j["max_pair_swaps"] = max_pair_swaps;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(graph_checksum));
        j["checksums"]["graph"] = buf;
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(knn_checksum));
        j["checksums"]["knn"] = buf;
        if (approx_cones) {
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(approx_checksum));
            j["checksums"]["approx"] = buf;
        }
        j["queries"] = queries;
        j["max_rknn_answer"] = max_rknn_answer;
        return j;
    }
};

struct SimResult {
    Metrics metrics;
    KSYGraph graph;  // final
    std::optional<Mismatch> mismatch;
    int probes = 0;         // full oracle checks
    int instant_checks = 0;  // per-event-instant checks
    int rknn_checked = 0;
    int knn_violations = 0;  // oracle k-NN edges missing from the k-SYG

    bool ok() const { return !mismatch; }
};

inline std::string join_ids(const std::vector<long>& v, char sep = ',') {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(v[i]);
    }
    return s;
}

/// Drives one scenario: the kinetic k-SYG with all-kNN on top, the
/// (1+eps)-NN structure when the scenario sets epsilon, and timed RkNN
/// queries. Writes one trace record per event to `trace` when given.
class Simulation {
public:
    Simulation(const Scenario& sc, const SimOptions& opt)
        : sc_(sc),
          opt_(opt),
          fam_(build_cone_family(sc.dim, sc.cone_angle())),
          queue_(Instant(sc.t0)),
          queries_(fam_) {
        if (sc_.epsilon) approx_fam_ = build_cone_family(sc.dim, approx_theta(sc_.epsilon->get_d()));
        eng_ = std::make_unique<KineticKSYG>(queue_, fam_, sc_.points, sc_.k, 0);
        if (opt_.fault) {
            auto [p, l, q] = *opt_.fault;
            eng_->inject_fault(p, l, q);
        }
        knn_ = std::make_unique<AllKNN>(queue_, sc_.points, eng_->graph(), eng_->coord_end());
        if (approx_fam_) {
            approx_ = std::make_unique<ApproxNN>(queue_, *approx_fam_, sc_.points, sc_.epsilon->get_d(),
                                                 knn_->coord_end());
        }
    }

    SimResult run(std::ostream* trace) {
        trace_ = trace;
        SimResult res;
        Metrics& m = res.metrics;
        m.n = sc_.n();
        m.dim = sc_.dim;
        m.k = sc_.k;
        m.cones = fam_.c();
        m.approx_cones = approx_fam_ ? approx_fam_->c() : 0;
        write_init();
        if (opt_.verify) full_check(sc_.t0, res);
        std::vector<Rational> probes = probe_times();
        std::size_t next_probe = 0, next_query = 0;
        const Instant end(sc_.t_end);
        Batch batch;
        while (!res.mismatch) {
            // The next stop: an event, a query or a probe, whichever is first.
            bool have_event = !queue_.empty() && queue_.top().time <= end;
            std::optional<Rational> stop;
            if (next_query < sc_.queries.size()) stop = sc_.queries[next_query].t;
            if (next_probe < probes.size() && (!stop || probes[next_probe] < *stop)) stop = probes[next_probe];
            if (have_event && (!stop || queue_.top().time <= Instant(*stop))) {
                Event ev = queue_.pop();
                process(ev, batch, m);
                if (!queue_.empty() && queue_.top().time == ev.time) continue;
                if (opt_.verify) {
                    check_batch(batch, res);
                    ++res.instant_checks;
                }
                batch = Batch{};
                continue;
            }
            if (!stop) break;
            if (next_query < sc_.queries.size() && sc_.queries[next_query].t == *stop) {
                answer(sc_.queries[next_query], res);
                ++next_query;
            } else {
                if (opt_.verify) full_check(*stop, res);
                ++next_probe;
            }
        }
        if (opt_.verify && !res.mismatch) full_check(sc_.t_end, res);
        for (const auto& [coord, c] : list_swaps_) m.max_list_swaps = std::max(m.max_list_swaps, c);
        for (const auto& [key, c] : pair_swaps_) m.max_pair_swaps = std::max(m.max_pair_swaps, c);
        const auto& cnt = eng_->counts();
        m.external = cnt.external;
        m.internal = cnt.internal;
        m.stale = cnt.stale;
        res.graph = eng_->graph();
        m.graph_checksum = res.graph.checksum();
        m.knn_checksum = knn_checksum();
        if (approx_) m.approx_checksum = approx_checksum();
        if (trace_) trace_->flush();
        return res;
    }

    const KineticKSYG& engine() const { return *eng_; }
    const AllKNN& knn() const { return *knn_; }
    const ApproxNN* approx() const { return approx_.get(); }
    const ConeFamily& family() const { return fam_; }

private:
    struct Batch {
        Instant time;
        std::set<std::pair<int, int>> cone_points;  // (l, w) whose K_l(w) is rechecked
        std::set<int> knn_points;
        std::set<int> approx_points;
    };

    long ext(int p) const { return sc_.ids[p]; }

    std::vector<Rational> probe_times() const {
        std::vector<Rational> out;
        if (!opt_.verify || sc_.t_end == sc_.t0) return out;
        std::mt19937_64 rng(opt_.seed);
        for (int i = 0; i < opt_.probes; ++i) {
            Rational u(static_cast<long>(rng() >> 33), 1L << 31);  // [0, 1) on a 2^-31 grid
            u.canonicalize();
            out.push_back(sc_.t0 + u * (sc_.t_end - sc_.t0));
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    void process(const Event& ev, Batch& batch, Metrics& m) {
        batch.time = ev.time;
        Record rec;
        if (trace_) rec.time = ev.time.to_string();
        rec.kind = kind_name(ev.kind);
        rec.pts = {ext(ev.a), ext(ev.b)};
        if (eng_->owns(ev.coord)) {
            const int l = eng_->cone_of(ev.coord);
            const int i = (ev.coord - eng_->coord_begin()) % (fam_.dim + 1);
            rec.cone = std::to_string(l);
            rec.coord = i < fam_.dim ? "u_" + std::to_string(i) : "x_" + std::to_string(l);
            if (opt_.verify) {
                batch.cone_points.insert({l, ev.a});
                batch.cone_points.insert({l, ev.b});
                if (i == fam_.dim) {
                    for (int w = 0; w < sc_.n(); ++w) {
                        const auto& s = eng_->selection(w, l);
                        if (std::find(s.begin(), s.end(), ev.a) != s.end() ||
                            std::find(s.begin(), s.end(), ev.b) != s.end())
                            batch.cone_points.insert({l, w});
                    }
                }
            }
            std::uint64_t before = eng_->work();
            auto stale_before = eng_->counts().stale;
            GraphDelta delta = eng_->handle(ev);
            if (eng_->counts().stale == stale_before) {
                ++m.engine_events;
                m.work.push_back(eng_->work() - before);
                ++list_swaps_[ev.coord];
                ++pair_swaps_[{ev.coord, std::min(ev.a, ev.b), std::max(ev.a, ev.b)}];
            }
            auto changes = knn_->apply(delta);
            rec.ext = !delta.empty();
            for (const auto& c : delta.changes) {
                rec.delta.push_back({c.add, ext(c.p), c.l, ext(c.q)});
                if (opt_.verify) {
                    batch.cone_points.insert({c.l, c.p});
                    batch.knn_points.insert(c.p);
                    batch.knn_points.insert(c.q);
                }
            }
            add_knn(rec, changes, batch);
        } else if (knn_->owns(ev.coord)) {
            const int p = ev.coord - knn_->coord_begin();
            rec.cone = "-";
            rec.coord = "E_" + std::to_string(ext(p));
            if (opt_.verify) batch.knn_points.insert(p);
            auto changes = knn_->handle(ev);
            rec.ext = !changes.empty();
            add_knn(rec, changes, batch);
        } else if (approx_ && approx_->owns(ev.coord)) {
            const int rel = ev.coord - approx_->coord_begin();
            const int per = approx_fam_->dim + 1;
            if (rel < approx_fam_->c() * per) {
                const int l = rel / per, i = rel % per;
                rec.cone = std::to_string(l);
                rec.coord = i < approx_fam_->dim ? "u_" + std::to_string(i) : "x_" + std::to_string(l);
            } else {
                rec.cone = "-";
                rec.coord = "ksl_" + std::to_string(ext(rel - approx_fam_->c() * per));
            }
            rec.kind = "approx";
            auto changes = approx_->handle(ev);
            rec.ext = !changes.empty();
            for (const auto& c : changes) {
                rec.approx.push_back({ext(c.p), c.before < 0 ? -1 : ext(c.before), c.after < 0 ? -1 : ext(c.after)});
                batch.approx_points.insert(c.p);
            }
            if (opt_.verify && rel >= approx_fam_->c() * per) batch.approx_points.insert(rel - approx_fam_->c() * per);
        } else {
            throw std::logic_error("event for an unknown structure");
        }
        ++m.events[rec.kind];
        write(rec);
    }

    struct Record {
        std::string time, kind, cone = "-", coord = "-";
        std::vector<long> pts;
        bool ext = false;
        std::vector<std::tuple<bool, long, int, long>> delta;
        std::vector<std::pair<long, std::vector<long>>> knn;
        std::vector<std::tuple<long, long, long>> approx;
    };

    void add_knn(Record& rec, const std::vector<NeighborChange>& changes, Batch& batch) {
        for (const auto& c : changes) {
            std::vector<long> e;
            for (int q : c.after) e.push_back(ext(q));
            rec.knn.emplace_back(ext(c.p), std::move(e));
            batch.knn_points.insert(c.p);
        }
        if (!changes.empty()) rec.ext = true;
    }

    void write_init() {
        if (!trace_) return;
        Record rec;
        rec.time = Instant(sc_.t0).to_string();
        rec.kind = "init";
        KSYGraph g = eng_->graph();
        for (int p = 0; p < g.n; ++p)
            for (int l = 0; l < g.c; ++l)
                for (int q : g.sel[p][l]) rec.delta.push_back({true, ext(p), l, ext(q)});
        if (opt_.format == TraceFormat::records) {
            *trace_ << "t=" << rec.time << " kind=init delta=" << render_delta(rec.delta) << "\n";
        } else {
            nlohmann::ordered_json j;
            j["t"] = rec.time;
            j["kind"] = "init";
            j["delta"] = delta_json(rec.delta);
            *trace_ << j.dump() << "\n";
        }
    }

    static std::string render_delta(const std::vector<std::tuple<bool, long, int, long>>& delta) {
        std::string s;
        for (std::size_t i = 0; i < delta.size(); ++i) {
            const auto& [add, p, l, q] = delta[i];
            if (i) s += ' ';
            s += (add ? "+(" : "-(") + std::to_string(p) + "," + std::to_string(l) + "," + std::to_string(q) + ")";
        }
        return s;
    }

    static nlohmann::ordered_json delta_json(const std::vector<std::tuple<bool, long, int, long>>& delta) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& [add, p, l, q] : delta) arr.push_back({add ? 1 : -1, p, l, q});
        return arr;
    }

    void write(const Record& rec) {
        if (!trace_) return;
        if (opt_.format == TraceFormat::records) {
            std::ostream& o = *trace_;
            o << "t=" << rec.time << " kind=" << rec.kind << " cone=" << rec.cone << " coord=" << rec.coord
              << " pts=" << join_ids(rec.pts) << " ext=" << (rec.ext ? 1 : 0);
            if (!rec.delta.empty()) o << " delta=" << render_delta(rec.delta);
            if (!rec.knn.empty()) {
                o << " knn=";
                for (std::size_t i = 0; i < rec.knn.size(); ++i)
                    o << (i ? ";" : "") << rec.knn[i].first << ":" << join_ids(rec.knn[i].second);
            }
            if (!rec.approx.empty()) {
                o << " approx=";
                for (std::size_t i = 0; i < rec.approx.size(); ++i) {
                    const auto& [p, b, a] = rec.approx[i];
                    o << (i ? ";" : "") << p << ":" << b << ">" << a;
                }
            }
            o << "\n";
            return;
        }
        nlohmann::ordered_json j;
        j["t"] = rec.time;
        j["kind"] = rec.kind;
        j["cone"] = rec.cone;
        j["coord"] = rec.coord;
        j["pts"] = rec.pts;
        j["ext"] = rec.ext ? 1 : 0;
        if (!rec.delta.empty()) j["delta"] = delta_json(rec.delta);
        if (!rec.knn.empty()) {
            auto& k = j["knn"];
            for (const auto& [p, v] : rec.knn) k[std::to_string(p)] = v;
        }
        if (!rec.approx.empty()) {
            auto arr = nlohmann::ordered_json::array();
            for (const auto& [p, b, a] : rec.approx) arr.push_back({p, b, a});
            j["approx"] = arr;
        }
        *trace_ << j.dump() << "\n";
    }

    // ---- queries ----

    void answer(const RkNNQuery& query, SimResult& res) {
        ++res.metrics.queries;
        std::vector<int> kth(sc_.n(), -1);
        for (int p = 0; p < sc_.n(); ++p) {
            auto nb = knn_->neighbors(p);
            if (static_cast<int>(nb.size()) >= query.k) kth[p] = nb[query.k - 1];
        }
        const RkNNIndex& index = queries_.at(sc_.points, query.t);
        std::string t = exact_text(query.t);
        std::string qtext;
        for (std::size_t i = 0; i < query.q.size(); ++i) qtext += (i ? "," : "") + exact_text(query.q[i]);
        std::optional<RkNNAnswer> ans;
        try {
            ans = answer_rknn(index, query.q, query.k, kth);
        } catch (const std::invalid_argument&) {
        }
        std::vector<long> ids;
        if (ans) {
            for (int p : ans->answer) ids.push_back(ext(p));
            std::sort(ids.begin(), ids.end());
            res.metrics.max_rknn_answer = std::max(res.metrics.max_rknn_answer, ans->answer.size());
        }
        if (trace_) {
            if (opt_.format == TraceFormat::records) {
                *trace_ << "t=" << t << " kind=query k=" << query.k << " q=" << qtext
                        << " answer=" << (ans ? join_ids(ids) : std::string("error:coincident")) << "\n";
            } else {
                nlohmann::ordered_json j;
                j["t"] = t;
                j["kind"] = "query";
                j["k"] = query.k;
                j["q"] = qtext;
                if (ans) j["answer"] = ids;
                else j["error"] = "coincident";
                *trace_ << j.dump() << "\n";
            }
        }
        if (!opt_.verify || !ans || res.mismatch) return;
        ++res.rknn_checked;
        const auto& pts = index.points();
        std::vector<int> want;
        if (query.k < sc_.n()) {
            want = oracle_rknn(pts, query.q, query.k);
        } else {
            for (int p = 0; p < sc_.n(); ++p) want.push_back(p);
        }
        if (ans->answer != want) {
            res.mismatch = Mismatch{"rknn", t, render(want), render(ans->answer)};
        } else if (!std::includes(ans->candidates.begin(), ans->candidates.end(), want.begin(), want.end())) {
            res.mismatch = Mismatch{"rknn candidates", t, render(want), render(ans->candidates)};
        } else if (static_cast<int>(ans->answer.size()) > fam_.c() * query.k) {
            res.mismatch = Mismatch{"rknn size bound", t, "<= " + std::to_string(fam_.c() * query.k),
                                    std::to_string(ans->answer.size())};
        }
    }

    // ---- verification ----

    std::string render(const std::vector<int>& v) const {
        std::vector<long> e;
        for (int p : v) e.push_back(ext(p));
        return "[" + join_ids(e) + "]";
    }

    /// A rational time strictly inside the open interval where the current
    /// state is valid, as close to `t` as that allows.
    Rational check_time(const Instant& last, const std::optional<Rational>& wanted) const {
        Instant next = queue_.empty() ? Instant(Rational(last.upper() + 1)) : queue_.top().time;
        if (wanted && Instant(*wanted) > last && Instant(*wanted) < next) return *wanted;
        return rational_between(last, next);
    }

    static std::vector<int> brute_selection(const ConeFamily& fam, const std::vector<Point>& pts, int w, int l, int k) {
        std::vector<std::pair<FrameKey, int>> members;
        for (int q = 0; q < static_cast<int>(pts.size()); ++q)
            if (q != w && in_cone(fam, l, pts[w], w, pts[q], q)) members.emplace_back(axis_key(fam, l, pts[q], q), q);
        std::sort(members.begin(), members.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<int> out;
        for (int i = 0; i < k && i < static_cast<int>(members.size()); ++i) out.push_back(members[i].second);
        return out;
    }

    static std::vector<int> brute_knn(const std::vector<Point>& pts, int p, int k) {
        std::vector<std::pair<Rational, int>> d;
        for (int q = 0; q < static_cast<int>(pts.size()); ++q)
            if (q != p) d.emplace_back(distance_sq(pts[p], pts[q]), q);
        std::sort(d.begin(), d.end());
        std::vector<int> out;
        for (int i = 0; i < k && i < static_cast<int>(d.size()); ++i) out.push_back(d[i].second);
        return out;
    }

    std::vector<int> engine_selection(int w, int l) const {
        std::vector<int> s = eng_->selection(w, l);
        const auto& xr = eng_->frame(l).tree().xrank();
        std::sort(s.begin(), s.end(), [&](int a, int b) { return xr[a] < xr[b]; });
        return s;
    }

    bool approx_ok(const std::vector<Point>& pts, int p, std::string* got) const {
        int qh = approx_->approx_nn(p);
        auto nn = brute_knn(pts, p, 1);
        if (nn.empty()) return qh < 0;
        if (qh < 0 || qh == p) {
            *got = "none";
            return false;
        }
        Rational f = 1 + *sc_.epsilon;
        Rational best = distance_sq(pts[p], pts[nn[0]]);
        Rational have = distance_sq(pts[p], pts[qh]);
        if (have <= f * f * best) return true;
        *got = std::to_string(ext(qh)) + " (ratio " + std::to_string(std::sqrt(have.get_d() / best.get_d())) + ")";
        return false;
    }

    void check_batch(const Batch& batch, SimResult& res) {
        Rational t = check_time(batch.time, std::nullopt);
        std::string ts = format_rational(t);
        std::vector<Point> pts;
        for (const auto& tr : sc_.points) pts.push_back(evaluate(tr, t));
        for (const auto& [l, w] : batch.cone_points) {
            auto want = brute_selection(fam_, pts, w, l, sc_.k);
            auto got = engine_selection(w, l);
            if (want != got) {
                res.mismatch = Mismatch{"K_" + std::to_string(l) + "(" + std::to_string(ext(w)) + ")", ts, render(want),
                                        render(got)};
                return;
            }
        }
        if (sc_.k < sc_.n()) {
            for (int p : batch.knn_points) {
                auto want = brute_knn(pts, p, sc_.k);
                auto got = knn_->neighbors(p);
                if (want != got) {
                    res.mismatch = Mismatch{"knn(" + std::to_string(ext(p)) + ")", ts, render(want), render(got)};
                    return;
                }
            }
        }
        if (approx_) {
            for (int p : batch.approx_points) {
                std::string got;
                if (!approx_ok(pts, p, &got)) {
                    res.mismatch = Mismatch{"approx(" + std::to_string(ext(p)) + ")", ts,
                                            "within 1+eps of the nearest", got};
                    return;
                }
            }
        }
    }

    void full_check(const Rational& wanted, SimResult& res) {
        ++res.probes;
        Instant last = queue_.now();
        Rational t = check_time(last, wanted);
        std::string ts = format_rational(t);
        std::vector<Point> pts;
        for (const auto& tr : sc_.points) pts.push_back(evaluate(tr, t));
        KSYGraph g = eng_->graph();
        KSYGraph want = oracle_ksyg(pts, sc_.k, fam_);
        for (int p = 0; p < sc_.n() && !res.mismatch; ++p)
            for (int l = 0; l < fam_.c(); ++l)
                if (g.sel[p][l] != want.sel[p][l]) {
                    res.mismatch = Mismatch{"K_" + std::to_string(l) + "(" + std::to_string(ext(p)) + ")", ts,
                                            render(want.sel[p][l]), render(g.sel[p][l])};
                    break;
                }
        if (res.mismatch) return;
        if (sc_.k < sc_.n()) {
            auto knn = oracle_knn(pts, sc_.k);
            for (int p = 0; p < sc_.n(); ++p) {
                for (int q : knn[p])
                    if (!g.has_edge(p, q)) ++res.knn_violations;
                if (knn_->neighbors(p) != knn[p]) {
                    res.mismatch = Mismatch{"knn(" + std::to_string(ext(p)) + ")", ts, render(knn[p]),
                                            render(knn_->neighbors(p))};
                    return;
                }
                if (knn_->kth_nearest(p) != knn[p].back()) {
                    res.mismatch = Mismatch{"p_k(" + std::to_string(ext(p)) + ")", ts, std::to_string(ext(knn[p].back())),
                                            std::to_string(knn_->kth_nearest(p))};
                    return;
                }
            }
            if (res.knn_violations > 0) {
                res.mismatch = Mismatch{"k-NN subgraph", ts, "0 missing edges", std::to_string(res.knn_violations)};
                return;
            }
        }
        if (sc_.n() >= 2) {
            auto cp = knn_->closest_pair(Instant(t));
            auto wcp = oracle_closest_pair(pts);
            if (!cp || *cp != wcp) {
                res.mismatch = Mismatch{"closest pair", ts, render({wcp.first, wcp.second}),
                                        cp ? render({cp->first, cp->second}) : "none"};
                return;
            }
        }
        if (approx_) {
            for (int p = 0; p < sc_.n(); ++p) {
                std::string got;
                if (!approx_ok(pts, p, &got)) {
                    res.mismatch =
                        Mismatch{"approx(" + std::to_string(ext(p)) + ")", ts, "within 1+eps of the nearest", got};
                    return;
                }
            }
        }
    }

    // ---- checksums ----

    std::uint64_t knn_checksum() const {
        std::uint64_t h = 1469598103934665603ULL;
        for (int p = 0; p < sc_.n(); ++p) {
            for (int q : knn_->neighbors(p)) h = (h ^ static_cast<std::uint64_t>(q + 1)) * 1099511628211ULL;
            h = (h ^ 0xffULL) * 1099511628211ULL;
        }
        return h;
    }

    std::uint64_t approx_checksum() const {
        std::uint64_t h = 1469598103934665603ULL;
        for (int p = 0; p < sc_.n(); ++p) h = (h ^ static_cast<std::uint64_t>(approx_->approx_nn(p) + 2)) * 1099511628211ULL;
        return h;
    }

    const Scenario& sc_;
    SimOptions opt_;
    ConeFamily fam_;
    std::optional<ConeFamily> approx_fam_;
    EventQueue queue_;  // before every structure that schedules into it
    std::unique_ptr<KineticKSYG> eng_;
    std::unique_ptr<AllKNN> knn_;
    std::unique_ptr<ApproxNN> approx_;
    RkNNQueries queries_;
    std::ostream* trace_ = nullptr;
    std::map<int, std::uint64_t> list_swaps_;
    std::map<std::tuple<int, int, int>, std::uint64_t> pair_swaps_;
};

inline SimResult run_simulation(const Scenario& sc, const SimOptions& opt, std::ostream* trace = nullptr) {
    Simulation sim(sc, opt);
    return sim.run(trace);
}

/// run_simulation with oracle checks after every event instant and at
/// opt.probes random times; the result names the first mismatch.
inline SimResult verify_against_oracle(const Scenario& sc, SimOptions opt) {
    opt.verify = true;
    return run_simulation(sc, opt, nullptr);
}

/// Folds the k-SYG deltas of a trace (either format) into a fresh graph and
/// returns its checksum.
inline std::uint64_t replay_checksum(const Scenario& sc, int cones, const std::string& trace) {
    std::map<long, int> index;
    for (int i = 0; i < sc.n(); ++i) index[sc.ids[i]] = i;
    KSYGraph g(sc.n(), sc.k, cones);
    auto apply = [&](bool add, long p, int l, long q) {
        GraphDelta d;
        d.changes.push_back({add, index.at(p), l, index.at(q)});
        apply_delta(g, d);
    };
    std::istringstream in(trace);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '{') {
            auto j = nlohmann::json::parse(line);
            if (!j.contains("delta")) continue;
            for (const auto& e : j["delta"]) apply(e[0].get<int>() > 0, e[1].get<long>(), e[2].get<int>(), e[3].get<long>());
            continue;
        }
        auto pos = line.find(" delta=");
        if (pos == std::string::npos) continue;
        std::istringstream rest(line.substr(pos + 7));
        for (std::string tok; rest >> tok;) {
            if (tok.size() < 4 || (tok[0] != '+' && tok[0] != '-') || tok[1] != '(') break;
            long p = 0, q = 0;
            int l = 0;
            if (std::sscanf(tok.c_str() + 2, "%ld,%d,%ld)", &p, &l, &q) != 3) throw std::runtime_error("bad delta " + tok);
            apply(tok[0] == '+', p, l, q);
        }
    }
    return g.checksum();
}

}  // namespace ksyg
