// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kinetic_fixture.hpp"
#include "ksyg/ksyg_static.hpp"
#include "ksyg/simulation.hpp"
#include "rbrt_checks.hpp"

using namespace ksyg;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

// Oracle k-NN edges missing from the k-SYG, over every check in every suite.
long g_knn_violations = 0;
long g_knn_checks = 0;
// Simulation results reused by later criteria.
std::vector<std::pair<Scenario, SimResult>> g_runs;

template <class... A>
std::string fmt(const char* f, A... a) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

long missing_knn_edges(const KSYGraph& g, const std::vector<std::vector<int>>& knn) {
    auto adj = incident_neighbors(g);
    long missing = 0;
    for (std::size_t p = 0; p < knn.size(); ++p)
        for (int q : knn[p])
            if (std::find(adj[p].begin(), adj[p].end(), q) == adj[p].end()) ++missing;
    return missing;
}

void record(const SimResult& res) {
    g_knn_violations += res.knn_violations;
    g_knn_checks += res.probes + 2;
}

Outcome static_construction() {
    Outcome o;
    std::mt19937_64 rng(101);
    const int sizes[] = {8, 16, 32, 64, 128, 256};
    const int ks[] = {1, 2, 5};
    auto fam2 = build_cone_family(2, kPi / 3), fam3 = build_cone_family(3, kPi / 3);
    int done = 0;
    for (int i = 0; i < 50; ++i) {
        const int d = 2 + i % 2, n = sizes[(i / 2) % 6], k = ks[i % 3];
        const auto& fam = d == 2 ? fam2 : fam3;
        auto pts = checks::positions(checks::random_trajectories(rng, n, d, 0), Rational(0));
        KSYGraph g = build_ksyg(pts, k, fam);
        if (g != oracle_ksyg(pts, k, fam)) o.fail(fmt("k-SYG differs (d=%d n=%d k=%d)", d, n, k));
        auto want = oracle_knn(pts, k);
        if (report_all_knn_static(pts, k, fam) != want) o.fail(fmt("all-kNN differs (d=%d n=%d k=%d)", d, n, k));
        g_knn_violations += missing_knn_edges(g, want);
        ++g_knn_checks;
        ++done;
    }
    if (o.pass) o.detail = fmt("%d instances, d in {2,3}, n in 8..256, k in {1,2,5}", done);
    return o;
}

struct Config {
    int n, d, s, k;
};

Outcome kinetic_ground_truth() {
    Outcome o;
    const Config cfg[] = {
        {16, 2, 1, 1}, {16, 2, 2, 2}, {16, 2, 1, 5}, {24, 2, 2, 1}, {24, 2, 1, 2}, {32, 2, 2, 5}, {32, 2, 1, 1},
        {32, 2, 2, 2}, {48, 2, 1, 5}, {48, 2, 2, 1}, {64, 2, 1, 2}, {64, 2, 1, 1}, {64, 2, 2, 1},
        {8, 3, 1, 1},  {8, 3, 2, 2},  {8, 3, 1, 5},  {12, 3, 2, 1}, {12, 3, 1, 2}, {12, 3, 2, 5}, {16, 3, 1, 1},
        {16, 3, 2, 2}, {16, 3, 1, 5}, {24, 3, 1, 1}, {24, 3, 2, 2}, {20, 3, 1, 5},
    };
    std::mt19937_64 rng(202);
    std::uint64_t events = 0;
    int probes = 0, checks = 0;
    for (const auto& c : cfg) {
        Scenario sc = random_scenario(rng, c.n, c.d, c.s, c.k, Rational(10), 8);
        SimOptions opt;
        opt.seed = rng();
        SimResult res = verify_against_oracle(sc, opt);
        record(res);
        if (!res.ok())
            o.fail(fmt("n=%d d=%d s=%d k=%d: ", c.n, c.d, c.s, c.k) + res.mismatch->to_string());
        else if (res.probes < 100)
            o.fail(fmt("only %d probes", res.probes));
        events += res.metrics.engine_events;
        probes += res.probes;
        checks += res.instant_checks;
        g_runs.emplace_back(std::move(sc), std::move(res));
    }
    if (o.pass)
        o.detail = fmt("25 scenarios, t in [0,10], %llu events, %d event checks, %d probes",
                       static_cast<unsigned long long>(events), checks, probes);
    return o;
}

Outcome pair_decomposition_suite() {
    Outcome o;
    std::mt19937_64 rng(303);
    const Config cfg[] = {{16, 2, 1, 1}, {32, 2, 2, 2}, {64, 2, 1, 5}, {12, 3, 1, 2}, {24, 3, 2, 1}};
    long swaps = 0, trees = 0;
    int max_members = 0;
    for (const auto& c : cfg) {
        auto traj = checks::random_trajectories(rng, c.n, c.d, c.s);
        auto fam = build_cone_family(c.d, kPi / 3);
        EventQueue q{Instant(Rational(0))};
        KineticKSYG eng(q, fam, traj, c.k, 0);
        auto check = [&](int l) {
            auto rep = checks::check_pair_decomposition(eng.frame(l).tree());
            ++trees;
            max_members = std::max(max_members, rep.max_memberships);
            if (rep.violations) o.fail(fmt("n=%d d=%d cone %d: ", c.n, c.d, l) + rep.first);
        };
        for (int l = 0; l < fam.c(); ++l) check(l);
        while (o.pass && !q.empty() && q.top().time <= Instant(Rational(10))) {
            Event ev = q.pop();
            if (!eng.owns(ev.coord)) continue;
            eng.handle(ev);
            ++swaps;
            check(eng.cone_of(ev.coord));
        }
    }
    if (o.pass)
        o.detail = fmt("%ld rank swaps, %ld tree checks, max memberships %d <= (ceil(log2 n)+1)^d, alpha = 1",
                       swaps, trees, max_members);
    return o;
}

Outcome rknn_queries() {
    Outcome o;
    int queries = 0;
    std::size_t biggest = 0;
    for (const auto& [sc, res] : g_runs) {
        queries += res.rknn_checked;
        biggest = std::max(biggest, res.metrics.max_rknn_answer);
        // Answer, candidate containment and |answer| <= c k are checked per query.
        if (!res.ok() && res.mismatch->structure.rfind("rknn", 0) == 0) o.fail(res.mismatch->to_string());
    }
    if (queries < 200) o.fail(fmt("only %d queries checked", queries));
    if (o.pass) o.detail = fmt("%d timed queries equal brute force, largest answer %zu", queries, biggest);
    return o;
}

Outcome approximation() {
    Outcome o;
    std::mt19937_64 rng(404);
    std::uint64_t approx_events = 0;
    int probes = 0, runs = 0;
    for (int eps10 : {1, 5}) {
        for (const Config& c : {Config{16, 2, 1, 1}, Config{24, 2, 2, 2}, Config{32, 2, 1, 1}}) {
            Scenario sc = random_scenario(rng, c.n, c.d, c.s, c.k, Rational(eps10 == 1 ? 5 : 10));
            sc.epsilon = Rational(eps10, 10);
            SimOptions opt;
            opt.seed = rng();
            SimResult res = verify_against_oracle(sc, opt);
            record(res);
            ++runs;
            if (!res.ok()) o.fail(fmt("eps=0.%d n=%d: ", eps10, c.n) + res.mismatch->to_string());
            approx_events += res.metrics.events["approx"];
            probes += res.probes;
        }
    }
    if (o.pass)
        o.detail = fmt("eps in {0.1,0.5}, d=2, %d scenarios, %llu approx events, %d probes, 0 violations", runs,
                       static_cast<unsigned long long>(approx_events), probes);
    return o;
}

Outcome event_accounting() {
    Outcome o;
    int linear = 0;
    auto swaps_ok = [&](const Scenario& sc, const SimResult& res) {
        if (sc.degree != 1) return;
        ++linear;
        const std::uint64_t pairs = static_cast<std::uint64_t>(sc.n()) * (sc.n() - 1) / 2;
        if (res.metrics.max_list_swaps > pairs)
            o.fail(fmt("n=%d: a list fired %llu swaps > C(n,2)", sc.n(),
                       static_cast<unsigned long long>(res.metrics.max_list_swaps)));
        if (res.metrics.max_pair_swaps > 1)
            o.fail(fmt("n=%d: a pair swapped %llu times in one list", sc.n(),
                       static_cast<unsigned long long>(res.metrics.max_pair_swaps)));
    };
    for (const auto& [sc, res] : g_runs) swaps_ok(sc, res);

    std::mt19937_64 rng(505);
    std::vector<double> ratio;
    std::string table;
    for (int n : {16, 32, 64, 128}) {
        double work = 0;
        for (int rep = 0; rep < 2; ++rep) {
            Scenario sc = random_scenario(rng, n, 2, 1, 1, Rational(10));
            SimResult res = run_simulation(sc, SimOptions{});
            swaps_ok(sc, res);
            work += res.metrics.mean_work() / 2;
        }
        double r = work / std::pow(std::log2(static_cast<double>(n)), 3);
        ratio.push_back(r);
        table += fmt(" n=%d:%.3f", n, r);
    }
    const double lo = *std::min_element(ratio.begin(), ratio.end());
    const double hi = *std::max_element(ratio.begin(), ratio.end());
    if (hi > 4 * lo) o.fail("mean work / log^3 n spread exceeds 4x:" + table);
    if (o.pass)
        o.detail = fmt("%d linear runs within C(n,2) and one swap per crossing; work/log^3 n", linear) + table;
    return o;
}

Outcome determinism() {
    Outcome o;
    std::mt19937_64 rng(606);
    int traces = 0;
    for (const Config& c : {Config{24, 2, 2, 2}, Config{10, 3, 1, 1}}) {
        Scenario sc = random_scenario(rng, c.n, c.d, c.s, c.k, Rational(5), 6);
        const int cones = build_cone_family(c.d, sc.cone_angle()).c();
        for (auto f : {TraceFormat::records, TraceFormat::structured}) {
            SimOptions opt;
            opt.format = f;
            opt.seed = 77;
            std::ostringstream a, b;
            SimResult ra = run_simulation(sc, opt, &a);
            run_simulation(sc, opt, &b);
            ++traces;
            if (a.str() != b.str()) o.fail(fmt("n=%d d=%d: traces differ", c.n, c.d));
            if (replay_checksum(sc, cones, a.str()) != ra.metrics.graph_checksum)
                o.fail(fmt("n=%d d=%d: replayed checksum differs", c.n, c.d));
            if (ra.graph.checksum() != ra.metrics.graph_checksum) o.fail("final graph checksum mismatch");
        }
        SimOptions opt;
        opt.seed = 77;
        auto va = verify_against_oracle(sc, opt), vb = verify_against_oracle(sc, opt);
        if (va.metrics.to_json() != vb.metrics.to_json() || va.probes != vb.probes) o.fail("verify runs differ");
    }
    if (o.pass) o.detail = fmt("%d trace pairs byte-identical, replayed deltas match final checksum", traces);
    return o;
}

}  // namespace

int main() {
    struct Item {
        int id;
        const char* name;
        std::function<Outcome()> run;
        double limit_s;  // 0: none
    };
    // Order matters: 2, 5 and 7 reuse the runs of 3.
    const Item items[] = {
        {1, "static construction", static_construction, 60},
        {3, "kinetic ground truth", kinetic_ground_truth, 300},
        {4, "pair decomposition properties", pair_decomposition_suite, 0},
        {5, "rknn correctness", rknn_queries, 0},
        {6, "approximation guarantee", approximation, 0},
        {7, "event accounting", event_accounting, 0},
        {8, "determinism and replay", determinism, 0},
        {2, "subgraph invariant", [] {
             Outcome o;
             if (g_knn_violations) o.fail(fmt("%ld oracle k-NN edges missing", g_knn_violations));
             else o.detail = fmt("0 missing k-NN edges over %ld full checks in all suites", g_knn_checks);
             return o;
         }, 0},
    };
    int failed = 0;
    for (const auto& it : items) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o = it.run();
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (it.limit_s > 0 && s > it.limit_s) o.fail(fmt("took %.1f s, limit %.0f s", s, it.limit_s));
        failed += !o.pass;
        std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", it.id, it.name, o.detail.c_str(), s);
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
