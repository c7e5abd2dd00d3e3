#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "ksyg/ksyg_static.hpp"
#include "ksyg/simulation.hpp"

using namespace ksyg;

namespace {

constexpr int kOk = 0, kMismatch = 1, kInputError = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string scenario;
    int k = 0;  // 0: keep the scenario's
    std::string t_end;
    int probes = 100;
    std::uint64_t seed = 1;
    std::string trace_out;
    std::string format = "records";
    std::string metrics_out;
};

Scenario load(const Common& c) {
    if (c.scenario.empty()) throw InputError("--scenario is required");
    std::ifstream in(c.scenario);
    if (!in) throw InputError("cannot open " + c.scenario);
    std::stringstream text;
    text << in.rdbuf();
    Scenario sc = parse_scenario(text.str());
    if (c.k > 0) {
        sc.k = c.k;
        for (const auto& q : sc.queries)
            if (q.k > sc.k) throw InputError("--k is smaller than a query's k");
    }
    if (!c.t_end.empty()) {
        auto t = parse_number(c.t_end);
        if (!t || *t < sc.t0) throw InputError("--t-end must be a number >= t0");
        sc.t_end = *t;
        std::erase_if(sc.queries, [&](const RkNNQuery& q) { return q.t > sc.t_end; });
    }
    return sc;
}

SimOptions options(const Common& c) {
    SimOptions opt;
    opt.format = c.format == "structured" ? TraceFormat::structured : TraceFormat::records;
    opt.probes = c.probes;
    opt.seed = c.seed;
    return opt;
}

void write_metrics(const Common& c, const nlohmann::ordered_json& j) {
    if (c.metrics_out.empty()) return;
    std::ofstream out(c.metrics_out);
    if (!out) throw InputError("cannot write " + c.metrics_out);
    out << j.dump(2) << "\n";
}

std::string ids_of(const Scenario& sc, const std::vector<int>& v) {
    std::vector<long> e;
    for (int p : v) e.push_back(sc.ids[p]);
    return join_ids(e);
}

int cmd_build(const Common& c, const std::string& at) {
    Scenario sc = load(c);
    Rational t = sc.t0;
    if (!at.empty()) {
        auto v = parse_number(at);
        if (!v) throw InputError("--at must be a number");
        t = *v;
    }
    auto fam = build_cone_family(sc.dim, sc.cone_angle());
    std::vector<Point> pts;
    for (const auto& tr : sc.points) pts.push_back(evaluate(tr, t));
    KSYGraph g = build_ksyg(pts, sc.k, fam);
    std::vector<std::vector<int>> knn(sc.n());
    if (sc.k < sc.n()) knn = report_all_knn_static(pts, sc.k, fam);
    const bool structured = c.format == "structured";
    for (int p = 0; p < sc.n(); ++p) {
        if (structured) {
            nlohmann::ordered_json j;
            j["id"] = sc.ids[p];
            for (int l = 0; l < fam.c(); ++l) {
                std::vector<long> e;
                for (int q : g.sel[p][l]) e.push_back(sc.ids[q]);
                j["cones"].push_back(e);
            }
            std::vector<long> e;
            for (int q : knn[p]) e.push_back(sc.ids[q]);
            j["knn"] = e;
            std::cout << j.dump() << "\n";
            continue;
        }
        std::cout << "point=" << sc.ids[p];
        for (int l = 0; l < fam.c(); ++l)
            if (!g.sel[p][l].empty()) std::cout << " K" << l << "=" << ids_of(sc, g.sel[p][l]);
        std::cout << " knn=" << ids_of(sc, knn[p]) << "\n";
    }
    nlohmann::ordered_json m;
    m["n"] = sc.n();
    m["k"] = sc.k;
    m["cones"] = fam.c();
    m["edges"] = g.edge_count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(g.checksum()));
    m["checksum"] = buf;
    write_metrics(c, m);
    return kOk;
}

int cmd_simulate(const Common& c, bool queries_only) {
    Scenario sc = load(c);
    SimOptions opt = options(c);
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!c.trace_out.empty()) {
        file.open(c.trace_out);
        if (!file) throw InputError("cannot write " + c.trace_out);
        out = &file;
    }
    SimResult res;
    if (queries_only) {
        std::ostringstream all;
        res = run_simulation(sc, opt, &all);
        std::istringstream in(all.str());
        for (std::string line; std::getline(in, line);)
            if (line.find("kind=query") != std::string::npos || line.find("\"kind\":\"query\"") != std::string::npos)
                *out << line << "\n";
    } else {
        res = run_simulation(sc, opt, out);
    }
    out->flush();
    write_metrics(c, res.metrics.to_json());
    return kOk;
}

int cmd_verify(const Common& c) {
    Scenario sc = load(c);
    auto t0 = std::chrono::steady_clock::now();
    SimResult res = verify_against_oracle(sc, options(c));
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (res.ok())
        std::cout << "ok: " << res.metrics.engine_events << " engine events, " << res.instant_checks
                  << " event checks, " << res.probes << " probes, " << res.rknn_checked << " queries ("
                  << static_cast<long>(ms) << " ms)\n";
    else
        std::cout << "MISMATCH " << res.mismatch->to_string() << "\n";
    auto j = res.metrics.to_json();
    j["verify"] = {{"ok", res.ok()}, {"probes", res.probes}, {"event_checks", res.instant_checks},
                   {"queries", res.rknn_checked}, {"knn_violations", res.knn_violations}};
    if (res.mismatch) j["verify"]["mismatch"] = res.mismatch->to_string();
    write_metrics(c, j);
    return res.ok() ? kOk : kMismatch;
}

struct BenchArgs {
    std::vector<int> sizes{16, 32, 64, 128};
    int dim = 2, degree = 1, k = 1;
};

int cmd_bench(const Common& c, const BenchArgs& b) {
    auto t_end = parse_number(c.t_end.empty() ? "10" : c.t_end);
    if (!t_end || sgn(*t_end) < 0) throw InputError("--t-end must be a number >= 0");
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    std::printf("%6s %10s %10s %12s %12s %10s\n", "n", "events", "external", "mean_work", "log^(d+1)n", "ms");
    std::vector<std::pair<Scenario, std::string>> cases;
    if (!c.scenario.empty()) {
        cases.emplace_back(load(c), c.scenario);
    } else {
        std::mt19937_64 rng(c.seed);
        const int k = c.k > 0 ? c.k : b.k;
        for (int n : b.sizes) {
            if (n <= k) throw InputError("--n values must exceed k");
            cases.emplace_back(random_scenario(rng, n, b.dim, b.degree, k, *t_end), "random");
        }
    }
    for (auto& [sc, name] : cases) {
        auto t0 = std::chrono::steady_clock::now();
        SimResult res = run_simulation(sc, options(c));
        double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        double lg = std::pow(std::log2(static_cast<double>(sc.n())), sc.dim + 1);
        std::printf("%6d %10llu %10llu %12.1f %12.1f %10.0f\n", sc.n(),
                    static_cast<unsigned long long>(res.metrics.engine_events),
                    static_cast<unsigned long long>(res.metrics.external), res.metrics.mean_work(), lg, ms);
        auto j = res.metrics.to_json();
        j["source"] = name;
        j["ms"] = ms;
        runs.push_back(j);
    }
    write_metrics(c, runs);
    return kOk;
}

void add_common(CLI::App* app, Common& c, bool scenario_required = true) {
    auto* opt = app->add_option("--scenario", c.scenario, "Scenario file");
    if (scenario_required) opt->required();
    app->add_option("--k", c.k, "Override the scenario's k")->check(CLI::PositiveNumber);
    app->add_option("--t-end", c.t_end, "Override the end time");
    app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"records", "structured"}));
    app->add_option("--metrics-out", c.metrics_out, "Write metrics JSON here");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kinetic k-Semi-Yao graph toolkit"};
    app.require_subcommand(1);
    Common c;
    std::string at;
    BenchArgs bench;

    auto* build = app.add_subcommand("build", "Static k-SYG and all-kNN at one time");
    add_common(build, c);
    build->add_option("--at", at, "Time to evaluate (default t0)");

    auto* simulate = app.add_subcommand("simulate", "Run the kinetic simulation and write the trace");
    add_common(simulate, c);
    simulate->add_option("--trace-out", c.trace_out, "Trace file (default stdout)");
    simulate->add_option("--seed", c.seed, "Seed");

    auto* query = app.add_subcommand("query", "Answer the scenario's timed RkNN queries");
    add_common(query, c);
    query->add_option("--trace-out", c.trace_out, "Answer file (default stdout)");

    auto* verify = app.add_subcommand("verify", "Simulate with brute-force checks");
    add_common(verify, c);
    verify->add_option("--probes", c.probes, "Random probe times")->check(CLI::NonNegativeNumber);
    verify->add_option("--seed", c.seed, "Probe seed");

    auto* benchc = app.add_subcommand("bench", "Event counts and engine work on random scenarios");
    add_common(benchc, c, false);
    benchc->add_option("--seed", c.seed, "Generator seed");
    benchc->add_option("--n", bench.sizes, "Point counts")->check(CLI::PositiveNumber);
    benchc->add_option("--dim", bench.dim, "Dimension")->check(CLI::Range(2, 3));
    benchc->add_option("--degree", bench.degree, "Motion degree")->check(CLI::Range(0, 8));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*build) return cmd_build(c, at);
        if (*simulate) return cmd_simulate(c, false);
        if (*query) return cmd_simulate(c, true);
        if (*verify) return cmd_verify(c);
        return cmd_bench(c, bench);
    } catch (const ScenarioError& e) {
        std::cerr << c.scenario << ": " << e.what() << "\n";
        return kInputError;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
}
