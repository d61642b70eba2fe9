// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status
// non-zero if any criterion fails.

#include "brute_synth.hpp"
#include "random_systems.hpp"

#include "fixtures.hpp"

#include <tracegist/ktails.hpp>
#include <tracegist/learner.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace tracegist;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
    if (!ok) ++failures;
}

double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

struct Bench {
    std::string name;
    Trace trace;
    SegmentationConfig seg;
    PredicateSequence P;
    LearnResult result;
    double ms = 0;
};

Bench run_bench(std::string name, Trace t, std::vector<std::string> inputs = {}) {
    Bench b{std::move(name), std::move(t), {}, {}, {}, 0};
    auto t0 = Clock::now();
    b.seg.predicate.input_vars = resolve_vars(b.trace.schema, inputs);
    b.P = build_predicate_sequence(b.trace, b.seg);
    b.result = learn(b.P, {});
    b.ms = ms_since(t0);
    return b;
}

std::string external_solver() {
    std::string wrapper = TRACEGIST_PYSAT_WRAPPER;
    if (std::system("python3 -c 'import pysat' >/dev/null 2>&1") != 0) return {};
    return wrapper;
}

// least-squares slope of log(y) against log(x)
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double a = std::log(x[i]), b = std::log(y[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// Wall time of synthesis + learning in one mode, starting at n_start.
double timed_learn(const Trace& t, bool segmented, int n_start, int* final_n) {
    SegmentationConfig sc;
    sc.memoize = segmented;
    sc.predicate.input_vars = {0};
    LearnerConfig lc;
    lc.segmented = segmented;
    lc.n_start = n_start;
    auto t0 = Clock::now();
    auto P = build_predicate_sequence(t, sc);
    auto r = learn(P, lc);
    double ms = ms_since(t0);
    if (final_n) *final_n = r.stats.final_n;
    return ms;
}

bool postconditions(const Bench& b, std::string& why) {
    const auto& m = b.result.model;
    std::size_t missing = 0;
    for (const auto& w : b.result.windows.windows)
        if (!contains_window_path(m, w)) ++missing;
    auto extra = subsequence_check(m, b.P.ids, 2);
    bool det = is_predicate_deterministic(m);
    std::ostringstream os;
    os << b.name << " windows missing " << missing << "/" << b.result.windows.windows.size() << ", deterministic "
       << (det ? "yes" : "no") << ", S2-P2 " << extra.size();
    why = os.str();
    return missing == 0 && det && extra.empty();
}

} // namespace

int main() {
    std::cout << std::fixed;
    std::cout.precision(1);
    const std::string ext = external_solver();

    auto counter = run_bench("counter", fixtures::counter(128, 0, 447));
    auto integrator = run_bench("integrator", fixtures::integrator(4096, 1), {"ip"});
    auto usb = run_bench("usbslot", fixtures::usb_slot_walk(200, 1));
    std::vector<const Bench*> all = {&counter, &integrator, &usb};

    // 1. counter
    {
        auto ref = fixtures::counter_reference(std::make_shared<PredicateTable>(counter.trace.schema), 128);
        bool shape = isomorphic(counter.result.model, ref, {IsoLabels::Renaming, false});
        int n = counter.result.stats.final_n;
        std::ostringstream os;
        os << "counter T=128 length " << counter.trace.length() << ": N=" << n << ", counter-shape "
           << (shape ? "match" : "mismatch") << ", " << counter.ms << " ms";
        report(1, n == 4 && shape && counter.ms <= 5 * 60e3, os.str());
    }

    // 2. integrator
    {
        int n = integrator.result.stats.final_n;
        std::ostringstream os;
        os << "integrator length " << integrator.trace.length() << ": N=" << n << ", " << integrator.ms << " ms";
        report(2, n == 3 && integrator.ms <= 10 * 60e3, os.str());
    }

    // 3. USB slot round trip; the first symbol is the second event, which
    // leaves the protocol's state 2
    {
        auto ref = fixtures::usb_slot_reference(std::make_shared<PredicateTable>(usb.trace.schema), 2);
        bool iso = isomorphic(usb.result.model, ref, {IsoLabels::Exact, true});
        std::ostringstream os;
        os << "usbslot walk length " << usb.trace.length() << ": N=" << usb.result.stats.final_n << ", "
           << usb.result.model.transitions.size() << " edges, reference "
           << (iso ? "isomorphic" : "not isomorphic");
        report(3, iso, os.str());
    }

    // 4. minimality at N-1 under the final blocking set
    {
        bool ok = true;
        std::ostringstream os;
        for (const Bench* b : all) {
            int n = b->result.stats.final_n;
            bool unsat = n > 1 && unsat_at(b->result.windows, n - 1, b->result.blocking, 2);
            os << b->name << " N-1=" << n - 1 << " " << (unsat ? "UNSAT" : "SAT");
            if (!ext.empty() && n > 1) {
                SolveOptions o;
                o.external_solver = ext;
                bool ext_unsat = unsat_at(b->result.windows, n - 1, b->result.blocking, 2, o);
                os << " (external " << (ext_unsat ? "UNSAT" : "SAT") << ")";
                unsat = unsat && ext_unsat;
            }
            os << "; ";
            ok = ok && unsat;
        }
        report(4, ok, os.str());
    }

    // 5. post-conditions
    {
        bool ok = true;
        std::string all_why;
        for (const Bench* b : all) {
            std::string why;
            ok = postconditions(*b, why) && ok;
            all_why += why + "; ";
        }
        report(5, ok, all_why);
    }

    // 6. segmentation speedup across trace lengths
    {
        // Workload rule: the smallest seed whose shortest measured prefix
        // already saturates at both bounds, so every length has the same
        // target model and only the trace length varies.
        std::uint64_t seed = 0;
        for (; seed < 1000; ++seed) {
            auto t = fixtures::integrator(64, seed);
            bool lo = false, hi = false;
            for (const auto& v : t.observations) {
                auto op = std::get<std::int64_t>(v.values[1]);
                lo |= op == -5;
                hi |= op == 5;
            }
            if (lo && hi) break;
        }
        const std::vector<double> lengths = {64, 128, 256, 512, 1024};
        std::vector<double> seg, non;
        std::vector<int> ns;
        bool order_ok = true;
        std::ostringstream os;
        os << "integrator seed " << seed << ":";
        for (double L : lengths) {
            auto t = fixtures::integrator(static_cast<std::size_t>(L), seed);
            int n0 = 0;
            timed_learn(t, true, 1, &n0); // fair start: both modes begin at this N
            std::vector<double> a, b;
            int na = 0, nb = 0;
            for (int r = 0; r < 3; ++r) {
                a.push_back(timed_learn(t, true, n0, &na));
                b.push_back(timed_learn(t, false, n0, &nb));
            }
            ns.push_back(na);
            seg.push_back(median(a));
            non.push_back(median(b));
            if (L >= 256 && seg.back() > non.back()) order_ok = false;
            os << " " << L << ":" << seg.back() << "/" << non.back() << "ms(N=" << na << "/" << nb << ")";
        }
        double es = loglog_slope(lengths, seg), en = loglog_slope(lengths, non);
        os.precision(2);
        os << "; exponent segmented " << es << ", non-segmented " << en;
        bool same_n = std::adjacent_find(ns.begin(), ns.end(), std::not_equal_to<>()) == ns.end();
        os << (same_n ? "" : " [model size varies with length]");
        report(6, order_ok && es <= 1.3 && en > 1.3, os.str());
    }

    // 7. synthesis oracle
    {
        const Schema sx = [] {
            Schema s;
            s.vars.push_back({"x", VarKind::Integer});
            return s;
        }();
        auto ex_of = [](std::initializer_list<std::pair<std::int64_t, std::int64_t>> ps) {
            std::vector<Example> ex;
            for (auto [a, b] : ps) ex.push_back({Valuation{{Value(a)}}, Valuation{{Value(b)}}});
            return ex;
        };
        bool ok = true;
        std::ostringstream os;
        struct Case {
            std::vector<Example> ex;
            std::string want;
        };
        for (const auto& c : {Case{ex_of({{1, 2}, {2, 3}, {3, 4}}), "(+ x 1)"},
                              Case{ex_of({{1, 2}, {2, 4}, {4, 8}}), "(+ x x)"}}) {
            auto e = synthesize_next(c.ex, sx, 0, {});
            std::string got = e ? to_prefix(**e, sx) : "<none>";
            int size = e ? node_count(**e) : 0;
            // nothing strictly smaller is consistent
            auto bf = brute::search(c.ex, 0, brute::pool_of(c.ex), size);
            bool minimal = bf.min_size && *bf.min_size == size;
            os << got << " (size " << size << ", " << bf.trees << " trees enumerated, "
               << (minimal ? "minimal" : "NOT minimal") << "); ";
            ok = ok && got == c.want && minimal;
        }
        std::vector<Example> cex;
        for (const auto& s : to_symbols(counter.trace)) cex.push_back({s.current, s.next});
        auto pool = constant_pool(cex, counter.trace.schema, {});
        bool has128 = std::binary_search(pool.begin(), pool.end(), 128);
        os << "counter pool " << (has128 ? "contains" : "lacks") << " 128";
        report(7, ok && has128, os.str());
    }

    // 8. kTails baseline gap
    {
        bool ok = true;
        std::ostringstream os;
        for (const Bench* b : all) {
            auto raw = raw_observation_sequence(b->trace);
            auto km = ktails(build_pta({raw.ids}), 2, raw.table);
            int kt = km.n_states;
            int n = b->result.stats.final_n;
            os << b->name << " learner " << n << " vs kTails " << kt;
            if (b == &usb) {
                // how loose is the merged model? compare admitted event pairs
                auto ref = fixtures::usb_slot_reference(std::make_shared<PredicateTable>(usb.trace.schema), 2);
                os << " (kTails admits " << paths_of_length(km, 2).size() << " event pairs, protocol "
                   << paths_of_length(ref, 2).size() << ", learner " << paths_of_length(b->result.model, 2).size()
                   << ")";
            }
            if (b == &counter) {
                os << (kt >= 10 * n ? " (>=10x)" : " (<10x)");
                ok = ok && kt >= 10 * n;
            }
            if (n > kt) os << " [learner larger]";
            os << "; ";
            ok = ok && n <= kt;
        }
        report(8, ok, os.str());
    }

    // 9. solver differential
    {
        std::mt19937_64 rng(20240601);
        int agree_enum = 0, agree_ext = 0, sat = 0;
        const int total = 200;
        for (int i = 0; i < total; ++i) {
            auto cs = randsys::random_system(rng);
            auto ref = solve_exhaustive(cs);
            auto in = solve(cs);
            bool ok_in = in.status == ref.status && (in.status != SolveStatus::Sat || check_assignment(cs, in.assignment));
            agree_enum += ok_in;
            sat += ref.status == SolveStatus::Sat;
            if (!ext.empty()) {
                SolveOptions o;
                o.external_solver = ext;
                auto ex = solve(cs, o);
                agree_ext += ex.status == ref.status;
            }
        }
        std::ostringstream os;
        os << total << " systems (" << sat << " SAT): internal vs enumeration " << agree_enum << "/" << total;
        if (ext.empty())
            os << ", external solver unavailable";
        else
            os << ", external (python-sat) vs enumeration " << agree_ext << "/" << total;
        report(9, agree_enum == total && (ext.empty() || agree_ext == total), os.str());
    }

    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
              << std::endl;
    return failures ? 1 : 0;
}
