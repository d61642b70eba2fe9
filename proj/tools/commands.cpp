#include "commands.hpp"

#include "fixtures.hpp"

#include <tracegist/error.hpp>
#include <tracegist/ktails.hpp>
#include <tracegist/learner.hpp>
#include <tracegist/log.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace cli {

using namespace tracegist;
using Clock = std::chrono::steady_clock;
using nlohmann::ordered_json;

namespace {

struct Common {
    std::string input;
    std::string format; // csv | jsonl | "" (from extension)
    int window_pred = 2;
    int window = 3;
    int seq_len = 2;
    int start_states = 1;
    int max_states = 32;
    std::string solver = "internal";
    bool no_guard_pass = false;
    std::string labels = "event";
    std::string inputs;
    double timeout_sec = 0;
    int jobs = 1;
    int max_nodes = 15;
};

int exit_code_for(ErrorKind k) {
    switch (k) {
    case ErrorKind::Parse:
    case ErrorKind::Schema:
    case ErrorKind::TooShort:
    case ErrorKind::Io: return kParse;
    case ErrorKind::Argument:
    case ErrorKind::Config: return kConfig;
    case ErrorKind::Timeout: return kTimeout;
    case ErrorKind::NMaxExceeded: return kNMax;
    default: return kFailure;
    }
}

int report_error(std::ostream& err, const std::string& kind, const std::string& msg, int code, long line = 0) {
    ordered_json j;
    j["error"] = kind;
    j["message"] = msg;
    if (line > 0) j["line"] = line;
    j["exit_code"] = code;
    err << j.dump() << '\n';
    return code;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

TraceFormat parse_format(const std::string& f, const std::string& path) {
    if (f == "csv") return TraceFormat::Csv;
    if (f == "jsonl") return TraceFormat::Jsonl;
    if (f.empty()) return format_from_path(path);
    throw Error(ErrorKind::Config, "--format must be csv or jsonl");
}

LabelMode parse_labels(const std::string& s) {
    if (s == "full") return LabelMode::Full;
    if (s == "event") return LabelMode::Event;
    throw Error(ErrorKind::Config, "--labels must be full or event");
}

std::string parse_solver(const std::string& s) {
    if (s == "internal") return {};
    if (s.rfind("dimacs:", 0) == 0 && s.size() > 7) return s.substr(7);
    throw Error(ErrorKind::Config, "--solver must be internal or dimacs:<path>");
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    f << text;
}

void add_learner_flags(CLI::App* c, Common& o) {
    c->add_option("--window-pred", o.window_pred, "Observations per synthesis segment (w')");
    c->add_option("--window", o.window, "Predicate window length (w)");
    c->add_option("--seq-len", o.seq_len, "Length of checked transition sequences (l)");
    c->add_option("--start-states", o.start_states, "Initial state count");
    c->add_option("--max-states", o.max_states, "Give up above this many states");
    c->add_option("--solver", o.solver, "internal | dimacs:<path>");
    c->add_flag("--no-guard-pass", o.no_guard_pass, "Disable threshold guards");
    c->add_option("--labels", o.labels, "Edge labels: full | event");
    c->add_option("--inputs", o.inputs, "Comma-separated input (environment) variables");
    c->add_option("--timeout-sec", o.timeout_sec, "Solver time budget in seconds (0 = none)");
    c->add_option("--jobs", o.jobs, "Parallel workers");
    c->add_option("--max-nodes", o.max_nodes, "Synthesis AST node budget");
}

SegmentationConfig seg_config(const Common& o, const Trace& t) {
    SegmentationConfig s;
    s.window_pred = o.window_pred;
    s.guard_pass = !o.no_guard_pass;
    s.jobs = o.jobs;
    s.predicate.budget.max_ast_nodes = o.max_nodes;
    s.predicate.input_vars = resolve_vars(t.schema, split_list(o.inputs));
    if (o.max_nodes < 1) throw Error(ErrorKind::Config, "--max-nodes must be >= 1");
    if (o.jobs < 1) throw Error(ErrorKind::Config, "--jobs must be >= 1");
    return s;
}

LearnerConfig learner_config(const Common& o) {
    LearnerConfig c;
    c.window_pred = o.window_pred;
    c.window = o.window;
    c.seq_len = o.seq_len;
    c.n_start = o.start_states;
    c.n_max = o.max_states;
    c.external_solver = parse_solver(o.solver);
    c.timeout_sec = o.timeout_sec;
    c.validate();
    return c;
}

Trace load(const Common& o) {
    if (o.input.empty()) throw Error(ErrorKind::Config, "--input is required");
    return read_trace_file(o.input, parse_format(o.format, o.input));
}

// ---- learn -------------------------------------------------------------

struct LearnOut {
    std::string dot, json, stats;
};

int cmd_learn(const Common& o, const LearnOut& lo, std::ostream& out) {
    LabelMode mode = parse_labels(o.labels);
    LearnerConfig cfg = learner_config(o);
    Trace t = load(o);
    auto P = build_predicate_sequence(t, seg_config(o, t));
    log_info("predicate sequence: " + std::to_string(P.size()) + " symbols, " + std::to_string(P.table->size()) +
             " predicates");
    auto r = learn(P, cfg);
    bool any = false;
    if (!lo.dot.empty()) emit(lo.dot, to_dot(r.model, mode), out), any = true;
    if (!lo.json.empty()) emit(lo.json, to_json(r.model, mode), out), any = true;
    if (!lo.stats.empty()) emit(lo.stats, r.stats.to_json(), out), any = true;
    if (!any) out << to_json(r.model, mode);
    return kOk;
}

// ---- baseline ----------------------------------------------------------

int cmd_baseline(const Common& o, int k, const std::string& events, const LearnOut& lo, std::ostream& out) {
    LabelMode mode = parse_labels(o.labels);
    Trace t = load(o);
    if (k < 0) throw Error(ErrorKind::Config, "--k must be >= 0");
    PredicateSequence P;
    if (events == "raw") P = raw_observation_sequence(t);
    else if (events == "predicates") P = build_predicate_sequence(t, seg_config(o, t));
    else throw Error(ErrorKind::Config, "--events must be raw or predicates");
    auto t0 = Clock::now();
    Automaton m = ktails(build_pta({P.ids}), k, P.table);
    double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    bool any = false;
    if (!lo.dot.empty()) emit(lo.dot, to_dot(m, mode), out), any = true;
    if (!lo.json.empty()) emit(lo.json, to_json(m, mode), out), any = true;
    ordered_json s;
    s["k"] = k;
    s["states"] = m.n_states;
    s["transitions"] = m.transitions.size();
    s["ms"] = ms;
    if (!lo.stats.empty()) emit(lo.stats, s.dump(2) + "\n", out), any = true;
    if (!any) out << to_json(m, mode);
    return kOk;
}

// ---- gen ---------------------------------------------------------------

struct GenOpts {
    std::string kind;
    int T = 128;
    int cycles = 1;
    std::size_t length = 0;
    std::uint64_t seed = 0;
    int limit = 5;
    std::string format = "csv";
    std::string out = "-";
};

Trace make_fixture(const std::string& kind, std::size_t length, std::uint64_t seed, int T, int cycles, int limit) {
    if (kind == "counter")
        return fixtures::counter(T, cycles, length ? std::optional<std::size_t>(length) : std::nullopt);
    if (kind == "integrator") return fixtures::integrator(length ? length : 4096, seed, limit);
    if (kind == "usbslot") return fixtures::usb_slot_walk(length ? length : 200, seed);
    throw Error(ErrorKind::Config, "unknown fixture kind '" + kind + "' (counter | integrator | usbslot)");
}

int cmd_gen(const GenOpts& g, std::ostream& out) {
    TraceFormat f = parse_format(g.format, "");
    Trace t = make_fixture(g.kind, g.length, g.seed, g.T, g.cycles, g.limit);
    emit(g.out, write_trace(t, f), out);
    return kOk;
}

// ---- synth -------------------------------------------------------------

int cmd_synth(const Common& o, long from, long to, std::ostream& out) {
    LabelMode mode = parse_labels(o.labels);
    Trace t = load(o);
    auto syms = to_symbols(t);
    if (to < 0) to = from + 1;
    if (from < 0 || to <= from || static_cast<std::size_t>(to) > syms.size())
        throw Error(ErrorKind::Config, "symbol range must satisfy 0 <= from < to <= " + std::to_string(syms.size()));
    std::vector<Symbol> seg(syms.begin() + from, syms.begin() + to);
    PredicateOptions popts = seg_config(o, t).predicate;
    PredicateTable table(t.schema);
    Predicate p = form_predicate(seg, table, popts);
    ordered_json j;
    j["from"] = from;
    j["to"] = to;
    j["expr"] = p.key;
    j["label"] = table.display_label(p.id, mode);
    j["nodes"] = node_count(*p.expr);
    out << j.dump(2) << '\n';
    return kOk;
}

// ---- compare -----------------------------------------------------------

struct CompareOpts {
    std::string kind = "integrator";
    std::string lengths = "64,128,256,512,1024";
    std::uint64_t seed = 0;
    int k = 2;
    std::string json;
    int repeat = 1;
    // Start both learner modes at the N a preliminary segmented run finds,
    // so timings compare equal search depths.
    bool fair_start = true;
};

struct Cell {
    std::string status = "ok";
    double ms = 0;
    int states = 0;
};

double fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    // least squares slope of log y over log x
    const std::size_t n = x.size();
    if (n < 2) return 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double lx = std::log(x[i]), ly = std::log(std::max(y[i], 1e-3));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double d = n * sxx - sx * sx;
    return d == 0 ? 0 : (n * sxy - sx * sy) / d;
}

Cell run_learner(const Trace& t, const Common& o, bool segmented, int n_start, Automaton* model) {
    Cell c;
    auto t0 = Clock::now();
    try {
        SegmentationConfig sc = seg_config(o, t);
        sc.memoize = segmented;
        LearnerConfig lc = learner_config(o);
        lc.segmented = segmented;
        lc.n_start = n_start;
        lc.n_max = std::max(lc.n_max, n_start);
        auto P = build_predicate_sequence(t, sc);
        auto r = learn(P, lc);
        c.states = r.stats.final_n;
        if (model) *model = r.model;
    } catch (const Error& e) {
        c.status = to_string(e.kind());
    }
    c.ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return c;
}

// Median wall time over `repeat` runs; state count from the last run.
Cell timed(const Trace& t, const Common& o, bool segmented, int n_start, int repeat, Automaton* model) {
    std::vector<double> ms;
    Cell c;
    for (int i = 0; i < std::max(1, repeat); ++i) {
        c = run_learner(t, o, segmented, n_start, model);
        ms.push_back(c.ms);
        if (c.status != "ok") break;
    }
    std::sort(ms.begin(), ms.end());
    c.ms = ms[ms.size() / 2];
    return c;
}

int cmd_compare(Common o, const CompareOpts& co, std::ostream& out) {
    std::vector<std::size_t> lengths;
    for (const auto& s : split_list(co.lengths)) {
        try {
            lengths.push_back(std::stoul(s));
        } catch (...) {
            throw Error(ErrorKind::Config, "bad length '" + s + "'");
        }
    }
    if (lengths.empty()) throw Error(ErrorKind::Config, "--lengths is empty");
    if (co.kind == "integrator" && o.inputs.empty()) o.inputs = "ip";

    struct Row {
        std::size_t length;
        Cell seg, nonseg, kt;
        bool same_model = false;
    };
    auto run_row = [&](std::size_t L) {
        Row r;
        r.length = L;
        Trace t = make_fixture(co.kind, L, co.seed, 128, 1, 5);
        Automaton a, b;
        int n_start = o.start_states;
        if (co.fair_start) {
            Cell pre = run_learner(t, o, true, o.start_states, nullptr);
            if (pre.status == "ok") n_start = pre.states;
        }
        r.seg = timed(t, o, true, n_start, co.repeat, &a);
        r.nonseg = timed(t, o, false, n_start, co.repeat, &b);
        r.same_model = r.seg.status == "ok" && r.nonseg.status == "ok" &&
                       isomorphic(a, b, {IsoLabels::Exact, true});
        auto t0 = Clock::now();
        auto raw = raw_observation_sequence(t);
        r.kt.states = ktails(build_pta({raw.ids}), co.k, raw.table).n_states;
        r.kt.ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        return r;
    };

    std::vector<Row> rows;
    if (o.jobs <= 1) {
        for (auto L : lengths) rows.push_back(run_row(L));
    } else {
        // cells are independent; run batches of `jobs`
        Common single = o;
        single.jobs = 1;
        for (std::size_t i = 0; i < lengths.size(); i += o.jobs) {
            std::vector<std::future<Row>> fs;
            for (std::size_t j = i; j < std::min(lengths.size(), i + o.jobs); ++j)
                fs.push_back(std::async(std::launch::async, run_row, lengths[j]));
            for (auto& f : fs) rows.push_back(f.get());
        }
    }

    ordered_json j;
    j["kind"] = co.kind;
    j["seed"] = co.seed;
    j["k"] = co.k;
    j["fair_start"] = co.fair_start;
    j["repeat"] = co.repeat;
    j["rows"] = ordered_json::array();
    std::vector<double> xs, ys_seg, ys_non;
    out << std::left << std::setw(8) << "length" << std::setw(22) << "segmented ms (N)" << std::setw(26)
        << "non-segmented ms (N)" << std::setw(20) << "kTails ms (states)" << "same\n";
    for (const auto& r : rows) {
        auto cell_json = [](const Cell& c) {
            ordered_json x;
            x["status"] = c.status;
            x["ms"] = c.ms;
            x["states"] = c.states;
            return x;
        };
        ordered_json row;
        row["length"] = r.length;
        row["segmented"] = cell_json(r.seg);
        row["non_segmented"] = cell_json(r.nonseg);
        row["ktails"] = cell_json(r.kt);
        row["same_model"] = r.same_model;
        j["rows"].push_back(row);
        auto show = [](const Cell& c) {
            std::ostringstream s;
            s << std::fixed << std::setprecision(1) << c.ms << " (" << (c.status == "ok" ? std::to_string(c.states) : c.status)
              << ")";
            return s.str();
        };
        out << std::setw(8) << r.length << std::setw(22) << show(r.seg) << std::setw(26) << show(r.nonseg)
            << std::setw(20) << show(r.kt) << (r.same_model ? "yes" : "no") << '\n';
        if (r.seg.status == "ok" && r.nonseg.status == "ok") {
            xs.push_back(static_cast<double>(r.length));
            ys_seg.push_back(r.seg.ms);
            ys_non.push_back(r.nonseg.ms);
        }
    }
    j["exponent_segmented"] = fit_exponent(xs, ys_seg);
    j["exponent_non_segmented"] = fit_exponent(xs, ys_non);
    out << "fit exponent: segmented " << std::setprecision(3) << fit_exponent(xs, ys_seg) << ", non-segmented "
        << fit_exponent(xs, ys_non) << '\n';
    if (!co.json.empty()) emit(co.json, j.dump(2) + "\n", out);
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"tracegist: learn concise automata from execution traces", "tracegist"};
    app.require_subcommand(1);

    Common o;
    LearnOut lo;

    auto* learn_cmd = app.add_subcommand("learn", "Learn a minimal automaton from a trace");
    learn_cmd->add_option("-i,--input", o.input, "Trace file (csv or jsonl)")->required();
    learn_cmd->add_option("--format", o.format, "csv | jsonl (default: by extension)");
    add_learner_flags(learn_cmd, o);
    learn_cmd->add_option("--dot", lo.dot, "Write DOT here ('-' for stdout)");
    learn_cmd->add_option("--json", lo.json, "Write model JSON here ('-' for stdout)");
    learn_cmd->add_option("--stats", lo.stats, "Write stats JSON here ('-' for stdout)");

    int k = 2;
    std::string events = "raw";
    auto* base_cmd = app.add_subcommand("baseline", "kTails state-merge baseline");
    base_cmd->add_option("-i,--input", o.input, "Trace file")->required();
    base_cmd->add_option("--format", o.format, "csv | jsonl");
    base_cmd->add_option("--k", k, "Tail length");
    base_cmd->add_option("--events", events, "raw (next observation) | predicates (synthesized)");
    add_learner_flags(base_cmd, o);
    base_cmd->add_option("--dot", lo.dot, "Write DOT here");
    base_cmd->add_option("--json", lo.json, "Write model JSON here");
    base_cmd->add_option("--stats", lo.stats, "Write summary JSON here");

    GenOpts g;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a benchmark trace");
    gen_cmd->add_option("kind", g.kind, "counter | integrator | usbslot")->required();
    gen_cmd->add_option("--T", g.T, "Counter threshold");
    gen_cmd->add_option("--cycles", g.cycles, "Counter up/down cycles");
    gen_cmd->add_option("--length", g.length, "Number of observations");
    gen_cmd->add_option("--seed", g.seed, "Random seed");
    gen_cmd->add_option("--limit", g.limit, "Integrator saturation bound");
    gen_cmd->add_option("--format", g.format, "csv | jsonl");
    gen_cmd->add_option("-o,--out", g.out, "Output file ('-' for stdout)");

    long from = 0, to = -1;
    auto* synth_cmd = app.add_subcommand("synth", "Synthesize the predicate for one trace segment");
    synth_cmd->add_option("-i,--input", o.input, "Trace file")->required();
    synth_cmd->add_option("--format", o.format, "csv | jsonl");
    synth_cmd->add_option("--from", from, "First symbol (0-based)");
    synth_cmd->add_option("--to", to, "One past the last symbol (default from+1)");
    synth_cmd->add_option("--inputs", o.inputs, "Comma-separated input variables");
    synth_cmd->add_option("--labels", o.labels, "full | event");
    synth_cmd->add_option("--max-nodes", o.max_nodes, "Synthesis AST node budget");

    CompareOpts co;
    auto* cmp_cmd = app.add_subcommand("compare", "Segmented vs non-segmented vs kTails over trace lengths");
    cmp_cmd->add_option("--kind", co.kind, "counter | integrator | usbslot");
    cmp_cmd->add_option("--lengths", co.lengths, "Comma-separated trace lengths");
    cmp_cmd->add_option("--seed", co.seed, "Fixture seed");
    cmp_cmd->add_option("--k", co.k, "kTails tail length");
    cmp_cmd->add_option("--json", co.json, "Write report JSON here");
    cmp_cmd->add_option("--repeat", co.repeat, "Timed runs per cell (median reported)");
    cmp_cmd->add_flag("!--no-fair-start", co.fair_start, "Time both modes from N = 1 instead of the final N");
    add_learner_flags(cmp_cmd, o);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        return report_error(err, "config", e.what(), kConfig);
    }

    try {
        if (*learn_cmd) return cmd_learn(o, lo, out);
        if (*base_cmd) return cmd_baseline(o, k, events, lo, out);
        if (*gen_cmd) return cmd_gen(g, out);
        if (*synth_cmd) return cmd_synth(o, from, to, out);
        if (*cmp_cmd) return cmd_compare(o, co, out);
    } catch (const Error& e) {
        return report_error(err, to_string(e.kind()), e.what(), exit_code_for(e.kind()), e.line());
    } catch (const std::exception& e) {
        return report_error(err, "internal", e.what(), kFailure);
    }
    return kFailure;
}

} // namespace cli
