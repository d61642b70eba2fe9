#include "tracegist/trace.hpp"

#include "tracegist/error.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace tracegist {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

bool parse_int(std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (*b == '+') ++b;
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

// Raw cells are typed after all rows are seen: a column is integer iff
// every cell parses as one.
Trace type_columns(std::vector<std::string> names, const std::vector<std::vector<std::string>>& rows) {
    Trace t;
    std::set<std::string> seen;
    for (auto& n : names) {
        if (n.empty()) throw Error(ErrorKind::Schema, "empty variable name", 1);
        if (!seen.insert(n).second) throw Error(ErrorKind::Schema, "duplicate variable '" + n + "'", 1);
    }
    const std::size_t k = names.size();
    std::vector<bool> is_int(k, true);
    for (const auto& r : rows)
        for (std::size_t c = 0; c < k; ++c) {
            std::int64_t v;
            if (is_int[c] && !parse_int(r[c], v)) is_int[c] = false;
        }
    for (std::size_t c = 0; c < k; ++c)
        t.schema.vars.push_back({std::move(names[c]), is_int[c] ? VarKind::Integer : VarKind::Categorical});
    t.observations.reserve(rows.size());
    for (const auto& r : rows) {
        Valuation v;
        v.values.reserve(k);
        for (std::size_t c = 0; c < k; ++c) {
            if (is_int[c]) {
                std::int64_t x = 0;
                parse_int(r[c], x);
                v.values.emplace_back(x);
            } else {
                v.values.emplace_back(r[c]);
            }
        }
        t.observations.push_back(std::move(v));
    }
    if (t.observations.size() < 2)
        throw Error(ErrorKind::TooShort, "trace needs at least 2 observations, got " +
                                             std::to_string(t.observations.size()));
    return t;
}

Trace parse_csv(std::string_view content) {
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> rows;
    long lineno = 0;
    bool have_header = false;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::string_view line = content.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        ++lineno;
        pos = nl == std::string_view::npos ? content.size() + 1 : nl + 1;
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (!have_header) {
            for (auto c : cells) names.emplace_back(c);
            have_header = true;
            continue;
        }
        if (cells.size() != names.size())
            throw Error(ErrorKind::Parse,
                        "expected " + std::to_string(names.size()) + " fields, got " + std::to_string(cells.size()),
                        lineno);
        std::vector<std::string> row;
        for (auto c : cells) {
            if (c.empty()) throw Error(ErrorKind::Parse, "empty field", lineno);
            row.emplace_back(c);
        }
        rows.push_back(std::move(row));
    }
    if (!have_header) throw Error(ErrorKind::Parse, "empty input", 1);
    return type_columns(std::move(names), rows);
}

Trace parse_jsonl(std::string_view content) {
    using nlohmann::ordered_json;
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> rows;
    long lineno = 0;
    std::size_t pos = 0;
    bool first = true;
    while (pos <= content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::string_view line = content.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        ++lineno;
        pos = nl == std::string_view::npos ? content.size() + 1 : nl + 1;
        if (trim(line).empty()) continue;
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw Error(ErrorKind::Parse, "not a JSON object", lineno);
        if (first) {
            for (auto it = j.begin(); it != j.end(); ++it) names.push_back(it.key());
            first = false;
        }
        if (j.size() != names.size()) throw Error(ErrorKind::Schema, "key set differs from first row", lineno);
        std::vector<std::string> row;
        for (const auto& n : names) {
            auto it = j.find(n);
            if (it == j.end()) throw Error(ErrorKind::Schema, "missing key '" + n + "'", lineno);
            if (it->is_string()) row.push_back(it->get<std::string>());
            else if (it->is_number_integer()) row.push_back(it->dump());
            else if (it->is_null()) throw Error(ErrorKind::Schema, "null value for '" + n + "'", lineno);
            else row.push_back(it->dump());
        }
        rows.push_back(std::move(row));
    }
    if (first) throw Error(ErrorKind::Parse, "empty input", 1);
    return type_columns(std::move(names), rows);
}

} // namespace

std::string render_value(const Value& v) {
    if (auto p = std::get_if<std::int64_t>(&v)) return std::to_string(*p);
    return std::get<std::string>(v);
}

int Schema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i].name == name) return static_cast<int>(i);
    return -1;
}

bool Schema::operator==(const Schema& o) const {
    if (vars.size() != o.vars.size()) return false;
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i].name != o.vars[i].name || vars[i].kind != o.vars[i].kind) return false;
    return true;
}

Trace parse_trace(std::string_view content, TraceFormat format) {
    return format == TraceFormat::Csv ? parse_csv(content) : parse_jsonl(content);
}

TraceFormat format_from_path(const std::string& path) {
    auto ends = [&](std::string_view suf) {
        return path.size() >= suf.size() && path.compare(path.size() - suf.size(), suf.size(), suf) == 0;
    };
    return (ends(".jsonl") || ends(".json") || ends(".ndjson")) ? TraceFormat::Jsonl : TraceFormat::Csv;
}

Trace read_trace_file(const std::string& path, TraceFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_trace(ss.str(), format);
}

std::string write_trace(const Trace& t, TraceFormat format) {
    std::string out;
    if (format == TraceFormat::Csv) {
        for (std::size_t i = 0; i < t.schema.size(); ++i) {
            if (i) out += ',';
            out += t.schema.vars[i].name;
        }
        out += '\n';
        for (const auto& o : t.observations) {
            for (std::size_t i = 0; i < o.values.size(); ++i) {
                if (i) out += ',';
                out += render_value(o.values[i]);
            }
            out += '\n';
        }
        return out;
    }
    for (const auto& o : t.observations) {
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < o.values.size(); ++i) {
            const auto& name = t.schema.vars[i].name;
            if (auto p = std::get_if<std::int64_t>(&o.values[i])) j[name] = *p;
            else j[name] = std::get<std::string>(o.values[i]);
        }
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<Symbol> to_symbols(const Trace& t) {
    std::vector<Symbol> out;
    if (t.observations.size() < 2) return out;
    out.reserve(t.observations.size() - 1);
    for (std::size_t i = 0; i + 1 < t.observations.size(); ++i)
        out.push_back({t.observations[i], t.observations[i + 1]});
    return out;
}

} // namespace tracegist
