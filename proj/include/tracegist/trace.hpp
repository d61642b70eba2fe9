#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tracegist {

enum class VarKind { Integer, Categorical };

struct VarSpec {
    std::string name;
    VarKind kind = VarKind::Integer;
};

// A value is either a signed 64-bit integer or a categorical label.
using Value = std::variant<std::int64_t, std::string>;

std::string render_value(const Value& v);

// Positional valuation: values[i] belongs to schema[i].
struct Valuation {
    std::vector<Value> values;
    bool operator==(const Valuation&) const = default;
    auto operator<=>(const Valuation&) const = default;
};

struct Schema {
    std::vector<VarSpec> vars;

    int index_of(std::string_view name) const; // -1 if absent
    std::size_t size() const { return vars.size(); }
    bool operator==(const Schema& o) const;
};

struct Trace {
    Schema schema;
    std::vector<Valuation> observations;

    std::size_t length() const { return observations.size(); }
};

// One letter of the alphabet: a pair of consecutive observations.
struct Symbol {
    Valuation current;
    Valuation next;
    bool operator==(const Symbol&) const = default;
    auto operator<=>(const Symbol&) const = default;
};

enum class TraceFormat { Csv, Jsonl };

Trace parse_trace(std::string_view content, TraceFormat format);
Trace read_trace_file(const std::string& path, TraceFormat format);
TraceFormat format_from_path(const std::string& path);

std::string write_trace(const Trace& t, TraceFormat format);

std::vector<Symbol> to_symbols(const Trace& t);

} // namespace tracegist
