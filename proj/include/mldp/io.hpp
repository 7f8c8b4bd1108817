#pragma once

// File formats:
//   model   {"n": 2, "s": 1, "mu": [...n^(s+1) values, lexicographic...]}
//   paths   one path per line, symbols as space-separated integers
//   census  [{"counts": [...], "cardinality": 3}, ...] in lexicographic order
//   event   {"type": "ball", "centre": [...], "radius": r}
//           {"type": "halfspace", "c": [...], "b": b}        (<c, nu> >= b)
//           {"type": "classes", "members": [[...], ...]}
//
// Output floats use 17 significant digits; infinities are written as the
// strings "+inf" / "-inf" and accepted back on input.

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mldp/census.hpp"
#include "mldp/distribution.hpp"
#include "mldp/error.hpp"
#include "mldp/ldp.hpp"
#include "mldp/markov_model.hpp"
#include "mldp/sample_path.hpp"

namespace mldp::io {

using json = nlohmann::ordered_json;

/// Malformed or unreadable input file.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_scalar_array(const json& j) {
    for (const auto& v : j)
        if (v.is_structured()) return false;
    return true;
}

inline void write_scalar(std::string& out, const json& j) {
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (std::isnan(v)) out += "\"nan\"";
        else if (std::isinf(v)) out += v > 0 ? "\"+inf\"" : "\"-inf\"";
        else out += format_real(v);
    } else {
        out += j.dump();
    }
}

inline void write(std::string& out, const json& j, int depth) {
    const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
    const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
    if (j.is_array()) {
        if (j.empty()) {
            out += "[]";
        } else if (is_scalar_array(j)) {
            out += '[';
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ", ";
                first = false;
                write_scalar(out, v);
            }
            out += ']';
        } else {
            out += "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad;
                write(out, v, depth + 1);
            }
            out += '\n' + close_pad + ']';
        }
    } else if (j.is_object()) {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [k, v] : j.items()) {
            if (!first) out += ",\n";
            first = false;
            out += pad + json(k).dump() + ": ";
            write(out, v, depth + 1);
        }
        out += '\n' + close_pad + '}';
    } else {
        write_scalar(out, j);
    }
}

}  // namespace detail

/// Deterministic text for a JSON document, newline-terminated.
inline std::string to_text(const json& j) {
    std::string out;
    detail::write(out, j, 0);
    out += '\n';
    return out;
}

inline json real_array(std::span<const double> v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

// ---------------------------------------------------------------------------
// Parsing helpers
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(origin + ": " + e.what());
    }
}

inline double get_real(const json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "+inf" || s == "inf") return kInfinity;
        if (s == "-inf") return -kInfinity;
    }
    throw input_error(what + ": expected a number");
}

inline std::vector<double> get_reals(const json& j, const std::string& what) {
    if (!j.is_array()) throw input_error(what + ": expected an array of numbers");
    std::vector<double> v;
    v.reserve(j.size());
    for (const auto& x : j) v.push_back(get_real(x, what));
    return v;
}

inline std::size_t get_size(const json& obj, const char* key, const std::string& what) {
    if (!obj.is_object() || !obj.contains(key) || !obj[key].is_number_integer() || obj[key].get<long long>() < 0)
        throw input_error(what + ": field \"" + key + "\" must be a nonnegative integer");
    return obj[key].get<std::size_t>();
}

/// Comma- or space-separated reals, e.g. "0.2,0.8".
inline std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> v;
    std::string token;
    std::istringstream ss(text);
    while (std::getline(ss, token, ',')) {
        std::istringstream ts(token);
        double x;
        while (ts >> x) v.push_back(x);
        if (!ts.eof()) throw input_error("cannot parse number list: " + text);
    }
    if (v.empty()) throw input_error("empty number list");
    return v;
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

inline json model_to_json(const MarkovModel& model) {
    json j;
    j["n"] = model.n();
    j["s"] = model.s();
    j["mu"] = real_array(model.mu().values());
    return j;
}

/// Parses and validates a model; a non-stationary mu raises validation_error.
inline MarkovModel model_from_json(const json& j, const std::string& origin = "model") {
    const auto n = get_size(j, "n", origin);
    const auto s = get_size(j, "s", origin);
    if (!j.contains("mu")) throw input_error(origin + ": missing \"mu\"");
    auto mu = get_reals(j["mu"], origin + ": mu");
    if (n == 0 || s == 0) throw input_error(origin + ": n and s must be >= 1");
    try {
        return build_model(KTupleDistribution(n, s + 1, std::move(mu)));
    } catch (const domain_error& e) {
        throw input_error(origin + ": " + e.what());
    }
}

inline MarkovModel load_model(const std::string& path) { return model_from_json(parse_json(read_file(path), path), path); }

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

inline std::string path_line(const SamplePath& x) {
    std::string s;
    for (std::size_t t = 0; t < x.length(); ++t) {
        if (t != 0) s += ' ';
        s += std::to_string(x[t]);
    }
    return s;
}

/// Blank lines are skipped. Without `n` the alphabet is taken as max symbol + 1
/// over the whole file.
inline std::vector<SamplePath> read_paths(std::istream& in, std::optional<std::size_t> n = std::nullopt) {
    std::vector<std::vector<Symbol>> raw;
    std::string line;
    std::size_t line_no = 0;
    Symbol top = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<Symbol> symbols;
        long long v;
        while (ls >> v) {
            if (v < 0) throw input_error("path line " + std::to_string(line_no) + ": negative symbol");
            symbols.push_back(static_cast<Symbol>(v));
            top = std::max(top, static_cast<Symbol>(v));
        }
        if (!ls.eof()) throw input_error("path line " + std::to_string(line_no) + ": expected integers");
        if (!symbols.empty()) raw.push_back(std::move(symbols));
    }
    if (raw.empty()) throw input_error("path file contains no paths");
    const std::size_t alphabet = n.value_or(static_cast<std::size_t>(top) + 1);
    std::vector<SamplePath> paths;
    paths.reserve(raw.size());
    for (auto& r : raw) {
        try {
            paths.emplace_back(alphabet, std::move(r));
        } catch (const domain_error& e) {
            throw input_error(std::string("path file: ") + e.what());
        }
    }
    return paths;
}

inline std::vector<SamplePath> load_paths(const std::string& path, std::optional<std::size_t> n = std::nullopt) {
    std::istringstream in(read_file(path));
    return read_paths(in, n);
}

// ---------------------------------------------------------------------------
// Censuses
// ---------------------------------------------------------------------------

inline json census_to_json(const TypeCensus& census) {
    json a = json::array();
    for (const auto& e : census.entries()) {
        json row;
        row["counts"] = e.counts;
        row["cardinality"] = e.cardinality;
        if (e.probability) row["probability"] = *e.probability;
        a.push_back(std::move(row));
    }
    return a;
}

/// The census file does not record n or s; supply either one (with neither,
/// s = 1 is assumed). l is the common total of the count vectors.
inline TypeCensus census_from_json(const json& j, std::optional<std::size_t> n, std::optional<std::size_t> s) {
    if (!j.is_array() || j.empty()) throw input_error("census: expected a non-empty array");
    std::vector<CensusEntry> entries;
    entries.reserve(j.size());
    for (const auto& row : j) {
        if (!row.is_object() || !row.contains("counts") || !row["counts"].is_array())
            throw input_error("census: each entry needs a \"counts\" array");
        CensusEntry e;
        for (const auto& c : row["counts"]) {
            if (!c.is_number_unsigned()) throw input_error("census: counts must be nonnegative integers");
            e.counts.push_back(c.get<Count>());
        }
        if (!row.contains("cardinality") || !row["cardinality"].is_number_unsigned())
            throw input_error("census: each entry needs a nonnegative integer \"cardinality\"");
        e.cardinality = row["cardinality"].get<std::uint64_t>();
        if (row.contains("probability")) e.probability = get_real(row["probability"], "census: probability");
        entries.push_back(std::move(e));
    }

    const std::size_t dim = entries.front().counts.size();
    std::size_t nn = 0, ss = 0;
    if (n) {
        nn = *n;
        std::size_t k = 0;
        std::size_t p = 1;
        while (p < dim && nn >= 2) {
            p *= nn;
            ++k;
        }
        if (p != dim || k < 2) throw input_error("census: count vectors do not have n^(s+1) entries for the given n");
        ss = k - 1;
        if (s && *s != ss) throw input_error("census: given n and s do not match the count vector length");
    } else {
        ss = s.value_or(1);
        const double root = std::round(std::pow(static_cast<double>(dim), 1.0 / static_cast<double>(ss + 1)));
        nn = static_cast<std::size_t>(root);
        if (nn < 1 || ipow(nn, ss + 1) != dim)
            throw input_error("census: count vector length is not n^(s+1); pass --n or --s");
    }

    std::uint64_t l = 0;
    for (Count c : entries.front().counts) l += c;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.counts.size() != dim) throw input_error("census: count vectors differ in length");
        std::uint64_t t = 0;
        for (Count c : e.counts) t += c;
        if (t != l) throw input_error("census: count vectors differ in total");
        if (i > 0 && !std::lexicographical_compare(entries[i - 1].counts.begin(), entries[i - 1].counts.end(),
                                                   e.counts.begin(), e.counts.end()))
            throw input_error("census: entries are not in strictly increasing lexicographic order");
    }
    if (l == 0) throw input_error("census: empty count vectors");
    return {nn, static_cast<std::size_t>(l), ss, std::move(entries)};
}

inline TypeCensus load_census(const std::string& path, std::optional<std::size_t> n, std::optional<std::size_t> s) {
    return census_from_json(parse_json(read_file(path), path), n, s);
}

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

inline EventSet event_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw input_error("event: expected an object with a \"type\" field");
    const auto type = j["type"].get<std::string>();
    auto field = [&](const char* key) -> const json& {
        if (!j.contains(key)) throw input_error("event: missing \"" + std::string(key) + "\"");
        return j[key];
    };
    if (type == "ball") return EventSet(L1Ball{get_reals(field("centre"), "event centre"), get_real(field("radius"), "event radius")});
    if (type == "halfspace") return EventSet(HalfSpace{get_reals(field("c"), "event c"), get_real(field("b"), "event b")});
    if (type == "classes") {
        const auto& m = field("members");
        if (!m.is_array()) throw input_error("event: members must be an array");
        ClassList list;
        for (const auto& v : m) list.members.push_back(get_reals(v, "event member"));
        return EventSet(std::move(list));
    }
    throw input_error("event: unknown type \"" + type + "\" (expected ball, halfspace or classes)");
}

inline EventSet load_event(const std::string& path) { return event_from_json(parse_json(read_file(path), path)); }

}  // namespace mldp::io
