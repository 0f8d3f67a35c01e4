#pragma once

#include <cmath>
#include <ctime>
#include <chrono>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "basic_eq.hpp"
#include "common.hpp"
#include "diagnostics.hpp"
#include "functionals.hpp"
#include "matrix_spectra.hpp"
#include "potentials.hpp"
#include "weights.hpp"

namespace hillspec::report {

using ordered_json = nlohmann::ordered_json;

enum class vtype_t { integer, real, complex_num, boolean, text };

inline std::string to_string(vtype_t t) {
    switch (t) {
        case vtype_t::integer: return "int";
        case vtype_t::real: return "real";
        case vtype_t::complex_num: return "complex";
        case vtype_t::boolean: return "bool";
        default: return "text";
    }
}

inline vtype_t parse_vtype(const std::string& s) {
    if (s == "int") return vtype_t::integer;
    if (s == "real") return vtype_t::real;
    if (s == "complex") return vtype_t::complex_num;
    if (s == "bool") return vtype_t::boolean;
    if (s == "text") return vtype_t::text;
    throw config_error("unknown column type '" + s + "'");
}

/// One typed cell. Reports never carry non-finite numbers; converters flag
/// degenerate entries instead.
struct Value {
    vtype_t type = vtype_t::real;
    long long i = 0;
    double d = 0.0;
    cplx z{0.0, 0.0};
    bool b = false;
    std::string s;

    static Value integer(long long v) {
        Value x;
        x.type = vtype_t::integer;
        x.i = v;
        return x;
    }
    static Value real(double v) {
        if (!std::isfinite(v)) throw compute_error("non-finite value in report");
        Value x;
        x.type = vtype_t::real;
        x.d = v;
        return x;
    }
    static Value complex_num(cplx v) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw compute_error("non-finite value in report");
        Value x;
        x.type = vtype_t::complex_num;
        x.z = v;
        return x;
    }
    static Value boolean(bool v) {
        Value x;
        x.type = vtype_t::boolean;
        x.b = v;
        return x;
    }
    static Value text(std::string v) {
        Value x;
        x.type = vtype_t::text;
        x.s = std::move(v);
        return x;
    }

    friend bool operator==(const Value& a, const Value& b) {
        if (a.type != b.type) return false;
        switch (a.type) {
            case vtype_t::integer: return a.i == b.i;
            case vtype_t::real: return a.d == b.d;
            case vtype_t::complex_num: return a.z == b.z;
            case vtype_t::boolean: return a.b == b.b;
            default: return a.s == b.s;
        }
    }
};

struct Column {
    std::string name;
    vtype_t type;
    friend bool operator==(const Column& a, const Column& b) {
        return a.name == b.name && a.type == b.type;
    }
};

struct Table {
    std::string kind;
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<Column> columns;
    std::vector<std::vector<Value>> rows;

    void add_meta(std::string key, std::string value) {
        meta.emplace_back(std::move(key), std::move(value));
    }
    void add_row(std::vector<Value> row) {
        if (row.size() != columns.size())
            throw config_error("report row width does not match the declared columns");
        for (size_t c = 0; c < row.size(); ++c)
            if (row[c].type != columns[c].type)
                throw config_error("report cell type mismatch in column " + columns[c].name);
        rows.push_back(std::move(row));
    }
    friend bool operator==(const Table& a, const Table& b) {
        return a.kind == b.kind && a.meta == b.meta && a.columns == b.columns &&
               a.rows == b.rows;
    }
};

struct ReportEnvelope {
    std::string schema_version = "1.0";
    std::vector<std::pair<std::string, std::string>> config;
    std::string timestamp;
    std::vector<std::string> warnings;
    std::vector<Table> sections;

    friend bool operator==(const ReportEnvelope& a, const ReportEnvelope& b) {
        return a.schema_version == b.schema_version && a.config == b.config &&
               a.timestamp == b.timestamp && a.warnings == b.warnings &&
               a.sections == b.sections;
    }
};

inline std::string now_iso8601() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------- JSON

inline ordered_json to_json(const Value& v) {
    switch (v.type) {
        case vtype_t::integer: return v.i;
        case vtype_t::real: return v.d;
        case vtype_t::complex_num: return ordered_json{{"re", v.z.real()}, {"im", v.z.imag()}};
        case vtype_t::boolean: return v.b;
        default: return v.s;
    }
}

inline ordered_json to_json(const Table& t) {
    ordered_json j;
    j["kind"] = t.kind;
    ordered_json meta = ordered_json::object();
    for (const auto& [k, v] : t.meta) meta[k] = v;
    j["meta"] = meta;
    ordered_json cols = ordered_json::array();
    for (const auto& c : t.columns)
        cols.push_back(ordered_json{{"name", c.name}, {"type", to_string(c.type)}});
    j["columns"] = cols;
    ordered_json rows = ordered_json::array();
    for (const auto& row : t.rows) {
        ordered_json jr = ordered_json::array();
        for (const auto& v : row) jr.push_back(to_json(v));
        rows.push_back(jr);
    }
    j["rows"] = rows;
    return j;
}

inline ordered_json to_json(const ReportEnvelope& e) {
    ordered_json j;
    j["schema_version"] = e.schema_version;
    ordered_json cfg = ordered_json::object();
    for (const auto& [k, v] : e.config) cfg[k] = v;
    j["config"] = cfg;
    j["timestamp"] = e.timestamp;
    j["warnings"] = e.warnings;
    ordered_json payload = ordered_json::array();
    for (const auto& s : e.sections) payload.push_back(to_json(s));
    j["payload"] = payload;
    return j;
}

inline std::string to_json_text(const ReportEnvelope& e) { return to_json(e).dump(2) + "\n"; }

inline Value value_from_json(const ordered_json& j, vtype_t type) {
    try {
        switch (type) {
            case vtype_t::integer: return Value::integer(j.get<long long>());
            case vtype_t::real: return Value::real(j.get<double>());
            case vtype_t::complex_num:
                return Value::complex_num(cplx(j.at("re").get<double>(), j.at("im").get<double>()));
            case vtype_t::boolean: return Value::boolean(j.get<bool>());
            default: return Value::text(j.get<std::string>());
        }
    } catch (const nlohmann::json::exception& ex) {
        throw config_error(std::string("malformed report cell: ") + ex.what());
    }
}

inline ReportEnvelope from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
        throw config_error(std::string("malformed report JSON: ") + ex.what());
    }
    try {
        ReportEnvelope e;
        e.schema_version = j.at("schema_version").get<std::string>();
        for (const auto& [k, v] : j.at("config").items())
            e.config.emplace_back(k, v.get<std::string>());
        e.timestamp = j.at("timestamp").get<std::string>();
        for (const auto& w : j.at("warnings")) e.warnings.push_back(w.get<std::string>());
        for (const auto& js : j.at("payload")) {
            Table t;
            t.kind = js.at("kind").get<std::string>();
            for (const auto& [k, v] : js.at("meta").items())
                t.meta.emplace_back(k, v.get<std::string>());
            for (const auto& jc : js.at("columns"))
                t.columns.push_back(
                    {jc.at("name").get<std::string>(), parse_vtype(jc.at("type").get<std::string>())});
            for (const auto& jr : js.at("rows")) {
                if (jr.size() != t.columns.size())
                    throw config_error("report row width does not match the declared columns");
                std::vector<Value> row;
                for (size_t c = 0; c < t.columns.size(); ++c)
                    row.push_back(value_from_json(jr[c], t.columns[c].type));
                t.rows.push_back(std::move(row));
            }
            e.sections.push_back(std::move(t));
        }
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw config_error(std::string("malformed report JSON: ") + ex.what());
    }
}

// ----------------------------------------------------------------- CSV

namespace detail3 {

inline std::string csv_quote(const std::string& s) {
    bool need = s.find_first_of(",\"\n") != std::string::npos;
    if (!need) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw config_error("unterminated quote in CSV line");
    out.push_back(cur);
    return out;
}

inline std::pair<std::string, std::string> split_eq(const std::string& s,
                                                    const std::string& ctx) {
    auto pos = s.find('=');
    if (pos == std::string::npos) throw config_error("expected key=value in " + ctx);
    return {s.substr(0, pos), s.substr(pos + 1)};
}

} // namespace detail3

inline std::string to_csv_text(const ReportEnvelope& e) {
    std::string out;
    out += "#schema_version=" + e.schema_version + "\n";
    for (const auto& [k, v] : e.config) out += "#config." + k + "=" + v + "\n";
    out += "#timestamp=" + e.timestamp + "\n";
    for (const auto& w : e.warnings) out += "#warning=" + w + "\n";
    for (const auto& t : e.sections) {
        out += "\n";
        out += "#kind=" + t.kind + "\n";
        for (const auto& [k, v] : t.meta) out += "#meta." + k + "=" + v + "\n";
        std::string types, header;
        for (size_t c = 0; c < t.columns.size(); ++c) {
            if (c) types += ",";
            types += to_string(t.columns[c].type);
            if (c) header += ",";
            if (t.columns[c].type == vtype_t::complex_num)
                header += t.columns[c].name + "_re," + t.columns[c].name + "_im";
            else
                header += t.columns[c].name;
        }
        out += "#types=" + types + "\n";
        out += header + "\n";
        for (const auto& row : t.rows) {
            std::string line;
            bool first = true;
            for (const auto& v : row) {
                if (!first) line += ",";
                first = false;
                switch (v.type) {
                    case vtype_t::integer: line += std::to_string(v.i); break;
                    case vtype_t::real: line += detail::num_str(v.d); break;
                    case vtype_t::complex_num:
                        line += detail::num_str(v.z.real()) + "," + detail::num_str(v.z.imag());
                        break;
                    case vtype_t::boolean: line += v.b ? "true" : "false"; break;
                    default: line += detail3::csv_quote(v.s); break;
                }
            }
            out += line + "\n";
        }
    }
    return out;
}

inline ReportEnvelope from_csv_text(const std::string& text) {
    std::vector<std::string> lines;
    {
        std::string cur;
        for (char c : text) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) lines.push_back(cur);
    }
    size_t i = 0;
    ReportEnvelope e;
    bool saw_version = false;
    for (; i < lines.size() && !lines[i].empty(); ++i) {
        if (lines[i][0] != '#') throw config_error("CSV prelude must be comment lines");
        auto [k, v] = detail3::split_eq(lines[i].substr(1), "CSV prelude");
        if (k == "schema_version") {
            e.schema_version = v;
            saw_version = true;
        } else if (k == "timestamp") {
            e.timestamp = v;
        } else if (k == "warning") {
            e.warnings.push_back(v);
        } else if (k.rfind("config.", 0) == 0) {
            e.config.emplace_back(k.substr(7), v);
        } else {
            throw config_error("unknown CSV prelude key '" + k + "'");
        }
    }
    if (!saw_version) throw config_error("CSV report lacks a schema_version line");

    while (i < lines.size()) {
        while (i < lines.size() && lines[i].empty()) ++i;
        if (i >= lines.size()) break;
        Table t;
        std::vector<vtype_t> types;
        for (; i < lines.size() && !lines[i].empty() && lines[i][0] == '#'; ++i) {
            auto [k, v] = detail3::split_eq(lines[i].substr(1), "CSV section header");
            if (k == "kind") {
                t.kind = v;
            } else if (k.rfind("meta.", 0) == 0) {
                t.meta.emplace_back(k.substr(5), v);
            } else if (k == "types") {
                for (const auto& piece : detail3::csv_split(v)) types.push_back(parse_vtype(piece));
            } else {
                throw config_error("unknown CSV section key '" + k + "'");
            }
        }
        if (t.kind.empty()) throw config_error("CSV section lacks a kind line");
        if (types.empty()) throw config_error("CSV section lacks a types line");
        if (i >= lines.size() || lines[i].empty())
            throw config_error("CSV section lacks a header row");
        auto header = detail3::csv_split(lines[i++]);
        size_t h = 0;
        for (vtype_t ty : types) {
            if (ty == vtype_t::complex_num) {
                if (h + 1 >= header.size() || header[h].size() < 4 ||
                    header[h].substr(header[h].size() - 3) != "_re")
                    throw config_error("complex column header must be name_re,name_im");
                std::string base = header[h].substr(0, header[h].size() - 3);
                if (header[h + 1] != base + "_im")
                    throw config_error("complex column header must be name_re,name_im");
                t.columns.push_back({base, ty});
                h += 2;
            } else {
                if (h >= header.size()) throw config_error("CSV header shorter than types line");
                t.columns.push_back({header[h], ty});
                h += 1;
            }
        }
        if (h != header.size()) throw config_error("CSV header wider than types line");

        for (; i < lines.size() && !lines[i].empty(); ++i) {
            auto fields = detail3::csv_split(lines[i]);
            std::vector<Value> row;
            size_t f = 0;
            for (vtype_t ty : types) {
                switch (ty) {
                    case vtype_t::integer:
                        row.push_back(Value::integer(detail::parse_int(fields.at(f), "CSV cell")));
                        f += 1;
                        break;
                    case vtype_t::real:
                        row.push_back(Value::real(detail::parse_double(fields.at(f), "CSV cell")));
                        f += 1;
                        break;
                    case vtype_t::complex_num:
                        row.push_back(Value::complex_num(
                            cplx(detail::parse_double(fields.at(f), "CSV cell"),
                                 detail::parse_double(fields.at(f + 1), "CSV cell"))));
                        f += 2;
                        break;
                    case vtype_t::boolean: {
                        const std::string& s = fields.at(f);
                        if (s != "true" && s != "false")
                            throw config_error("CSV boolean cell must be true or false");
                        row.push_back(Value::boolean(s == "true"));
                        f += 1;
                        break;
                    }
                    default:
                        row.push_back(Value::text(fields.at(f)));
                        f += 1;
                        break;
                }
            }
            if (f != fields.size()) throw config_error("CSV row wider than the declared columns");
            t.rows.push_back(std::move(row));
        }
        e.sections.push_back(std::move(t));
    }
    return e;
}

// ----------------------------------------------------- table converters

inline Table spectrum_table(const std::vector<matrix_spectra::DiscMatch>& matches,
                            matrix_spectra::bc_t bc, int N) {
    Table t;
    t.kind = "spectrum";
    t.add_meta("bc", matrix_spectra::to_string(bc));
    t.add_meta("trunc", std::to_string(N));
    t.columns = {{"n", vtype_t::integer},        {"slot", vtype_t::integer},
                 {"lambda", vtype_t::complex_num}, {"expected", vtype_t::integer},
                 {"found", vtype_t::integer},     {"multiplicity", vtype_t::integer},
                 {"matched", vtype_t::boolean}};
    for (const auto& m : matches) {
        if (m.eigenvalues.empty()) {
            t.add_row({Value::integer(m.n), Value::integer(-1), Value::complex_num({0, 0}),
                       Value::integer(m.expected), Value::integer(0),
                       Value::integer(m.cluster_multiplicity), Value::boolean(m.matched)});
            continue;
        }
        for (size_t s = 0; s < m.eigenvalues.size(); ++s)
            t.add_row({Value::integer(m.n), Value::integer((long long)s),
                       Value::complex_num(m.eigenvalues[s]), Value::integer(m.expected),
                       Value::integer((long long)m.eigenvalues.size()),
                       Value::integer(m.cluster_multiplicity), Value::boolean(m.matched)});
    }
    return t;
}

inline Table beta_table(const functionals::BetaEval& be) {
    Table t;
    t.kind = "beta";
    t.columns = {{"n", vtype_t::integer},          {"z", vtype_t::complex_num},
                 {"alpha", vtype_t::complex_num},  {"beta_minus", vtype_t::complex_num},
                 {"beta_plus", vtype_t::complex_num}, {"radius_j", vtype_t::integer},
                 {"depth", vtype_t::integer},      {"decay_ratio", vtype_t::real},
                 {"tail_bound", vtype_t::real}};
    t.add_row({Value::integer(be.n), Value::complex_num(be.z), Value::complex_num(be.alpha),
               Value::complex_num(be.beta_minus), Value::complex_num(be.beta_plus),
               Value::integer(be.J), Value::integer(be.depth), Value::real(be.ratio),
               Value::real(be.tail_bound)});
    return t;
}

inline Table beta_terms_table(const functionals::BetaEval& be) {
    Table t;
    t.kind = "beta-terms";
    t.add_meta("n", std::to_string(be.n));
    t.columns = {{"k", vtype_t::integer},
                 {"s11", vtype_t::complex_num},
                 {"s12", vtype_t::complex_num},
                 {"s21", vtype_t::complex_num}};
    for (size_t k = 0; k < be.s11.size(); ++k)
        t.add_row({Value::integer((long long)k + 1), Value::complex_num(be.s11[k]),
                   Value::complex_num(be.s12[k]), Value::complex_num(be.s21[k])});
    return t;
}

inline Table solve_table(const std::vector<basic_eq::SpectralPair>& pairs) {
    Table t;
    t.kind = "solve";
    t.columns = {{"n", vtype_t::integer},
                 {"lambda_minus", vtype_t::complex_num},
                 {"lambda_plus", vtype_t::complex_num},
                 {"z_star", vtype_t::complex_num},
                 {"gamma", vtype_t::complex_num},
                 {"residual", vtype_t::real},
                 {"double_root", vtype_t::boolean},
                 {"iterations", vtype_t::integer}};
    for (const auto& p : pairs)
        t.add_row({Value::integer(p.n), Value::complex_num(p.lambda_minus),
                   Value::complex_num(p.lambda_plus), Value::complex_num(p.z_star),
                   Value::complex_num(p.gamma), Value::real(p.residual),
                   Value::boolean(p.double_root),
                   Value::integer(std::max(p.iters_minus, p.iters_plus))});
    return t;
}

inline Table cross_validation_table(const basic_eq::CrossValidationReport& rep) {
    Table t;
    t.kind = "cross-validation";
    std::string ladder;
    for (size_t i = 0; i < rep.truncations.size(); ++i)
        ladder += (i ? "," : "") + std::to_string(rep.truncations[i]);
    t.add_meta("truncations", ladder);
    t.add_meta("max_delta", detail::num_str(rep.max_delta));
    t.add_meta("stability_delta", detail::num_str(rep.stability_delta));
    t.add_meta("stable", rep.stable ? "true" : "false");
    t.add_meta("pass", rep.pass ? "true" : "false");
    t.columns = {{"n", vtype_t::integer},
                 {"series_minus", vtype_t::complex_num},
                 {"series_plus", vtype_t::complex_num},
                 {"matrix_a", vtype_t::complex_num},
                 {"matrix_b", vtype_t::complex_num},
                 {"delta", vtype_t::real},
                 {"pass", vtype_t::boolean}};
    for (const auto& r : rep.rows)
        t.add_row({Value::integer(r.n), Value::complex_num(r.series_minus),
                   Value::complex_num(r.series_plus), Value::complex_num(r.matrix_a),
                   Value::complex_num(r.matrix_b), Value::real(r.delta),
                   Value::boolean(r.pass)});
    return t;
}

inline Table riesz_table(const diagnostics::RieszReport& rep) {
    Table t;
    t.kind = "riesz";
    t.add_meta("criterion", diagnostics::to_string(rep.criterion));
    t.add_meta("parity", diagnostics::to_string(rep.parity));
    t.add_meta("n_min", std::to_string(rep.n_min));
    t.add_meta("n_max", std::to_string(rep.n_max));
    t.add_meta("verdict", diagnostics::to_string(rep.verdict));
    t.add_meta("vote", diagnostics::to_string(rep.vote));
    t.add_meta("sup_estimate", detail::num_str(rep.sup_estimate));
    if (rep.trend) {
        t.add_meta("trend", rep.trend->tag());
        t.add_meta("trend_rate", detail::num_str(rep.trend->rate()));
        t.add_meta("trend_relres", detail::num_str(rep.trend->relres[rep.trend->winner]));
        t.add_meta("trend_relres_const", detail::num_str(rep.trend->relres[0]));
    }
    if (rep.criterion == diagnostics::criterion_t::makin) {
        t.add_meta("window", detail::num_str(rep.window));
        t.add_meta("ratio_min", detail::num_str(rep.ratio_min));
        t.add_meta("ratio_max", detail::num_str(rep.ratio_max));
    }
    bool with_c = !rep.comparability.empty();
    t.columns = {{"n", vtype_t::integer}, {"t", vtype_t::real}};
    if (with_c) t.columns.push_back({"comparability", vtype_t::real});
    for (size_t i = 0; i < rep.n_values.size(); ++i) {
        std::vector<Value> row = {Value::integer(rep.n_values[i]), Value::real(rep.t_values[i])};
        if (with_c) row.push_back(Value::real(rep.comparability[i]));
        t.add_row(std::move(row));
    }
    return t;
}

inline Table asym_table(const diagnostics::AsymptoticTable& tab) {
    Table t;
    t.kind = "asym";
    t.add_meta("law", diagnostics::to_string(tab.law));
    t.add_meta("refused", tab.refused ? "true" : "false");
    t.add_meta("converging", tab.converging ? "true" : "false");
    t.add_meta("converging_mod", tab.converging_mod ? "true" : "false");
    t.add_meta("tol", detail::num_str(tab.tol));
    t.columns = {{"n", vtype_t::integer},       {"label", vtype_t::text},
                 {"lhs", vtype_t::complex_num}, {"rhs", vtype_t::complex_num},
                 {"ratio", vtype_t::complex_num}, {"ratio_mod", vtype_t::real},
                 {"degenerate", vtype_t::boolean}};
    for (const auto& r : tab.rows) {
        cplx ratio = r.degenerate ? cplx(0.0, 0.0) : r.ratio;
        double rmod = r.degenerate ? 0.0 : r.ratio_mod;
        t.add_row({Value::integer(r.n), Value::text(r.label), Value::complex_num(r.lhs),
                   Value::complex_num(r.rhs), Value::complex_num(ratio), Value::real(rmod),
                   Value::boolean(r.degenerate)});
    }
    return t;
}

inline Table deviation_summary_table(const diagnostics::AsymptoticTable& tab) {
    Table t;
    t.kind = "asym-deviation";
    t.add_meta("law", diagnostics::to_string(tab.law));
    t.columns = {{"n", vtype_t::integer}, {"dev", vtype_t::real}, {"dev_mod", vtype_t::real}};
    for (size_t i = 0; i < tab.dev_ns.size(); ++i)
        t.add_row({Value::integer(tab.dev_ns[i]), Value::real(tab.devs[i]),
                   Value::real(tab.devs_mod[i])});
    return t;
}

inline Table angle_table(const diagnostics::AngleReport& rep) {
    Table t;
    t.kind = "angle-vs-t";
    t.add_meta("max_t", detail::num_str(rep.max_t));
    t.add_meta("min_angle", detail::num_str(rep.min_angle));
    t.add_meta("t_bounded", rep.t_bounded ? "true" : "false");
    t.add_meta("angle_bounded_below", rep.angle_bounded_below ? "true" : "false");
    t.add_meta("consistent", rep.consistent ? "true" : "false");
    if (!rep.skipped.empty()) {
        std::string s;
        for (size_t i = 0; i < rep.skipped.size(); ++i)
            s += (i ? "," : "") + std::to_string(rep.skipped[i]);
        t.add_meta("skipped", s);
    }
    t.columns = {{"n", vtype_t::integer}, {"t_star", vtype_t::real}, {"sin_angle", vtype_t::real}};
    for (const auto& r : rep.rows)
        t.add_row({Value::integer(r.n), Value::real(r.t_star), Value::real(r.sin_angle)});
    return t;
}

inline Table submult_table(const weights::SubmultReport& rep, const std::string& family) {
    Table t;
    t.kind = "weights-sub";
    t.add_meta("family", family);
    t.add_meta("kind", weights::to_string(rep.kind));
    t.add_meta("k_max", std::to_string(rep.k_max));
    t.columns = {{"C", vtype_t::real},
                 {"max_defect", vtype_t::real},
                 {"witness_k", vtype_t::integer},
                 {"witness_m", vtype_t::integer},
                 {"last_octave_growth", vtype_t::real}};
    t.add_row({Value::real(rep.C), Value::real(rep.max_defect), Value::integer(rep.wit_k),
               Value::integer(rep.wit_m), Value::real(rep.last_octave_growth)});
    return t;
}

inline Table slow_increase_table(const weights::SlowIncreaseReport& rep,
                                 const std::string& family) {
    Table t;
    t.kind = "weights-slow";
    t.add_meta("family", family);
    t.add_meta("diverging", rep.diverging ? "true" : "false");
    t.columns = {{"A", vtype_t::real}, {"attained_k", vtype_t::integer}};
    t.add_row({Value::real(rep.A), Value::integer(rep.attained_k)});
    return t;
}

inline Table subexp_table(const weights::SubexpReport& rep, const std::string& family) {
    Table t;
    t.kind = "weights-subexp";
    t.add_meta("family", family);
    t.add_meta("estimate", detail::num_str(rep.estimate));
    t.columns = {{"k", vtype_t::integer}, {"h_over_k", vtype_t::real}};
    for (const auto& [k, val] : rep.octave_values)
        t.add_row({Value::integer(k), Value::real(val)});
    return t;
}

inline Table concavity_table(const weights::ConcavityReport& rep, const std::string& family) {
    Table t;
    t.kind = "weights-concave";
    t.add_meta("family", family);
    t.add_meta("pass", rep.pass ? "true" : "false");
    t.columns = {{"first_violation_k", vtype_t::integer}, {"max_defect", vtype_t::real}};
    t.add_row({Value::integer(rep.first_violation_k), Value::real(rep.max_defect)});
    return t;
}

inline Table factorize_table(const weights::FactorizationReport& rep, const std::string& family,
                             const std::string& omega) {
    Table t;
    t.kind = "weights-factorize";
    t.add_meta("family", family);
    t.add_meta("omega", omega);
    t.add_meta("converged", rep.converged ? "true" : "false");
    t.add_meta("omega_diverging", rep.omega_diverging ? "true" : "false");
    t.add_meta("tilde_submult", weights::to_string(rep.tilde_submult.kind));
    t.columns = {{"M", vtype_t::real},
                 {"M_partial", vtype_t::real},
                 {"tail", vtype_t::real},
                 {"A", vtype_t::real}};
    t.add_row({Value::real(rep.M), Value::real(rep.M_partial), Value::real(rep.tail),
               Value::real(rep.A)});
    return t;
}

inline Table weighted_norm_table(const potentials::WeightedNormReport& rep,
                                 const std::string& potential, const std::string& weight) {
    Table t;
    t.kind = "weighted-norm";
    t.add_meta("potential", potential);
    t.add_meta("weight", weight);
    t.add_meta("norm", detail::num_str(rep.norm));
    t.add_meta("attained_k", std::to_string(rep.attained_k));
    t.add_meta("decays_to_zero", rep.decays_to_zero ? "true" : "false");
    t.columns = {{"k", vtype_t::integer}, {"tail_sup", vtype_t::real}};
    for (const auto& [k, val] : rep.tail_sup)
        t.add_row({Value::integer(k), Value::real(val)});
    return t;
}

} // namespace hillspec::report
