#pragma once

// Run configuration (flat "key = value" text), CSV export/import of
// concurrence series and the JSON form of comparison reports.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "corrnoise/errors.hpp"
#include "corrnoise/experiments.hpp"
#include "corrnoise/xstate.hpp"

namespace corrnoise::io {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw InvalidParameter("cannot parse number '" + std::string(s) + "' for " + std::string(what));
    return v;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<double> parse_list(std::string_view s, std::string_view what) {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    for (const auto& item : split(s, ',')) out.push_back(parse_double(item, what));
    return out;
}

inline std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += format_double(v[i]);
    }
    return s;
}

struct RunConfig {
    std::string command = "evolve";
    std::string initial = "bell-phi";  // bell-phi | bell-psi | fig4-x | x-state | file
    XState x_state = states::bell_phi();
    std::string initial_file;
    double gamma = 1.0;
    double big_gamma = 0.0;
    std::vector<double> big_gammas{0.0, 0.25, 0.5, 0.75, 1.0};
    double omega = 0.0;
    std::string method = "analytic";
    std::string convention = "calibrated";
    std::string unraveling = "phase-randomized";
    double t_max = 2.0;
    double dt = 1e-3;
    std::size_t grid_points = 2000;
    std::uint64_t seed = 1;
    std::size_t n_traj = 2000;
    bool allow_unphysical = false;
    int figure = 2;
    std::string output;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Ordered key/value view of a RunConfig; also the config-file format.
inline std::vector<std::pair<std::string, std::string>> to_pairs(const RunConfig& c) {
    const XState& x = c.x_state;
    return {
        {"command", c.command},
        {"initial", c.initial},
        {"x_state", join({x.a, x.b, x.c, x.d, x.z, x.w})},
        {"initial_file", c.initial_file},
        {"gamma", format_double(c.gamma)},
        {"big_gamma", format_double(c.big_gamma)},
        {"big_gammas", join(c.big_gammas)},
        {"omega", format_double(c.omega)},
        {"method", c.method},
        {"convention", c.convention},
        {"unraveling", c.unraveling},
        {"t_max", format_double(c.t_max)},
        {"dt", format_double(c.dt)},
        {"grid_points", std::to_string(c.grid_points)},
        {"seed", std::to_string(c.seed)},
        {"n_traj", std::to_string(c.n_traj)},
        {"allow_unphysical", c.allow_unphysical ? "true" : "false"},
        {"figure", std::to_string(c.figure)},
        {"output", c.output},
    };
}

inline std::string to_config_text(const RunConfig& c) {
    std::string s;
    for (const auto& [k, v] : to_pairs(c)) s += k + " = " + v + "\n";
    return s;
}

namespace detail {

inline std::uint64_t parse_uint(const std::string& v, std::string_view what) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
        throw InvalidParameter("cannot parse integer '" + v + "' for " + std::string(what));
    return out;
}

inline bool parse_bool(const std::string& v, std::string_view what) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidParameter("cannot parse boolean '" + v + "' for " + std::string(what));
}

} // namespace detail

/// Applies one key/value to a config. Unknown keys are an error.
inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
    using detail::parse_uint;
    if (key == "command") c.command = value;
    else if (key == "initial") c.initial = value;
    else if (key == "x_state") {
        const auto v = parse_list(value, key);
        if (v.size() != 6) throw InvalidParameter("x_state needs six values a,b,c,d,z,w");
        c.x_state = {v[0], v[1], v[2], v[3], v[4], v[5]};
    }
    else if (key == "initial_file") c.initial_file = value;
    else if (key == "gamma") c.gamma = parse_double(value, key);
    else if (key == "big_gamma") c.big_gamma = parse_double(value, key);
    else if (key == "big_gammas") c.big_gammas = parse_list(value, key);
    else if (key == "omega") c.omega = parse_double(value, key);
    else if (key == "method") c.method = value;
    else if (key == "convention") c.convention = value;
    else if (key == "unraveling") c.unraveling = value;
    else if (key == "t_max") c.t_max = parse_double(value, key);
    else if (key == "dt") c.dt = parse_double(value, key);
    else if (key == "grid_points") c.grid_points = parse_uint(value, key);
    else if (key == "seed") c.seed = parse_uint(value, key);
    else if (key == "n_traj") c.n_traj = parse_uint(value, key);
    else if (key == "allow_unphysical") c.allow_unphysical = detail::parse_bool(value, key);
    else if (key == "figure") c.figure = static_cast<int>(parse_uint(value, key));
    else if (key == "output") c.output = value;
    else throw InvalidParameter("unknown config key '" + key + "'");
}

/// Parses "key = value" lines; '#' starts a comment line.
inline RunConfig parse_config_text(std::string_view text, RunConfig base = {}) {
    std::size_t line_no = 0;
    for (const auto& raw : split(text, '\n')) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidParameter("config line " + std::to_string(line_no) + ": expected 'key = value'");
        set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidParameter("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// 4x4 matrix from text: four rows of either 4 real or 8 (re im) numbers.
inline CMat4 parse_matrix_text(std::string_view text) {
    CMat4 m;
    std::size_t row = 0;
    for (const auto& raw : split(text, '\n')) {
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (row == 4) throw InvalidParameter("matrix file: more than four rows");
        std::istringstream ls(line);
        std::vector<double> vals;
        std::string tok;
        while (ls >> tok) vals.push_back(parse_double(tok, "matrix entry"));
        if (vals.size() == 4) {
            for (std::size_t j = 0; j < 4; ++j) m(row, j) = vals[j];
        } else if (vals.size() == 8) {
            for (std::size_t j = 0; j < 4; ++j) m(row, j) = cplx{vals[2 * j], vals[2 * j + 1]};
        } else {
            throw InvalidParameter("matrix file row " + std::to_string(row + 1) + ": expected 4 or 8 numbers");
        }
        ++row;
    }
    if (row != 4) throw InvalidParameter("matrix file: expected four rows");
    return m;
}

inline InitialState resolve_initial(const RunConfig& c) {
    if (c.initial == "bell-phi") return initial::bell_phi();
    if (c.initial == "bell-psi") return initial::bell_psi();
    if (c.initial == "fig4-x") return initial::fig4();
    if (c.initial == "x-state") {
        require_valid(c.x_state, "x-state");
        return InitialState::from_x("x-state", c.x_state);
    }
    if (c.initial == "file") {
        if (c.initial_file.empty()) throw InvalidParameter("initial = file needs initial_file");
        const CMat4 m = parse_matrix_text(read_file(c.initial_file));
        require_hermitian(m, "initial file");
        return InitialState::from_matrix("file", m);
    }
    throw InvalidParameter("unknown initial state '" + c.initial + "'");
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view csv_header =
    "t,gamma,big_gamma,omega,method,concurrence,branch_z,branch_w,rho11,rho22,rho33,rho44,"
    "rho23_re,rho23_im,rho14_re,rho14_im";

struct CsvRow {
    double t = 0.0;
    double gamma = 0.0;
    double big_gamma = 0.0;
    double omega = 0.0;
    std::string method;
    double concurrence = 0.0;
    double branch_z = 0.0;
    double branch_w = 0.0;
    double rho11 = 0.0, rho22 = 0.0, rho33 = 0.0, rho44 = 0.0;
    double rho23_re = 0.0, rho23_im = 0.0, rho14_re = 0.0, rho14_im = 0.0;

    friend bool operator==(const CsvRow&, const CsvRow&) = default;
};

struct CsvDocument {
    std::vector<std::string> metadata;  // comment lines without the leading "# "
    std::vector<CsvRow> rows;
};

inline CsvRow make_row(double t, double gamma, double big_gamma, double omega, std::string_view method,
                       const ConcurrencePoint& cp, const CMat4& rho) {
    CsvRow r;
    r.t = t;
    r.gamma = gamma;
    r.big_gamma = big_gamma;
    r.omega = omega;
    r.method = std::string(method);
    r.concurrence = cp.value;
    r.branch_z = cp.branch_z;
    r.branch_w = cp.branch_w;
    r.rho11 = rho(0, 0).real();
    r.rho22 = rho(1, 1).real();
    r.rho33 = rho(2, 2).real();
    r.rho44 = rho(3, 3).real();
    r.rho23_re = rho(1, 2).real();
    r.rho23_im = rho(1, 2).imag();
    r.rho14_re = rho(0, 3).real();
    r.rho14_im = rho(0, 3).imag();
    return r;
}

/// One row per (big_gamma, t), curves in sweep order.
inline std::vector<CsvRow> rows_of(const SweepResult& r) {
    std::vector<CsvRow> rows;
    for (const auto& c : r.curves)
        for (std::size_t i = 0; i < r.times.size(); ++i)
            rows.push_back(make_row(r.times[i], r.gamma, c.big_gamma, r.options.omega, to_string(r.method), c.points[i],
                                    c.states[i]));
    return rows;
}

inline std::vector<CsvRow> rows_of(const XSeries& s, double gamma, double big_gamma, std::string_view method) {
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < s.size(); ++i)
        rows.push_back(make_row(s.times[i], gamma, big_gamma, 0.0, method, concurrence_x(s.states[i], s.times[i]),
                                to_matrix(s.states[i])));
    return rows;
}

inline std::vector<CsvRow> rows_of(const MatrixSeries& s, const NoiseParams& p, std::string_view method) {
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < s.size(); ++i)
        rows.push_back(make_row(s.times[i], p.gamma_a, p.big_gamma, p.omega, method,
                                concurrence_point(s.states[i], s.times[i]), s.states[i]));
    return rows;
}

inline void write_csv(std::ostream& os, const std::vector<std::string>& metadata, const std::vector<CsvRow>& rows) {
    for (const auto& m : metadata) os << "# " << m << '\n';
    os << csv_header << '\n';
    for (const auto& r : rows) {
        os << format_double(r.t) << ',' << format_double(r.gamma) << ',' << format_double(r.big_gamma) << ','
           << format_double(r.omega) << ',' << r.method << ',' << format_double(r.concurrence) << ','
           << format_double(r.branch_z) << ',' << format_double(r.branch_w) << ',' << format_double(r.rho11) << ','
           << format_double(r.rho22) << ',' << format_double(r.rho33) << ',' << format_double(r.rho44) << ','
           << format_double(r.rho23_re) << ',' << format_double(r.rho23_im) << ',' << format_double(r.rho14_re)
           << ',' << format_double(r.rho14_im) << '\n';
    }
    if (!os) throw std::runtime_error("write_csv: output stream failure");
}

/// Metadata block: the full run configuration plus the generator tag.
inline std::vector<std::string> metadata_of(const RunConfig& c, std::string_view generator_tag) {
    std::vector<std::string> m{"corrnoise csv v1"};
    for (const auto& [k, v] : to_pairs(c)) m.push_back(k + " = " + v);
    m.push_back("generator = " + std::string(generator_tag));
    return m;
}

inline void write_csv_file(const std::string& path, const std::vector<std::string>& metadata,
                           const std::vector<CsvRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(out, metadata, rows);
}

inline CsvDocument parse_csv(std::istream& is) {
    CsvDocument doc;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header_seen && !line.empty() && line.front() == '#') {
            doc.metadata.push_back(line.size() >= 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
            continue;
        }
        if (!header_seen) {
            if (line != csv_header) throw InvalidParameter("csv line " + std::to_string(line_no) + ": unexpected header");
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 16)
            throw InvalidParameter("csv line " + std::to_string(line_no) + ": expected 16 fields, got " +
                                   std::to_string(f.size()));
        const std::string where = "csv line " + std::to_string(line_no);
        CsvRow r;
        r.t = parse_double(f[0], where);
        r.gamma = parse_double(f[1], where);
        r.big_gamma = parse_double(f[2], where);
        r.omega = parse_double(f[3], where);
        r.method = f[4];
        r.concurrence = parse_double(f[5], where);
        r.branch_z = parse_double(f[6], where);
        r.branch_w = parse_double(f[7], where);
        r.rho11 = parse_double(f[8], where);
        r.rho22 = parse_double(f[9], where);
        r.rho33 = parse_double(f[10], where);
        r.rho44 = parse_double(f[11], where);
        r.rho23_re = parse_double(f[12], where);
        r.rho23_im = parse_double(f[13], where);
        r.rho14_re = parse_double(f[14], where);
        r.rho14_im = parse_double(f[15], where);
        doc.rows.push_back(std::move(r));
    }
    if (!header_seen) throw InvalidParameter("csv: missing header");
    return doc;
}

/// RunConfig recovered from a CSV metadata block.
inline RunConfig config_from_metadata(const std::vector<std::string>& metadata) {
    std::string text;
    for (const auto& m : metadata) {
        if (m.rfind("corrnoise csv", 0) == 0 || m.rfind("generator", 0) == 0) continue;
        text += m + "\n";
    }
    return parse_config_text(text);
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json to_json(const ComparisonReport& rep, const RunConfig* cfg = nullptr) {
    nlohmann::ordered_json j;
    j["initial"] = rep.initial_tag;
    j["gamma"] = rep.params.gamma_a;
    j["big_gamma"] = rep.params.big_gamma;
    j["omega"] = rep.params.omega;
    j["convention"] = std::string(to_string(rep.options.convention));
    j["unraveling"] = std::string(to_string(rep.options.unraveling));
    j["frame"] = "rotating";
    auto methods = nlohmann::ordered_json::array();
    for (Method m : rep.methods) methods.push_back(std::string(to_string(m)));
    j["methods"] = methods;
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& p : rep.pairs) {
        nlohmann::ordered_json e;
        e["pair"] = {std::string(to_string(p.first)), std::string(to_string(p.second))};
        e["max_abs_deviation"] = p.max_abs_deviation;
        e["time_of_max"] = p.time_of_max;
        e["max_frobenius"] = p.max_frobenius;
        e["time_of_max_frobenius"] = p.time_of_max_frobenius;
        pairs.push_back(e);
    }
    j["pairs"] = pairs;
    if (cfg) {
        nlohmann::ordered_json c;
        for (const auto& [k, v] : to_pairs(*cfg)) c[k] = v;
        j["config"] = c;
    }
    return j;
}

} // namespace corrnoise::io
