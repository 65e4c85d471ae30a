#include "triflex/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace triflex {

namespace {

struct RawValue {
    std::string text;
    bool quoted{false};
    int line{0};
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& msg) {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
}

const std::vector<std::string> kKnownKeys = {
    "variant", "d1",   "d2",   "theta", "theta_deg", "c",
    "dt",      "horizon", "record_every", "seed", "spread", "classify_tol",
    "p1x",     "p1y",  "p2x",  "p2y",   "p3x",  "p3y"};

std::map<std::string, RawValue> parse_table(std::istream& in, const std::string& source) {
    std::map<std::string, RawValue> table;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // Strip comments, respecting quoted strings.
        bool in_quote = false;
        std::string body;
        for (char ch : line) {
            if (ch == '"') in_quote = !in_quote;
            if (ch == '#' && !in_quote) break;
            body.push_back(ch);
        }
        body = trim(body);
        if (body.empty()) continue;

        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            fail(source, lineno, "expected `key = value`, got `" + body + "`");
        }
        const std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (key.empty()) fail(source, lineno, "missing key before `=`");
        if (value.empty()) fail(source, lineno, "missing value for key `" + key + "`");

        bool found = false;
        for (const auto& k : kKnownKeys) found = found || (k == key);
        if (!found) fail(source, lineno, "unknown key `" + key + "`");
        if (table.count(key)) fail(source, lineno, "duplicate key `" + key + "`");

        RawValue rv;
        rv.line = lineno;
        if (value.front() == '"') {
            if (value.size() < 2 || value.back() != '"') {
                fail(source, lineno, "unterminated string for key `" + key + "`");
            }
            rv.text = value.substr(1, value.size() - 2);
            rv.quoted = true;
        } else {
            rv.text = value;
        }
        table.emplace(key, std::move(rv));
    }
    return table;
}

class TableReader {
  public:
    TableReader(std::map<std::string, RawValue> table, std::string source)
        : table_(std::move(table)), source_(std::move(source)) {}

    std::optional<double> number(const std::string& key) {
        const RawValue* rv = find(key);
        if (!rv) return std::nullopt;
        if (rv->quoted) fail(source_, rv->line, "key `" + key + "` expects a number");
        try {
            size_t used = 0;
            const double v = std::stod(rv->text, &used);
            if (used != rv->text.size()) throw std::invalid_argument("trailing chars");
            return v;
        } catch (const std::exception&) {
            fail(source_, rv->line, "invalid number `" + rv->text + "` for key `" + key + "`");
        }
    }

    std::optional<long long> integer(const std::string& key) {
        const RawValue* rv = find(key);
        if (!rv) return std::nullopt;
        if (rv->quoted) fail(source_, rv->line, "key `" + key + "` expects an integer");
        try {
            size_t used = 0;
            const long long v = std::stoll(rv->text, &used);
            if (used != rv->text.size()) throw std::invalid_argument("trailing chars");
            return v;
        } catch (const std::exception&) {
            fail(source_, rv->line, "invalid integer `" + rv->text + "` for key `" + key + "`");
        }
    }

    std::optional<std::string> string(const std::string& key) {
        const RawValue* rv = find(key);
        if (!rv) return std::nullopt;
        if (!rv->quoted) fail(source_, rv->line, "key `" + key + "` expects a quoted string");
        return rv->text;
    }

    int line_of(const std::string& key) const {
        const auto it = table_.find(key);
        return it == table_.end() ? 0 : it->second.line;
    }
    bool has(const std::string& key) const { return table_.count(key) > 0; }
    const std::string& source() const { return source_; }

  private:
    const RawValue* find(const std::string& key) const {
        const auto it = table_.find(key);
        return it == table_.end() ? nullptr : &it->second;
    }

    std::map<std::string, RawValue> table_;
    std::string source_;
};

Variant variant_from_name(const std::string& name, const std::string& source, int line) {
    for (Variant v : {Variant::Unbiased, Variant::BiasedCollinear, Variant::RotatedSplit,
                      Variant::RotatedOneSided}) {
        if (name == variant_name(v)) return v;
    }
    fail(source, line,
         "unknown variant `" + name +
             "` (expected unbiased, biased-collinear, rotated-split or rotated-one-sided)");
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& source_name) {
    TableReader r(parse_table(in, source_name), source_name);

    Scenario sc;
    sc.spec.d1 = 30.0;
    sc.spec.d2 = 10.0;
    sc.spec.theta = 0.0;
    sc.spec.c = 1.0;
    sc.spec.variant = Variant::BiasedCollinear;

    if (auto v = r.string("variant")) {
        sc.spec.variant = variant_from_name(*v, r.source(), r.line_of("variant"));
    }
    if (auto v = r.number("d1")) sc.spec.d1 = *v;
    if (auto v = r.number("d2")) sc.spec.d2 = *v;
    if (r.has("theta") && r.has("theta_deg")) {
        fail(r.source(), r.line_of("theta_deg"), "give either theta or theta_deg, not both");
    }
    if (auto v = r.number("theta")) sc.spec.theta = *v;
    if (auto v = r.number("theta_deg")) sc.spec.theta = *v * kPi / 180.0;
    if (auto v = r.number("c")) sc.spec.c = *v;
    if (auto v = r.number("dt")) sc.dt = *v;
    if (auto v = r.number("horizon")) sc.horizon = *v;
    if (auto v = r.integer("record_every")) sc.record_every = static_cast<int>(*v);
    if (auto v = r.integer("seed")) {
        if (*v < 0) fail(r.source(), r.line_of("seed"), "seed must be non-negative");
        sc.seed = static_cast<std::uint64_t>(*v);
    }
    if (auto v = r.number("spread")) sc.spread = *v;
    if (auto v = r.number("classify_tol")) sc.classify_tol = *v;

    const char* pos_keys[6] = {"p1x", "p1y", "p2x", "p2y", "p3x", "p3y"};
    int present = 0;
    for (const char* k : pos_keys) present += r.has(k) ? 1 : 0;
    if (present == 6) {
        FormationState s;
        s.p1 = {*r.number("p1x"), *r.number("p1y")};
        s.p2 = {*r.number("p2x"), *r.number("p2y")};
        s.p3 = {*r.number("p3x"), *r.number("p3y")};
        sc.initial = s;
    } else if (present != 0) {
        fail(r.source(), 0, "initial positions need all six of p1x..p3y (got " +
                                std::to_string(present) + ")");
    }

    sc.validate();  // ConfigError on invariant violations (d1 <= 0, ...)
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    return parse_scenario(in, path);
}

std::vector<std::string> figure_names() {
    return {"collinear-stationary", "collinear-moving", "triangle"};
}

Scenario figure_scenario(const std::string& name, std::uint64_t seed) {
    Scenario sc;
    sc.seed = seed;
    sc.spec.d1 = 30.0;
    sc.spec.d2 = 10.0;
    if (name == "collinear-stationary") {
        sc.spec.variant = Variant::BiasedCollinear;
        sc.spec.c = 1.0;
        sc.horizon = 120.0;
    } else if (name == "collinear-moving") {
        sc.spec.variant = Variant::BiasedCollinear;
        sc.spec.c = -1.0;
        // The travelling set attracts at only ~0.094/s for |c| = 1; give the
        // common velocity time to settle well below 1e-6.
        sc.horizon = 300.0;
    } else if (name == "triangle") {
        sc.spec.variant = Variant::RotatedSplit;
        sc.spec.theta = kPi / 3.0;
        // Slow mode of this linearization is -7.7e-3/s at c = 0.1; the long
        // horizon lets the inter-link angle settle to micro-degrees.
        sc.spec.c = 0.1;
        sc.horizon = 2500.0;
    } else {
        throw ConfigError("unknown figure name `" + name +
                          "` (expected collinear-stationary, collinear-moving or triangle)");
    }
    return sc;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,p1x,p1y,p2x,p2y,p3x,p3y,e1,e2,e3,gamma,cross,speed1,speed2,speed3\n";
    for (size_t i = 0; i < traj.samples.size(); ++i) {
        const auto& x = traj.samples[i];
        const auto& d = traj.derived[i];
        out << format_double(traj.times[i]);
        for (double v : x) out << ',' << format_double(v);
        for (double v : {d.e1, d.e2, d.e3, d.gamma, d.cross, d.speed1, d.speed2, d.speed3}) {
            out << ',' << format_double(v);
        }
        out << '\n';
    }
}

std::vector<std::vector<double>> read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("trajectory CSV: empty stream");
    if (line != "t,p1x,p1y,p2x,p2y,p3x,p3y,e1,e2,e3,gamma,cross,speed1,speed2,speed3") {
        throw ConfigError("trajectory CSV: unexpected header `" + line + "`");
    }
    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != 15) {
            throw ConfigError("trajectory CSV line " + std::to_string(lineno) +
                              ": expected 15 columns, got " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_report(std::ostream& out, const Scenario& sc, const ConvergenceReport& rep) {
    auto kv = [&out](const std::string& k, const std::string& v) {
        out << k << " = " << v << '\n';
    };
    kv("scenario.variant", variant_name(sc.spec.variant));
    kv("scenario.d1", format_double(sc.spec.d1));
    kv("scenario.d2", format_double(sc.spec.d2));
    kv("scenario.theta", format_double(sc.spec.theta));
    kv("scenario.c", format_double(sc.spec.c));
    kv("scenario.dt", format_double(sc.dt));
    kv("scenario.horizon", format_double(sc.horizon));
    kv("scenario.seed", std::to_string(sc.seed));
    kv("result.classification", equilibrium_class_name(rep.classified.cls));
    kv("result.e1_final", format_double(rep.final_errors.e1));
    kv("result.e2_final", format_double(rep.final_errors.e2));
    kv("result.e3_final", format_double(rep.final_errors.e3));
    kv("result.gamma_final_rad", format_double(rep.final_gamma));
    kv("result.gamma_final_deg", format_double(rep.final_gamma * 180.0 / kPi));
    kv("result.collinearity_residual", format_double(rep.collinearity_residual));
    kv("result.steady_speed", format_double(rep.steady_speed));
    kv("result.steady_vx", format_double(rep.steady_velocity.x));
    kv("result.steady_vy", format_double(rep.steady_velocity.y));
    for (int i = 0; i < 3; ++i) {
        const auto& v = rep.agent_velocities[static_cast<size_t>(i)];
        const std::string tag = "result.agent" + std::to_string(i + 1);
        kv(tag + "_speed", format_double(v.norm()));
        kv(tag + "_vx", format_double(v.x));
        kv(tag + "_vy", format_double(v.y));
    }
    kv("result.min_link_distance", format_double(rep.min_link_distance));
    kv("result.field_norm", format_double(rep.classified.field_norm));
    kv("result.cond1_residual", format_double(rep.classified.cond1_res));
    kv("result.zeq_residual", format_double(rep.classified.zeq_res));
}

}  // namespace triflex
