#include "stefan/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "stefan/besov.hpp"
#include "stefan/series.hpp"

namespace stefan::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

double to_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected a number, got '" + s + "'");
    }
}

long long to_integer(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected an integer, got '" + s + "'");
    }
}

exprs::Expr to_expr(const std::string& s, const std::string& where) {
    try {
        return exprs::parse(s);
    } catch (const exprs::ParseError& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open table " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        rows.push_back(split(line, ','));
    }
    return rows;
}

// Checks that sorted unique coordinates are uniformly spaced from 0; returns the spacing.
double uniform_spacing(const std::vector<double>& c, const std::string& what) {
    if (c.size() < 2) throw ConfigError(what + ": need at least two distinct coordinates");
    const double h = (c.back() - c.front()) / static_cast<double>(c.size() - 1);
    if (std::abs(c.front()) > 1e-12 * std::max(1.0, c.back()))
        throw ConfigError(what + ": coordinates must start at 0");
    for (std::size_t i = 0; i < c.size(); ++i)
        if (std::abs(c[i] - h * static_cast<double>(i)) > 1e-9 * std::max(1.0, c.back()))
            throw ConfigError(what + ": coordinates are not uniformly spaced");
    return h;
}

class Section {
public:
    Section(const IniFile& ini, std::string name) : ini_(ini), name_(std::move(name)) {}

    std::optional<std::string> raw(const std::string& key) const { return ini_.get(name_, key); }
    std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

    std::string required(const std::string& key) const {
        auto v = raw(key);
        if (!v || v->empty()) throw ConfigError(where(key) + ": missing value");
        return *v;
    }
    double number(const std::string& key, double fallback) const {
        auto v = raw(key);
        return v ? to_double(*v, where(key)) : fallback;
    }
    double required_number(const std::string& key) const { return to_double(required(key), where(key)); }
    int integer(const std::string& key, int fallback) const {
        auto v = raw(key);
        return v ? static_cast<int>(to_integer(*v, where(key))) : fallback;
    }

private:
    const IniFile& ini_;
    std::string name_;
};

constexpr const char* kTablePrefix = "table:";

bool is_table(const std::string& v) { return v.rfind(kTablePrefix, 0) == 0; }

fs::path table_path(const std::string& v, const fs::path& base) {
    fs::path p = trim(v.substr(std::string(kTablePrefix).size()));
    return p.is_absolute() ? p : base / p;
}

Field read_field_spec(const Section& sec, const std::string& key, const fs::path& base) {
    const std::string v = sec.required(key);
    if (is_table(v)) return Field(read_field_table(table_path(v, base)));
    return Field(to_expr(v, sec.where(key)));
}

Curve read_curve_spec(const Section& sec, const std::string& key, Curve::Var var,
                      const fs::path& base) {
    const std::string v = sec.required(key);
    if (is_table(v)) {
        double h = 0.0;
        auto samples = read_series_table(table_path(v, base), &h);
        return Curve(std::move(samples), h);
    }
    return Curve(to_expr(v, sec.where(key)), var);
}

ControlVector read_control(const Section& sec, const ProblemData& data, int n_x, int n_t,
                           const fs::path& base) {
    const std::string fv = sec.required("f");
    const std::string gv = sec.required("g");
    const std::string sv = sec.required("s");

    SampledField f;
    if (is_table(fv)) {
        f = read_field_table(table_path(fv, base));
        if (f.nt != n_t) throw ConfigError(sec.where("f") + ": table time nodes do not match n_t");
    } else {
        const auto e = to_expr(fv, sec.where("f"));
        f = SampledField(data.ell, data.T, n_x, n_t);
        for (int n = 0; n <= n_t; ++n)
            for (int i = 0; i <= n_x; ++i) f.at(i, n) = e.eval(f.x(i), f.t(n));
    }
    auto series = [&](const std::string& v, const std::string& key) {
        std::vector<double> out;
        if (is_table(v)) {
            out = read_series_table(table_path(v, base));
            if (static_cast<int>(out.size()) != n_t + 1)
                throw ConfigError(sec.where(key) + ": table length does not match n_t");
        } else {
            const auto e = to_expr(v, sec.where(key));
            const Grid grid(4, n_t, data.T);
            out.resize(static_cast<std::size_t>(n_t) + 1);
            for (int n = 0; n <= n_t; ++n) out[n] = e.eval(0.0, grid.t(n));
        }
        return out;
    };
    return ControlVector(std::move(f), series(gv, "g"), series(sv, "s"));
}

std::vector<double> number_list(const std::string& s, const std::string& where) {
    std::vector<double> out;
    for (const auto& p : split(s, ',')) out.push_back(to_double(p, where));
    if (out.empty()) throw ConfigError(where + ": empty list");
    return out;
}

void ensure_dir(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory " + out.string() + ": " + ec.message());
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::string& header) : out_(path) {
        if (!out_) throw ConfigError("cannot write " + path.string());
        out_ << header << '\n';
    }
    CsvWriter& row(std::initializer_list<std::string> cells) {
        bool first = true;
        for (const auto& c : cells) {
            if (!first) out_ << ',';
            out_ << c;
            first = false;
        }
        out_ << '\n';
        return *this;
    }
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

std::string n2s(double v) { return format_number(v); }

const ControlVector& require_control(const RunConfig& cfg) {
    if (!cfg.control) throw ConfigError("[control] section is required for this command");
    return *cfg.control;
}

void write_control(const fs::path& out, const std::string& prefix, const ControlVector& v) {
    write_field_table(out / (prefix + "_f.csv"), v.f());
    write_series_table(out / (prefix + "_g.csv"), "t", v.g(), v.dt());
    write_series_table(out / (prefix + "_s.csv"), "t", v.s(), v.dt());
}

}  // namespace

IniFile IniFile::parse(const std::string& text) {
    IniFile ini;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto cut = line.find_first_of("#;");
        if (cut != std::string::npos) line = line.substr(0, cut);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            ini.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside of a section");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        auto& sec = ini.sections_[section];
        if (sec.count(key))
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key [" + section +
                              "] " + key);
        sec[key] = Entry{trim(line.substr(eq + 1)), lineno, false};
    }
    return ini;
}

bool IniFile::has_section(const std::string& section) const { return sections_.count(section) > 0; }

std::optional<std::string> IniFile::get(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    k->second.used = true;
    return k->second.value;
}

std::vector<std::string> IniFile::unused() const {
    std::vector<std::string> out;
    for (const auto& [name, keys] : sections_)
        for (const auto& [key, e] : keys)
            if (!e.used) out.push_back(name + "." + key);
    return out;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SampledField read_field_table(const fs::path& path) {
    const auto rows = read_csv(path);
    std::set<double> xs, ts;
    std::vector<std::array<double, 3>> vals;
    for (const auto& r : rows) {
        if (r.size() != 3) throw ConfigError(path.string() + ": expected x,t,value rows");
        const double x = to_double(r[0], path.string());
        const double t = to_double(r[1], path.string());
        vals.push_back({x, t, to_double(r[2], path.string())});
        xs.insert(x);
        ts.insert(t);
    }
    const std::vector<double> xv(xs.begin(), xs.end()), tv(ts.begin(), ts.end());
    const double dx = uniform_spacing(xv, path.string() + " (x)");
    const double dt = uniform_spacing(tv, path.string() + " (t)");
    const int nx = static_cast<int>(xv.size()) - 1;
    const int nt = static_cast<int>(tv.size()) - 1;
    if (vals.size() != static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(nt + 1))
        throw ConfigError(path.string() + ": table is not a full grid");
    SampledField f(xv.back(), tv.back(), nx, nt);
    std::vector<bool> seen(vals.size(), false);
    for (const auto& [x, t, value] : vals) {
        const int i = static_cast<int>(std::lround(x / dx));
        const int n = static_cast<int>(std::lround(t / dt));
        const auto idx = static_cast<std::size_t>(n) * (nx + 1) + i;
        if (seen[idx]) throw ConfigError(path.string() + ": duplicate grid point");
        seen[idx] = true;
        f.at(i, n) = value;
    }
    return f;
}

std::vector<double> read_series_table(const fs::path& path, double* spacing) {
    const auto rows = read_csv(path);
    std::vector<double> coord, values;
    for (const auto& r : rows) {
        if (r.size() != 2) throw ConfigError(path.string() + ": expected coordinate,value rows");
        coord.push_back(to_double(r[0], path.string()));
        values.push_back(to_double(r[1], path.string()));
    }
    if (!std::is_sorted(coord.begin(), coord.end()))
        throw ConfigError(path.string() + ": coordinates must increase");
    const double h = uniform_spacing(coord, path.string());
    if (spacing) *spacing = h;
    return values;
}

void write_field_table(const fs::path& path, const SampledField& f) {
    CsvWriter w(path, "x,t,value");
    for (int n = 0; n <= f.nt; ++n)
        for (int i = 0; i <= f.nx; ++i) w.row({n2s(f.x(i)), n2s(f.t(n)), n2s(f.at(i, n))});
}

void write_series_table(const fs::path& path, const std::string& coord,
                        const std::vector<double>& values, double spacing) {
    CsvWriter w(path, coord + ",value");
    for (std::size_t i = 0; i < values.size(); ++i)
        w.row({n2s(spacing * static_cast<double>(i)), n2s(values[i])});
}

RunConfig parse_config(const std::string& text, const fs::path& base_dir,
                       std::optional<std::uint64_t> seed) {
    const IniFile ini = IniFile::parse(text);
    RunConfig cfg;
    cfg.base_dir = base_dir;
    if (!ini.has_section("problem")) throw ConfigError("missing [problem] section");

    const Section prob(ini, "problem");
    ProblemData& d = cfg.data;
    d.T = prob.required_number("T");
    d.s0 = prob.required_number("s0");
    d.delta = prob.required_number("delta");
    d.ell = prob.required_number("ell");
    d.R = prob.required_number("R");
    d.alpha = prob.required_number("alpha");
    d.beta0 = prob.number("beta0", 1.0);
    d.beta1 = prob.number("beta1", 1.0);
    d.beta2 = prob.number("beta2", 1.0);
    d.a = read_field_spec(prob, "a", base_dir);
    d.b = read_field_spec(prob, "b", base_dir);
    d.c = read_field_spec(prob, "c", base_dir);
    d.gamma = read_field_spec(prob, "gamma", base_dir);
    d.chi = read_field_spec(prob, "chi", base_dir);
    d.phi = read_curve_spec(prob, "phi", Curve::Var::X, base_dir);

    const Section grid(ini, "grid");
    cfg.n_y = grid.integer("n_y", cfg.n_y);
    cfg.n_t = grid.integer("n_t", cfg.n_t);
    cfg.n_x = grid.integer("n_x", cfg.n_x);
    if (cfg.n_x < 1) throw ConfigError("[grid] n_x: must be positive");
    if (auto sch = grid.raw("scheme")) {
        if (*sch == "crank_nicolson")
            cfg.solver.scheme = TimeScheme::CrankNicolson;
        else if (*sch == "backward_euler")
            cfg.solver.scheme = TimeScheme::BackwardEuler;
        else
            throw ConfigError("[grid] scheme: expected crank_nicolson or backward_euler");
    }

    if (ini.has_section("synthetic")) {
        const Section syn(ini, "synthetic");
        SyntheticSettings s;
        s.f_true = to_expr(syn.required("f_true"), syn.where("f_true"));
        s.g_true = to_expr(syn.required("g_true"), syn.where("g_true"));
        s.s_true = to_expr(syn.required("s_true"), syn.where("s_true"));
        s.generation_refinement = syn.integer("generation_refinement", 1);
        s.noise_level = syn.number("noise_level", 0.0);
        s.seed = static_cast<std::uint64_t>(syn.integer("seed", 0));
        if (seed) s.seed = *seed;
        cfg.synthetic = s;
        for (const char* key : {"w", "mu", "s_star"})
            if (prob.raw(key))
                throw ConfigError(prob.where(key) + ": measurements come from [synthetic]");
    } else {
        d.w = read_curve_spec(prob, "w", Curve::Var::X, base_dir);
        d.mu = read_curve_spec(prob, "mu", Curve::Var::T, base_dir);
        d.s_star = prob.required_number("s_star");
    }
    try {
        d.check();
        (void)cfg.grid();
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }

    if (cfg.synthetic) {
        verify::SyntheticOptions so;
        so.n_y = cfg.n_y;
        so.n_t = cfg.n_t;
        so.n_x = cfg.n_x;
        so.generation_refinement = cfg.synthetic->generation_refinement;
        so.noise_level = cfg.synthetic->noise_level;
        so.seed = cfg.synthetic->seed;
        try {
            cfg.data = verify::make_synthetic_case(d, cfg.synthetic->f_true, cfg.synthetic->g_true,
                                                   cfg.synthetic->s_true, so)
                           .data;
        } catch (const InvalidInput& e) {
            throw ConfigError(std::string("[synthetic]: ") + e.what());
        }
    }

    if (ini.has_section("control"))
        cfg.control = read_control(Section(ini, "control"), cfg.data, cfg.n_x, cfg.n_t, base_dir);

    const Section opt(ini, "optimizer");
    OptimizerConfig& oc = cfg.optimizer;
    oc.max_iters = opt.integer("max_iters", oc.max_iters);
    oc.epsilon = opt.number("epsilon", oc.epsilon);
    oc.alpha0 = opt.number("alpha0", oc.alpha0);
    oc.armijo_c = opt.number("armijo_c", oc.armijo_c);
    oc.armijo_shrink = opt.number("armijo_shrink", oc.armijo_shrink);
    oc.max_backtracks = opt.integer("max_backtracks", oc.max_backtracks);
    oc.gradient_tolerance = opt.number("gradient_tolerance", oc.gradient_tolerance);
    if (auto m = opt.raw("s_update_mode")) {
        try {
            oc.s_update_mode = parse_s_update_mode(*m);
        } catch (const InvalidInput& e) {
            throw ConfigError(opt.where("s_update_mode") + ": " + e.what());
        }
    }
    if (auto comps = opt.raw("optimize")) {
        oc.optimize_f = oc.optimize_g = oc.optimize_s = false;
        for (const auto& c : split(*comps, ',')) {
            if (c == "f") oc.optimize_f = true;
            else if (c == "g") oc.optimize_g = true;
            else if (c == "s") oc.optimize_s = true;
            else throw ConfigError(opt.where("optimize") + ": unknown component '" + c + "'");
        }
    }
    cfg.gap_candidates = opt.integer("gap_candidates", cfg.gap_candidates);
    oc.solver = cfg.solver;
    try {
        oc.check();
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }

    const Section gc(ini, "gradcheck");
    GradcheckSettings& g = cfg.gradcheck;
    g.threshold = gc.number("threshold", g.threshold);
    g.abs_floor = gc.number("abs_floor", g.abs_floor);
    if (auto s = gc.raw("steps")) g.steps = number_list(*s, gc.where("steps"));
    if (auto s = gc.raw("components")) {
        g.components = split(*s, ',');
        for (const auto& c : g.components)
            if (c != "f" && c != "g" && c != "s")
                throw ConfigError(gc.where("components") + ": unknown component '" + c + "'");
    }
    if (auto s = gc.raw("df")) g.df = to_expr(*s, gc.where("df"));
    if (auto s = gc.raw("dg")) g.dg = to_expr(*s, gc.where("dg"));
    if (auto s = gc.raw("ds")) g.ds = to_expr(*s, gc.where("ds"));

    if (ini.has_section("exact")) {
        const Section ex(ini, "exact");
        cfg.exact_u = to_expr(ex.required("u"), ex.where("u"));
    }
    const Section out(ini, "output");
    if (auto dir = out.raw("directory")) cfg.output_dir = *dir;
    if (auto f = out.raw("format"); f && *f != "csv")
        throw ConfigError(out.where("format") + ": only csv is supported");

    const auto left = ini.unused();
    if (!left.empty()) throw ConfigError("unknown configuration key " + left.front());
    return cfg;
}

RunConfig load_config(const fs::path& path, std::optional<std::uint64_t> seed) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path(), seed);
}

namespace {

void write_state(const fs::path& out, const StateField& st, const ControlVector& v,
                 const Grid& grid) {
    {
        CsvWriter w(out / "state.csv", "y,t,u_tilde");
        for (int n = 0; n <= grid.n_t(); ++n)
            for (int j = 0; j <= grid.n_y(); ++j)
                w.row({n2s(grid.y(j)), n2s(grid.t(n)), n2s(st.u(j, n))});
    }
    const auto ux = free_boundary_ux(st, v);
    CsvWriter w(out / "traces.csv", "t,s,u_free,u_fixed,uy_free,ux_free,aux_free");
    for (int n = 0; n <= grid.n_t(); ++n)
        w.row({n2s(grid.t(n)), n2s(v.s()[n]), n2s(st.trace_free[n]), n2s(st.trace_fixed[n]),
               n2s(st.trace_uy_free[n]), n2s(ux[n]), n2s(st.trace_aux_free[n])});
}

void write_cost(const fs::path& path, const CostBreakdown& c) {
    CsvWriter w(path, "j1,j2,j3,total");
    w.row({n2s(c.j1), n2s(c.j2), n2s(c.j3), n2s(c.total)});
}

ControlIncrement direction_for(const std::string& comp, const RunConfig& cfg,
                               const ControlVector& v) {
    ControlIncrement d = ControlIncrement::zero_like(v);
    const Grid grid = cfg.grid();
    for (int n = 0; n <= grid.n_t(); ++n) {
        const double t = grid.t(n);
        if (comp == "f")
            for (int i = 0; i <= d.df.nx; ++i) d.df.at(i, n) = cfg.gradcheck.df.eval(d.df.x(i), t);
        if (comp == "g") d.dg[n] = cfg.gradcheck.dg.eval(0.0, t);
        if (comp == "s") d.ds[n] = cfg.gradcheck.ds.eval(0.0, t);
    }
    return d;
}

}  // namespace

int cmd_forward(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const ControlVector& v = require_control(cfg);
    const Grid grid = cfg.grid();
    const StateField st = solve_forward(v, cfg.data, grid, cfg.solver);
    const CostBreakdown c = evaluate_cost(v, st, cfg.data, grid);
    ensure_dir(out);
    write_state(out, st, v, grid);
    write_cost(out / "cost.csv", c);
    log << "cost total = " << format_number(c.total) << '\n';
    if (cfg.exact_u) {
        double err = 0.0;
        for (int n = 0; n <= grid.n_t(); ++n)
            for (int j = 0; j <= grid.n_y(); ++j)
                err = std::max(err, std::abs(st.u(j, n) -
                                             cfg.exact_u->eval(grid.y(j) * v.s()[n], grid.t(n))));
        CsvWriter w(out / "error.csv", "linf_error");
        w.row({n2s(err)});
        log << "linf error vs exact = " << format_number(err) << '\n';
    }
    return 0;
}

int cmd_adjoint(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const ControlVector& v = require_control(cfg);
    const Grid grid = cfg.grid();
    const StateField st = solve_forward(v, cfg.data, grid, cfg.solver);
    const AdjointField adj = solve_adjoint(v, st, cfg.data, grid, cfg.solver);
    const GradientVector g = assemble_gradient(v, st, adj, cfg.data, grid);
    ensure_dir(out);
    {
        CsvWriter w(out / "adjoint.csv", "y,t,psi_tilde");
        for (int n = 0; n <= grid.n_t(); ++n)
            for (int j = 0; j <= grid.n_y(); ++j)
                w.row({n2s(grid.y(j)), n2s(grid.t(n)), n2s(adj.psi(j, n))});
    }
    {
        CsvWriter w(out / "gradient_series.csv", "t,psi_fixed,psi_free,g_g,g_s,g_sprime");
        for (int n = 0; n <= grid.n_t(); ++n)
            w.row({n2s(grid.t(n)), n2s(adj.trace_fixed[n]), n2s(adj.trace_free[n]), n2s(g.g_g[n]),
                   n2s(g.g_s[n]), n2s(g.g_sprime[n])});
    }
    write_field_table(out / "gradient_f.csv", g.g_f);
    {
        CsvWriter w(out / "gradient_scalar.csv", "g_sT");
        w.row({n2s(g.g_sT)});
    }
    log << "max |psi| = " << format_number(max_abs(adj.psi_tilde)) << '\n';
    return 0;
}

int cmd_gradcheck(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const ControlVector& v = require_control(cfg);
    const Grid grid = cfg.grid();
    const StateField st = solve_forward(v, cfg.data, grid, cfg.solver);
    const AdjointField adj = solve_adjoint(v, st, cfg.data, grid, cfg.solver);
    const GradientVector grad = assemble_gradient(v, st, adj, cfg.data, grid);
    ensure_dir(out);
    CsvWriter w(out / "gradcheck.csv", "component,h,dJ_fd,dJ_adj,rel_err");
    bool ok = true;
    for (const auto& comp : cfg.gradcheck.components) {
        const ControlIncrement d = direction_for(comp, cfg, v);
        const double adj_dj = directional_derivative(grad, d, grid);
        for (double h : cfg.gradcheck.steps) {
            const double fd = verify::fd_directional_derivative(cfg.data, grid, v, d, h, cfg.solver);
            const double rel = std::abs(adj_dj - fd) / std::max(std::abs(fd), cfg.gradcheck.abs_floor);
            if (!(rel <= cfg.gradcheck.threshold)) ok = false;
            w.row({comp, n2s(h), n2s(fd), n2s(adj_dj), n2s(rel)});
            char line[160];
            std::snprintf(line, sizeof line, "%s h=%-8.1e fd=% .10e adj=% .10e rel=%.3e\n",
                          comp.c_str(), h, fd, adj_dj, rel);
            log << line;
        }
    }
    w.flush();
    log << (ok ? "gradcheck passed" : "gradcheck FAILED") << " (threshold "
        << format_number(cfg.gradcheck.threshold) << ")\n";
    return ok ? 0 : 2;
}

int cmd_optimize(const RunConfig& cfg, const fs::path& out, std::ostream& log, std::uint64_t seed) {
    const ControlVector& v0 = require_control(cfg);
    const Grid grid = cfg.grid();
    ensure_dir(out);
    const std::string header =
        "k,J,j1,j2,j3,step,grad_f,grad_g,grad_s,grad_sprime,grad_sT,control_norm";
    auto write_history = [&](const std::vector<IterationRecord>& hist) {
        CsvWriter w(out / "history.csv", header);
        for (const auto& r : hist)
            w.row({std::to_string(r.k), n2s(r.cost.total), n2s(r.cost.j1), n2s(r.cost.j2),
                   n2s(r.cost.j3), n2s(r.step), n2s(r.grad_norms.f), n2s(r.grad_norms.g),
                   n2s(r.grad_norms.s), n2s(r.grad_norms.sprime), n2s(r.grad_norms.sT),
                   n2s(r.control_norm)});
    };

    const auto rep = validate_control(v0, cfg.data);
    if (!rep.is_member()) {
        const auto& first = rep.violations.front();
        throw ConfigError("initial control violates " + first.constraint + " (by " +
                          format_number(first.magnitude) + ")");
    }
    OptimizationResult res;
    try {
        res = run(v0, cfg.data, grid, cfg.optimizer);
    } catch (const OptimizationAborted& e) {
        write_history(e.history());
        throw;
    }
    write_history(res.history);
    write_control(out, "control", res.control);

    verify::CandidateOptions co;
    co.count = cfg.gap_candidates;
    co.seed = seed;
    co.vary_f = cfg.optimizer.optimize_f;
    co.vary_g = cfg.optimizer.optimize_g;
    co.vary_s = cfg.optimizer.optimize_s;
    const auto cands = verify::random_feasible_candidates(res.control, cfg.data, co);
    const auto gaps = optimality_gap(res.gradient, res.control, cands, grid);
    {
        CsvWriter w(out / "gap.csv", "candidate,gap,distance_H");
        for (std::size_t i = 0; i < gaps.size(); ++i)
            w.row({std::to_string(i), n2s(gaps[i]),
                   n2s(control_distance_H(cands[i], res.control, cfg.data.alpha))});
    }
    const auto& first = res.history.front();
    const auto& last = res.history.back();
    log << "stop: " << to_string(res.reason) << " after " << last.k << " iterations\n";
    log << "J: " << format_number(first.cost.total) << " -> " << format_number(last.cost.total)
        << '\n';
    if (!gaps.empty())
        log << "min optimality gap = " << format_number(*std::min_element(gaps.begin(), gaps.end()))
            << '\n';
    return 0;
}

int cmd_norms(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const ControlVector& v = require_control(cfg);
    const double alpha = cfg.data.alpha;
    const auto fn = besov::anisotropic_norm_f(v.f(), alpha);
    const auto gn = besov::besov_norm(v.g(), 0.5 + alpha, v.dt());
    const auto sn = besov::sobolev_w2_norm(v.s(), 2, v.dt());
    ensure_dir(out);
    CsvWriter w(out / "norms.csv",
                "component,l2_part,d1_part,d2_part,fractional_seminorm,x_part,t_part,total");
    auto part = [](const besov::NormBreakdown& b, std::size_t i) {
        return i < b.derivative_parts.size() ? b.derivative_parts[i] : 0.0;
    };
    for (const auto& [name, b] : {std::pair{"f", fn}, std::pair{"g", gn}, std::pair{"s", sn}}) {
        w.row({name, n2s(b.l2_part), n2s(part(b, 0)), n2s(part(b, 1)), n2s(b.fractional_seminorm),
               n2s(b.x_part), n2s(b.t_part), n2s(b.total)});
        log << name << ": " << format_number(b.total) << '\n';
    }
    const double H = std::max({fn.total, gn.total, sn.total});
    w.row({"H", "", "", "", "", "", "", n2s(H)});
    log << "H: " << format_number(H) << '\n';
    return 0;
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Inverse Stefan problem: forward and adjoint solves, gradient checks, optimisation"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;

    struct Sub {
        const char* name;
        const char* help;
        bool seeded;
    };
    const Sub subs[] = {
        {"forward", "Solve the state equation and write state, traces and cost", true},
        {"adjoint", "Solve the adjoint equation and write psi and the gradient", true},
        {"gradcheck", "Compare adjoint directional derivatives with finite differences", true},
        {"optimize", "Run projected gradient descent", true},
        {"norms", "Print the control norms", false},
    };
    std::map<std::string, CLI::Option*> seed_opts;
    for (const auto& s : subs) {
        auto* sc = app.add_subcommand(s.name, s.help);
        sc->add_option("--config", config_path, "configuration file")->required();
        sc->add_option("--out", out_dir, "output directory");
        if (s.seeded) seed_opts[s.name] = sc->add_option("--seed", seed, "random seed");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (auto it = seed_opts.find(cmd); it != seed_opts.end()) seed_given = it->second->count() > 0;

    try {
        const RunConfig cfg =
            load_config(config_path, seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt);
        fs::path out = !out_dir.empty() ? fs::path(out_dir)
                       : !cfg.output_dir.empty() ? cfg.base_dir / cfg.output_dir
                                                 : fs::path("out");
        if (cmd == "forward") return cmd_forward(cfg, out, std::cout);
        if (cmd == "adjoint") return cmd_adjoint(cfg, out, std::cout);
        if (cmd == "gradcheck") return cmd_gradcheck(cfg, out, std::cout);
        if (cmd == "optimize") return cmd_optimize(cfg, out, std::cout, seed);
        return cmd_norms(cfg, out, std::cout);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const SolverError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace stefan::cli
