#include "mfspec/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "mfspec/logsum.hpp"
#include "mfspec/oracle.hpp"
#include "mfspec/pressure.hpp"
#include "mfspec/spectrum.hpp"

namespace mfspec::cli {

namespace {

using json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of "key" in the source text, 0 if absent.
int line_of_key(const std::string& text, const std::string& key) {
    const auto pos = text.find("\"" + key + "\"");
    return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

std::string located(const std::string& source, int line, const std::string& message) {
    return line > 0 ? source + ":" + std::to_string(line) + ": " + message : source + ": " + message;
}

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(located(source, line_of_offset(text, e.byte), e.what()));
    }
}

template <class T>
T field(const json& doc, const std::string& key, const std::string& text, const std::string& source) {
    if (!doc.contains(key)) throw ParseError(located(source, 0, "missing field \"" + key + "\""));
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(located(source, line_of_key(text, key), "field \"" + key + "\": " + e.what()));
    }
}

PotentialTable table_field(const json& node, int alphabet, const std::string& key, const std::string& text,
                           const std::string& source) {
    const int line = line_of_key(text, key);
    try {
        const int depth = node.at("depth").get<int>();
        auto values = node.at("values").get<std::vector<double>>();
        return PotentialTable(alphabet, depth, std::move(values));
    } catch (const json::exception& e) {
        throw ParseError(located(source, line, "field \"" + key + "\": " + e.what()));
    } catch (const ValidationError& e) {
        throw ValidationError(located(source, line, e.what()));
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("cannot read a number from \"" + s + "\" in " + what);
    }
}

// ---------------------------------------------------------------------------
// Worker pool: rows are filled by index, so output order is the input order.

template <class F>
std::vector<std::vector<Cell>> parallel_rows(std::size_t count, int jobs, F make_row) {
    std::vector<std::vector<Cell>> rows(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                rows[i] = make_row(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, jobs));
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < std::min(threads, count); ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

struct Modes {
    ConstraintMode constraint = ConstraintMode::L;
    bool shrinking = false;
};

Modes parse_modes(const std::string& spec) {
    Modes m;
    for (const auto& raw : split(spec, ',')) {
        std::string tok = raw;
        std::transform(tok.begin(), tok.end(), tok.begin(), [](unsigned char c) { return std::tolower(c); });
        if (tok == "l") {
            m.constraint = ConstraintMode::L;
        } else if (tok == "m") {
            m.constraint = ConstraintMode::M;
        } else if (tok == "fixed") {
            m.shrinking = false;
        } else if (tok == "shrinking") {
            m.shrinking = true;
        } else if (!tok.empty()) {
            throw ParseError("unknown mode \"" + raw + "\" (expected L, M, fixed or shrinking)");
        }
    }
    return m;
}

std::vector<double> radii_of(const RunConfig& c) {
    if (!c.radii.empty()) return c.radii;
    if (c.radius_count < 3) throw ScheduleTooShort("shrinking-target schedule needs at least three radii");
    return default_radius_schedule(c.radius_count);
}

MeasureFamily family_of(const RunConfig& c, int depth) {
    if (c.family == "bernoulli") return MeasureFamily::Bernoulli;
    if (c.family == "markov1") return MeasureFamily::Markov1;
    if (c.family != "auto") throw ParseError("unknown family \"" + c.family + "\" (expected bernoulli, markov1, auto)");
    return depth <= 1 ? MeasureFamily::Bernoulli : MeasureFamily::Markov1;
}

TargetBox require_target(const RunConfig& c) {
    if (c.target.empty()) throw ParseError("command " + c.command + " needs --target");
    return parse_target(c.target);
}

std::string status_name(LegendreStatus s) {
    switch (s) {
        case LegendreStatus::Interior: return "interior";
        case LegendreStatus::Boundary: return "boundary";
        case LegendreStatus::Exterior: return "exterior";
    }
    return "interior";
}

void indexed_columns(std::vector<std::string>& cols, const std::string& stem, std::size_t count) {
    for (std::size_t m = 1; m <= count; ++m) cols.push_back(stem + "_" + std::to_string(m));
}

struct CommandResult {
    Table table;
    bool empty = false;
};

// ---------------------------------------------------------------------------
// Commands.

CommandResult cmd_pressure(const RunConfig& c, const ModelSpec& spec) {
    const auto ts = parse_grid(c.t_grid.empty() ? "0:1:11" : c.t_grid);
    const ModelPotentials pots = build_potentials(spec);
    const bool closed = pots.scaling.depth() == 1 && c.n_max == 0;
    const int n = c.n_max > 0 ? c.n_max : 12;
    CommandResult r;
    r.table.columns = {"t", "pressure", "method"};
    r.table.rows = parallel_rows(ts.size(), c.jobs, [&](std::size_t i) -> std::vector<Cell> {
        const PotentialTable phi = pots.scaling.scaled(ts[i]);
        if (closed) return {ts[i], pressure_exact(phi), std::string("closed_form")};
        return {ts[i], pressure_level(phi, n), "series_n=" + std::to_string(n)};
    });
    return r;
}

CommandResult cmd_dimension(const RunConfig& c, const ModelSpec& spec) {
    const ModelPotentials pots = build_potentials(spec);
    CommandResult r;
    r.table.columns = {"dimension", "method", "n"};
    if (pots.scaling.depth() == 1 && c.n_max == 0) {
        r.table.rows.push_back({bowen_dimension(spec), std::string("closed_form"), 0.0});
    } else {
        const int n = c.n_max > 0 ? c.n_max : 12;
        r.table.rows.push_back({bowen_dimension_series(spec, n), std::string("series"), static_cast<double>(n)});
    }
    return r;
}

CommandResult cmd_beta(const RunConfig& c, const ModelSpec& spec) {
    const auto mm = static_cast<std::size_t>(spec.measure_count());
    std::vector<std::vector<double>> qs;
    if (!c.q_point.empty()) {
        std::vector<double> q;
        for (const auto& s : split(c.q_point, ',')) q.push_back(to_double(s, "--q"));
        qs.push_back(std::move(q));
    } else {
        if (mm != 1) throw ParseError("beta with M >= 2 measures needs --q a,b,...");
        for (double q : parse_grid(c.q_grid.empty() ? "-5:5:11" : c.q_grid)) qs.push_back({q});
    }
    CommandResult r;
    indexed_columns(r.table.columns, "q", mm);
    r.table.columns.push_back("beta");
    indexed_columns(r.table.columns, "alpha", mm);
    r.table.columns.push_back("residual");
    r.table.rows = parallel_rows(qs.size(), c.jobs, [&](std::size_t i) {
        const BetaPoint bp = beta(spec, qs[i]);
        std::vector<Cell> row(bp.q.begin(), bp.q.end());
        row.emplace_back(bp.beta);
        row.insert(row.end(), bp.alpha.begin(), bp.alpha.end());
        row.emplace_back(bp.residual);
        return row;
    });
    return r;
}

CommandResult cmd_spectrum(const RunConfig& c, const ModelSpec& spec) {
    const auto mm = static_cast<std::size_t>(spec.measure_count());
    if (mm > 2) throw ValidationError("spectrum sweeps support M <= 2 measures");
    std::vector<std::vector<double>> axes;
    if (c.alpha_grid.empty()) {
        const auto levels = symbol_levels(spec);
        for (std::size_t m = 0; m < mm; ++m) {
            double lo = levels[0][m], hi = levels[0][m];
            for (const auto& v : levels) {
                lo = std::min(lo, v[m]);
                hi = std::max(hi, v[m]);
            }
            std::vector<double> axis;
            for (int k = 0; k <= 20; ++k) axis.push_back(lo + (hi - lo) * k / 20.0);
            axes.push_back(std::move(axis));
        }
    } else {
        const auto parts = split(c.alpha_grid, ',');
        if (parts.size() != mm) throw ParseError("--alpha-grid needs one start:stop:count per measure");
        for (const auto& p : parts) axes.push_back(parse_grid(p));
    }
    std::vector<std::vector<double>> grid;
    if (mm == 1) {
        for (double a : axes[0]) grid.push_back({a});
    } else {
        for (double a : axes[0]) {
            for (double b : axes[1]) grid.push_back({a, b});
        }
    }
    CommandResult r;
    indexed_columns(r.table.columns, "alpha", mm);
    r.table.columns.push_back("f");
    indexed_columns(r.table.columns, "q_star", mm);
    r.table.columns.push_back("status");
    r.table.rows = parallel_rows(grid.size(), c.jobs, [&](std::size_t i) {
        const LegendreResult lr = legendre(spec, grid[i]);
        std::vector<Cell> row(grid[i].begin(), grid[i].end());
        row.emplace_back(lr.f);
        row.insert(row.end(), lr.q_star.begin(), lr.q_star.end());
        row.emplace_back(status_name(lr.status));
        return row;
    });
    return r;
}

CommandResult cmd_sup_spectrum(const RunConfig& c, const ModelSpec& spec) {
    const TargetBox box = require_target(c);
    const auto mm = static_cast<std::size_t>(spec.measure_count());
    const SupSpectrumResult s = sup_spectrum(spec, box);
    double variational = kNegInf;
    if (s.attainable) {
        try {
            variational = variational_dimension(spec, box, family_of(c, 1)).value;
        } catch (const InfeasibleConstraint&) {
        }
    }
    CommandResult r;
    r.table.columns = {"value"};
    indexed_columns(r.table.columns, "argmax", mm);
    r.table.columns.insert(r.table.columns.end(), {"attainable", "variational"});
    std::vector<Cell> row{s.value};
    for (std::size_t m = 0; m < mm; ++m) row.emplace_back(s.attainable ? s.argmax[m] : std::nan(""));
    row.emplace_back(std::string(s.attainable ? "true" : "false"));
    row.emplace_back(variational);
    r.table.rows.push_back(std::move(row));
    r.empty = s.value == kNegInf;
    return r;
}

void shrinking_columns(Table& t, std::size_t radii) {
    t.columns.insert(t.columns.end(), {"fixed_value", "linear_extrapolation"});
    indexed_columns(t.columns, "radius", radii);
    indexed_columns(t.columns, "root", radii);
}

void shrinking_cells(std::vector<Cell>& row, const ShrinkingResult& s) {
    row.emplace_back(s.fixed_value);
    row.emplace_back(s.linear_extrapolation);
    row.insert(row.end(), s.radii.begin(), s.radii.end());
    row.insert(row.end(), s.values.begin(), s.values.end());
}

CommandResult cmd_mf_bowen(const RunConfig& c, const ModelSpec& spec) {
    const TargetBox box = require_target(c);
    const Modes modes = parse_modes(c.mode);
    MfBowenOptions o;
    o.n_max = c.n_max > 0 ? c.n_max : 400;
    o.mode = modes.constraint;
    CommandResult r;
    r.table.columns = {"value", "mode", "target_kind", "n_max"};
    const std::string mode_name = modes.constraint == ConstraintMode::L ? "L" : "M";
    const std::string kind = modes.shrinking ? "shrinking" : "fixed";
    if (!modes.shrinking) {
        const double v = mf_bowen_fixed(spec, box, o);
        r.table.rows.push_back({v, mode_name, kind, static_cast<double>(o.n_max)});
        r.empty = v == kNegInf;
        return r;
    }
    const auto radii = radii_of(c);
    const ShrinkingResult s = mf_bowen_shrinking(spec, box, radii, o);
    shrinking_columns(r.table, radii.size());
    std::vector<Cell> row{s.extrapolated, mode_name, kind, static_cast<double>(o.n_max)};
    shrinking_cells(row, s);
    r.table.rows.push_back(std::move(row));
    r.empty = s.extrapolated == kNegInf;
    return r;
}

CommandResult cmd_birkhoff(const RunConfig& c, const ModelSpec& spec) {
    if (c.observable_path.empty()) throw ParseError("birkhoff needs --observable");
    const ObservableTable f = parse_observable(c.observable_path, spec.alphabet_size);
    const TargetBox box = require_target(c);
    const Modes modes = parse_modes(c.mode);
    MfBowenOptions o;
    o.n_max = c.n_max > 0 ? c.n_max : 300;
    double variational = kNegInf;
    try {
        variational = erg_spectrum_variational(spec, f, box, family_of(c, f.depth())).value;
    } catch (const InfeasibleConstraint&) {
    } catch (const DepthUnsupported&) {
        variational = std::numeric_limits<double>::quiet_NaN();
    }
    CommandResult r;
    r.table.columns = {"value", "target_kind", "n_max", "variational", "lip_bound", "projection_error"};
    const std::string mode_name = modes.shrinking ? "shrinking" : "fixed";
    if (!modes.shrinking) {
        const double v = erg_bowen_fixed(spec, f, box, o);
        r.table.rows.push_back(
            {v, mode_name, static_cast<double>(o.n_max), variational, f.lip_bound, f.projection_error()});
        r.empty = v == kNegInf;
        return r;
    }
    const auto radii = radii_of(c);
    const ShrinkingResult s = erg_bowen_shrinking(spec, f, box, radii, o);
    shrinking_columns(r.table, radii.size());
    std::vector<Cell> row{s.extrapolated, mode_name, static_cast<double>(o.n_max), variational, f.lip_bound,
                          f.projection_error()};
    shrinking_cells(row, s);
    r.table.rows.push_back(std::move(row));
    r.empty = s.extrapolated == kNegInf;
    return r;
}

CommandResult cmd_zeta(const RunConfig& c, const ModelSpec& spec) {
    const int n_max = c.n_max > 0 ? c.n_max : 50;
    const ModelPotentials pots = build_potentials(spec);
    const PotentialTable phi = pots.scaling.scaled(c.t);
    SeriesCoefficients series;
    if (c.target.empty()) {
        series = zeta_coefficients(phi, n_max);
    } else {
        series = mf_zeta_series(spec, phi, parse_target(c.target), n_max, parse_modes(c.mode).constraint);
    }
    const int window = default_tail_window(n_max);
    RadiusEstimate est;
    CommandResult r;
    try {
        est = radius_estimate(series, window);
    } catch (const AllEmpty&) {
        est.log_radius = est.extrapolated_log_radius = std::numeric_limits<double>::infinity();
        est.tail_window = window;
        for (int n = 1; n <= n_max; ++n) est.per_n_values.push_back(kNegInf);
        r.empty = true;
    }
    r.table.columns = {"n", "log_a", "per_n", "log_radius", "extrapolated_log_radius", "trend_diagnostic",
                       "tail_window"};
    for (int n = 1; n <= n_max; ++n) {
        r.table.rows.push_back({static_cast<double>(n), series.at(n), est.per_n_values[static_cast<std::size_t>(n - 1)],
                                est.log_radius, est.extrapolated_log_radius, est.trend_diagnostic,
                                static_cast<double>(est.tail_window)});
    }
    return r;
}

CommandResult cmd_oracle(const RunConfig& c, const ModelSpec& spec) {
    const TargetBox box = require_target(c);
    const int n = c.n_max > 0 ? c.n_max : 10;
    const PotentialTable phi = build_potentials(spec).scaling.scaled(c.t);
    std::vector<OracleReport> reports{compare_constrained_sum(spec, phi, box, n, parse_modes(c.mode).constraint)};
    if (spec.alphabet_size <= 3 && build_potentials(spec).depth() == 1) reports.push_back(compare_variational(spec, box, nullptr));
    CommandResult r;
    r.table.columns = {"quantity", "naive", "fast", "abs_deviation", "rel_deviation", "n", "grid_step", "infeasible"};
    for (const auto& rep : reports) {
        r.table.rows.push_back({rep.quantity, rep.naive, rep.fast, rep.abs_deviation, rep.rel_deviation,
                                static_cast<double>(rep.n), rep.grid_step,
                                std::string(rep.infeasible ? "true" : "false")});
    }
    return r;
}

CommandResult dispatch(const RunConfig& c, const ModelSpec& spec) {
    if (c.command == "pressure") return cmd_pressure(c, spec);
    if (c.command == "dimension") return cmd_dimension(c, spec);
    if (c.command == "beta") return cmd_beta(c, spec);
    if (c.command == "spectrum") return cmd_spectrum(c, spec);
    if (c.command == "sup-spectrum") return cmd_sup_spectrum(c, spec);
    if (c.command == "mf-bowen") return cmd_mf_bowen(c, spec);
    if (c.command == "birkhoff") return cmd_birkhoff(c, spec);
    if (c.command == "zeta") return cmd_zeta(c, spec);
    if (c.command == "oracle") return cmd_oracle(c, spec);
    throw ParseError("unknown command \"" + c.command + "\"");
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double sentinel_value(const std::string& s) {
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

// ---------------------------------------------------------------------------

ModelSpec parse_model_text(const std::string& text, const std::string& source) {
    const json doc = parse_json(text, source);
    if (!doc.is_object()) throw ParseError(located(source, 1, "model must be a JSON object"));
    ModelSpec spec;
    if (doc.contains("label")) spec.label = field<std::string>(doc, "label", text, source);
    spec.alphabet_size = field<int>(doc, "N", text, source);
    spec.ratios = field<std::vector<double>>(doc, "ratios", text, source);
    spec.measures = field<std::vector<std::vector<double>>>(doc, "measures", text, source);
    if (doc.contains("potential_depth")) spec.potential_depth = field<int>(doc, "potential_depth", text, source);
    try {
        if (doc.contains("scaling_table")) {
            spec.scaling_table = table_field(doc.at("scaling_table"), spec.alphabet_size, "scaling_table", text, source);
        }
        if (doc.contains("measure_tables")) {
            for (const auto& node : doc.at("measure_tables")) {
                spec.measure_tables.push_back(table_field(node, spec.alphabet_size, "measure_tables", text, source));
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(located(source, 0, e.what()));
    }
    try {
        spec.validate();
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        int line = 0;
        for (const char* key : {"scaling_table", "measure_tables", "potential_depth", "ratio", "measures",
                                "probability", "alphabet"}) {
            if (msg.find(key) != std::string::npos) {
                const std::string k = key;
                line = line_of_key(text, k == "ratio" ? "ratios" : k == "probability" ? "measures"
                                                             : k == "alphabet"  ? "N"
                                                                                : k);
                break;
            }
        }
        throw ValidationError(located(source, line, msg));
    }
    return spec;
}

ModelSpec parse_model(const std::string& path) { return parse_model_text(read_file(path), path); }

ObservableTable parse_observable_text(const std::string& text, int alphabet_size, const std::string& source) {
    const json doc = parse_json(text, source);
    const int depth = field<int>(doc, "depth", text, source);
    auto values = field<std::vector<double>>(doc, "values", text, source);
    const double gamma = doc.contains("gamma") ? field<double>(doc, "gamma", text, source) : 0.5;
    try {
        ObservableTable obs = ObservableTable::from_table(PotentialTable(alphabet_size, depth, std::move(values)), gamma);
        if (doc.contains("lip_bound")) obs.lip_bound = field<double>(doc, "lip_bound", text, source);
        obs.validate();
        return obs;
    } catch (const ValidationError& e) {
        throw ValidationError(located(source, 0, e.what()));
    }
}

ObservableTable parse_observable(const std::string& path, int alphabet_size) {
    return parse_observable_text(read_file(path), alphabet_size, path);
}

TargetBox parse_target(const std::string& spec) {
    if (spec.empty()) throw ParseError("empty target");
    std::vector<double> lo, hi;
    for (const auto& coord : split(spec, ',')) {
        const auto parts = split(coord, ':');
        if (parts.size() == 1) {
            lo.push_back(to_double(parts[0], "target"));
            hi.push_back(lo.back());
        } else if (parts.size() == 2) {
            lo.push_back(to_double(parts[0], "target"));
            hi.push_back(to_double(parts[1], "target"));
        } else {
            throw ParseError("target coordinate \"" + coord + "\" must be \"a\" or \"lo:hi\"");
        }
    }
    return TargetBox(lo, hi);
}

std::vector<double> parse_grid(const std::string& spec) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw ParseError("grid \"" + spec + "\" must be start:stop:count");
    const double start = to_double(parts[0], "grid");
    const double stop = to_double(parts[1], "grid");
    const double count = to_double(parts[2], "grid");
    if (!(count >= 1.0) || count != std::floor(count)) throw ValidationError("grid count must be an integer >= 1");
    const auto k = static_cast<int>(count);
    std::vector<double> out;
    for (int i = 0; i < k; ++i) out.push_back(k == 1 ? start : start + (stop - start) * i / (k - 1));
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& out, const Table& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            if (const double* d = std::get_if<double>(&row[i])) {
                out << format_number(*d);
            } else {
                out << std::get<std::string>(row[i]);
            }
        }
        out << '\n';
    }
}

void write_json(std::ostream& out, const Table& table, const RunConfig& config, const std::string& model_label,
                int exit_status) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = config.command;
    doc["model"] = model_label;
    doc["parameters"] = {{"model_path", config.model_path}, {"target", config.target},
                         {"n_max", config.n_max},           {"mode", config.mode},
                         {"radii", config.radii},           {"radius_count", config.radius_count},
                         {"alpha_grid", config.alpha_grid}, {"q_grid", config.q_grid},
                         {"t_grid", config.t_grid},         {"q", config.q_point},
                         {"t", config.t},                   {"observable", config.observable_path},
                         {"family", config.family},         {"seed", config.seed}};
    doc["columns"] = table.columns;
    json rows = json::array();
    for (const auto& row : table.rows) {
        json obj;
        json flags = json::object();
        bool unattainable = false;
        for (std::size_t i = 0; i < row.size(); ++i) {
            const std::string& col = table.columns[i];
            if (const double* d = std::get_if<double>(&row[i])) {
                if (std::isfinite(*d)) {
                    obj[col] = *d;
                } else {
                    obj[col] = nullptr;
                    flags[col] = format_number(*d);
                    unattainable = unattainable || *d == kNegInf;
                }
            } else {
                obj[col] = std::get<std::string>(row[i]);
            }
        }
        obj["unattainable"] = unattainable;
        if (!flags.empty()) obj["flags"] = flags;
        rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    doc["exit_status"] = exit_status;
    if (!config.deterministic) doc["generated_at"] = timestamp();
    out << doc.dump(2) << '\n';
}

Table read_json_table(const std::string& text) {
    const json doc = parse_json(text, "<json>");
    Table t;
    t.columns = doc.at("columns").get<std::vector<std::string>>();
    for (const auto& obj : doc.at("rows")) {
        std::vector<Cell> row;
        for (const auto& col : t.columns) {
            const json& v = obj.at(col);
            if (v.is_null()) {
                row.emplace_back(sentinel_value(obj.at("flags").at(col).get<std::string>()));
            } else if (v.is_string()) {
                row.emplace_back(v.get<std::string>());
            } else {
                row.emplace_back(v.get<double>());
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.format != "csv" && config.format != "json") {
            throw ParseError("unknown format \"" + config.format + "\" (expected csv or json)");
        }
        if (config.jobs < 1) throw ValidationError("--jobs must be at least 1");
        if (config.model_path.empty()) throw ParseError("--model is required");
        const ModelSpec spec = parse_model(config.model_path);
        const CommandResult result = dispatch(config, spec);
        const int status = result.empty ? kExitEmpty : kExitOk;
        std::ofstream file;
        if (!config.output_path.empty()) {
            file.open(config.output_path, std::ios::binary);
            if (!file) throw ParseError("cannot write " + config.output_path);
        }
        std::ostream& sink = config.output_path.empty() ? out : file;
        if (config.format == "json") {
            write_json(sink, result.table, config, spec.label, status);
        } else {
            write_csv(sink, result.table);
        }
        if (result.empty) err << "note: constraint is empty or unattainable; value is -inf\n";
        return status;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kExitBudget;
    } catch (const BracketFailure& e) {
        err << "error: " << e.what() << '\n';
        return kExitBracket;
    } catch (const InfeasibleConstraint& e) {
        err << "error: " << e.what() << '\n';
        return kExitEmpty;
    } catch (const AllEmpty& e) {
        err << "error: " << e.what() << '\n';
        return kExitEmpty;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitOther;
    }
}

int main_entry(int argc, char** argv) {
    CLI::App app{"Multifractal spectra of self-similar measures via constrained zeta functions"};
    RunConfig c;
    app.add_option("command", c.command, "pressure | dimension | beta | spectrum | sup-spectrum | mf-bowen | "
                                         "birkhoff | zeta | oracle")
        ->required()
        ->check(CLI::IsMember({"pressure", "dimension", "beta", "spectrum", "sup-spectrum", "mf-bowen", "birkhoff",
                               "zeta", "oracle"}));
    app.add_option("-m,--model", c.model_path, "model file (JSON)")->required();
    app.add_option("--target", c.target, "box \"lo:hi,lo:hi\" or singleton \"a\"");
    app.add_option("-n,--n-max", c.n_max, "largest word length (0 = command default)")->check(CLI::NonNegativeNumber);
    app.add_option("--mode", c.mode, "L, M, fixed, shrinking (comma separated)");
    app.add_option("--radii", c.radii, "decreasing radius schedule")->delimiter(',');
    app.add_option("--radius-count", c.radius_count, "default schedule 2^-k, k = 1..K");
    app.add_option("--alpha-grid", c.alpha_grid, "start:stop:count per measure");
    app.add_option("--q-grid", c.q_grid, "start:stop:count");
    app.add_option("--q", c.q_point, "single q point, comma separated");
    app.add_option("--t-grid", c.t_grid, "start:stop:count");
    app.add_option("--t", c.t, "phi = t * Lambda for zeta and oracle");
    app.add_option("--observable", c.observable_path, "observable table file (JSON)");
    app.add_option("--family", c.family, "bernoulli | markov1 | auto");
    app.add_option("-f,--format", c.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("-o,--output", c.output_path, "output file (default stdout)");
    app.add_option("-j,--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", c.seed, "recorded in JSON output");
    app.add_flag("--deterministic", c.deterministic, "omit the generated_at timestamp");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }
    return run(c, std::cout, std::cerr);
}

}  // namespace mfspec::cli
