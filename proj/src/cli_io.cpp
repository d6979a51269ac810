#include "atombs/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "atombs/linear_reference.hpp"
#include "atombs/moments.hpp"
#include "atombs/oracles.hpp"
#include "atombs/parallel.hpp"
#include "atombs/pulse.hpp"

#ifndef ATOMBS_RECIPE_DIR
#define ATOMBS_RECIPE_DIR "recipes"
#endif

namespace atombs::io {
namespace {

using json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string_view key) {
    std::string k(trim(key));
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
    throw std::invalid_argument("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
}

double parse_double(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto* first = text.data() + (!text.empty() && text.front() == '+' ? 1 : 0);
    const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || std::isnan(v)) bad_value(key, text);
    return v;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) bad_value(key, text);
    return v;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        out.push_back(parse_double(key, item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string_view to_string(Sweep s) { return s == Sweep::Detuning ? "detuning" : "bandwidth"; }
std::string_view to_string(Scale s) { return s == Scale::Linear ? "linear" : "log"; }
std::string_view to_string(Domain d) { return d == Domain::Time ? "time" : "frequency"; }
std::string_view to_string(amplitude::Model m) { return m == amplitude::Model::Atomic ? "atomic" : "linear"; }
std::string_view to_string(Format f) { return f == Format::Csv ? "csv" : "json"; }

double gamma_of(const RunConfig& c) { return c.params.gamma; }

Pulse make_pulse(const RunConfig& c, double bandwidth) {
    if (c.pulse_file) return load_sampled_pulse_csv(*c.pulse_file);
    if (c.params.pulse_kind == PulseKind::Sampled) throw std::invalid_argument("the sampled pulse needs pulse_file");
    ScatterParams p = c.params;
    p.bandwidth = bandwidth;
    return Pulse::from_params(p);
}

ScatterParams effective_params(const RunConfig& c, const Pulse& pulse) {
    ScatterParams p = c.params;
    p.bandwidth = pulse.bandwidth();
    if (c.pulse_file) p.pulse_kind = PulseKind::Sampled;
    return p;
}

std::vector<double> sweep_values(double lo, double hi, std::size_t n, Scale scale) {
    if (n == 0) throw std::invalid_argument("sweep needs at least one point");
    if (scale == Scale::Log && !(lo > 0.0 && hi > 0.0)) throw std::invalid_argument("log sweeps need positive bounds");
    if (n == 1) return {lo};
    std::vector<double> xs(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(n - 1);
        xs[k] = scale == Scale::Linear ? lo + u * (hi - lo) : lo * std::pow(hi / lo, u);
    }
    xs.back() = hi;
    return xs;
}

json axis_json(const Grid1D& g) {
    return json{{"lower", g.lower()}, {"upper", g.upper()}, {"points", g.points()}, {"spacing", g.spacing()}};
}

json sweep_json(std::string_view variable, double lo, double hi, std::size_t n, Scale scale) {
    return json{{"sweep", variable}, {"lower", lo}, {"upper", hi}, {"points", n}, {"scale", to_string(scale)}};
}

RunResult run_coincidence(const RunConfig& c) {
    if (c.pulse_file && c.sweep == Sweep::Bandwidth)
        throw std::invalid_argument("a sampled pulse has a fixed bandwidth and cannot be swept");
    const bool det = c.sweep == Sweep::Detuning;
    const double lo = c.sweep_min.value_or(det ? -4.0 : 0.02);
    const double hi = c.sweep_max.value_or(det ? 4.0 : 20.0);
    const std::size_t n = c.sweep_points.value_or(det ? 161 : 61);
    const Scale scale = c.sweep_scale.value_or(det ? Scale::Linear : Scale::Log);
    const auto xs = sweep_values(lo, hi, n, scale);

    RunResult r;
    r.table.columns = {"x", "c_atomic", "c_linear", "c_oracle"};
    r.table.rows = parallel_map(xs.size(), [&](std::size_t k) {
        const Pulse pulse = make_pulse(c, det ? c.params.bandwidth : xs[k]);
        ScatterParams p = effective_params(c, pulse);
        if (det) p.detuning = xs[k];
        const double atomic = moments::asymptotic_coincidence(p, pulse);
        const double lin = linear::linear_coincidence(pulse, p.detuning, p.gamma);
        std::optional<double> oracle;
        if (const auto f = oracles::coincidence_formula_for(p)) oracle = oracles::evaluate_coincidence(*f, p);
        return std::vector<std::optional<double>>{xs[k], atomic, lin, oracle};
    });
    r.grid_json = sweep_json(to_string(c.sweep), lo, hi, n, scale).dump();
    return r;
}

RunResult run_excitation(const RunConfig& c) {
    const std::vector<double> bws = c.pulse_file ? std::vector<double>{0.0} : c.bandwidths;
    if (bws.empty()) throw std::invalid_argument("no bandwidths to run");
    const auto curves = parallel_map(bws.size(), [&](std::size_t k) {
        const Pulse pulse = make_pulse(c, bws[k]);
        const ScatterParams p = effective_params(c, pulse);
        moments::MomentOptions o = moments::default_options(p, pulse);
        o.store_every = 0;
        const auto trace = moments::integrate_moments(p, pulse, o);
        const bool closed = p.pulse_kind == PulseKind::Square && p.delay == 0.0;
        const double g = p.gamma;
        std::vector<std::vector<std::optional<double>>> rows;
        const std::size_t stride = std::max<std::size_t>(1, trace.times.size() / 2000);
        for (std::size_t i = 0; i < trace.times.size(); ++i) {
            if (i % stride != 0 && i + 1 != trace.times.size()) continue;
            const double t = trace.times[i];
            std::optional<double> oracle;
            const double tp = g * (t - pulse.start_time());
            if (closed && tp >= 0.0 && t <= pulse.end_time())
                oracle = oracles::excitation_square(p.bandwidth / g, p.detuning / g, tp);
            rows.push_back({p.bandwidth, t, trace.excitation[i], oracle});
        }
        return rows;
    });
    RunResult r;
    r.table.columns = {"bandwidth", "t", "excitation", "excitation_oracle"};
    for (const auto& rows : curves) r.table.rows.insert(r.table.rows.end(), rows.begin(), rows.end());
    r.grid_json = json{{"bandwidths", c.pulse_file ? json::array() : json(c.bandwidths)}}.dump();
    return r;
}

Grid1D joint_axis(const RunConfig& c, const Pulse& pulse, Domain domain) {
    const std::size_t n = c.grid_points.value_or(512);
    const Grid1D def = domain == Domain::Time ? amplitude::default_time_axis(pulse, gamma_of(c), n)
                                              : amplitude::default_frequency_axis(pulse, gamma_of(c), n);
    if (!c.grid_lower && !c.grid_upper) return def;
    return Grid1D(c.grid_lower.value_or(def.lower()), c.grid_upper.value_or(def.upper()), n);
}

void require_amplitude_regime(const RunConfig& c) {
    if (c.params.detuning != 0.0 || c.params.delay != 0.0)
        throw std::invalid_argument("joint distributions are only available on resonance without delay");
}

RunResult run_joint(const RunConfig& c) {
    require_amplitude_regime(c);
    if (c.domain == Domain::Frequency && std::isfinite(c.time))
        throw std::invalid_argument("the joint spectrum is only defined after the scattering (time = inf)");
    const Pulse pulse = make_pulse(c, c.params.bandwidth);
    const Grid1D axis = joint_axis(c, pulse, c.domain);
    const Grid2D grid{axis, axis};
    const JointDistribution2D d = c.domain == Domain::Time
                                      ? amplitude::joint_time_distribution(pulse, c.time, grid, c.reference, gamma_of(c))
                                      : amplitude::joint_spectrum(pulse, grid, c.reference, gamma_of(c));
    RunResult r;
    r.table.columns = {"x", "y", "value"};
    r.table.rows.reserve(grid.size());
    for (std::size_t i = 0; i < axis.points(); ++i)
        for (std::size_t j = 0; j < axis.points(); ++j) r.table.rows.push_back({axis[i], axis[j], d.at(i, j)});
    r.normalization = d.normalization;
    r.warnings = d.warnings;
    r.grid_json = json{{"domain", to_string(c.domain)},
                       {"time", std::isfinite(c.time) ? json(c.time) : json("inf")},
                       {"reference", to_string(c.reference)},
                       {"x", axis_json(axis)},
                       {"y", axis_json(axis)}}
                      .dump();
    return r;
}

RunResult run_delay_scan(const RunConfig& c) {
    const Pulse pulse = make_pulse(c, c.params.bandwidth);
    const ScatterParams p = effective_params(c, pulse);
    const double lo = c.sweep_min.value_or(0.0);
    const double hi = c.sweep_max.value_or(1.5 * pulse.duration());
    const std::size_t n = c.sweep_points.value_or(61);
    const Scale scale = c.sweep_scale.value_or(Scale::Linear);
    const auto delays = sweep_values(lo, hi, n, scale);
    const auto scan = moments::delay_scan(p, pulse, delays);
    RunResult r;
    r.table.columns = {"delay", "coincidence"};
    for (const auto& pt : scan) r.table.rows.push_back({pt.delay, pt.coincidence});
    json g = sweep_json("delay", lo, hi, n, scale);
    g["pulse_duration"] = pulse.duration();
    r.grid_json = g.dump();
    return r;
}

RunResult run_marginal(const RunConfig& c) {
    require_amplitude_regime(c);
    const Pulse pulse = make_pulse(c, c.params.bandwidth);
    const Grid1D axis = joint_axis(c, pulse, Domain::Time);
    const auto joint = amplitude::joint_time_distribution(pulse, amplitude::kAfterScattering, Grid2D{axis, axis},
                                                          c.reference, gamma_of(c));
    const auto m = amplitude::marginal_time_distribution(joint, c.postselect);
    RunResult r;
    r.table.columns = {"tau", "density"};
    for (std::size_t i = 0; i < axis.points(); ++i) r.table.rows.push_back({axis[i], m.density[i]});
    r.normalization = joint.normalization;
    r.warnings = joint.warnings;
    json g{{"reference", to_string(c.reference)}, {"x", axis_json(axis)}};
    g["postselect"] = m.postselected ? json(*m.postselected) : json(nullptr);
    r.grid_json = g.dump();
    return r;
}

json config_json(const RunConfig& c) {
    json out = json::object();
    std::istringstream in(serialize(c));
    for (std::string line; std::getline(in, line);) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        out[std::string(trim(std::string_view(line).substr(0, eq)))] =
            std::string(trim(std::string_view(line).substr(eq + 1)));
    }
    return out;
}

json base_document(const RunConfig& config, const RunResult& result) {
    json doc;
    doc["config"] = config_json(config);
    doc["grid"] = json::parse(result.grid_json);
    doc["normalization"] = result.normalization ? json(*result.normalization) : json(nullptr);
    doc["runtime_seconds"] = result.runtime_seconds;
    doc["engine_versions"] = json{{"atombs", kVersion},
                                  {"moments_engine", kMomentsEngineVersion},
                                  {"amplitude_engine", kAmplitudeEngineVersion}};
    doc["warnings"] = result.warnings;
    return doc;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace

std::string_view to_string(Command c) {
    switch (c) {
        case Command::Coincidence: return "coincidence";
        case Command::Excitation: return "excitation";
        case Command::Joint: return "joint";
        case Command::DelayScan: return "delay-scan";
        case Command::Marginal: return "marginal";
    }
    return "unknown";
}

Command parse_command(std::string_view text) {
    for (Command c : {Command::Coincidence, Command::Excitation, Command::Joint, Command::DelayScan,
                      Command::Marginal})
        if (text == to_string(c)) return c;
    if (text == "delay_scan") return Command::DelayScan;
    throw std::invalid_argument("unknown command: " + std::string(text));
}

void apply_setting(RunConfig& c, std::string_view raw_key, std::string_view raw_value) {
    const std::string key = normalize_key(raw_key);
    const std::string_view value = trim(raw_value);
    if (key == "command") c.command = parse_command(value);
    else if (key == "pulse") {
        c.params.pulse_kind = parse_pulse_kind(value);
        if (c.params.pulse_kind != PulseKind::Sampled) c.pulse_file.reset();
    } else if (key == "pulse_file") {
        c.pulse_file = std::string(value);
        c.params.pulse_kind = PulseKind::Sampled;
    } else if (key == "gamma") c.params.gamma = parse_double(key, value);
    else if (key == "detuning") c.params.detuning = parse_double(key, value);
    else if (key == "bandwidth") c.params.bandwidth = parse_double(key, value);
    else if (key == "delay") c.params.delay = parse_double(key, value);
    else if (key == "sweep") {
        if (value == "detuning") c.sweep = Sweep::Detuning;
        else if (value == "bandwidth") c.sweep = Sweep::Bandwidth;
        else throw std::invalid_argument("unknown sweep variable: " + std::string(value));
    } else if (key == "sweep_min") c.sweep_min = parse_double(key, value);
    else if (key == "sweep_max") c.sweep_max = parse_double(key, value);
    else if (key == "sweep_points") c.sweep_points = parse_unsigned(key, value);
    else if (key == "sweep_scale") {
        if (value == "linear") c.sweep_scale = Scale::Linear;
        else if (value == "log") c.sweep_scale = Scale::Log;
        else bad_value(key, value);
    } else if (key == "bandwidths") c.bandwidths = parse_list(key, value);
    else if (key == "domain") {
        if (value == "time") c.domain = Domain::Time;
        else if (value == "frequency") c.domain = Domain::Frequency;
        else bad_value(key, value);
    } else if (key == "time") c.time = parse_double(key, value);
    else if (key == "reference") {
        if (value == "atomic") c.reference = amplitude::Model::Atomic;
        else if (value == "linear") c.reference = amplitude::Model::Linear;
        else bad_value(key, value);
    } else if (key == "postselect") c.postselect = parse_double(key, value);
    else if (key == "grid_lower") c.grid_lower = parse_double(key, value);
    else if (key == "grid_upper") c.grid_upper = parse_double(key, value);
    else if (key == "grid_points") c.grid_points = parse_unsigned(key, value);
    else if (key == "output") c.output = std::string(value);
    else if (key == "format") {
        if (value == "csv") c.format = Format::Csv;
        else if (value == "json") c.format = Format::Json;
        else bad_value(key, value);
    } else if (key == "seed") c.seed = parse_unsigned(key, value);
    else throw std::invalid_argument("unknown config key: " + key);
}

void apply_text(RunConfig& config, std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
        apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    }
}

void apply_file(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_text(config, ss.str());
}

std::string serialize(const RunConfig& c) {
    std::ostringstream out;
    const auto put = [&](std::string_view k, std::string_view v) { out << k << " = " << v << '\n'; };
    const auto num = [&](std::string_view k, double v) { put(k, format_number(v)); };
    put("command", to_string(c.command));
    put("pulse", atombs::to_string(c.params.pulse_kind));
    if (c.pulse_file) put("pulse_file", *c.pulse_file);
    num("gamma", c.params.gamma);
    num("detuning", c.params.detuning);
    num("bandwidth", c.params.bandwidth);
    num("delay", c.params.delay);
    put("sweep", to_string(c.sweep));
    if (c.sweep_min) num("sweep_min", *c.sweep_min);
    if (c.sweep_max) num("sweep_max", *c.sweep_max);
    if (c.sweep_points) put("sweep_points", std::to_string(*c.sweep_points));
    if (c.sweep_scale) put("sweep_scale", to_string(*c.sweep_scale));
    std::string list;
    for (std::size_t k = 0; k < c.bandwidths.size(); ++k) list += (k ? "," : "") + format_number(c.bandwidths[k]);
    put("bandwidths", list);
    put("domain", to_string(c.domain));
    num("time", c.time);
    put("reference", to_string(c.reference));
    if (c.postselect) num("postselect", *c.postselect);
    if (c.grid_lower) num("grid_lower", *c.grid_lower);
    if (c.grid_upper) num("grid_upper", *c.grid_upper);
    if (c.grid_points) put("grid_points", std::to_string(*c.grid_points));
    if (c.output) put("output", *c.output);
    put("format", to_string(c.format));
    put("seed", std::to_string(c.seed));
    return out.str();
}

std::filesystem::path recipe_directory() {
    if (const char* env = std::getenv("ATOMBS_RECIPE_DIR")) return env;
    return ATOMBS_RECIPE_DIR;
}

std::filesystem::path recipe_path(std::string_view name) {
    auto p = recipe_directory() / (std::string(name) + ".cfg");
    if (!std::filesystem::exists(p)) throw std::invalid_argument("unknown recipe: " + std::string(name));
    return p;
}

std::vector<std::string> recipe_names() {
    std::vector<std::string> out;
    if (!std::filesystem::is_directory(recipe_directory())) return out;
    for (const auto& e : std::filesystem::directory_iterator(recipe_directory()))
        if (e.path().extension() == ".cfg") out.push_back(e.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

RunResult run(const RunConfig& config) {
    config.params.validate();
    const auto start = std::chrono::steady_clock::now();
    RunResult r;
    switch (config.command) {
        case Command::Coincidence: r = run_coincidence(config); break;
        case Command::Excitation: r = run_excitation(config); break;
        case Command::Joint: r = run_joint(config); break;
        case Command::DelayScan: r = run_delay_scan(config); break;
        case Command::Marginal: r = run_marginal(config); break;
    }
    r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const Table& table) {
    std::string out;
    for (std::size_t k = 0; k < table.columns.size(); ++k) out += (k ? "," : "") + table.columns[k];
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out += ',';
            if (row[k]) out += format_number(*row[k]);
        }
        out += '\n';
    }
    return out;
}

std::string sidecar_json(const RunConfig& config, const RunResult& result) {
    return base_document(config, result).dump(2) + "\n";
}

std::string json_document(const RunConfig& config, const RunResult& result) {
    json doc = base_document(config, result);
    doc["columns"] = result.table.columns;
    json rows = json::array();
    for (const auto& row : result.table.rows) {
        json r = json::array();
        for (const auto& v : row) r.push_back(v && std::isfinite(*v) ? json(*v) : json(nullptr));
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::filesystem::path resolve_output(const std::string& output) {
    std::filesystem::path p(output);
    if (p.is_relative())
        if (const char* dir = std::getenv("ATOMBS_OUTPUT_DIR"); dir && *dir) p = std::filesystem::path(dir) / p;
    return p;
}

std::vector<std::filesystem::path> write_result(const RunConfig& config, const RunResult& result,
                                                std::ostream& out) {
    const std::string data = config.format == Format::Csv ? to_csv(result.table) : json_document(config, result);
    if (!config.output) {
        out << data;
        return {};
    }
    const auto path = resolve_output(*config.output);
    write_file(path, data);
    if (config.format == Format::Json) return {path};
    auto sidecar = path;
    sidecar.replace_extension(".json");
    write_file(sidecar, sidecar_json(config, result));
    return {path, sidecar};
}

}  // namespace atombs::io
