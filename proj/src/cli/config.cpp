#include "faasplan/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "faasplan/capacity/memory.hpp"
#include "faasplan/core/errors.hpp"
#include "faasplan/core/random.hpp"

namespace faasplan::cli {

using nlohmann::json;

// ---------------------------------------------------------------------------
// SourceMap

namespace {

std::string escape_token(std::string_view key) {
    std::string out;
    for (char c : key) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

class Scanner {
public:
    Scanner(std::string_view text, std::map<std::string, int>& lines) : text_(text), lines_(lines) {}

    void run() {
        skip_ws();
        if (pos_ < text_.size()) value("");
    }

private:
    void value(const std::string& pointer) {
        skip_ws();
        if (pos_ >= text_.size()) return;
        lines_[pointer] = SourceMap::line_at_offset(text_, pos_);
        const char c = text_[pos_];
        if (c == '{') {
            ++pos_;
            for (;;) {
                skip_ws();
                if (pos_ >= text_.size() || text_[pos_] == '}') break;
                const std::string key = string();
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ':') ++pos_;
                value(pointer + "/" + escape_token(key));
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
            }
            ++pos_;
        } else if (c == '[') {
            ++pos_;
            for (std::size_t i = 0;; ++i) {
                skip_ws();
                if (pos_ >= text_.size() || text_[pos_] == ']') break;
                value(pointer + "/" + std::to_string(i));
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
            }
            ++pos_;
        } else if (c == '"') {
            string();
        } else {
            while (pos_ < text_.size() && std::string_view(",]} \t\r\n").find(text_[pos_]) == std::string_view::npos)
                ++pos_;
        }
    }

    // Keys only need to round-trip plain characters and the common escapes.
    std::string string() {
        std::string out;
        if (pos_ >= text_.size() || text_[pos_] != '"') return out;
        ++pos_;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                ++pos_;
                const char e = text_[pos_];
                out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
            } else {
                out += text_[pos_];
            }
            ++pos_;
        }
        ++pos_;
        return out;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string_view text_;
    std::map<std::string, int>& lines_;
    std::size_t pos_ = 0;
};

}  // namespace

SourceMap::SourceMap(std::string_view text) { Scanner(text, lines_).run(); }

int SourceMap::line_of(const std::string& pointer) const {
    // Fall back to the closest enclosing value that was seen.
    std::string p = pointer;
    for (;;) {
        if (auto it = lines_.find(p); it != lines_.end()) return it->second;
        if (p.empty()) return 1;
        p.erase(p.rfind('/'));
    }
}

int SourceMap::line_at_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// ---------------------------------------------------------------------------
// Document reader

namespace {

class Reader {
public:
    Reader(const json& root, std::string_view text, std::string origin)
        : root_(root), map_(text), origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
        throw ConfigError(fmt::format("{}:{}: {}: {}", origin_, map_.line_of(pointer), pointer.empty() ? "/" : pointer,
                                      what));
    }

    const json* section(const json& obj, const std::string& base, const char* key) const {
        if (!obj.contains(key)) return nullptr;
        const json& v = obj.at(key);
        if (!v.is_object()) fail(base + "/" + key, "expected an object");
        return &v;
    }

    void allow_only(const json& obj, const std::string& base, std::initializer_list<const char*> keys) const {
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, v] : obj.items())
            if (!allowed.contains(k)) fail(base + "/" + escape_token(k), "unknown field");
    }

    double number(const json& obj, const std::string& base, const char* key, double def,
                  const std::function<bool(double)>& ok = {}, const char* constraint = "") const {
        if (!obj.contains(key)) return def;
        const std::string ptr = base + "/" + key;
        const json& v = obj.at(key);
        if (!v.is_number()) fail(ptr, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x) || (ok && !ok(x))) fail(ptr, fmt::format("{} (got {})", constraint, x));
        return x;
    }

    std::optional<double> optional_number(const json& obj, const std::string& base, const char* key,
                                          const std::function<bool(double)>& ok, const char* constraint) const {
        if (!obj.contains(key)) return std::nullopt;
        return number(obj, base, key, 0.0, ok, constraint);
    }

    std::int64_t integer(const json& obj, const std::string& base, const char* key, std::int64_t def,
                         std::int64_t min_value) const {
        if (!obj.contains(key)) return def;
        const std::string ptr = base + "/" + key;
        const json& v = obj.at(key);
        if (!v.is_number_integer()) fail(ptr, "expected an integer");
        const auto x = v.get<std::int64_t>();
        if (x < min_value) fail(ptr, fmt::format("must be >= {} (got {})", min_value, x));
        return x;
    }

    bool boolean(const json& obj, const std::string& base, const char* key, bool def) const {
        if (!obj.contains(key)) return def;
        if (!obj.at(key).is_boolean()) fail(base + "/" + key, "expected true or false");
        return obj.at(key).get<bool>();
    }

    std::string choice(const json& obj, const std::string& base, const char* key, const std::string& def,
                       std::initializer_list<const char*> options) const {
        if (!obj.contains(key)) return def;
        const std::string ptr = base + "/" + key;
        if (!obj.at(key).is_string()) fail(ptr, "expected a string");
        const auto s = obj.at(key).get<std::string>();
        for (const char* o : options)
            if (s == o) return s;
        std::string list;
        for (const char* o : options) list += fmt::format("{}{}", list.empty() ? "" : ", ", o);
        fail(ptr, fmt::format("'{}' is not one of: {}", s, list));
    }

    std::vector<double> numbers(const json& obj, const std::string& base, const char* key, std::vector<double> def,
                                const std::function<bool(double)>& ok, const char* constraint) const {
        if (!obj.contains(key)) return def;
        const std::string ptr = base + "/" + key;
        const json& v = obj.at(key);
        if (!v.is_array() || v.empty()) fail(ptr, "expected a non-empty array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string p = ptr + "/" + std::to_string(i);
            if (!v[i].is_number()) fail(p, "expected a number");
            const double x = v[i].get<double>();
            if (!std::isfinite(x) || !ok(x)) fail(p, fmt::format("{} (got {})", constraint, x));
            out.push_back(x);
        }
        return out;
    }

    Range range(const json& obj, const std::string& base, const char* key, Range def) const {
        if (!obj.contains(key)) return def;
        const auto v = numbers(obj, base, key, {}, [](double x) { return x > 0.0; }, "must be > 0");
        if (v.size() != 2 || v[0] > v[1]) fail(base + "/" + key, "expected [lo, hi] with lo <= hi");
        return {v[0], v[1]};
    }

    const json& root() const { return root_; }

private:
    const json& root_;
    SourceMap map_;
    std::string origin_;
};

const auto positive = [](double x) { return x > 0.0; };
const auto non_negative = [](double x) { return x >= 0.0; };
const auto open_unit = [](double x) { return x > 0.0 && x < 1.0; };

void read_functions(const Reader& r, Config& cfg) {
    const json& root = r.root();
    const json* wl = r.section(root, "", "workload");
    if (wl) r.allow_only(*wl, "/workload", {"lambda", "eta"});
    if (!root.contains("functions")) {
        if (wl) r.fail("/workload", "a workload needs a functions array");
        return;
    }
    const json& fs = root.at("functions");
    if (!fs.is_array() || fs.empty()) r.fail("/functions", "expected a non-empty array of functions");
    if (!wl) r.fail("/functions", "functions need a workload section with lambda");
    if (!wl->contains("lambda")) r.fail("/workload", "missing required field lambda");
    const double lambda = r.number(*wl, "/workload", "lambda", 0.0, positive, "must be > 0");
    const double eta = r.number(*wl, "/workload", "eta", 1.0, non_negative, "must be >= 0");

    std::vector<FunctionProfile> profiles;
    std::size_t with_popularity = 0;
    std::size_t with_idle = 0;
    std::vector<double> idle;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const std::string base = "/functions/" + std::to_string(i);
        const json& f = fs[i];
        if (!f.is_object()) r.fail(base, "expected an object");
        r.allow_only(f, base, {"mu", "alpha", "theta_on", "theta_off", "popularity", "idle_time"});
        for (const char* req : {"mu", "alpha", "theta_on"})
            if (!f.contains(req)) r.fail(base, fmt::format("missing required field {}", req));
        FunctionProfile p;
        p.id = i;
        p.mu = r.number(f, base, "mu", 0.0, positive, "must be > 0");
        p.alpha = r.number(f, base, "alpha", 0.0, positive, "must be > 0");
        p.theta_on = r.number(f, base, "theta_on", 0.0, positive, "must be > 0");
        p.theta_off = r.number(f, base, "theta_off", 0.0, non_negative, "must be >= 0");
        if (p.theta_off > p.theta_on) r.fail(base + "/theta_off", fmt::format("must not exceed theta_on ({})", p.theta_on));
        if (f.contains("popularity")) {
            p.popularity = r.number(f, base, "popularity", 0.0, [](double x) { return x >= 0.0 && x <= 1.0; },
                                    "must lie in [0,1]");
            ++with_popularity;
        }
        if (f.contains("idle_time")) {
            idle.push_back(r.number(f, base, "idle_time", 0.0, non_negative, "must be >= 0"));
            ++with_idle;
        }
        profiles.push_back(p);
    }
    if (with_popularity != 0 && with_popularity != profiles.size())
        r.fail("/functions", "functions.popularity: set it on every function or on none");
    if (with_idle != 0 && with_idle != profiles.size())
        r.fail("/functions", "functions.idle_time: set it on every function or on none");

    if (with_popularity == 0) {
        cfg.workload = make_zipf_workload(lambda, eta, std::move(profiles));
    } else {
        double sum = 0.0;
        for (const auto& p : profiles) sum += p.popularity;
        if (std::abs(sum - 1.0) > 1e-9)
            r.fail("/functions", fmt::format("functions.popularity: values sum to {:.12g}, expected 1", sum));
        cfg.workload = WorkloadSpec{lambda, eta, std::move(profiles)};
    }
    cfg.idle_times = std::move(idle);
    try {
        cfg.workload->validate();
    } catch (const InvalidArgument& e) {
        r.fail("/functions", e.what());
    }
}

void read_sla(const Reader& r, Config& cfg) {
    const json* s = r.section(r.root(), "", "sla");
    if (!s) return;
    r.allow_only(*s, "/sla", {"w_star", "epsilon"});
    cfg.sla.w_star = r.number(*s, "/sla", "w_star", cfg.sla.w_star, positive, "must be > 0");
    if (s->contains("epsilon")) {
        cfg.sla.epsilon = r.number(*s, "/sla", "epsilon", 0.0, open_unit, "must lie in (0,1)");
        cfg.epsilon_given = true;
    }
}

void read_platform(const Reader& r, Config& cfg) {
    auto& p = cfg.platform;
    if (const json* s = r.section(r.root(), "", "platform")) {
        r.allow_only(*s, "/platform", {"core_options", "c_max", "ram_module_gb"});
        p.c_max = static_cast<int>(r.integer(*s, "/platform", "c_max", p.c_max, 1));
        if (s->contains("core_options")) {
            const auto v = r.numbers(*s, "/platform", "core_options", {},
                                     [](double x) { return x >= 1.0 && x == std::floor(x); },
                                     "must be a positive integer");
            p.core_options.assign(v.begin(), v.end());
        } else {
            std::erase_if(p.core_options, [&](int c) { return c > p.c_max; });
        }
        for (std::size_t i = 0; i < p.core_options.size(); ++i)
            if (p.core_options[i] > p.c_max)
                r.fail(fmt::format("/platform/core_options/{}", i),
                       fmt::format("{} exceeds c_max {}", p.core_options[i], p.c_max));
        p.ram_module_gb = r.number(*s, "/platform", "ram_module_gb", p.ram_module_gb, positive, "must be > 0");
    }
    if (const json* s = r.section(r.root(), "", "costs")) {
        r.allow_only(*s, "/costs", {"tau_c", "tau_m", "omega_a", "omega_b", "normalization",
                                    "reference_memory_cost", "reference_cpu_cost"});
        p.tau_c = r.number(*s, "/costs", "tau_c", p.tau_c, non_negative, "must be >= 0");
        p.tau_m = r.number(*s, "/costs", "tau_m", p.tau_m, non_negative, "must be >= 0");
        const auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
        if (s->contains("omega_a") && !s->contains("omega_b")) {
            p.omega_a = r.number(*s, "/costs", "omega_a", 0.5, unit, "must lie in [0,1]");
            p.omega_b = 1.0 - p.omega_a;
        } else if (s->contains("omega_b") && !s->contains("omega_a")) {
            p.omega_b = r.number(*s, "/costs", "omega_b", 0.5, unit, "must lie in [0,1]");
            p.omega_a = 1.0 - p.omega_b;
        } else {
            p.omega_a = r.number(*s, "/costs", "omega_a", p.omega_a, unit, "must lie in [0,1]");
            p.omega_b = r.number(*s, "/costs", "omega_b", p.omega_b, unit, "must lie in [0,1]");
            if (std::abs(p.omega_a + p.omega_b - 1.0) > 1e-9) r.fail("/costs/omega_b", "omega_a + omega_b must equal 1");
        }
        const auto norm = r.choice(*s, "/costs", "normalization", "max", {"max", "fixed"});
        p.normalization = norm == "max" ? CostNormalization::max_over_candidates : CostNormalization::fixed_reference;
        p.reference_memory_cost =
            r.number(*s, "/costs", "reference_memory_cost", p.reference_memory_cost, positive, "must be > 0");
        p.reference_cpu_cost = r.number(*s, "/costs", "reference_cpu_cost", p.reference_cpu_cost, positive,
                                        "must be > 0");
    }
    try {
        p.validate();
    } catch (const InvalidArgument& e) {
        r.fail("/platform", e.what());
    }
}

void read_model(const Reader& r, Config& cfg) {
    auto& o = cfg.planner;
    if (const json* s = r.section(r.root(), "", "model")) {
        r.allow_only(*s, "/model", {"erlang_phases", "clients", "dispatcher_demand", "method", "tolerance",
                                    "max_iterations"});
        o.erlang_phases = static_cast<int>(r.integer(*s, "/model", "erlang_phases", o.erlang_phases, 1));
        if (s->contains("clients")) o.clients = static_cast<int>(r.integer(*s, "/model", "clients", 1, 1));
        o.dispatcher_demand =
            r.number(*s, "/model", "dispatcher_demand", o.dispatcher_demand, non_negative, "must be >= 0");
        const auto m = r.choice(*s, "/model", "method", "schweitzer", {"schweitzer", "exact"});
        o.solve.method = m == "exact" ? perf::MvaMethod::exact : perf::MvaMethod::schweitzer;
        o.solve.tolerance = r.number(*s, "/model", "tolerance", o.solve.tolerance, positive, "must be > 0");
        o.solve.max_iterations =
            static_cast<int>(r.integer(*s, "/model", "max_iterations", o.solve.max_iterations, 1));
    }
    if (const json* s = r.section(r.root(), "", "planner")) {
        r.allow_only(*s, "/planner", {"max_iters", "m_target_fraction", "max_target_escalations", "sla_margin",
                                      "repair_rounds", "tighten_passes", "baseline_memory", "hit_targets"});
        o.max_iters = static_cast<int>(r.integer(*s, "/planner", "max_iters", o.max_iters, 1));
        if (o.max_iters > 52) r.fail("/planner/max_iters", "must be <= 52");
        o.m_target_fraction =
            r.number(*s, "/planner", "m_target_fraction", o.m_target_fraction, open_unit, "must lie in (0,1)");
        o.max_target_escalations = static_cast<int>(
            r.integer(*s, "/planner", "max_target_escalations", o.max_target_escalations, 0));
        o.sla_margin = r.number(*s, "/planner", "sla_margin", o.sla_margin,
                                [](double x) { return x >= 0.0 && x < 1.0; }, "must lie in [0,1)");
        o.repair_rounds = static_cast<int>(r.integer(*s, "/planner", "repair_rounds", o.repair_rounds, 0));
        o.tighten_passes = static_cast<int>(r.integer(*s, "/planner", "tighten_passes", o.tighten_passes, 0));
        const auto bm = r.choice(*s, "/planner", "baseline_memory", "resident", {"resident", "idle_aware"});
        o.baseline_memory =
            bm == "resident" ? planner::BaselineMemory::resident : planner::BaselineMemory::idle_aware;
        cfg.hit_targets = r.numbers(*s, "/planner", "hit_targets", cfg.hit_targets, open_unit, "must lie in (0,1)");
    }
}

void read_sim(const Reader& r, Config& cfg) {
    const json* s = r.section(r.root(), "", "sim");
    if (!s) return;
    auto& o = cfg.sim;
    r.allow_only(*s, "/sim", {"cores", "horizon", "warmup", "samples", "verify_samples", "max_arrivals",
                              "replications", "seed", "dispatcher_delay", "cpu", "cold_start", "loading_uses_cpu"});
    o.cores = static_cast<int>(r.integer(*s, "/sim", "cores", o.cores, 1));
    o.horizon = r.optional_number(*s, "/sim", "horizon", positive, "must be > 0");
    o.warmup = r.optional_number(*s, "/sim", "warmup", non_negative, "must be >= 0");
    if (o.horizon && o.warmup && *o.warmup >= *o.horizon) r.fail("/sim/warmup", "must be below the horizon");
    o.samples = r.number(*s, "/sim", "samples", o.samples, positive, "must be > 0");
    o.verify_samples = r.number(*s, "/sim", "verify_samples", o.verify_samples, positive, "must be > 0");
    o.max_arrivals = r.number(*s, "/sim", "max_arrivals", o.max_arrivals, positive, "must be > 0");
    o.replications = static_cast<int>(r.integer(*s, "/sim", "replications", o.replications, 1));
    o.seed = static_cast<std::uint64_t>(r.integer(*s, "/sim", "seed", static_cast<std::int64_t>(o.seed), 0));
    o.dispatcher_delay = r.number(*s, "/sim", "dispatcher_delay", o.dispatcher_delay, non_negative, "must be >= 0");
    o.cpu = r.choice(*s, "/sim", "cpu", "ps", {"ps", "fcfs"}) == "ps" ? sim::CpuDiscipline::processor_sharing
                                                                      : sim::CpuDiscipline::fcfs;
    o.cold_start = r.choice(*s, "/sim", "cold_start", "exponential", {"exponential", "deterministic"}) == "exponential"
                       ? sim::ColdStartDistribution::exponential
                       : sim::ColdStartDistribution::deterministic;
    o.loading_uses_cpu = r.boolean(*s, "/sim", "loading_uses_cpu", o.loading_uses_cpu);
}

void read_grid(const Reader& r, Config& cfg) {
    const json* s = r.section(r.root(), "", "grid");
    if (!s) return;
    r.allow_only(*s, "/grid", {"n_values", "eta_values", "lambda_values", "mu", "alpha", "beta", "theta_on",
                               "idle_fraction_mean", "idle_fraction_sigma", "replications", "seed"});
    ExperimentGrid g;
    if (s->contains("n_values")) {
        const auto v = r.numbers(*s, "/grid", "n_values", {}, [](double x) { return x >= 1.0 && x == std::floor(x); },
                                 "must be a positive integer");
        g.n_values.assign(v.begin(), v.end());
    }
    g.eta_values = r.numbers(*s, "/grid", "eta_values", g.eta_values, non_negative, "must be >= 0");
    g.lambda_values = r.numbers(*s, "/grid", "lambda_values", g.lambda_values, positive, "must be > 0");
    g.mu = r.range(*s, "/grid", "mu", g.mu);
    g.alpha = r.range(*s, "/grid", "alpha", g.alpha);
    g.beta = r.range(*s, "/grid", "beta", g.beta);
    g.theta_on = r.range(*s, "/grid", "theta_on", g.theta_on);
    g.idle_fraction_mean =
        r.number(*s, "/grid", "idle_fraction_mean", g.idle_fraction_mean, open_unit, "must lie in (0,1)");
    g.idle_fraction_sigma =
        r.number(*s, "/grid", "idle_fraction_sigma", g.idle_fraction_sigma, positive, "must be > 0");
    g.replications = static_cast<int>(r.integer(*s, "/grid", "replications", g.replications, 1));
    g.master_seed = static_cast<std::uint64_t>(r.integer(*s, "/grid", "seed", 1, 0));
    g.w_star = cfg.sla.w_star;
    try {
        g.validate();
    } catch (const InvalidArgument& e) {
        r.fail("/grid", e.what());
    }
    cfg.grid = g;
}

}  // namespace

Config parse_config(std::string_view text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto line = SourceMap::line_at_offset(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError(fmt::format("{}:{}: malformed JSON: {}", origin, line, e.what()));
    }
    Reader r(root, text, origin);
    if (!root.is_object()) r.fail("", "top level must be an object");
    r.allow_only(root, "", {"workload", "functions", "sla", "platform", "costs", "model", "planner", "sim", "grid"});

    Config cfg;
    read_sla(r, cfg);
    read_functions(r, cfg);
    read_platform(r, cfg);
    read_model(r, cfg);
    read_sim(r, cfg);
    read_grid(r, cfg);
    if (!cfg.workload && !cfg.grid) r.fail("", "need either a workload with functions or a grid section");
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("{}: cannot open configuration file", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

const WorkloadSpec& Config::require_workload() const {
    if (!workload) throw ConfigError("this command needs a workload section with functions");
    return *workload;
}

const ExperimentGrid& Config::require_grid() const {
    if (!grid) throw ConfigError("this command needs a grid section");
    return *grid;
}

SlaSpec Config::sla_for(double lambda_total) const {
    SlaSpec s = sla;
    if (!epsilon_given) s.epsilon = capacity::default_epsilon(lambda_total);
    return s;
}

sim::SimConfig Config::sim_config(const WorkloadSpec& wl, const std::vector<double>& idle, int cores,
                                  double samples) const {
    sim::SimConfig c;
    c.workload = wl;
    c.idle_times = idle;
    c.cores = cores;
    c.warmup = sim.warmup.value_or(sim::default_warmup(idle));
    c.horizon = sim.horizon.value_or(sim::horizon_for_samples(wl, c.warmup, samples, sim.max_arrivals));
    // An explicit short horizon keeps its length; the derived warmup gives way.
    if (!sim.warmup && c.warmup >= c.horizon) c.warmup = 0.1 * c.horizon;
    c.seed = sim.seed;
    c.replications = sim.replications;
    c.dispatcher_delay = sim.dispatcher_delay;
    c.cpu = sim.cpu;
    c.cold_start = sim.cold_start;
    c.loading_uses_cpu = sim.loading_uses_cpu;
    return c;
}

}  // namespace faasplan::cli
