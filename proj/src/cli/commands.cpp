#include "faasplan/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "faasplan/cli/analysis.hpp"
#include "faasplan/core/errors.hpp"
#include "faasplan/core/parallel.hpp"
#include "faasplan/ctmc/qbd.hpp"
#include "faasplan/perf/layered_model.hpp"
#include "faasplan/ttl/ttl.hpp"

namespace faasplan::cli {

namespace {

const std::vector<double>& require_idle_times(const Config& cfg) {
    (void)cfg.require_workload();
    if (!cfg.has_idle_times()) throw ConfigError("this command needs functions[].idle_time on every function");
    return cfg.idle_times;
}

Emitter make_emitter(const CommandOptions& opts, std::ostream& out) { return Emitter(out, opts.format, opts.out); }

void write_text_file(Emitter& em, const std::string& file, const std::string& body, std::ostream& out) {
    if (auto p = em.path_for(file)) {
        std::ofstream f(*p);
        if (!f) throw Error(fmt::format("cannot write {}", p->string()));
        f << body;
    } else {
        out << '\n' << body;
    }
}

std::string fmt_lambda(double l) { return fmt::format("{:g}", l); }

}  // namespace

Config effective_config(const CommandOptions& opts) {
    Config cfg = load_config(opts.config);
    if (opts.seed) {
        cfg.sim.seed = *opts.seed;
        if (cfg.grid) cfg.grid->master_seed = *opts.seed;
    }
    return cfg;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgument*>(&e)) return exit_config_error;
    if (dynamic_cast<const Infeasible*>(&e) || dynamic_cast<const ModelError*>(&e)) return exit_infeasible;
    if (dynamic_cast<const NumericalError*>(&e)) return exit_numerical_error;
    return exit_config_error;
}

// ---------------------------------------------------------------------------

int cmd_gen(const CommandOptions& opts, std::ostream& out) {
    const auto cfg = effective_config(opts);
    const auto& grid = cfg.require_grid();
    const auto exps = gen_experiments(grid);
    Table t({"N", "eta", "lambda", "rep", "seed", "function", "popularity", "mu", "alpha", "idle_time", "theta_on",
             "theta_off"});
    for (const auto& e : exps)
        for (std::size_t i = 0; i < e.n; ++i) {
            const auto& f = e.workload.functions[i];
            t.add({static_cast<long long>(e.n), e.eta, e.lambda, static_cast<long long>(e.rep),
                   fmt::format("{}", e.seed), static_cast<long long>(i), f.popularity, f.mu, f.alpha, e.idle_times[i],
                   f.theta_on, f.theta_off});
        }
    auto em = make_emitter(opts, out);
    em.note(fmt::format("{} experiments over {} cells", exps.size(), grid.cell_count()));
    em.emit("experiments", t);
    return exit_ok;
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out) {
    const auto cfg = effective_config(opts);
    const auto& wl = cfg.require_workload();
    auto sc = cfg.sim_config(wl, require_idle_times(cfg), cfg.sim.cores, cfg.sim.samples);
    sc.record_trace = opts.dump_trace;
    const auto res = sim::simulate(sc, opts.workers);

    Table per_rep({"rep", "function", "arrivals", "hit_rate", "mean_response", "p95_response", "utilization"});
    Table reps({"rep", "seed", "mean_memory", "max_memory", "events", "arrivals", "completions", "in_flight"});
    for (std::size_t r = 0; r < res.replications.size(); ++r) {
        const auto& rr = res.replications[r];
        reps.add({static_cast<long long>(r), fmt::format("{}", rr.seed), rr.mean_memory, rr.max_memory,
                  static_cast<long long>(rr.events), static_cast<long long>(rr.arrivals_total),
                  static_cast<long long>(rr.completions_total), static_cast<long long>(rr.in_flight)});
        for (std::size_t i = 0; i < rr.functions.size(); ++i) {
            const auto& f = rr.functions[i];
            per_rep.add({static_cast<long long>(r), static_cast<long long>(i), static_cast<long long>(f.arrivals),
                         f.hit_rate(), f.mean_response, f.p95_response, f.utilization});
        }
    }
    Table agg({"function", "w_mean", "w_sd", "hit_mean", "hit_sd", "rho_mean", "rho_sd"});
    for (std::size_t i = 0; i < wl.size(); ++i)
        agg.add({static_cast<long long>(i), res.response_time[i].mean, res.response_time[i].sd, res.hit_rate[i].mean,
                 res.hit_rate[i].sd, res.utilization[i].mean, res.utilization[i].sd});

    auto em = make_emitter(opts, out);
    em.note(fmt::format("horizon {:.6g}s, warmup {:.6g}s, {} replication(s), {} cores", sc.horizon, sc.warmup,
                        sc.replications, sc.cores));
    em.emit("sim_functions", agg);
    em.emit("sim_replications", reps);
    if (opts.format == Format::csv || opts.out) em.emit("sim_per_replication", per_rep);
    if (opts.dump_trace) {
        Table tr({"time", "memory_gb"});
        for (const auto& [t, m] : res.replications.front().trace) tr.add({t, m});
        em.emit("memory_trace", tr);
    }
    return exit_ok;
}

int cmd_solve_ctmc(const CommandOptions& opts, std::ostream& out) {
    const auto cfg = effective_config(opts);
    const auto& wl = cfg.require_workload();
    const auto& idle = require_idle_times(cfg);
    const int k = cfg.planner.erlang_phases;

    std::vector<ctmc::StationaryDistribution> dists(wl.size());
    parallel_for(wl.size(), opts.workers, [&](std::size_t i) {
        dists[i] = ctmc::solve_stationary(ctmc::build_chain(wl.functions[i], wl.arrival_rate(i), idle[i], k));
    });
    std::vector<double> q(wl.size());
    for (std::size_t i = 0; i < wl.size(); ++i) q[i] = ctmc::cold_start_probability(dists[i]);

    const auto sla = cfg.sla_for(wl.lambda_total);
    const int clients = cfg.planner.clients.value_or(perf::default_clients(wl.lambda_total, sla.w_star));
    const auto model = perf::build_model(wl, q, cfg.sim.cores, clients, cfg.planner.dispatcher_demand);
    const auto est = perf::solve(model, cfg.planner.solve);

    Table t({"function", "lambda", "idle_time", "cold_prob", "ttl_miss", "decay_rate", "w_model", "rho"});
    for (std::size_t i = 0; i < wl.size(); ++i) {
        const double lam = wl.arrival_rate(i);
        t.add({static_cast<long long>(i), lam, idle[i], q[i], 1.0 - ttl::hit_rate(lam, idle[i]), dists[i].decay_rate,
               est.response_times[i], est.utilizations[i]});
    }
    auto em = make_emitter(opts, out);
    em.note(fmt::format("k={} phases, {} cores, K={} clients, station utilisation {:.4g}", k, cfg.sim.cores, clients,
                        est.function_station_utilization));
    em.emit("ctmc", t);
    if (opts.dump_model) {
        for (std::size_t i = 0; i < wl.size(); ++i) {
            std::ostringstream s;
            ctmc::write_state_csv(s, dists[i]);
            write_text_file(em, fmt::format("ctmc_states_{}.csv", i), s.str(), out);
        }
        std::ostringstream s;
        perf::write_model(s, model);
        write_text_file(em, "layered_model.txt", s.str(), out);
    }
    return exit_ok;
}

int cmd_validate(const CommandOptions& opts, std::ostream& out) {
    const auto cfg = effective_config(opts);
    const auto exps = gen_experiments(cfg.require_grid());
    std::vector<ValidationOutcome> outcomes(exps.size());
    parallel_for(exps.size(), opts.workers, [&](std::size_t k) { outcomes[k] = validate_experiment(exps[k], cfg); });

    Table rows_t({"N", "lambda", "eta", "rep", "function", "w_sim", "w_model", "pct_err"});
    Table errors_t({"N", "lambda", "eta", "rep", "error"});
    std::vector<ValidationRow> rows;
    for (std::size_t k = 0; k < exps.size(); ++k) {
        if (!outcomes[k].error.empty())
            errors_t.add({static_cast<long long>(exps[k].n), exps[k].lambda, exps[k].eta,
                          static_cast<long long>(exps[k].rep), outcomes[k].error});
        for (const auto& r : outcomes[k].rows) {
            rows_t.add({static_cast<long long>(r.n), r.lambda, r.eta, static_cast<long long>(r.rep),
                        static_cast<long long>(r.function), r.w_sim, r.w_model, r.pct_err});
            rows.push_back(r);
        }
    }
    auto em = make_emitter(opts, out);
    if (opts.out || opts.format == Format::csv) em.emit("validation", rows_t);
    if (errors_t.size() > 0) em.emit("validation_errors", errors_t);
    if (rows.empty()) throw NumericalError("no experiment could be validated");

    const auto cells = error_table(rows);
    std::set<double> lambdas;
    for (const auto& c : cells) lambdas.insert(c.lambda);
    std::vector<std::string> header{"N"};
    for (double l : lambdas)
        for (const char* s : {"avg", "95p", "max"}) header.push_back(fmt::format("lambda={} {}", fmt_lambda(l), s));
    Table wide(header);
    std::map<std::size_t, std::map<double, ErrorCell>> by_n;
    for (const auto& c : cells) by_n[c.n][c.lambda] = c;
    for (const auto& [n, row] : by_n) {
        std::vector<Cell> r{static_cast<long long>(n)};
        for (double l : lambdas) {
            auto it = row.find(l);
            const bool has = it != row.end();
            r.push_back(has ? it->second.avg : std::nan(""));
            r.push_back(has ? it->second.p95 : std::nan(""));
            r.push_back(has ? it->second.max : std::nan(""));
        }
        wide.add(std::move(r));
    }
    em.emit("error_table", wide);

    double sum = 0.0, mx = 0.0;
    for (const auto& r : rows) {
        sum += r.pct_err;
        mx = std::max(mx, r.pct_err);
    }
    std::vector<double> ns, avgs;
    for (const auto& c : cells) {
        ns.push_back(static_cast<double>(c.n));
        avgs.push_back(c.avg);
    }
    em.note(fmt::format("functions {}  mean error {:.3f}%  max error {:.3f}%  spearman(N, cell avg) {:.3f}",
                        rows.size(), sum / rows.size(), mx, spearman(ns, avgs)));
    return exit_ok;
}

int cmd_plan(const CommandOptions& opts, std::ostream& out) {
    const auto cfg = effective_config(opts);
    const auto& wl = cfg.require_workload();
    auto po = cfg.planner;
    po.branch_workers = opts.workers;
    const auto sla = cfg.sla_for(wl.lambda_total);
    const auto res = planner::plan(wl, sla, cfg.platform, po);

    auto em = make_emitter(opts, out);
    em.emit("plan_branches", branch_table(res));
    if (!res.feasible) {
        em.note(res.plan.diagnostic);
        return exit_infeasible;
    }
    em.emit("plan_summary", plan_summary_table(res.plan));
    em.emit("plan_functions", plan_function_table(res.plan, wl));
    if (opts.dump_model) {
        const int clients = po.clients.value_or(perf::default_clients(wl.lambda_total, sla.w_star));
        const auto model =
            perf::build_model(wl, res.plan.cold_probabilities, res.plan.cores, clients, po.dispatcher_demand);
        std::ostringstream s;
        perf::write_model(s, model);
        write_text_file(em, "layered_model.txt", s.str(), out);
    }
    return exit_ok;
}

int cmd_baseline(const CommandOptions& opts, std::ostream& out) {
    const auto cfg = effective_config(opts);
    const auto& wl = cfg.require_workload();
    const auto sla = cfg.sla_for(wl.lambda_total);
    auto em = make_emitter(opts, out);
    for (double h : cfg.hit_targets) {
        const auto b = planner::availability_baseline(wl, sla, cfg.platform, ttl::HitRateTarget(h), cfg.planner);
        const auto tag = fmt::format("baseline_hr{:.0f}", 100.0 * h);
        em.emit(tag + "_summary", plan_summary_table(b));
        em.emit(tag + "_functions", plan_function_table(b, wl));
    }
    return exit_ok;
}

namespace {

void add_comparison_rows(Table& t, const Comparison& c, const std::vector<Cell>& prefix) {
    for (const auto& a : c.approaches) {
        double hit_min = std::nan(""), hit_max = std::nan("");
        if (a.simulated) {
            hit_min = 1.0;
            hit_max = 0.0;
            for (const auto& h : a.sim.hit_rate) {
                hit_min = std::min(hit_min, h.mean);
                hit_max = std::max(hit_max, h.mean);
            }
        }
        std::vector<Cell> row = prefix;
        const double nan = std::nan("");
        row.insert(row.end(), {a.name, static_cast<long long>(a.plan.cores), a.plan.capacity_gb, a.plan.memory.m_avg,
                               a.plan.memory.m_max, a.simulated ? a.sim.mean_memory.mean : nan,
                               a.simulated ? a.sim.max_memory.mean : nan, a.simulated ? a.sla_fraction : nan, hit_min,
                               hit_max});
        t.add(std::move(row));
    }
}

const std::vector<std::string> kSummaryColumns{"approach",   "cores",          "capacity_gb",
                                               "m_avg",      "m_max",          "sim_mean_memory",
                                               "sim_max_memory", "sla_fraction", "hit_min",
                                               "hit_max"};

}  // namespace

int cmd_compare(const CommandOptions& opts, std::ostream& out) {
    const auto cfg = effective_config(opts);
    auto em = make_emitter(opts, out);

    if (cfg.workload) {
        const auto& wl = *cfg.workload;
        CompareOptions co;
        co.seed = cfg.sim.seed;
        co.record_trace = opts.dump_trace;
        const auto c = compare_workload(wl, cfg, co);
        if (!c.planned_feasible) em.note("planner: " + c.diagnostic);

        Table summary(kSummaryColumns);
        add_comparison_rows(summary, c, {});
        em.emit("compare_summary", summary);

        const double w_star = cfg.sla.w_star;
        Table funcs({"approach", "function", "lambda", "idle_time", "hit_model", "hit_sim", "w_model", "w_sim",
                     "w_sim_sd", "sla_ok"});
        for (const auto& a : c.approaches)
            for (std::size_t i = 0; i < wl.size(); ++i) {
                const double nan = std::nan("");
                funcs.add({a.name, static_cast<long long>(i), wl.arrival_rate(i), a.plan.idle_times[i],
                           a.plan.hit_rates[i], a.simulated ? a.sim.hit_rate[i].mean : nan, a.plan.response_times[i],
                           a.simulated ? a.sim.response_time[i].mean : nan,
                           a.simulated ? a.sim.response_time[i].sd : nan,
                           a.simulated ? static_cast<long long>(a.sim.response_time[i].mean <= w_star) : -1LL});
            }
        em.emit("compare_functions", funcs);
        if (opts.dump_trace) {
            Table tr({"approach", "time", "memory_gb"});
            for (const auto& a : c.approaches)
                if (a.simulated)
                    for (const auto& [t, m] : a.sim.replications.front().trace) tr.add({a.name, t, m});
            em.emit("memory_trace", tr);
        }
        return c.planned_feasible ? exit_ok : exit_infeasible;
    }

    const auto exps = gen_experiments(cfg.require_grid());
    std::vector<Comparison> results(exps.size());
    parallel_for(exps.size(), opts.workers, [&](std::size_t k) {
        CompareOptions co;
        co.seed = exps[k].seed;
        results[k] = compare_workload(exps[k].workload, cfg, co);
    });
    std::vector<std::string> cols{"N", "eta", "lambda", "rep"};
    cols.insert(cols.end(), kSummaryColumns.begin(), kSummaryColumns.end());
    Table per_exp(cols);
    for (std::size_t k = 0; k < exps.size(); ++k)
        add_comparison_rows(per_exp, results[k],
                            {static_cast<long long>(exps[k].n), exps[k].eta, exps[k].lambda,
                             static_cast<long long>(exps[k].rep)});
    em.emit("compare_experiments", per_exp);

    const auto cells = capacity_table(exps, results);
    std::set<double> lambdas;
    std::vector<std::string> names;
    for (const auto& c : cells) {
        lambdas.insert(c.lambda);
        if (names.empty()) names = c.approaches;
    }
    std::vector<std::string> header{"N"};
    for (double l : lambdas)
        for (const auto& a : names) header.push_back(fmt::format("lambda={} {}", fmt_lambda(l), a));
    Table wide(header);
    std::map<std::size_t, std::map<double, const CapacityCell*>> by_n;
    for (const auto& c : cells) by_n[c.n][c.lambda] = &c;
    for (const auto& [n, row] : by_n) {
        std::vector<Cell> r{static_cast<long long>(n)};
        for (double l : lambdas) {
            auto it = row.find(l);
            for (std::size_t j = 0; j < names.size(); ++j)
                r.push_back(it != row.end() && j < it->second->capacity_gb.size() ? it->second->capacity_gb[j]
                                                                                  : std::nan(""));
        }
        wide.add(std::move(r));
    }
    em.emit("capacity_table", wide);
    const auto infeasible =
        std::count_if(results.begin(), results.end(), [](const Comparison& c) { return !c.planned_feasible; });
    if (infeasible > 0) em.note(fmt::format("{} experiment(s) had no feasible plan", infeasible));
    return exit_ok;
}

}  // namespace faasplan::cli
