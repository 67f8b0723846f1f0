#include "faasplan/cli/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "faasplan/core/errors.hpp"
#include "faasplan/core/random.hpp"
#include "faasplan/ctmc/qbd.hpp"
#include "faasplan/perf/layered_model.hpp"

namespace faasplan::cli {

ValidationOutcome validate_experiment(const Experiment& e, const Config& cfg) {
    ValidationOutcome out;
    try {
        const auto& wl = e.workload;
        const auto sla = cfg.sla_for(wl.lambda_total);
        const int cores = cfg.sim.cores;
        std::vector<double> q(wl.size());
        for (std::size_t i = 0; i < wl.size(); ++i)
            q[i] = ctmc::cold_start_probability(wl.functions[i], wl.arrival_rate(i), e.idle_times[i],
                                                cfg.planner.erlang_phases);
        const int clients = cfg.planner.clients.value_or(perf::default_clients(wl.lambda_total, sla.w_star));
        const auto model = perf::build_model(wl, q, cores, clients, cfg.planner.dispatcher_demand);
        const auto est = perf::solve(model, cfg.planner.solve);

        auto sc = cfg.sim_config(wl, e.idle_times, cores, cfg.sim.samples);
        const std::array<std::uint64_t, 1> coord{cfg.sim.seed};
        sc.seed = derive_seed(e.seed, coord);
        const auto sim = sim::simulate(sc);

        for (std::size_t i = 0; i < wl.size(); ++i) {
            ValidationRow row{e.n, e.lambda, e.eta, e.rep, i, sim.response_time[i].mean, est.response_times[i], 0.0};
            row.pct_err = row.w_sim > 0.0 ? 100.0 * std::abs(row.w_model - row.w_sim) / row.w_sim
                                          : std::numeric_limits<double>::infinity();
            out.rows.push_back(row);
        }
    } catch (const Error& err) {
        out.rows.clear();
        out.error = fmt::format("N={} eta={} lambda={} rep={}: {}", e.n, e.eta, e.lambda, e.rep, err.what());
    }
    return out;
}

std::vector<ErrorCell> error_table(const std::vector<ValidationRow>& rows) {
    std::map<std::pair<std::size_t, double>, std::vector<double>> cells;
    for (const auto& r : rows) cells[{r.n, r.lambda}].push_back(r.pct_err);
    std::vector<ErrorCell> out;
    for (auto& [key, errs] : cells) {
        ErrorCell c;
        c.n = key.first;
        c.lambda = key.second;
        c.count = errs.size();
        c.avg = std::accumulate(errs.begin(), errs.end(), 0.0) / errs.size();
        c.max = *std::max_element(errs.begin(), errs.end());
        c.p95 = percentile(std::move(errs), 95.0);
        out.push_back(c);
    }
    return out;
}

Comparison compare_workload(const WorkloadSpec& workload, const Config& cfg, const CompareOptions& options) {
    Comparison cmp;
    const auto sla = cfg.sla_for(workload.lambda_total);
    const auto pr = planner::plan(workload, sla, cfg.platform, cfg.planner);
    cmp.planned_feasible = pr.feasible;
    if (pr.feasible)
        cmp.approaches.push_back({"planned", pr.plan, false, {}, {}, 0.0});
    else
        cmp.diagnostic = pr.plan.diagnostic;
    for (double h : cfg.hit_targets) {
        auto b = planner::availability_baseline(workload, sla, cfg.platform, ttl::HitRateTarget(h), cfg.planner);
        cmp.approaches.push_back({fmt::format("hr{:.0f}", 100.0 * h), std::move(b), false, {}, {}, 0.0});
    }
    if (!options.simulate) return cmp;

    for (auto& a : cmp.approaches) {
        const bool stable = std::all_of(a.plan.response_times.begin(), a.plan.response_times.end(),
                                        [](double w) { return std::isfinite(w); });
        if (!stable) continue;
        auto sc = cfg.sim_config(workload, a.plan.idle_times, a.plan.cores, cfg.sim.verify_samples);
        sc.seed = options.seed;
        sc.record_trace = options.record_trace;
        a.sim = sim::simulate(sc);
        a.simulated = true;
        a.sla_ok.resize(workload.size());
        std::size_t ok = 0;
        for (std::size_t i = 0; i < workload.size(); ++i) {
            a.sla_ok[i] = a.sim.response_time[i].mean <= sla.w_star;
            ok += a.sla_ok[i] ? 1 : 0;
        }
        a.sla_fraction = static_cast<double>(ok) / workload.size();
    }
    return cmp;
}

std::vector<CapacityCell> capacity_table(const std::vector<Experiment>& experiments,
                                         const std::vector<Comparison>& results) {
    if (experiments.size() != results.size()) throw InvalidArgument("capacity_table: size mismatch");
    std::map<std::pair<std::size_t, double>, CapacityCell> cells;
    for (std::size_t k = 0; k < experiments.size(); ++k) {
        const auto& r = results[k];
        if (!r.planned_feasible) continue;
        auto& c = cells[{experiments[k].n, experiments[k].lambda}];
        c.n = experiments[k].n;
        c.lambda = experiments[k].lambda;
        if (c.approaches.empty()) {
            for (const auto& a : r.approaches) c.approaches.push_back(a.name);
            c.capacity_gb.assign(c.approaches.size(), 0.0);
        }
        for (std::size_t j = 0; j < r.approaches.size() && j < c.capacity_gb.size(); ++j)
            c.capacity_gb[j] += r.approaches[j].plan.capacity_gb;
        ++c.count;
    }
    std::vector<CapacityCell> out;
    for (auto& [key, c] : cells) {
        for (auto& v : c.capacity_gb) v /= static_cast<double>(c.count);
        out.push_back(std::move(c));
    }
    return out;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw InvalidArgument("percentile of an empty sample");
    if (!(p >= 0.0 && p <= 100.0)) throw InvalidArgument("percentile must lie in [0, 100]");
    std::sort(values.begin(), values.end());
    const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
        i = j + 1;
    }
    return rank;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw InvalidArgument("spearman: samples differ in length");
    if (x.size() < 2) return 0.0;
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace faasplan::cli
