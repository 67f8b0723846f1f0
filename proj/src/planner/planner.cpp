#include "faasplan/planner/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "faasplan/core/errors.hpp"
#include "faasplan/core/parallel.hpp"
#include "faasplan/ctmc/qbd.hpp"

namespace faasplan::planner {

// ---------------------------------------------------------------------------
// SearchState

SearchState::SearchState(std::size_t n, double t_star, int max_iters)
    : t_star_(t_star), bits_(max_iters), lo_(n, 0), hi_(n, std::uint64_t{1} << max_iters) {
    if (!(t_star > 0.0) || !std::isfinite(t_star))
        throw InvalidArgument(fmt::format("T* must be finite and > 0 (got {})", t_star));
    if (max_iters < 1 || max_iters > 52) throw InvalidArgument("max_iters must lie in [1, 52]");
}

double SearchState::to_seconds(std::uint64_t units) const {
    return t_star_ * std::ldexp(static_cast<double>(units), -bits_);
}

double SearchState::width() const { return t_star_ * std::ldexp(1.0, -iteration_); }
double SearchState::lo(std::size_t i) const { return to_seconds(lo_.at(i)); }
double SearchState::hi(std::size_t i) const { return to_seconds(hi_.at(i)); }

double SearchState::midpoint(std::size_t i) const {
    const std::uint64_t half = (std::uint64_t{1} << (bits_ - iteration_)) / 2;
    return to_seconds(lo_.at(i) + half);
}

std::vector<double> SearchState::midpoints() const {
    std::vector<double> m(size());
    for (std::size_t i = 0; i < size(); ++i) m[i] = midpoint(i);
    return m;
}

std::vector<double> SearchState::upper_endpoints() const {
    std::vector<double> h(size());
    for (std::size_t i = 0; i < size(); ++i) h[i] = hi(i);
    return h;
}

void SearchState::update(std::span<const bool> feasible) {
    if (feasible.size() != size()) throw InvalidArgument("feasibility vector has the wrong length");
    if (exhausted()) throw InvalidArgument("search resolution exhausted");
    const std::uint64_t half = (std::uint64_t{1} << (bits_ - iteration_)) / 2;
    for (std::size_t i = 0; i < size(); ++i) {
        if (feasible[i])
            hi_[i] = lo_[i] + half;
        else
            lo_[i] += half;
    }
    ++iteration_;
}

// ---------------------------------------------------------------------------
// Evaluation

bool Evaluation::within_sla(std::size_t i, double w_star) const {
    return model_ok && perf.response_times.at(i) <= w_star;
}

bool Evaluation::all_within_sla(double w_star) const {
    if (!model_ok) return false;
    return std::all_of(perf.response_times.begin(), perf.response_times.end(),
                       [w_star](double w) { return w <= w_star; });
}

double Evaluation::worst_response() const {
    if (!model_ok) return std::numeric_limits<double>::infinity();
    return *std::max_element(perf.response_times.begin(), perf.response_times.end());
}

namespace {

int clients_for(const WorkloadSpec& workload, const SlaSpec& sla, const PlannerOptions& options) {
    return options.clients.value_or(perf::default_clients(workload.lambda_total, sla.w_star));
}

}  // namespace

namespace {

Evaluation evaluate_cold(const WorkloadSpec& workload, const SlaSpec& sla, int cores, std::vector<double> cold,
                         const PlannerOptions& options) {
    Evaluation ev;
    ev.cold_probabilities = std::move(cold);
    try {
        const auto model = perf::build_model(workload, ev.cold_probabilities, cores, clients_for(workload, sla, options),
                                             options.dispatcher_demand);
        ev.perf = perf::solve(model, options.solve);
        ev.model_ok = true;
    } catch (const ModelError& e) {
        ev.diagnostic = e.what();
        ev.model_ok = false;
    }
    return ev;
}

}  // namespace

Evaluation evaluate(const WorkloadSpec& workload, const SlaSpec& sla, int cores, std::span<const double> idle_times,
                    const PlannerOptions& options) {
    if (idle_times.size() != workload.size()) throw InvalidArgument("idle-time vector has the wrong length");
    std::vector<double> cold(workload.size(), 0.0);
    parallel_for(workload.size(), options.function_workers, [&](std::size_t i) {
        cold[i] = ctmc::cold_start_probability(workload.functions[i], workload.arrival_rate(i), idle_times[i],
                                               options.erlang_phases);
    });
    return evaluate_cold(workload, sla, cores, std::move(cold), options);
}

void tighten_idle_times(const WorkloadSpec& workload, const SlaSpec& sla, int cores, const PlannerOptions& options,
                        std::vector<double>& idle_times, Evaluation& evaluation) {
    const std::size_t n = workload.size();
    if (idle_times.size() != n) throw InvalidArgument("idle-time vector has the wrong length");
    if (!evaluation.all_within_sla(sla.w_star)) return;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return workload.arrival_rate(a) < workload.arrival_rate(b);
    });
    for (int pass = 0; pass < options.tighten_passes; ++pass) {
        bool moved = false;
        for (std::size_t i : order) {
            double lo = 0.0;
            double hi = idle_times[i];
            for (int it = 0; it < options.max_iters; ++it) {
                const double mid = 0.5 * (lo + hi);
                auto cold = evaluation.cold_probabilities;
                cold[i] = ctmc::cold_start_probability(workload.functions[i], workload.arrival_rate(i), mid,
                                                       options.erlang_phases);
                auto trial = evaluate_cold(workload, sla, cores, std::move(cold), options);
                if (trial.all_within_sla(sla.w_star)) {
                    hi = mid;
                    idle_times[i] = mid;
                    evaluation = std::move(trial);
                    moved = true;
                } else {
                    lo = mid;
                }
            }
        }
        if (!moved) break;
    }
}

InitialIdleTime initial_idle_time(const WorkloadSpec& workload, const SlaSpec& sla, int cores,
                                  const PlannerOptions& options) {
    const auto n = static_cast<double>(workload.size());
    InitialIdleTime out;
    double missing = n * (1.0 - options.m_target_fraction);
    for (int r = 0; r <= options.max_target_escalations; ++r, missing /= 10.0) {
        double t_star = 0.0;
        try {
            t_star = ttl::characteristic_time(workload, n - missing);
        } catch (const NumericalError&) {
            if (r == 0) throw;
            break;  // target indistinguishable from n in double precision
        }
        out.m_target = n - missing;
        out.t_star = t_star;
        const std::vector<double> t(workload.size(), out.t_star);
        if (evaluate(workload, sla, cores, t, options).all_within_sla(sla.w_star)) {
            out.feasible = true;
            return out;
        }
    }
    return out;
}

RefineResult refine_idle_times(const WorkloadSpec& workload, const SlaSpec& sla, int cores, double t_star,
                               const PlannerOptions& options) {
    if (options.max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
    const std::size_t n = workload.size();
    RefineResult out;

    std::vector<double> best(n, t_star);
    Evaluation best_eval = evaluate(workload, sla, cores, best, options);
    if (!best_eval.all_within_sla(sla.w_star)) {
        out.idle_times = best;
        out.evaluation = std::move(best_eval);
        out.feasible = false;
        out.diagnostic = out.evaluation.model_ok
                             ? fmt::format("SLA violated already at T*={:.6g}s (worst W={:.4g}s)", t_star,
                                           out.evaluation.worst_response())
                             : out.evaluation.diagnostic;
        return out;
    }

    SearchState state(n, t_star, options.max_iters);
    std::vector<bool> ok(n);
    for (int it = 0; it < options.max_iters; ++it) {
        const auto t = state.midpoints();
        auto ev = evaluate(workload, sla, cores, t, options);
        for (std::size_t i = 0; i < n; ++i) ok[i] = ev.within_sla(i, sla.w_star);
        if (ev.all_within_sla(sla.w_star)) {
            best = t;
            best_eval = std::move(ev);
        }
        // std::vector<bool> has no contiguous storage; copy into a plain buffer.
        const std::unique_ptr<bool[]> flags(new bool[n]);
        for (std::size_t i = 0; i < n; ++i) flags[i] = ok[i];
        state.update(std::span<const bool>(flags.get(), n));
        out.widths.push_back(state.width());
    }

    // Each function individually settled on its upper endpoint; CPU contention
    // couples them, so re-verify and push violators back towards T*.
    // Once raising the violators stops paying off, the excess is contention from
    // other functions' loading work (lambda q / alpha); raise the heaviest
    // loaders as well, doubling how many each time progress stalls.
    auto candidate = state.upper_endpoints();
    double last_worst = std::numeric_limits<double>::infinity();
    std::size_t escalate = std::max<std::size_t>(1, n / 16);
    std::vector<std::size_t> order(n);
    for (int round = 0; round <= options.repair_rounds; ++round) {
        auto ev = evaluate(workload, sla, cores, candidate, options);
        if (ev.all_within_sla(sla.w_star)) {
            best = candidate;
            best_eval = std::move(ev);
            break;
        }
        const double worst = ev.model_ok ? ev.worst_response() : std::numeric_limits<double>::infinity();
        const bool stalled =
            !std::isfinite(worst) || !(worst < last_worst - 0.05 * (last_worst - sla.w_star));
        last_worst = std::min(last_worst, worst);
        std::vector<bool> raise(n);
        for (std::size_t i = 0; i < n; ++i) raise[i] = !ev.within_sla(i, sla.w_star);
        if (stalled) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            auto work = [&](std::size_t i) {
                return workload.arrival_rate(i) * ev.cold_probabilities[i] / workload.functions[i].alpha;
            };
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return work(a) > work(b); });
            for (std::size_t k = 0; k < std::min(escalate, n); ++k) raise[order[k]] = true;
            escalate *= 2;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (raise[i]) candidate[i] += 0.5 * (t_star - candidate[i]);
    }

    out.idle_times = std::move(best);
    out.evaluation = std::move(best_eval);
    out.feasible = true;
    return out;
}

namespace {

SizingPlan make_candidate(const WorkloadSpec& workload, const SlaSpec& sla, const PlatformSpec& platform, int cores,
                          double t_star, const RefineResult& refined) {
    SizingPlan p;
    p.cores = cores;
    p.t_star = t_star;
    p.idle_times = refined.idle_times;
    p.response_times = refined.evaluation.perf.response_times;
    p.cold_probabilities = refined.evaluation.cold_probabilities;
    p.hit_rates.resize(workload.size());
    for (std::size_t i = 0; i < workload.size(); ++i)
        p.hit_rates[i] = ttl::hit_rate(workload.arrival_rate(i), p.idle_times[i]);
    p.utilizations = perf::function_utilization(workload, p.cold_probabilities);
    p.memory = capacity::estimate_memory(p.hit_rates, p.utilizations, workload.functions, sla.epsilon,
                                         platform.ram_module_gb);
    p.capacity_gb = p.memory.capacity_gb;
    p.cost_memory = platform.tau_m * p.memory.m_max;
    p.cost_cpu = platform.tau_c * cores;
    p.feasible = refined.feasible;
    return p;
}

}  // namespace

PlanResult plan(const WorkloadSpec& workload, const SlaSpec& sla, const PlatformSpec& platform,
                const PlannerOptions& options) {
    workload.validate();
    sla.validate();
    platform.validate();

    std::vector<int> cores = platform.core_options;
    std::sort(cores.begin(), cores.end());
    cores.erase(std::unique(cores.begin(), cores.end()), cores.end());

    if (!(options.sla_margin >= 0.0 && options.sla_margin < 1.0))
        throw InvalidArgument(fmt::format("sla_margin must lie in [0,1) (got {})", options.sla_margin));
    SlaSpec target = sla;
    target.w_star *= 1.0 - options.sla_margin;

    PlanResult result;
    result.branches.resize(cores.size());
    parallel_for(cores.size(), options.branch_workers, [&](std::size_t b) {
        BranchReport& br = result.branches[b];
        br.cores = cores[b];
        const auto init = initial_idle_time(workload, target, br.cores, options);
        br.t_star = init.t_star;
        auto refined = refine_idle_times(workload, target, br.cores, init.t_star, options);
        if (refined.feasible)
            tighten_idle_times(workload, target, br.cores, options, refined.idle_times, refined.evaluation);
        br.feasible = refined.feasible;
        br.worst_response = refined.evaluation.worst_response();
        br.diagnostic = refined.diagnostic;
        if (refined.feasible) br.candidate = make_candidate(workload, sla, platform, br.cores, init.t_star, refined);
    });

    double max_a = 0.0;
    double max_b = 0.0;
    for (const auto& br : result.branches) {
        if (!br.candidate) continue;
        max_a = std::max(max_a, br.candidate->cost_memory);
        max_b = std::max(max_b, br.candidate->cost_cpu);
    }
    const bool fixed = platform.normalization == CostNormalization::fixed_reference;
    const double ref_a = fixed ? platform.reference_memory_cost : max_a;
    const double ref_b = fixed ? platform.reference_cpu_cost : max_b;

    const SizingPlan* chosen = nullptr;
    for (auto& br : result.branches) {
        if (!br.candidate) continue;
        auto& c = *br.candidate;
        const double a_hat = ref_a > 0.0 ? c.cost_memory / ref_a : 0.0;
        const double b_hat = ref_b > 0.0 ? c.cost_cpu / ref_b : 0.0;
        c.objective = platform.omega_a * a_hat + platform.omega_b * b_hat;
        if (chosen == nullptr) {
            chosen = &c;
            continue;
        }
        const double dz = *c.objective - *chosen->objective;
        const bool tie = std::abs(dz) <= 1e-12;
        if (dz < 0.0 && !tie) {
            chosen = &c;
        } else if (tie && (c.cores < chosen->cores ||
                           (c.cores == chosen->cores && c.capacity_gb < chosen->capacity_gb))) {
            chosen = &c;
        }
    }
    if (chosen != nullptr) {
        result.feasible = true;
        result.plan = *chosen;
    } else {
        result.feasible = false;
        std::string why;
        for (const auto& br : result.branches)
            why += fmt::format("{}C{}: {}", why.empty() ? "" : "; ", br.cores, br.diagnostic);
        result.plan.diagnostic = "no core option satisfies the SLA (" + why + ")";
    }
    return result;
}

SizingPlan availability_baseline(const WorkloadSpec& workload, const SlaSpec& sla, const PlatformSpec& platform,
                                 ttl::HitRateTarget hit_target, const PlannerOptions& options) {
    workload.validate();
    sla.validate();
    platform.validate();
    const std::size_t n = workload.size();

    SizingPlan p;
    p.idle_times.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.idle_times[i] = ttl::idle_time_for_hit_rate(workload.arrival_rate(i), hit_target);
    p.hit_rates.assign(n, hit_target.value());

    std::vector<int> cores = platform.core_options;
    std::sort(cores.begin(), cores.end());
    // Smallest core count meeting the SLA at these idle times; failing that,
    // the largest one with a steady state.
    Evaluation ev;
    std::optional<std::pair<int, Evaluation>> stable;
    for (int c : cores) {
        ev = evaluate(workload, sla, c, p.idle_times, options);
        p.cores = c;
        if (ev.model_ok && ev.all_within_sla(sla.w_star)) break;
        if (ev.model_ok) stable = {c, ev};
    }
    if (!(ev.model_ok && ev.all_within_sla(sla.w_star)) && stable) {
        p.cores = stable->first;
        ev = std::move(stable->second);
    }
    p.cold_probabilities = ev.cold_probabilities;
    p.utilizations = perf::function_utilization(workload, p.cold_probabilities);
    if (ev.model_ok) {
        p.response_times = ev.perf.response_times;
        p.feasible = ev.all_within_sla(sla.w_star);
    } else {
        p.response_times.assign(n, std::numeric_limits<double>::infinity());
        p.feasible = false;
        p.diagnostic = ev.diagnostic;
    }

    switch (options.baseline_memory) {
        case BaselineMemory::idle_aware:
            p.memory = capacity::estimate_memory(p.hit_rates, p.utilizations, workload.functions, sla.epsilon,
                                                 platform.ram_module_gb);
            break;
        case BaselineMemory::resident: {
            const double m = capacity::resident_memory(p.hit_rates, workload.functions);
            p.memory.m_avg = m;
            p.memory.e_u = capacity::expected_execution_memory(p.hit_rates, p.utilizations, workload.functions);
            p.memory.kappa = 1.0;
            p.memory.m_max = m;
            p.memory.upper_bound_gb = workload.total_execution_memory();
            p.memory.capacity_gb = capacity::suggest_capacity(m, workload.functions, platform.ram_module_gb);
            break;
        }
    }
    p.capacity_gb = p.memory.capacity_gb;
    p.cost_memory = platform.tau_m * p.memory.m_max;
    p.cost_cpu = platform.tau_c * p.cores;
    return p;
}

}  // namespace faasplan::planner
