#include "faasplan/perf/layered_model.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "faasplan/core/errors.hpp"

namespace faasplan::perf {

double LayeredModel::offered_load() const {
    double a = 0.0;
    for (const auto& c : classes) a += c.arrival_rate * c.demand();
    return a;
}

double LayeredModel::mean_demand() const {
    double d = 0.0;
    for (const auto& c : classes) d += c.visit_probability * c.demand();
    return d;
}

int default_clients(double lambda_total, double w_star) {
    return std::max(1, static_cast<int>(std::ceil(100.0 * lambda_total * w_star - 1e-9)));
}

LayeredModel build_model(const WorkloadSpec& workload, std::span<const double> cold_probs, int cores, int k_clients,
                         double d_disp) {
    if (cold_probs.size() != workload.size())
        throw InvalidArgument(fmt::format("expected {} cold probabilities, got {}", workload.size(),
                                          cold_probs.size()));
    if (cores < 1) throw InvalidArgument(fmt::format("cores must be >= 1 (got {})", cores));
    if (k_clients < 1) throw InvalidArgument(fmt::format("client population must be >= 1 (got {})", k_clients));
    if (!(d_disp >= 0.0)) throw InvalidArgument("dispatcher demand must be >= 0");
    if (!(workload.lambda_total > 0.0)) throw InvalidArgument("lambda_total must be > 0");

    LayeredModel model;
    model.clients = k_clients;
    model.think_time = static_cast<double>(k_clients) / workload.lambda_total;
    model.dispatcher_demand = d_disp;
    model.cores = cores;
    model.lambda_total = workload.lambda_total;
    model.classes.reserve(workload.size());
    for (std::size_t i = 0; i < workload.size(); ++i) {
        const auto& f = workload.functions[i];
        const double q = cold_probs[i];
        if (!(q >= 0.0 && q <= 1.0))
            throw InvalidArgument(fmt::format("cold probability of function {} outside [0,1]: {}", i, q));
        model.classes.push_back({f.popularity, q, 1.0 / f.alpha, 1.0 / f.mu, workload.arrival_rate(i)});
    }
    const double load = model.offered_load();
    if (load >= cores)
        throw ModelError(fmt::format("function station saturated: offered load {:.4g} >= {} cores", load, cores));
    if (workload.lambda_total * d_disp >= 1.0)
        throw ModelError(fmt::format("dispatcher saturated: utilisation {:.4g}", workload.lambda_total * d_disp));
    return model;
}

double erlang_c(int c, double a) {
    if (c < 1) throw InvalidArgument("erlang_c: need at least one server");
    if (!(a >= 0.0)) throw InvalidArgument("erlang_c: offered load must be >= 0");
    if (a >= c) return 1.0;
    double b = 1.0;
    for (int k = 1; k <= c; ++k) b = a * b / (k + a * b);
    const double rho = a / c;
    return b / (1.0 - rho * (1.0 - b));
}

namespace {

PerfEstimate make_estimate(const LayeredModel& model) {
    PerfEstimate est;
    est.response_times.resize(model.classes.size());
    est.cold_probabilities.reserve(model.classes.size());
    est.utilizations.reserve(model.classes.size());
    for (const auto& c : model.classes) {
        est.cold_probabilities.push_back(c.cold_probability);
        est.utilizations.push_back(std::min(1.0, c.arrival_rate * c.demand()));
    }
    est.function_station_utilization = model.offered_load() / model.cores;
    est.dispatcher_utilization = model.lambda_total * model.dispatcher_demand;
    return est;
}

PerfEstimate solve_schweitzer(const LayeredModel& model, const SolveOptions& options) {
    PerfEstimate est = make_estimate(model);
    const double k = model.clients;
    const double c = model.cores;
    const double d = model.dispatcher_demand;
    const double z = model.think_time;
    const double dbar = model.mean_demand();
    const double seen = (k - 1.0) / k;  // Schweitzer: an arrival sees (K-1)/K of the queue

    double x = k / (z + d + dbar);
    double q_disp = x * d;
    double q_func = x * dbar;
    std::vector<double> prev(model.classes.size(), 0.0);
    for (int it = 1; it <= options.max_iterations; ++it) {
        const double a_disp = seen * q_disp;
        const double a_func = seen * q_func;
        const double busy_seen = seen * x * dbar;  // expected busy servers seen, C * U_s
        const double p_busy = erlang_c(model.cores, std::min(busy_seen, c));
        const double wait_factor = (p_busy + std::max(0.0, a_func - busy_seen)) / c;

        const double r_disp = d * (1.0 + a_disp);
        const double r_func = dbar * (1.0 + wait_factor);
        x = k / (z + r_disp + r_func);
        q_disp = x * r_disp;
        q_func = x * r_func;

        bool converged = true;
        for (std::size_t i = 0; i < model.classes.size(); ++i) {
            const double w = r_disp + model.classes[i].demand() * (1.0 + wait_factor);
            if (std::abs(w - prev[i]) > options.tolerance * std::abs(w)) converged = false;
            prev[i] = w;
        }
        if (converged) {
            est.response_times = prev;
            est.throughput = x;
            est.iterations = it;
            return est;
        }
    }
    throw NumericalError(fmt::format("approximate MVA did not converge in {} iterations", options.max_iterations));
}

PerfEstimate solve_exact(const LayeredModel& model) {
    PerfEstimate est = make_estimate(model);
    const int k = model.clients;
    const int c = model.cores;
    const double d = model.dispatcher_demand;
    const double z = model.think_time;
    const double dbar = model.mean_demand();

    // Marginal queue-length distribution at the function station, p[j] = P(j | n).
    std::vector<double> p(static_cast<std::size_t>(k) + 1, 0.0);
    std::vector<double> next(p.size(), 0.0);
    p[0] = 1.0;
    double q_disp = 0.0;
    double x = 0.0;
    double r_disp = d;
    double r_func = dbar;
    for (int n = 1; n <= k; ++n) {
        r_disp = d * (1.0 + q_disp);
        double s = 0.0;
        for (int j = 1; j <= n; ++j) s += static_cast<double>(j) / std::min(j, c) * p[static_cast<std::size_t>(j - 1)];
        r_func = dbar * s;
        x = n / (z + r_disp + r_func);
        q_disp = x * r_disp;
        double mass = 0.0;
        for (int j = 1; j <= n; ++j) {
            next[static_cast<std::size_t>(j)] = x * dbar / std::min(j, c) * p[static_cast<std::size_t>(j - 1)];
            mass += next[static_cast<std::size_t>(j)];
        }
        next[0] = std::max(0.0, 1.0 - mass);
        std::swap(p, next);
    }
    for (std::size_t i = 0; i < model.classes.size(); ++i)
        est.response_times[i] = r_disp + model.classes[i].demand() / dbar * r_func;
    est.throughput = x;
    est.iterations = k;
    return est;
}

}  // namespace

PerfEstimate solve(const LayeredModel& model, const SolveOptions& options) {
    if (model.classes.empty()) throw InvalidArgument("layered model has no function classes");
    if (model.offered_load() >= model.cores)
        throw ModelError(fmt::format("function station saturated: offered load {:.4g} >= {} cores",
                                     model.offered_load(), model.cores));
    switch (options.method) {
        case MvaMethod::exact:
            return solve_exact(model);
        case MvaMethod::schweitzer:
            break;
    }
    return solve_schweitzer(model, options);
}

std::vector<double> function_utilization(const WorkloadSpec& workload, std::span<const double> cold_probs) {
    if (cold_probs.size() != workload.size())
        throw InvalidArgument(fmt::format("expected {} cold probabilities, got {}", workload.size(),
                                          cold_probs.size()));
    std::vector<double> rho(workload.size());
    for (std::size_t i = 0; i < workload.size(); ++i) {
        const auto& f = workload.functions[i];
        rho[i] = std::min(1.0, workload.arrival_rate(i) * (cold_probs[i] / f.alpha + 1.0 / f.mu));
    }
    return rho;
}

void write_model(std::ostream& out, const LayeredModel& model) {
    out << "# layered model: reference task, dispatcher, cold and warm pools\n";
    out << fmt::format("processor ClientCPU    scheduling=delay\n");
    out << fmt::format("processor DispatchCPU  scheduling=ps multiplicity=1\n");
    out << fmt::format("processor FunctionCPU  scheduling=ps multiplicity={}\n", model.cores);
    out << fmt::format("task Client reference on ClientCPU multiplicity={} think_time={:.6g}\n", model.clients,
                       model.think_time);
    out << "  entry ClientCycle demand=0\n";
    for (std::size_t i = 0; i < model.classes.size(); ++i)
        out << fmt::format("    call Dispatch_{} mean={:.6g}\n", i, model.classes[i].visit_probability);
    out << "task Dispatcher on DispatchCPU multiplicity=inf\n";
    for (std::size_t i = 0; i < model.classes.size(); ++i) {
        const auto& c = model.classes[i];
        out << fmt::format("  entry Dispatch_{} demand={:.6g}\n", i, model.dispatcher_demand);
        out << fmt::format("    call Cold_{} mean={:.6g}\n", i, c.cold_probability);
        out << fmt::format("    call Warm_{} mean={:.6g}\n", i, 1.0 - c.cold_probability);
    }
    out << "task ColdPool on FunctionCPU multiplicity=inf\n";
    for (std::size_t i = 0; i < model.classes.size(); ++i) {
        out << fmt::format("  entry Cold_{} demand={:.6g}\n", i, model.classes[i].cold_demand);
        out << fmt::format("    call Warm_{} mean=1\n", i);
    }
    out << "task WarmPool on FunctionCPU multiplicity=inf\n";
    for (std::size_t i = 0; i < model.classes.size(); ++i)
        out << fmt::format("  entry Warm_{} demand={:.6g}\n", i, model.classes[i].warm_demand);
}

}  // namespace faasplan::perf
