#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "faasplan/core/types.hpp"

namespace faasplan::perf {

/// One dispatcher entry (one function). Cold visits pay the cold-pool
/// demand and are always followed by a warm visit.
struct FunctionClass {
    double visit_probability = 0.0;  // call mean Client -> Dispatcher entry
    double cold_probability = 0.0;   // call mean Dispatcher entry -> ColdPool entry
    double cold_demand = 0.0;        // 1 / alpha
    double warm_demand = 0.0;        // 1 / mu
    double arrival_rate = 0.0;       // lambda_total * visit_probability

    /// Expected function-station demand per request: q/alpha + 1/mu.
    [[nodiscard]] double demand() const noexcept { return cold_probability * cold_demand + warm_demand; }
};

/// Closed network standing in for the open workload: K clients with think
/// time Z = K / lambda, a single-core dispatcher, and a C-core function
/// station shared by cold and warm jobs. Thread pools are unbounded.
struct LayeredModel {
    int clients = 1;
    double think_time = 0.0;
    double dispatcher_demand = 0.001;
    int cores = 1;
    double lambda_total = 0.0;
    std::vector<FunctionClass> classes;

    [[nodiscard]] double offered_load() const;  // sum_i lambda_i D_i
    [[nodiscard]] double mean_demand() const;   // sum_i p_i D_i
};

/// Default closed population: ceil(100 * lambda * W*).
int default_clients(double lambda_total, double w_star);

/// Throws ModelError when the offered load saturates a station.
LayeredModel build_model(const WorkloadSpec& workload, std::span<const double> cold_probs, int cores, int k_clients,
                         double d_disp = 0.001);

struct PerfEstimate {
    std::vector<double> response_times;
    std::vector<double> cold_probabilities;
    std::vector<double> utilizations;
    double function_station_utilization = 0.0;  // sum_i lambda_i D_i / C
    double dispatcher_utilization = 0.0;        // lambda * d
    double throughput = 0.0;                    // closed-model cycle throughput
    int iterations = 0;
};

enum class MvaMethod {
    schweitzer,  // Bard-Schweitzer fixed point with an Erlang-C multiserver term
    exact,       // exact single-chain recursion with a load-dependent station
};

struct SolveOptions {
    MvaMethod method = MvaMethod::schweitzer;
    double tolerance = 1e-8;  // relative change of every W_i between sweeps
    int max_iterations = 100'000;
};

PerfEstimate solve(const LayeredModel& model, const SolveOptions& options = {});

/// rho_i = min(1, lambda_i (q_i / alpha_i + 1 / mu_i)).
std::vector<double> function_utilization(const WorkloadSpec& workload, std::span<const double> cold_probs);

/// Erlang-C waiting probability for c servers at offered load a (a < c).
double erlang_c(int c, double a);

/// Human-readable model in LQN vocabulary (tasks, entries, demands, calls).
void write_model(std::ostream& out, const LayeredModel& model);

}  // namespace faasplan::perf
