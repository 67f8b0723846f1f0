#pragma once

#include <cstddef>
#include <vector>

namespace faasplan {

/// Per-function parameters. Rates are in 1/s, memory in GB.
struct FunctionProfile {
    std::size_t id = 0;
    double mu = 1.0;          // service rate
    double alpha = 1.0;       // cold-start rate (1 / mean cold-start time)
    double theta_on = 1.0;    // memory while executing or loading
    double theta_off = 0.0;   // memory while resident but idle
    double popularity = 1.0;  // probability that a request targets this function

    void validate() const;
};

/// Open Poisson workload over a set of functions.
struct WorkloadSpec {
    double lambda_total = 1.0;  // aggregate arrival rate
    double eta = 0.0;           // Zipf exponent the popularities were drawn from
    std::vector<FunctionProfile> functions;

    [[nodiscard]] std::size_t size() const noexcept { return functions.size(); }
    [[nodiscard]] double arrival_rate(std::size_t i) const { return lambda_total * functions.at(i).popularity; }
    [[nodiscard]] std::vector<double> arrival_rates() const;
    [[nodiscard]] double total_execution_memory() const;

    /// Checks every profile plus the popularity normalisation.
    void validate() const;
};

/// Response-time limit and memory-overflow bound.
struct SlaSpec {
    double w_star = 2.0;
    double epsilon = 0.05;

    void validate() const;
};

enum class CostNormalization { max_over_candidates, fixed_reference };

struct PlatformSpec {
    std::vector<int> core_options{1, 2, 4, 8, 16, 32};
    int c_max = 32;
    double ram_module_gb = 8.0;
    double tau_c = 1.0;
    double tau_m = 1.0;
    double omega_a = 0.5;
    double omega_b = 0.5;
    CostNormalization normalization = CostNormalization::max_over_candidates;
    // Only used with CostNormalization::fixed_reference.
    double reference_memory_cost = 1.0;
    double reference_cpu_cost = 1.0;

    void validate() const;
};

/// Builds a workload whose popularities follow Zipf(eta) in declaration order.
/// Existing popularity fields are overwritten.
WorkloadSpec make_zipf_workload(double lambda_total, double eta, std::vector<FunctionProfile> functions);

}  // namespace faasplan
