#pragma once

#include <span>

#include "faasplan/core/types.hpp"

namespace faasplan::capacity {

struct MemoryEstimate {
    double m_avg = 0.0;           // expected consumption
    double e_u = 0.0;             // expected execution memory E[U]
    double kappa = 1.0;           // Markov headroom, 1 / epsilon
    double m_max = 0.0;           // consumption bound used for sizing
    double capacity_gb = 0.0;     // module-rounded suggestion
    double upper_bound_gb = 0.0;  // sum of execution footprints
};

/// m = sum_i h_i (rho_i theta_on + (1 - rho_i) theta_off).
double average_memory(std::span<const double> hit_rates, std::span<const double> utilizations,
                      std::span<const FunctionProfile> profiles);

/// E[U] = sum_i h_i rho_i theta_on.
double expected_execution_memory(std::span<const double> hit_rates, std::span<const double> utilizations,
                                 std::span<const FunctionProfile> profiles);

struct MaxMemory {
    double kappa = 1.0;
    double m_max = 0.0;
};

/// kappa = 1/epsilon so that Markov's inequality bounds P(U >= kappa E[U])
/// by epsilon; m_max = sum_i h_i (kappa rho_i theta_on + (1 - rho_i) theta_off).
MaxMemory max_memory(std::span<const double> hit_rates, std::span<const double> utilizations,
                     std::span<const FunctionProfile> profiles, double epsilon);

/// ceil(min(m_max, sum theta_on) / module) * module.
double suggest_capacity(double m_max, std::span<const FunctionProfile> profiles, double ram_module_gb);

/// Full estimate: average, headroom, bound, rounded capacity.
MemoryEstimate estimate_memory(std::span<const double> hit_rates, std::span<const double> utilizations,
                               std::span<const FunctionProfile> profiles, double epsilon, double ram_module_gb);

/// Cache-style estimate that ignores the idle/execution split:
/// m = sum_i h_i theta_on. Used by the availability baseline.
double resident_memory(std::span<const double> hit_rates, std::span<const FunctionProfile> profiles);

/// Default epsilon by aggregate arrival rate: 0.05 below 0.8 req/s, 0.1 otherwise.
double default_epsilon(double lambda_total);

}  // namespace faasplan::capacity
