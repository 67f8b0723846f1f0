#include "faasplan/capacity/memory.hpp"

#include <cmath>

#include <fmt/format.h>

#include "faasplan/core/errors.hpp"

namespace faasplan::capacity {

namespace {

void check_lengths(std::size_t h, std::size_t rho, std::size_t profiles) {
    if (h != profiles || rho != profiles)
        throw InvalidArgument(fmt::format("length mismatch: {} hit rates, {} utilisations, {} profiles", h, rho,
                                          profiles));
}

void check_unit(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument(fmt::format("{} value {} outside [0,1]", what, x));
}

double sum_execution_memory(std::span<const FunctionProfile> profiles) {
    double s = 0.0;
    for (const auto& f : profiles) s += f.theta_on;
    return s;
}

}  // namespace

double average_memory(std::span<const double> hit_rates, std::span<const double> utilizations,
                      std::span<const FunctionProfile> profiles) {
    check_lengths(hit_rates.size(), utilizations.size(), profiles.size());
    check_unit(hit_rates, "hit rate");
    check_unit(utilizations, "utilisation");
    double m = 0.0;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const double rho = utilizations[i];
        m += hit_rates[i] * (rho * profiles[i].theta_on + (1.0 - rho) * profiles[i].theta_off);
    }
    return m;
}

double expected_execution_memory(std::span<const double> hit_rates, std::span<const double> utilizations,
                                 std::span<const FunctionProfile> profiles) {
    check_lengths(hit_rates.size(), utilizations.size(), profiles.size());
    double e = 0.0;
    for (std::size_t i = 0; i < profiles.size(); ++i) e += hit_rates[i] * utilizations[i] * profiles[i].theta_on;
    return e;
}

MaxMemory max_memory(std::span<const double> hit_rates, std::span<const double> utilizations,
                     std::span<const FunctionProfile> profiles, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw InvalidArgument(fmt::format("epsilon must lie in (0,1) (got {})", epsilon));
    check_lengths(hit_rates.size(), utilizations.size(), profiles.size());
    check_unit(hit_rates, "hit rate");
    check_unit(utilizations, "utilisation");
    MaxMemory out;
    out.kappa = 1.0 / epsilon;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const double rho = utilizations[i];
        out.m_max += hit_rates[i] * (out.kappa * rho * profiles[i].theta_on + (1.0 - rho) * profiles[i].theta_off);
    }
    return out;
}

double suggest_capacity(double m_max, std::span<const FunctionProfile> profiles, double ram_module_gb) {
    if (!(m_max >= 0.0)) throw InvalidArgument(fmt::format("m_max must be >= 0 (got {})", m_max));
    if (!(ram_module_gb > 0.0)) throw InvalidArgument("ram_module_gb must be > 0");
    const double bound = std::min(m_max, sum_execution_memory(profiles));
    // Values within 1e-12 relative of a module boundary are treated as on it.
    const double modules = std::ceil(bound / ram_module_gb * (1.0 - 1e-12));
    return modules * ram_module_gb;
}

MemoryEstimate estimate_memory(std::span<const double> hit_rates, std::span<const double> utilizations,
                               std::span<const FunctionProfile> profiles, double epsilon, double ram_module_gb) {
    MemoryEstimate est;
    est.m_avg = average_memory(hit_rates, utilizations, profiles);
    est.e_u = expected_execution_memory(hit_rates, utilizations, profiles);
    const auto mm = max_memory(hit_rates, utilizations, profiles, epsilon);
    est.kappa = mm.kappa;
    est.m_max = mm.m_max;
    est.upper_bound_gb = sum_execution_memory(profiles);
    est.capacity_gb = suggest_capacity(est.m_max, profiles, ram_module_gb);
    return est;
}

double resident_memory(std::span<const double> hit_rates, std::span<const FunctionProfile> profiles) {
    if (hit_rates.size() != profiles.size())
        throw InvalidArgument(fmt::format("length mismatch: {} hit rates, {} profiles", hit_rates.size(),
                                          profiles.size()));
    check_unit(hit_rates, "hit rate");
    double m = 0.0;
    for (std::size_t i = 0; i < profiles.size(); ++i) m += hit_rates[i] * profiles[i].theta_on;
    return m;
}

double default_epsilon(double lambda_total) { return lambda_total < 0.8 ? 0.05 : 0.1; }

}  // namespace faasplan::capacity
