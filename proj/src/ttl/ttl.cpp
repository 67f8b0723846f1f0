#include "faasplan/ttl/ttl.hpp"

#include <cmath>

#include <fmt/format.h>

#include "faasplan/core/errors.hpp"

namespace faasplan::ttl {

HitRateTarget::HitRateTarget(double target) : target_(target) {
    if (!(target > 0.0 && target < 1.0))
        throw InvalidArgument(fmt::format("hit-rate target must lie in (0,1) (got {})", target));
}

double hit_rate(double lambda_i, double t_i) {
    if (!(lambda_i >= 0.0) || !(t_i >= 0.0))
        throw InvalidArgument(fmt::format("hit_rate needs non-negative inputs (lambda={}, t={})", lambda_i, t_i));
    return -std::expm1(-lambda_i * t_i);
}

double idle_time_for_hit_rate(double lambda_i, HitRateTarget h) {
    if (lambda_i < 0.0) throw InvalidArgument(fmt::format("arrival rate must be >= 0 (got {})", lambda_i));
    if (lambda_i == 0.0) throw Infeasible("a function with zero arrival rate never hits the cache");
    return -std::log1p(-h.value()) / lambda_i;
}

double expected_resident_count(const WorkloadSpec& workload, double t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < workload.size(); ++i) sum += hit_rate(workload.arrival_rate(i), t);
    return sum;
}

double characteristic_time(const WorkloadSpec& workload, double m_target, CharacteristicTimeOptions options) {
    const auto n = static_cast<double>(workload.size());
    if (!(m_target > 0.0)) throw InvalidArgument(fmt::format("m_target must be > 0 (got {})", m_target));
    if (m_target >= n)
        throw Infeasible(fmt::format("m_target {} is not below the function count {}", m_target, workload.size()));
    std::size_t active = 0;
    for (const auto& f : workload.functions)
        if (f.popularity > 0.0) ++active;
    if (m_target >= static_cast<double>(active))
        throw Infeasible(fmt::format("m_target {} needs more than the {} functions with traffic", m_target, active));

    auto residual = [&](double t) { return expected_resident_count(workload, t) - m_target; };

    double hi = 1.0;
    int doublings = 0;
    while (residual(hi) < 0.0) {
        hi *= 2.0;
        if (++doublings > 2000) throw NumericalError("characteristic_time: could not bracket the root");
    }
    double lo = 0.0;
    for (int it = 0; it < options.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval exhausted at double resolution
        const double r = residual(mid);
        if (std::abs(r) <= options.residual_tolerance) return mid;
        if (r < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double t = 0.5 * (lo + hi);
    if (std::abs(residual(t)) > options.residual_tolerance)
        throw NumericalError(
            fmt::format("characteristic_time: residual {:.3e} above tolerance after bisection", residual(t)));
    return t;
}

}  // namespace faasplan::ttl
