#pragma once

#include "faasplan/core/types.hpp"

namespace faasplan::ttl {

/// Target probability that a request finds its function memory-resident.
class HitRateTarget {
public:
    explicit HitRateTarget(double target);
    [[nodiscard]] double value() const noexcept { return target_; }

private:
    double target_;
};

/// h = 1 - exp(-lambda * t) for a TTL that resets on every request under
/// Poisson arrivals.
double hit_rate(double lambda_i, double t_i);

/// Inverse of hit_rate: t = -ln(1 - h) / lambda. Throws Infeasible when
/// lambda_i == 0 since no finite idle time reaches the target.
double idle_time_for_hit_rate(double lambda_i, HitRateTarget h);

/// Sum of hit rates of all functions sharing one idle time t.
double expected_resident_count(const WorkloadSpec& workload, double t);

struct CharacteristicTimeOptions {
    double residual_tolerance = 1e-9;
    int max_iterations = 400;
};

/// Single idle time T* with sum_i (1 - exp(-lambda_i T*)) = m_target,
/// found by bisection after doubling an upper bracket.
double characteristic_time(const WorkloadSpec& workload, double m_target, CharacteristicTimeOptions options = {});

}  // namespace faasplan::ttl
