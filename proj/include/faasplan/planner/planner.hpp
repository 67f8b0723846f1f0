#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "faasplan/capacity/memory.hpp"
#include "faasplan/core/types.hpp"
#include "faasplan/perf/layered_model.hpp"
#include "faasplan/ttl/ttl.hpp"

namespace faasplan::planner {

enum class BaselineMemory {
    resident,     // sum_i h theta_on, the cache-style estimate
    idle_aware,   // same estimator as the optimiser (rho, kappa, theta_off)
};

struct PlannerOptions {
    int erlang_phases = 50;
    int max_iters = 12;
    double m_target_fraction = 0.99;
    // When the characteristic time still violates the SLA, the missing
    // resident mass n (1 - fraction) is divided by 10 up to this many times.
    int max_target_escalations = 6;
    std::optional<int> clients;  // closed population; default ceil(100 lambda W*)
    double dispatcher_demand = 0.001;
    perf::SolveOptions solve{};
    int repair_rounds = 40;
    // Coordinate sweeps (rarest function first) that lower each idle time
    // with the rest held fixed; 0 keeps the bisection result as is.
    int tighten_passes = 1;
    // Relative guard band: branches are searched against W* (1 - sla_margin).
    double sla_margin = 0.05;
    std::size_t branch_workers = 1;
    std::size_t function_workers = 1;
    BaselineMemory baseline_memory = BaselineMemory::resident;
};

/// Per-function bisection intervals (lo, hi] over (0, T*]. Endpoints are
/// held as integer multiples of T* 2^-max_iters so widths are exact.
class SearchState {
public:
    SearchState(std::size_t n, double t_star, int max_iters);

    [[nodiscard]] std::size_t size() const noexcept { return lo_.size(); }
    [[nodiscard]] int iteration() const noexcept { return iteration_; }
    [[nodiscard]] double t_star() const noexcept { return t_star_; }
    /// Interval width shared by every function: T* 2^-iteration.
    [[nodiscard]] double width() const;
    [[nodiscard]] double lo(std::size_t i) const;
    [[nodiscard]] double hi(std::size_t i) const;
    [[nodiscard]] double midpoint(std::size_t i) const;
    /// hi - lo in grid units of T* 2^-max_iters; exact, unlike the difference of the seconds.
    [[nodiscard]] std::uint64_t width_units(std::size_t i) const { return hi_.at(i) - lo_.at(i); }
    [[nodiscard]] int resolution_bits() const noexcept { return bits_; }
    [[nodiscard]] std::vector<double> midpoints() const;
    /// Upper endpoints: the smallest idle time each function was seen to satisfy the SLA at.
    [[nodiscard]] std::vector<double> upper_endpoints() const;
    [[nodiscard]] bool exhausted() const noexcept { return iteration_ >= bits_; }

    /// One bisection step: hi <- mid where feasible[i], else lo <- mid.
    void update(std::span<const bool> feasible);

private:
    double to_seconds(std::uint64_t units) const;

    double t_star_;
    int bits_;
    int iteration_ = 0;
    std::vector<std::uint64_t> lo_;
    std::vector<std::uint64_t> hi_;
};

/// Model evaluation of one idle-time vector on one core count.
struct Evaluation {
    std::vector<double> cold_probabilities;
    perf::PerfEstimate perf;
    bool model_ok = false;
    std::string diagnostic;  // set when the layered model is infeasible

    [[nodiscard]] bool within_sla(std::size_t i, double w_star) const;
    [[nodiscard]] bool all_within_sla(double w_star) const;
    [[nodiscard]] double worst_response() const;
};

Evaluation evaluate(const WorkloadSpec& workload, const SlaSpec& sla, int cores, std::span<const double> idle_times,
                    const PlannerOptions& options = {});

struct RefineResult {
    std::vector<double> idle_times;
    bool feasible = false;
    Evaluation evaluation;
    std::vector<double> widths;  // interval width after each iteration
    std::string diagnostic;
};

/// Bisection refinement of per-function idle times on `cores` cores,
/// starting from (0, t_star]. Model infeasibility marks the branch
/// infeasible instead of throwing.
RefineResult refine_idle_times(const WorkloadSpec& workload, const SlaSpec& sla, int cores, double t_star,
                               const PlannerOptions& options = {});

/// Lowers idle times one function at a time, rarest first, while the whole
/// vector stays within sla.w_star; no-op unless `evaluation` already is.
void tighten_idle_times(const WorkloadSpec& workload, const SlaSpec& sla, int cores, const PlannerOptions& options,
                        std::vector<double>& idle_times, Evaluation& evaluation);

struct InitialIdleTime {
    double t_star = 0.0;
    double m_target = 0.0;
    bool feasible = false;
};

/// Characteristic time at m = fraction * n, pushed closer to n while the
/// resulting idle times violate the SLA.
InitialIdleTime initial_idle_time(const WorkloadSpec& workload, const SlaSpec& sla, int cores,
                                  const PlannerOptions& options = {});

struct SizingPlan {
    int cores = 0;
    double t_star = 0.0;
    std::vector<double> idle_times;
    std::vector<double> response_times;
    std::vector<double> cold_probabilities;
    std::vector<double> hit_rates;
    std::vector<double> utilizations;
    capacity::MemoryEstimate memory;
    double capacity_gb = 0.0;
    double cost_memory = 0.0;  // A = tau_m m_max
    double cost_cpu = 0.0;     // B = tau_c C
    std::optional<double> objective;
    bool feasible = false;
    std::string diagnostic;
};

struct BranchReport {
    int cores = 0;
    bool feasible = false;
    double t_star = 0.0;
    double worst_response = 0.0;
    std::string diagnostic;
    std::optional<SizingPlan> candidate;
};

struct PlanResult {
    bool feasible = false;
    SizingPlan plan;  // meaningful only when feasible
    std::vector<BranchReport> branches;
};

/// Runs the refinement on every core option and keeps the candidate with the
/// smallest weighted normalised cost.
PlanResult plan(const WorkloadSpec& workload, const SlaSpec& sla, const PlatformSpec& platform,
                const PlannerOptions& options = {});

/// Every function gets the idle time that yields `hit_target` under
/// Poisson arrivals. Idle times ignore the SLA; the core count is the
/// smallest option whose model meets it (else the largest stable one).
SizingPlan availability_baseline(const WorkloadSpec& workload, const SlaSpec& sla, const PlatformSpec& platform,
                                 ttl::HitRateTarget hit_target, const PlannerOptions& options = {});

}  // namespace faasplan::planner
