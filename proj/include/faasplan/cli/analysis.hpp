#pragma once

#include <optional>
#include <string>
#include <vector>

#include "faasplan/cli/config.hpp"
#include "faasplan/cli/experiment.hpp"
#include "faasplan/planner/planner.hpp"
#include "faasplan/sim/simulator.hpp"

namespace faasplan::cli {

// ---------------------------------------------------------------------------
// Model-vs-simulation validation

struct ValidationRow {
    std::size_t n = 0;
    double lambda = 0.0;
    double eta = 0.0;
    int rep = 0;
    std::size_t function = 0;
    double w_sim = 0.0;
    double w_model = 0.0;
    double pct_err = 0.0;  // 100 |w_model - w_sim| / w_sim
};

struct ValidationOutcome {
    std::vector<ValidationRow> rows;
    std::string error;  // set when the experiment could not be evaluated
};

/// Simulates the experiment at its own idle times on cfg.sim.cores cores and
/// compares every function with the layered-model prediction.
ValidationOutcome validate_experiment(const Experiment& e, const Config& cfg);

struct ErrorCell {
    std::size_t n = 0;
    double lambda = 0.0;
    std::size_t count = 0;
    double avg = 0.0;
    double p95 = 0.0;
    double max = 0.0;
};

/// avg / 95th percentile / max of pct_err per (N, lambda), pooled over eta
/// and replications. Sorted by (N, lambda).
std::vector<ErrorCell> error_table(const std::vector<ValidationRow>& rows);

// ---------------------------------------------------------------------------
// Plan vs availability baselines

struct ApproachResult {
    std::string name;  // "planned" or "hrNN"
    planner::SizingPlan plan;
    bool simulated = false;
    sim::SimResult sim;
    std::vector<bool> sla_ok;  // simulated W_i <= W*
    double sla_fraction = 0.0;
};

struct Comparison {
    bool planned_feasible = false;
    std::string diagnostic;
    std::vector<ApproachResult> approaches;  // planned first (when feasible), then baselines
};

struct CompareOptions {
    bool simulate = true;
    bool record_trace = false;
    std::uint64_t seed = 1;
};

Comparison compare_workload(const WorkloadSpec& workload, const Config& cfg, const CompareOptions& options);

struct CapacityCell {
    std::size_t n = 0;
    double lambda = 0.0;
    std::vector<std::string> approaches;
    std::vector<double> capacity_gb;  // mean over eta and replications
    std::size_t count = 0;
};

/// Module-rounded capacities averaged per (N, lambda) over eta and
/// replications; experiments without a feasible plan are skipped.
std::vector<CapacityCell> capacity_table(const std::vector<Experiment>& experiments,
                                         const std::vector<Comparison>& results);

// ---------------------------------------------------------------------------
// Statistics helpers

/// Linear-interpolated percentile, p in [0, 100].
double percentile(std::vector<double> values, double p);

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either side is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace faasplan::cli
