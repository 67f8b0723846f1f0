#pragma once

#include <cstdint>
#include <vector>

#include "faasplan/core/types.hpp"

namespace faasplan::cli {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Randomised experiment design: every (N, eta, lambda) combination gets
/// `replications` independently drawn models.
struct ExperimentGrid {
    std::vector<std::size_t> n_values{16, 32, 64, 96, 128};
    std::vector<double> eta_values{0.6, 1.0, 1.4};
    std::vector<double> lambda_values{0.2, 0.5, 0.8};
    Range mu{1.0, 2.0};
    Range alpha{0.037, 0.5};
    Range beta{0.00083, 0.00556};  // idle time T = 1/beta
    Range theta_on{0.128, 3.008};
    double idle_fraction_mean = 0.2;
    double idle_fraction_sigma = 0.5;
    int replications = 30;
    std::uint64_t master_seed = 1;
    // Mean service time is kept at or below half of this SLA.
    double w_star = 2.0;

    void validate() const;
    [[nodiscard]] std::size_t cell_count() const {
        return n_values.size() * eta_values.size() * lambda_values.size();
    }
};

struct Experiment {
    std::size_t n = 0;
    double eta = 0.0;
    double lambda = 0.0;
    int rep = 0;
    std::uint64_t seed = 0;
    WorkloadSpec workload;
    std::vector<double> idle_times;
};

/// Ordered by (N, eta, lambda, rep). Each experiment's draws depend only on
/// the master seed and its own coordinates.
std::vector<Experiment> gen_experiments(const ExperimentGrid& grid);

/// One experiment at explicit coordinates, identical to the matching entry
/// of gen_experiments when the grid contains them.
Experiment make_experiment(const ExperimentGrid& grid, std::size_t n, double eta, double lambda, int rep);

}  // namespace faasplan::cli
