#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "faasplan/core/types.hpp"

// Single-function cold-start chain (M/M/1 with setup and a delayed-off timer
// whose duration is Erlang-k). Level-phase layout:
//
//   level 0  : index 0 = (0,0) cold and empty,
//              index p = (1,0)_p idle and resident, p = 1..k
//   level j>0: index 0 = (0,j) cold / loading with j jobs,
//              index 1 = (1,j) warm with j jobs
//
// Levels j >= 1 share the same blocks, so the chain is a level-independent QBD
// above the boundary.
namespace faasplan::ctmc {

using Matrix = Eigen::MatrixXd;
using Matrix2 = Eigen::Matrix2d;
using SparseMatrix = Eigen::SparseMatrix<double>;

class QbdChain {
public:
    QbdChain(double lambda, double mu, double alpha, double beta, int phases);

    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] double mu() const noexcept { return mu_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] int phases() const noexcept { return phases_; }
    [[nodiscard]] bool stable() const noexcept { return lambda_ < mu_; }

    [[nodiscard]] std::size_t boundary_size() const noexcept { return static_cast<std::size_t>(phases_) + 1; }
    /// States kept when the chain is cut after `levels` repeating levels.
    [[nodiscard]] std::size_t state_count(std::size_t levels) const noexcept {
        return boundary_size() + 2 * levels;
    }

    // Blocks. Bxy maps level x to level y within the boundary; A0/A1/A2 are
    // the up/local/down blocks of the repeating part.
    [[nodiscard]] Matrix boundary_local() const;  // B00
    [[nodiscard]] Matrix boundary_up() const;     // B01, (k+1) x 2
    [[nodiscard]] Matrix level1_down() const;     // B10, 2 x (k+1)
    [[nodiscard]] Matrix2 up() const;             // A0
    [[nodiscard]] Matrix2 local() const;          // A1
    [[nodiscard]] Matrix2 down() const;           // A2

    /// Generator assembled from the blocks and cut after `levels` levels
    /// (arrivals at the last level are dropped).
    [[nodiscard]] SparseMatrix truncated_generator(std::size_t levels) const;

private:
    double lambda_;
    double mu_;
    double alpha_;
    double beta_;
    int phases_;
};

/// Builds the chain for one function at idle time t_i (beta = 1/t_i).
QbdChain build_chain(const FunctionProfile& profile, double lambda_i, double t_i, int phases = 50);

/// Stationary probabilities. Levels beyond `levels.size()` are summarised by
/// `tail`, the exact per-phase mass of all remaining levels.
struct StationaryDistribution {
    std::vector<double> boundary;               // size k + 1
    std::vector<std::array<double, 2>> levels;  // levels[j-1] = (pi_0j, pi_1j)
    std::array<double, 2> tail{0.0, 0.0};
    double decay_rate = 0.0;  // spectral radius of R (0 for oracle solutions)

    [[nodiscard]] double total_mass() const;
    [[nodiscard]] double cold_mass() const;
    /// Dense vector over the first `levels` levels (boundary first).
    [[nodiscard]] Eigen::VectorXd dense(std::size_t levels) const;
};

struct SolverOptions {
    double g_tolerance = 1e-14;      // logarithmic reduction stopping rule on 1 - G1
    int max_reduction_steps = 64;
    double fixed_point_tolerance = 1e-12;
    int max_fixed_point_steps = 2'000'000;
    double stored_level_tolerance = 1e-16;  // stop storing levels once a level's mass is below this
    std::size_t max_stored_levels = 200'000;
};

struct RateMatrixResult {
    Matrix2 r;
    int steps = 0;
    bool used_fallback = false;
};

/// Minimal non-negative solution of A0 + R A1 + R^2 A2 = 0.
RateMatrixResult solve_rate_matrix(const QbdChain& chain, const SolverOptions& options = {});

/// Matrix-geometric solution with the boundary solved from the censored
/// level-0/level-1 system.
StationaryDistribution solve_stationary(const QbdChain& chain, const SolverOptions& options = {});

/// Sum of pi_0j over all j including (0,0): the probability that an arrival
/// finds the function not resident (PASTA).
double cold_start_probability(const StationaryDistribution& dist);

/// Convenience: build, solve, and extract the cold-start probability.
double cold_start_probability(const FunctionProfile& profile, double lambda_i, double t_i, int phases = 50);

/// Direct linear solve of pi Q = 0, sum(pi) = 1 on the chain cut at
/// `max_level`. The generator is enumerated from the transition rules, not
/// from the QBD blocks.
StationaryDistribution truncation_oracle(const QbdChain& chain, std::size_t max_level);

struct CertifiedOracle {
    StationaryDistribution distribution;
    std::size_t max_level = 0;
    double last_change = 0.0;
};

/// Doubles max_level from `start_level` until the cold-start probability
/// changes by less than `tolerance`.
CertifiedOracle certified_truncation_oracle(const QbdChain& chain, std::size_t start_level = 200,
                                            double tolerance = 1e-10, std::size_t level_cap = 1u << 16);

/// Total-variation distance; tails are compared as one aggregated state.
double total_variation(const StationaryDistribution& a, const StationaryDistribution& b);

/// Infinity norm of pi Q on the chain cut after the stored levels.
double residual_norm(const QbdChain& chain, const StationaryDistribution& dist);

/// Writes `state,level,phase,probability` rows.
void write_state_csv(std::ostream& out, const StationaryDistribution& dist);

}  // namespace faasplan::ctmc
