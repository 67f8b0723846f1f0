#include "faasplan/cli/experiment.hpp"

#include <array>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "faasplan/core/errors.hpp"
#include "faasplan/core/random.hpp"

namespace faasplan::cli {

namespace {

void check_range(const Range& r, const char* name, bool positive) {
    if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
        throw InvalidArgument(fmt::format("grid range {} is not a finite interval [{}, {}]", name, r.lo, r.hi));
    if (positive && !(r.lo > 0.0))
        throw InvalidArgument(fmt::format("grid range {} must be positive (lower bound {})", name, r.lo));
}

}  // namespace

void ExperimentGrid::validate() const {
    if (n_values.empty() || eta_values.empty() || lambda_values.empty())
        throw InvalidArgument("grid needs at least one value for N, eta and lambda");
    for (auto n : n_values)
        if (n < 1) throw InvalidArgument("grid N values must be >= 1");
    for (double e : eta_values)
        if (!(e >= 0.0)) throw InvalidArgument(fmt::format("grid eta {} must be >= 0", e));
    for (double l : lambda_values)
        if (!(l > 0.0)) throw InvalidArgument(fmt::format("grid lambda {} must be > 0", l));
    check_range(mu, "mu", true);
    check_range(alpha, "alpha", true);
    check_range(beta, "beta", true);
    check_range(theta_on, "theta_on", true);
    if (!(idle_fraction_mean > 0.0 && idle_fraction_mean < 1.0))
        throw InvalidArgument("idle_fraction_mean must lie in (0,1)");
    if (!(idle_fraction_sigma > 0.0)) throw InvalidArgument("idle_fraction_sigma must be > 0");
    if (replications < 1) throw InvalidArgument("replications must be >= 1");
    if (1.0 / mu.lo > w_star / 2.0 + 1e-12)
        throw InvalidArgument(fmt::format("mean service time up to {:.4g}s exceeds half the SLA ({:.4g}s)",
                                          1.0 / mu.lo, w_star));
}

Experiment make_experiment(const ExperimentGrid& grid, std::size_t n, double eta, double lambda, int rep) {
    const std::array<std::uint64_t, 4> coords{n, std::bit_cast<std::uint64_t>(eta),
                                              std::bit_cast<std::uint64_t>(lambda), static_cast<std::uint64_t>(rep)};
    Experiment e;
    e.n = n;
    e.eta = eta;
    e.lambda = lambda;
    e.rep = rep;
    e.seed = derive_seed(grid.master_seed, coords);

    auto draws = make_stream(e.seed, StreamId::experiment);
    auto fractions = make_stream(e.seed, StreamId::idle_fraction);
    std::vector<FunctionProfile> fs(n);
    e.idle_times.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& f = fs[i];
        f.mu = sample_uniform(grid.mu.lo, grid.mu.hi, draws);
        f.alpha = sample_uniform(grid.alpha.lo, grid.alpha.hi, draws);
        e.idle_times[i] = 1.0 / sample_uniform(grid.beta.lo, grid.beta.hi, draws);
        f.theta_on = sample_uniform(grid.theta_on.lo, grid.theta_on.hi, draws);
        f.theta_off = f.theta_on * sample_lognormal_fraction(grid.idle_fraction_mean, grid.idle_fraction_sigma,
                                                            fractions);
    }
    e.workload = make_zipf_workload(lambda, eta, std::move(fs));
    return e;
}

std::vector<Experiment> gen_experiments(const ExperimentGrid& grid) {
    grid.validate();
    std::vector<Experiment> out;
    out.reserve(grid.cell_count() * static_cast<std::size_t>(grid.replications));
    for (auto n : grid.n_values)
        for (double eta : grid.eta_values)
            for (double lambda : grid.lambda_values)
                for (int rep = 0; rep < grid.replications; ++rep) out.push_back(make_experiment(grid, n, eta, lambda, rep));
    return out;
}

}  // namespace faasplan::cli
