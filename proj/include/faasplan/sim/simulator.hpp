#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "faasplan/core/types.hpp"

namespace faasplan::sim {

enum class CpuDiscipline {
    processor_sharing,  // egalitarian PS, at most C jobs at full rate
    fcfs,               // C servers, one FIFO queue
};

enum class ColdStartDistribution { exponential, deterministic };

struct SimConfig {
    WorkloadSpec workload;
    std::vector<double> idle_times;  // seconds; +inf keeps a function loaded forever
    int cores = 1;
    double horizon = 0.0;  // simulated seconds, arrivals stop here
    double warmup = 0.0;   // excluded from every statistic
    std::uint64_t seed = 1;
    int replications = 1;
    double dispatcher_delay = 0.001;
    CpuDiscipline cpu = CpuDiscipline::processor_sharing;
    ColdStartDistribution cold_start = ColdStartDistribution::exponential;
    // Loading a container is work on the shared CPU. When false, loading is a
    // pure delay that does not compete with executions.
    bool loading_uses_cpu = true;
    bool record_trace = false;

    void validate() const;
};

enum class ContainerStatus : std::uint8_t { unloaded, loading, idle, busy };

struct FunctionStats {
    std::uint64_t arrivals = 0;     // post-warmup arrivals at the function
    std::uint64_t hits = 0;         // of those, found loaded (idle or busy)
    std::uint64_t completions = 0;  // post-warmup arrivals that completed
    double mean_response = 0.0;
    double p95_response = 0.0;
    double response_sd = 0.0;       // per-request standard deviation
    double utilization = 0.0;       // fraction of post-warmup time loading or busy
    double min_slack = 0.0;         // min over requests of response - service work

    [[nodiscard]] double hit_rate() const { return arrivals ? static_cast<double>(hits) / arrivals : 0.0; }
    [[nodiscard]] double response_se() const;
};

struct ReplicationResult {
    std::uint64_t seed = 0;
    std::vector<FunctionStats> functions;
    double mean_memory = 0.0;  // time average over [warmup, horizon]
    double max_memory = 0.0;
    std::uint64_t events = 0;
    std::uint64_t arrivals_total = 0;     // every arrival, warmup included
    std::uint64_t completions_total = 0;
    std::uint64_t in_flight = 0;          // requests still in the system at the horizon
    std::vector<std::pair<double, double>> trace;  // (time, GB) steps, when recorded
};

struct Summary {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation across replications
};

struct SimResult {
    std::vector<ReplicationResult> replications;
    std::vector<Summary> response_time;  // per function
    std::vector<Summary> hit_rate;
    std::vector<Summary> utilization;
    Summary mean_memory;
    Summary max_memory;
};

/// One independent run with the given seed.
ReplicationResult run_replication(const SimConfig& config, std::uint64_t seed);

/// All replications, with seeds derived from config.seed, run on up to
/// `workers` threads. Output does not depend on the worker count.
SimResult simulate(const SimConfig& config, std::size_t workers = 1);

/// Piecewise-constant consumption trace of the first replication, starting
/// at the end of the warmup.
std::vector<std::pair<double, double>> memory_timeseries(const SimConfig& config);

/// Warmup plus enough time for the least popular function to receive
/// `samples` arrivals in expectation, capped at `max_arrivals` total arrivals.
double horizon_for_samples(const WorkloadSpec& workload, double warmup, double samples,
                           double max_arrivals = 1e9);

/// Twice the largest finite idle time, at least `floor` seconds.
double default_warmup(const std::vector<double>& idle_times, double floor = 100.0);

}  // namespace faasplan::sim
