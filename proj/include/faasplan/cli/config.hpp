#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faasplan/cli/experiment.hpp"
#include "faasplan/core/types.hpp"
#include "faasplan/perf/layered_model.hpp"
#include "faasplan/planner/planner.hpp"
#include "faasplan/sim/simulator.hpp"

namespace faasplan::cli {

/// Simulation settings that are not part of SimConfig proper: the horizon
/// can be given directly or derived from a per-function sample target.
struct SimSettings {
    int cores = 4;                     // used when no plan supplies a core count
    std::optional<double> horizon;     // absolute end time, seconds
    std::optional<double> warmup;      // default: twice the largest idle time
    double samples = 10000;            // expected arrivals at the rarest function
    double verify_samples = 10000;     // same, for plan verification runs
    double max_arrivals = 1e8;         // cap on total arrivals per run
    int replications = 1;
    std::uint64_t seed = 1;
    double dispatcher_delay = 0.001;
    sim::CpuDiscipline cpu = sim::CpuDiscipline::processor_sharing;
    sim::ColdStartDistribution cold_start = sim::ColdStartDistribution::exponential;
    bool loading_uses_cpu = true;
};

struct Config {
    std::optional<WorkloadSpec> workload;
    std::vector<double> idle_times;  // per function when every entry sets idle_time
    SlaSpec sla;
    bool epsilon_given = false;
    PlatformSpec platform;
    planner::PlannerOptions planner;
    std::vector<double> hit_targets{0.80, 0.95};
    SimSettings sim;
    std::optional<ExperimentGrid> grid;

    [[nodiscard]] const WorkloadSpec& require_workload() const;
    [[nodiscard]] const ExperimentGrid& require_grid() const;
    [[nodiscard]] bool has_idle_times() const { return workload && idle_times.size() == workload->size(); }

    /// SLA for a given aggregate rate: epsilon follows the rate unless the
    /// document fixed it.
    [[nodiscard]] SlaSpec sla_for(double lambda_total) const;

    /// SimConfig for the configured workload and idle times, or for the
    /// given workload/idle times/cores.
    [[nodiscard]] sim::SimConfig sim_config(const WorkloadSpec& workload, const std::vector<double>& idle_times,
                                            int cores, double samples) const;
};

/// Maps JSON pointers ("/functions/2/mu") to the 1-based line where the
/// value starts. Built by a small scanner over the raw text.
class SourceMap {
public:
    explicit SourceMap(std::string_view text);
    [[nodiscard]] int line_of(const std::string& pointer) const;
    [[nodiscard]] static int line_at_offset(std::string_view text, std::size_t offset);

private:
    std::map<std::string, int> lines_;
};

Config parse_config(std::string_view text, const std::string& origin = "<config>");
Config load_config(const std::filesystem::path& path);

}  // namespace faasplan::cli
