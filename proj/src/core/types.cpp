#include "faasplan/core/types.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "faasplan/core/errors.hpp"
#include "faasplan/core/random.hpp"

namespace faasplan {

void FunctionProfile::validate() const {
    if (!(mu > 0.0)) throw InvalidArgument(fmt::format("function {}: mu must be > 0 (got {})", id, mu));
    if (!(alpha > 0.0)) throw InvalidArgument(fmt::format("function {}: alpha must be > 0 (got {})", id, alpha));
    if (!(theta_on > 0.0))
        throw InvalidArgument(fmt::format("function {}: theta_on must be > 0 (got {})", id, theta_on));
    if (!(theta_off >= 0.0 && theta_off <= theta_on))
        throw InvalidArgument(
            fmt::format("function {}: theta_off must lie in [0, theta_on] (got {})", id, theta_off));
    if (!(popularity >= 0.0 && popularity <= 1.0))
        throw InvalidArgument(fmt::format("function {}: popularity must lie in [0,1] (got {})", id, popularity));
}

std::vector<double> WorkloadSpec::arrival_rates() const {
    std::vector<double> rates(functions.size());
    for (std::size_t i = 0; i < functions.size(); ++i) rates[i] = lambda_total * functions[i].popularity;
    return rates;
}

double WorkloadSpec::total_execution_memory() const {
    return std::accumulate(functions.begin(), functions.end(), 0.0,
                           [](double acc, const FunctionProfile& f) { return acc + f.theta_on; });
}

void WorkloadSpec::validate() const {
    if (!(lambda_total > 0.0)) throw InvalidArgument(fmt::format("lambda_total must be > 0 (got {})", lambda_total));
    if (!(eta >= 0.0)) throw InvalidArgument(fmt::format("eta must be >= 0 (got {})", eta));
    if (functions.empty()) throw InvalidArgument("workload has no functions");
    double sum = 0.0;
    for (const auto& f : functions) {
        f.validate();
        sum += f.popularity;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw InvalidArgument(fmt::format("popularities sum to {:.12g}, expected 1", sum));
}

void SlaSpec::validate() const {
    if (!(w_star > 0.0)) throw InvalidArgument(fmt::format("w_star must be > 0 (got {})", w_star));
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw InvalidArgument(fmt::format("epsilon must lie in (0,1) (got {})", epsilon));
}

void PlatformSpec::validate() const {
    if (core_options.empty()) throw InvalidArgument("core_options is empty");
    if (c_max < 1) throw InvalidArgument(fmt::format("c_max must be >= 1 (got {})", c_max));
    for (int c : core_options) {
        if (c < 1 || c > c_max)
            throw InvalidArgument(fmt::format("core option {} outside [1, c_max={}]", c, c_max));
    }
    if (!(ram_module_gb > 0.0)) throw InvalidArgument("ram_module_gb must be > 0");
    if (!(tau_c >= 0.0 && tau_m >= 0.0)) throw InvalidArgument("unit costs must be >= 0");
    if (!(omega_a >= 0.0 && omega_b >= 0.0) || std::abs(omega_a + omega_b - 1.0) > 1e-9)
        throw InvalidArgument(fmt::format("omega_a + omega_b must equal 1 with both >= 0 (got {}, {})", omega_a,
                                          omega_b));
    if (normalization == CostNormalization::fixed_reference &&
        !(reference_memory_cost > 0.0 && reference_cpu_cost > 0.0))
        throw InvalidArgument("fixed reference costs must be > 0");
}

WorkloadSpec make_zipf_workload(double lambda_total, double eta, std::vector<FunctionProfile> functions) {
    const auto p = zipf_popularities(functions.size(), eta);
    for (std::size_t i = 0; i < functions.size(); ++i) {
        functions[i].id = i;
        functions[i].popularity = p[i];
    }
    WorkloadSpec w{lambda_total, eta, std::move(functions)};
    w.validate();
    return w;
}

}  // namespace faasplan
