#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace faasplan {

using Rng = std::mt19937_64;

/// Purposes that get their own random stream. Splitting streams keeps one
/// knob from perturbing the draws of another.
enum class StreamId : std::uint32_t {
    arrivals = 1,
    function_choice = 2,
    service = 3,
    cold_start = 4,
    experiment = 5,
    idle_fraction = 6,
};

/// Deterministic stream for (seed, purpose, substream).
Rng make_stream(std::uint64_t seed, StreamId id, std::uint64_t substream = 0);

/// Derives a child seed from a parent seed and a list of coordinates.
std::uint64_t derive_seed(std::uint64_t parent, std::span<const std::uint64_t> coords);

/// Normalised Zipf weights p_i = i^-eta / sum_j j^-eta for ranks 1..n.
std::vector<double> zipf_popularities(std::size_t n, double eta);

/// Inverse transform of a uniform draw u in [0,1).
double exponential_from_uniform(double rate, double u);

double sample_exponential(double rate, Rng& rng);

/// Raw log-normal draw exp(location + sigma * Z).
double sample_lognormal(double location, double sigma, Rng& rng);

/// Location parameter giving a log-normal with the requested mean.
double lognormal_location_for_mean(double mean, double sigma);

/// Log-normal fraction with the given mean, clamped to (0, 1].
double sample_lognormal_fraction(double desired_mean, double sigma, Rng& rng);

double sample_uniform(double lo, double hi, Rng& rng);

}  // namespace faasplan
