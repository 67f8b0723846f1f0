#include "faasplan/core/random.hpp"

#include <cmath>

#include <fmt/format.h>

#include "faasplan/core/errors.hpp"

namespace faasplan {

namespace {

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

}  // namespace

Rng make_stream(std::uint64_t seed, StreamId id, std::uint64_t substream) {
    std::seed_seq seq{lo32(seed), hi32(seed), static_cast<std::uint32_t>(id), lo32(substream), hi32(substream)};
    return Rng(seq);
}

std::uint64_t derive_seed(std::uint64_t parent, std::span<const std::uint64_t> coords) {
    std::vector<std::uint32_t> words{lo32(parent), hi32(parent), 0x9e3779b9u};
    for (auto c : coords) {
        words.push_back(lo32(c));
        words.push_back(hi32(c));
    }
    std::seed_seq seq(words.begin(), words.end());
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

std::vector<double> zipf_popularities(std::size_t n, double eta) {
    if (n == 0) throw InvalidArgument("zipf_popularities: n must be >= 1");
    if (!(eta >= 0.0)) throw InvalidArgument(fmt::format("zipf_popularities: eta must be >= 0 (got {})", eta));
    std::vector<double> p(n);
    double norm = 0.0;
    // Summing smallest terms first keeps the normalisation accurate for large n.
    for (std::size_t r = n; r >= 1; --r) {
        p[r - 1] = std::pow(static_cast<double>(r), -eta);
        norm += p[r - 1];
    }
    for (auto& v : p) v /= norm;
    return p;
}

double exponential_from_uniform(double rate, double u) {
    if (!(rate > 0.0)) throw InvalidArgument(fmt::format("exponential rate must be > 0 (got {})", rate));
    return -std::log1p(-u) / rate;
}

double sample_exponential(double rate, Rng& rng) {
    if (!(rate > 0.0)) throw InvalidArgument(fmt::format("exponential rate must be > 0 (got {})", rate));
    double u = std::generate_canonical<double, 53>(rng);
    while (u >= 1.0) u = std::generate_canonical<double, 53>(rng);  // libstdc++ can round up to 1
    return exponential_from_uniform(rate, u);
}

double sample_lognormal(double location, double sigma, Rng& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    return std::exp(location + sigma * z(rng));
}

double lognormal_location_for_mean(double mean, double sigma) { return std::log(mean) - 0.5 * sigma * sigma; }

double sample_lognormal_fraction(double desired_mean, double sigma, Rng& rng) {
    if (!(desired_mean > 0.0 && desired_mean < 1.0))
        throw InvalidArgument(fmt::format("log-normal fraction mean must lie in (0,1) (got {})", desired_mean));
    if (!(sigma > 0.0)) throw InvalidArgument(fmt::format("log-normal sigma must be > 0 (got {})", sigma));
    const double x = sample_lognormal(lognormal_location_for_mean(desired_mean, sigma), sigma, rng);
    return std::min(x, 1.0);
}

double sample_uniform(double lo, double hi, Rng& rng) {
    if (lo == hi) return lo;
    return lo + (hi - lo) * std::generate_canonical<double, 53>(rng);
}

}  // namespace faasplan
