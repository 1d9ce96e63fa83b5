#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace gaitgraph {

// Every stochastic step (initialization, sampling, augmentation) draws from
// an explicitly threaded engine so runs replay bit-exactly from a seed.
using Rng = std::mt19937_64;

inline double normal(Rng& rng, double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(rng);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

inline std::string rng_state(const Rng& rng) {
    std::ostringstream out;
    out << rng;
    return out.str();
}

inline void restore_rng_state(Rng& rng, const std::string& state) {
    std::istringstream in(state);
    in >> rng;
}

}  // namespace gaitgraph
