#pragma once

#include "diffsearch/drift.hpp"
#include "diffsearch/measures.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace diffsearch {

struct SimConfig {
    double dt = 1e-4;
    int n_paths = 20000;
    double max_time = 1e4;
    std::uint64_t seed = 1;
    double drift_clip = 1e6;
    /// Resolution of the driving noise; 0 means dt. When set, dt must be a whole
    /// multiple of it, and runs with different dt then share Brownian paths.
    double noise_dt = 0.0;
    /// 0 means std::thread::hardware_concurrency().
    int threads = 0;

    void validate() const;
};

struct McEstimate {
    double mean;
    double std_error;
    /// Paths stopped at max_time; they enter the mean with time max_time.
    int n_censored;
    int n_paths;
};

struct PathRecord {
    int path;
    double target;
    double hit_time;
    bool censored;
};

/// Stream for path `index`: mt19937_64 seeded from splitmix64 of (seed, index).
std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t index);

/// A draw from t: side by p, then the inverse tail on that half.
double sample_target(const TargetDistribution& t, std::mt19937_64& rng);
double sample_target(const TargetDistribution& t, std::uint64_t seed);

/// Euler-Maruyama estimate of E_0 T_a. Records, when given, receive one row per path.
McEstimate simulate_hitting(const Drift& d, double a, const SimConfig& cfg, std::vector<PathRecord>* records = nullptr);
/// Each path first draws its own target from t.
McEstimate simulate_search(const Drift& d, const TargetDistribution& t, const SimConfig& cfg,
                           std::vector<PathRecord>* records = nullptr);

void write_paths_csv(std::ostream& os, const std::vector<PathRecord>& records);

} // namespace diffsearch
