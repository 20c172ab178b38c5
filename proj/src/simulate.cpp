#include "diffsearch/simulate.hpp"

#include "diffsearch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

namespace diffsearch {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform on the open interval (0, 1).
double open_uniform(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

struct PathResult {
    double target;
    double time;
    bool censored;
};

class Stepper {
public:
    Stepper(const Drift& d, const SimConfig& cfg) : d_(d), cfg_(cfg), dom_(d.domain()) {
        clip_ = cfg.drift_clip;
        // keep one drift step shorter than the domain
        if (dom_.finite()) clip_ = std::min(clip_, dom_.width() / cfg.dt);
        const double fine = cfg.noise_dt > 0 ? cfg.noise_dt : cfg.dt;
        substeps_ = static_cast<int>(std::lround(cfg.dt / fine));
        noise_ = std::sqrt(d.diffusion() * fine);
        lo_in_ = std::nextafter(dom_.lo, dom_.hi);
        hi_in_ = std::nextafter(dom_.hi, dom_.lo);
    }

    PathResult run(double a, std::mt19937_64& rng) const {
        if (a == 0.0) return {a, 0.0, false};
        std::normal_distribution<double> normal;
        const double dt = cfg_.dt;
        const long max_steps = static_cast<long>(std::ceil(cfg_.max_time / dt));
        double x = 0.0;
        for (long k = 0; k < max_steps; ++k) {
            const double b = std::clamp(d_(x), -clip_, clip_);
            double z = normal(rng);
            for (int j = 1; j < substeps_; ++j) z += normal(rng);
            double xn = x + b * dt + noise_ * z;
            if ((x - a) * (xn - a) <= 0.0) {
                const double frac = x == xn ? 0.0 : (x - a) / (x - xn);
                return {a, (static_cast<double>(k) + frac) * dt, false};
            }
            // Reflect at the bounds. Overshooting an unreachable bound is mirrored as well,
            // since the drift is undefined outside the domain.
            if (xn <= dom_.lo) xn = 2.0 * dom_.lo - xn;
            if (xn >= dom_.hi) xn = 2.0 * dom_.hi - xn;
            x = std::clamp(xn, lo_in_, hi_in_);
        }
        return {a, cfg_.max_time, true};
    }

private:
    const Drift& d_;
    const SimConfig& cfg_;
    Interval dom_;
    double clip_;
    double noise_;
    int substeps_;
    double lo_in_;
    double hi_in_;
};

void check_target(const Drift& d, double a) {
    const Interval dom = d.domain();
    if (!(a >= dom.lo && a <= dom.hi)) throw Error(ErrorCode::OutOfSupport, "target outside the drift domain");
    if ((a == dom.hi && d.boundaries().right != BoundaryKind::reflecting) ||
        (a == dom.lo && d.boundaries().left != BoundaryKind::reflecting))
        throw Error(ErrorCode::UnreachableTarget, "target sits on an unreachable boundary");
}

template <class PathFn>
McEstimate run_paths(const SimConfig& cfg, PathFn path, std::vector<PathRecord>* records) {
    cfg.validate();
    std::vector<PathResult> results(static_cast<std::size_t>(cfg.n_paths));
    int n_threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::clamp(n_threads, 1, cfg.n_paths);
    auto work = [&](int first, int stride) {
        for (int i = first; i < cfg.n_paths; i += stride) {
            std::mt19937_64 rng = path_engine(cfg.seed, static_cast<std::uint64_t>(i));
            results[static_cast<std::size_t>(i)] = path(rng);
        }
    };
    if (n_threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(work, t, n_threads);
        for (auto& th : pool) th.join();
    }

    // ordered reduction, independent of the schedule
    double sum = 0.0;
    int censored = 0;
    for (const PathResult& r : results) {
        sum += r.time;
        censored += r.censored ? 1 : 0;
    }
    const double n = cfg.n_paths;
    const double mean = sum / n;
    double ss = 0.0;
    for (const PathResult& r : results) ss += (r.time - mean) * (r.time - mean);
    const double se = cfg.n_paths > 1 ? std::sqrt(ss / (n - 1.0) / n) : std::numeric_limits<double>::quiet_NaN();

    if (records) {
        records->clear();
        for (int i = 0; i < cfg.n_paths; ++i) {
            const PathResult& r = results[static_cast<std::size_t>(i)];
            records->push_back({i, r.target, r.time, r.censored});
        }
    }
    return {mean, se, censored, cfg.n_paths};
}

} // namespace

void SimConfig::validate() const {
    if (!(dt > 0) || !std::isfinite(dt)) throw Error(ErrorCode::BadParams, "dt must be positive");
    if (n_paths < 1) throw Error(ErrorCode::BadParams, "need at least one path");
    if (!(max_time > 0)) throw Error(ErrorCode::BadParams, "max_time must be positive");
    if (!(drift_clip > 0)) throw Error(ErrorCode::BadParams, "drift_clip must be positive");
    if (noise_dt < 0 || (noise_dt > 0 && std::fabs(dt / noise_dt - std::round(dt / noise_dt)) > 1e-9 * (dt / noise_dt)))
        throw Error(ErrorCode::BadParams, "dt must be a whole multiple of noise_dt");
}

std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

double sample_target(const TargetDistribution& t, std::mt19937_64& rng) {
    const bool plus = open_uniform(rng) < t.p();
    const HalfSupportMeasure& half = plus ? t.plus() : t.minus();
    const double r = half.quantile(open_uniform(rng));
    return plus ? r : -r;
}

double sample_target(const TargetDistribution& t, std::uint64_t seed) {
    std::mt19937_64 rng = path_engine(seed, 0);
    return sample_target(t, rng);
}

McEstimate simulate_hitting(const Drift& d, double a, const SimConfig& cfg, std::vector<PathRecord>* records) {
    check_target(d, a);
    if (check_admissible(d) != Admissibility::admissible) throw Error(ErrorCode::NotAdmissible, "drift is not admissible");
    const Stepper stepper(d, cfg);
    return run_paths(cfg, [&](std::mt19937_64& rng) { return stepper.run(a, rng); }, records);
}

McEstimate simulate_search(const Drift& d, const TargetDistribution& t, const SimConfig& cfg,
                           std::vector<PathRecord>* records) {
    const Interval dom = d.domain();
    if (t.minus().extent() > -dom.lo || t.plus().extent() > dom.hi)
        throw Error(ErrorCode::NotAdmissible, "target support extends beyond the drift domain");
    if (check_admissible(d) != Admissibility::admissible) throw Error(ErrorCode::NotAdmissible, "drift is not admissible");
    const Stepper stepper(d, cfg);
    return run_paths(cfg,
                     [&](std::mt19937_64& rng) {
                         const double a = sample_target(t, rng);
                         check_target(d, a);
                         return stepper.run(a, rng);
                     },
                     records);
}

void write_paths_csv(std::ostream& os, const std::vector<PathRecord>& records) {
    os << "path,target,hit_time,censored\n";
    char buf[128];
    for (const PathRecord& r : records) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d\n", r.path, r.target, r.hit_time, r.censored ? 1 : 0);
        os << buf;
    }
}

} // namespace diffsearch
