#pragma once

#include "diffsearch/drift.hpp"
#include "diffsearch/measures.hpp"

#include <optional>
#include <vector>

namespace diffsearch {

struct HittingTime {
    double a;
    QuadResult value;
};

struct SearchValue {
    QuadResult value;
    QuadResult minus_part;
    QuadResult plus_part;
};

/// A distribution function with a continuous, compactly supported density.
struct PerturbationCdf {
    RealFunction Q;
    RealFunction q;
    Interval support;
    /// Points where q is not smooth, used to split quadratures.
    std::vector<double> kinks;
    /// Q at the right end of the domain.
    double mass = 1.0;

    static PerturbationCdf raised_cosine(double center, double half_width);
    /// Q = F itself, the direction along which G2 is constant.
    static PerturbationCdf from_cdf(const ScaledCdf& F);
};

enum class InfimumVerdict { finite, infinite, unknown_one_sided, unbalanced_bound };
const char* to_string(InfimumVerdict v);

struct InfimumResult {
    InfimumVerdict verdict;
    /// The infimum when finite; the strict upper bound when unbalanced.
    double value;
    /// The two terms (minus side, plus side) of the balanced formula.
    double minus_term;
    double plus_term;
    SqrtTailIntegrals integrals;
};

/// E_0 T_a under drift d.
HittingTime expected_hitting_time(const Drift& d, double a, const QuadConfig& cfg = {});
HittingTime expected_hitting_time(const SpeedProfile& sp, double a, const QuadConfig& cfg = {});

/// ∫ E_0 T_a μ(da) through the tail-weighted single integrals.
SearchValue expected_search_time(const Drift& d, const TargetDistribution& t, const QuadConfig& cfg = {});
SearchValue expected_search_time(const SpeedProfile& sp, const TargetDistribution& t, const QuadConfig& cfg = {});

/// The measure-weighted form: a finite sum of hitting times for discrete halves.
double search_time_by_atoms(const SpeedProfile& sp, const TargetDistribution& t, const QuadConfig& cfg = {});

QuadResult g2(const ScaledCdf& F, const TargetDistribution& t, const QuadConfig& cfg = {},
              const std::vector<double>& extra_breakpoints = {});

InfimumResult infimum_value(const TargetDistribution& t, double D, const QuadConfig& cfg = {});

/// Right-hand side of the unbalanced bound written as three quadratic terms.
double unbalanced_bound_three_term(const TargetDistribution& t, double D, const QuadConfig& cfg = {});

double avgdist_lower_bound(const TargetDistribution& t, double D, const QuadConfig& cfg = {});

double first_variation(const ScaledCdf& F, const TargetDistribution& t, const PerturbationCdf& pert,
                       double h = 1e-5, const QuadConfig& cfg = {});
double first_variation(const Drift& d, const TargetDistribution& t, const PerturbationCdf& pert,
                       double h = 1e-5, const QuadConfig& cfg = {});

/// Raised-cosine bumps of total width window/8 centered at `count` evenly spaced points.
std::vector<PerturbationCdf> bump_family(Interval window, int count);

struct ConvexityProbe {
    bool convex;
    std::vector<double> values;
    double worst_second_difference;
};

ConvexityProbe convexity_values(const Drift& d1, const Drift& d2, const TargetDistribution& t, int n_points,
                                const QuadConfig& cfg = {});
bool convexity_probe(const Drift& d1, const Drift& d2, const TargetDistribution& t, int n_points,
                     const QuadConfig& cfg = {});

} // namespace diffsearch
