#pragma once

#include "diffsearch/drift.hpp"
#include "diffsearch/measures.hpp"

#include <iosfwd>
#include <vector>

namespace diffsearch {

enum class ShiftDirection { outward, inward };
enum class ApproxVariant { outward, inward, truncated };

const char* to_string(ApproxVariant v);
ApproxVariant approx_variant_from_string(const std::string& name);

/// Uniform-slab discretization with slab width 1/n. Outward moves the mass of
/// (k/n, (k+1)/n] onto ((k+1)/n, (k+2)/n); inward moves it onto ((k-1)/n, k/n),
/// with the mass of (0, 2/n] spread over (0, 1/n).
HalfSupportMeasure discretize_shift(const HalfSupportMeasure& m, int n, ShiftDirection direction);

/// Agrees with m on (0, n]; the mass beyond n is spread uniformly over (n, n + 1/n).
HalfSupportMeasure truncate(const HalfSupportMeasure& m, int n);

/// The p at which (minus, plus) satisfy the square-root balance condition.
double rebalance(const HalfSupportMeasure& minus, const HalfSupportMeasure& plus, const QuadConfig& cfg = {});

struct ApproximationStep {
    int n;
    TargetDistribution measure;
    double p_n;
    Drift drift;
    /// Attained infimum for the rebalanced measure.
    double value;
    double sqrt_minus;
    double sqrt_plus;
};

std::vector<ApproximationStep> approximation_sequence(const TargetDistribution& t, int n_max, ApproxVariant variant,
                                                      double D = 1.0, const QuadConfig& cfg = {});

void write_approximation_csv(std::ostream& os, const std::vector<ApproximationStep>& steps);

} // namespace diffsearch
