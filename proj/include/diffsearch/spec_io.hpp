#pragma once

#include "diffsearch/functional.hpp"
#include "diffsearch/measures.hpp"

#include <string>

namespace diffsearch {

/// Parses {"p", "minus", "plus"} where each half has "kind" and then either
/// "family"/"params", "knots" [[x, tail], ...] or "atoms" [[x, mass], ...].
/// Coordinates are signed: the minus half uses x <= 0. Throws MalformedSpec.
TargetDistribution parse_target_spec(const std::string& text);
TargetDistribution load_target_spec(const std::string& path);

/// Inverse of parse_target_spec; halves built from user functions cannot be written.
std::string target_spec_json(const TargetDistribution& t);

struct EndpointReport {
    double bound;
    /// "reachable", "unreachable" or "infinite"
    std::string status;
};

struct AnalysisReport {
    double p;
    double diffusion;
    SqrtTailIntegrals integrals;
    /// Balance ratio and its target; NaN when a sqrt-tail integral diverges.
    double balance_lhs;
    double balance_rhs;
    bool balanced;
    InfimumResult infimum;
    std::string note;
    EndpointReport left;
    EndpointReport right;
    double avgdist_bound;
};

/// Throws BudgetExhausted when a sqrt-tail quadrature neither converges nor diverges.
AnalysisReport analyze(const TargetDistribution& t, double D, const QuadConfig& cfg = {});
std::string report_json(const AnalysisReport& r);
std::string report_text(const AnalysisReport& r);

} // namespace diffsearch
