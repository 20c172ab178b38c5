#pragma once

#include "diffsearch/numerics.hpp"

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace diffsearch {

enum class Side { negative, positive };
enum class MeasureKind { closed_form, tabulated, discrete };
enum class Family { degenerate, uniform, exponential, gaussian, pareto, custom };

const char* to_string(Side side);
const char* to_string(MeasureKind kind);
const char* to_string(Family family);
Family family_from_string(const std::string& name);

struct FamilyParams {
    Family family;
    std::map<std::string, double> values;
};

/// A half-measure given by user functions of the distance r from the origin.
struct CustomTail {
    RealFunction tail;
    RealFunction density; ///< optional
    double extent = std::numeric_limits<double>::infinity();
    double endpoint_atom = 0.0;
    std::vector<double> breakpoints;
};

namespace detail {
class TailModel;
}

/// One side of the target law. Stored in distance coordinates r = |x|; the
/// tail at r is the mass strictly farther than r from the origin, so it
/// includes an endpoint atom for every r below the support bound.
class HalfSupportMeasure {
public:
    static HalfSupportMeasure degenerate(Side side, double A);
    static HalfSupportMeasure uniform(Side side, double A);
    static HalfSupportMeasure exponential(Side side, double lambda);
    /// Half-normal: the law of |Z|σ, tail 2(1 - Φ(r/σ)).
    static HalfSupportMeasure gaussian(Side side, double sigma);
    static HalfSupportMeasure pareto(Side side, double alpha, double A0);
    /// Piecewise-linear tail through (distance, tail) knots starting at (0, 1).
    /// The last knot is the support bound; its tail value is the endpoint atom.
    static HalfSupportMeasure tabulated(Side side, std::vector<std::pair<double, double>> knots);
    /// Atoms as (distance, mass) pairs with positive distances.
    static HalfSupportMeasure discrete(Side side, std::vector<std::pair<double, double>> atoms);
    static HalfSupportMeasure from_functions(Side side, CustomTail spec);

    HalfSupportMeasure mirrored() const;

    Side side() const { return side_; }
    MeasureKind kind() const;
    double extent() const;
    double support_bound() const;
    double endpoint_atom_mass() const;
    bool has_density() const;

    /// Tail and density in signed coordinates of this side.
    double tail(double x) const;
    double density(double x) const;

    double tail_at(double r) const;
    double log_tail_at(double r) const;
    /// At a jump of the density the limit from the far side is returned.
    double density_at(double r) const;
    double hazard_at(double r) const;
    /// ∫_0^r tail^{1/2} and ∫_r^bound tail^{1/2}.
    double sqrt_tail_cumulative(double r) const;
    double sqrt_tail_remaining(double r) const;
    double sqrt_tail_total() const;
    /// Distances where tail or density is not smooth.
    std::vector<double> breakpoints() const;
    /// Smallest distance r with tail_at(r) <= u.
    double quantile(double u) const;

    const std::optional<FamilyParams>& family() const { return family_; }
    const std::vector<std::pair<double, double>>& knots() const;
    const std::vector<std::pair<double, double>>& atoms() const;

private:
    HalfSupportMeasure(Side side, std::shared_ptr<const detail::TailModel> model,
                       std::optional<FamilyParams> family);

    Side side_;
    std::shared_ptr<const detail::TailModel> model_;
    std::optional<FamilyParams> family_;
};

class TargetDistribution {
public:
    TargetDistribution(double p, HalfSupportMeasure minus, HalfSupportMeasure plus);

    static TargetDistribution symmetric(const HalfSupportMeasure& plus);

    double p() const { return p_; }
    const HalfSupportMeasure& minus() const { return minus_; }
    const HalfSupportMeasure& plus() const { return plus_; }
    const HalfSupportMeasure& half(Side side) const { return side == Side::negative ? minus_ : plus_; }
    Interval support() const { return Interval(minus_.support_bound(), plus_.support_bound()); }

private:
    double p_;
    HalfSupportMeasure minus_;
    HalfSupportMeasure plus_;
};

struct SqrtTailIntegrals {
    QuadResult minus_integral;
    QuadResult plus_integral;
};

struct BalanceRatio {
    double lhs;
    double rhs;
};

QuadResult sqrt_tail_integral(const HalfSupportMeasure& m, const QuadConfig& cfg = {});
SqrtTailIntegrals sqrt_tail_integrals(const TargetDistribution& t, const QuadConfig& cfg = {});

/// rhs of the balance condition as a function of p alone.
double balance_rhs(double p);
BalanceRatio balance_ratio(const TargetDistribution& t, const QuadConfig& cfg = {});
bool is_balanced(const TargetDistribution& t, double tol = 1e-9, const QuadConfig& cfg = {});

/// ∫ r^2 |log r|^power dν over the half support, atoms included.
QuadResult log_moment(const HalfSupportMeasure& m, double power, const QuadConfig& cfg = {});
QuadResult moment_sufficiency(const HalfSupportMeasure& m, double eps, const QuadConfig& cfg = {});
QuadResult expected_distance(const HalfSupportMeasure& m, const QuadConfig& cfg = {});

/// Distance beyond which the tail is below `mass`; the support bound if finite and smaller.
double effective_extent(const HalfSupportMeasure& m, double mass = 1e-3);

using ParamMap = std::map<std::string, double>;
/// Symmetric catalog entry with p = 1/2. Keys: A, lambda, sigma, alpha and A0.
TargetDistribution catalog(const std::string& name, const ParamMap& params);
HalfSupportMeasure family_half(Side side, Family family, const ParamMap& params);

} // namespace diffsearch
