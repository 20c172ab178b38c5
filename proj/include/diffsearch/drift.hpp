#pragma once

#include "diffsearch/measures.hpp"
#include "diffsearch/numerics.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace diffsearch {

enum class BoundaryKind { unreachable, reflecting, open_infinite };
enum class Reachability { reachable, unreachable };
enum class Admissibility { admissible, not_positive_recurrent, ill_formed };

const char* to_string(BoundaryKind kind);
const char* to_string(Reachability r);
const char* to_string(Admissibility a);

struct BoundaryFlags {
    BoundaryKind left = BoundaryKind::reflecting;
    BoundaryKind right = BoundaryKind::reflecting;
    bool singular_left = false;
    bool singular_right = false;
};

/// Drift b on (A-, A+) for the generator (D/2) d²/dx² + b d/dx.
class Drift {
public:
    /// `log_speed`, when given, must equal (2/D) ∫_0^x b; otherwise it is
    /// computed by quadrature with memoized checkpoints.
    Drift(RealFunction b, Interval domain, double diffusion, BoundaryFlags flags = {},
          RealFunction log_speed = {}, const QuadConfig& cfg = {});

    double operator()(double x) const { return b_(x); }
    double log_speed_density(double x) const;
    const RealFunction& function() const { return b_; }
    const Interval& domain() const { return domain_; }
    double diffusion() const { return diffusion_; }
    const BoundaryFlags& boundaries() const { return flags_; }
    bool closed_form_potential() const { return static_cast<bool>(log_speed_); }

private:
    RealFunction b_;
    Interval domain_;
    double diffusion_;
    BoundaryFlags flags_;
    RealFunction log_speed_;
    std::shared_ptr<const CumulativeIntegral> pos_;
    std::shared_ptr<const CumulativeIntegral> neg_;
};

/// (1-s) d1 + s d2, with the potential mixed the same way.
Drift mix(const Drift& d1, const Drift& d2, double s);

/// The speed measure e^Φ of a drift and its cumulative integrals.
class SpeedProfile {
public:
    explicit SpeedProfile(const Drift& d, const QuadConfig& cfg = {});

    double log_density(double x) const { return drift_->log_speed_density(x); }
    /// ∫_{A-}^x e^Φ
    double below(double x) const;
    /// ∫_x^{A+} e^Φ
    double above(double x) const;
    double total() const { return total_; }
    bool finite() const { return finite_; }
    const Drift& drift() const { return *drift_; }

private:
    std::shared_ptr<const Drift> drift_;
    std::shared_ptr<const CumulativeIntegral> pos_;
    std::shared_ptr<const CumulativeIntegral> neg_;
    double total_ = 0.0;
    bool finite_ = true;
};

/// A positive multiple of a distribution function on `domain`.
struct ScaledCdf {
    RealFunction F;
    RealFunction f;
    Interval domain;
    double scale = 1.0;
    /// f(0+) - f(0-) when the density jumps at the origin.
    double density_jump_at_origin = 0.0;
    /// Optional exact log f relative to the origin: log(f(x)/f(0)).
    RealFunction log_density_ratio;

    ScaledCdf times(double c) const;
};

struct CriticalConstants {
    double k1;
    double k2;
    double sqrt_minus;
    double sqrt_plus;
};

CriticalConstants critical_constants(const TargetDistribution& t, const QuadConfig& cfg = {});

Reachability reachability(const HalfSupportMeasure& m, const QuadConfig& cfg = {});
Admissibility check_admissible(const Drift& d, const QuadConfig& cfg = {});

/// The drift attaining the infimum in the balanced case; defined for any p.
Drift optimal_drift(const TargetDistribution& t, double D, const QuadConfig& cfg = {});

ScaledCdf cdf_from_drift(const Drift& d, const QuadConfig& cfg = {});
Drift drift_from_cdf(const ScaledCdf& F, double D);
ScaledCdf critical_cdf(const TargetDistribution& t, const QuadConfig& cfg = {});

struct DriftTableRow {
    double x;
    double b;
    double F;
    double f;
};

/// n rows at the midpoints of n equal cells of `window`.
std::vector<DriftTableRow> drift_table(const Drift& d, const ScaledCdf& F, Interval window, int n);
void write_drift_table_csv(std::ostream& os, const std::vector<DriftTableRow>& rows);

} // namespace diffsearch
