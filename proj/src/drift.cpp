#include "diffsearch/drift.hpp"

#include "diffsearch/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace diffsearch {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();

// Largest distance strictly inside the support.
double inside(double extent) { return std::isfinite(extent) ? std::nextafter(extent, 0.0) : inf; }

BoundaryKind boundary_for(const HalfSupportMeasure& m, const QuadConfig& cfg) {
    if (!std::isfinite(m.extent())) return BoundaryKind::open_infinite;
    return reachability(m, cfg) == Reachability::reachable ? BoundaryKind::reflecting : BoundaryKind::unreachable;
}

} // namespace

const char* to_string(BoundaryKind kind) {
    switch (kind) {
    case BoundaryKind::unreachable: return "unreachable";
    case BoundaryKind::reflecting: return "reflecting";
    case BoundaryKind::open_infinite: return "open_infinite";
    }
    return "?";
}

const char* to_string(Reachability r) { return r == Reachability::reachable ? "reachable" : "unreachable"; }

const char* to_string(Admissibility a) {
    switch (a) {
    case Admissibility::admissible: return "admissible";
    case Admissibility::not_positive_recurrent: return "not_positive_recurrent";
    case Admissibility::ill_formed: return "ill_formed";
    }
    return "?";
}

Drift::Drift(RealFunction b, Interval domain, double diffusion, BoundaryFlags flags, RealFunction log_speed,
             const QuadConfig& cfg)
    : b_(std::move(b)), domain_(domain), diffusion_(diffusion), flags_(flags), log_speed_(std::move(log_speed)) {
    if (!b_) throw Error(ErrorCode::BadParams, "drift needs a function");
    if (!(diffusion > 0) || !std::isfinite(diffusion)) throw Error(ErrorCode::BadParams, "diffusion rate must be positive");
    if (!(domain.lo < 0.0 && domain.hi > 0.0)) throw Error(ErrorCode::BadParams, "drift domain must contain the origin");
    if (!log_speed_) {
        const RealFunction b_pos = b_;
        pos_ = std::make_shared<CumulativeIntegral>([b_pos](double r) { return b_pos(r); }, domain.hi, cfg);
        neg_ = std::make_shared<CumulativeIntegral>([b_pos](double r) { return b_pos(-r); }, -domain.lo, cfg);
    }
}

double Drift::log_speed_density(double x) const {
    if (log_speed_) return log_speed_(x);
    const double integral = x >= 0.0 ? (*pos_)(x) : -(*neg_)(-x);
    return 2.0 / diffusion_ * integral;
}

Drift mix(const Drift& d1, const Drift& d2, double s) {
    if (d1.domain().lo != d2.domain().lo || d1.domain().hi != d2.domain().hi || d1.diffusion() != d2.diffusion())
        throw Error(ErrorCode::BadParams, "mixed drifts must share domain and diffusion rate");
    auto b = [d1, d2, s](double x) { return (1.0 - s) * d1(x) + s * d2(x); };
    auto phi = [d1, d2, s](double x) {
        return (1.0 - s) * d1.log_speed_density(x) + s * d2.log_speed_density(x);
    };
    return Drift(b, d1.domain(), d1.diffusion(), d1.boundaries(), phi);
}

SpeedProfile::SpeedProfile(const Drift& d, const QuadConfig& cfg) : drift_(std::make_shared<const Drift>(d)) {
    const auto dd = drift_;
    pos_ = std::make_shared<CumulativeIntegral>([dd](double r) { return std::exp(dd->log_speed_density(r)); },
                                                d.domain().hi, cfg);
    neg_ = std::make_shared<CumulativeIntegral>([dd](double r) { return std::exp(dd->log_speed_density(-r)); },
                                                -d.domain().lo, cfg);
    finite_ = pos_->total_finite() && neg_->total_finite();
    total_ = finite_ ? pos_->total() + neg_->total() : inf;
}

double SpeedProfile::below(double x) const {
    return x >= 0.0 ? neg_->total() + (*pos_)(x) : neg_->remaining(-x);
}

double SpeedProfile::above(double x) const {
    return x >= 0.0 ? pos_->remaining(x) : pos_->total() + (*neg_)(-x);
}

ScaledCdf ScaledCdf::times(double c) const {
    if (!(c > 0)) throw Error(ErrorCode::BadParams, "scale factor must be positive");
    ScaledCdf out = *this;
    const RealFunction F0 = F;
    const RealFunction f0 = f;
    out.F = [F0, c](double x) { return c * F0(x); };
    out.f = [f0, c](double x) { return c * f0(x); };
    out.scale = c * scale;
    out.density_jump_at_origin = c * density_jump_at_origin;
    return out;
}

CriticalConstants critical_constants(const TargetDistribution& t, const QuadConfig& cfg) {
    const SqrtTailIntegrals s = sqrt_tail_integrals(t, cfg);
    if (s.minus_integral.diverged || s.plus_integral.diverged)
        throw Error(ErrorCode::DivergentTail, "critical constants need finite sqrt-tail integrals");
    const double p = t.p();
    return {-std::log1p(-p) / s.plus_integral.value, -std::log(p) / s.minus_integral.value, s.minus_integral.value,
            s.plus_integral.value};
}

Reachability reachability(const HalfSupportMeasure& m, const QuadConfig& cfg) {
    const double e = m.extent();
    if (!std::isfinite(e)) return Reachability::unreachable;
    if (m.endpoint_atom_mass() > 0.0) return Reachability::reachable;
    const QuadResult r = integrate_pieces([&m](double x) { return 1.0 / std::sqrt(m.tail_at(x)); },
                                          Interval(0.5 * e, e), m.breakpoints(), cfg);
    return r.diverged ? Reachability::unreachable : Reachability::reachable;
}

Admissibility check_admissible(const Drift& d, const QuadConfig& cfg) {
    const Interval dom = d.domain();
    const double lo = std::max(dom.lo, -10.0);
    const double hi = std::min(dom.hi, 10.0);
    for (int i = 1; i < 64; ++i) {
        const double x = lo + (hi - lo) * i / 64.0;
        if (std::isnan(d(x))) return Admissibility::ill_formed;
    }
    try {
        auto speed = [&d](double x) { return std::exp(d.log_speed_density(x)); };
        const QuadResult left = integrate(speed, Interval(dom.lo, 0.0), cfg);
        const QuadResult right = integrate(speed, Interval(0.0, dom.hi), cfg);
        if (left.diverged || right.diverged) return Admissibility::not_positive_recurrent;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NonFiniteEvaluation) return Admissibility::ill_formed;
        throw;
    }
    return Admissibility::admissible;
}

Drift optimal_drift(const TargetDistribution& t, double D, const QuadConfig& cfg) {
    if (!t.minus().has_density() || !t.plus().has_density())
        throw Error(ErrorCode::NoDensity, "the optimal drift needs densities on both halves");
    const CriticalConstants c = critical_constants(t, cfg);
    const HalfSupportMeasure plus = t.plus();
    const HalfSupportMeasure minus = t.minus();
    const double top_plus = inside(plus.extent());
    const double top_minus = inside(minus.extent());
    const double k1 = c.k1;
    const double k2 = c.k2;

    auto b = [=](double x) {
        if (x >= 0.0) {
            const double r = std::min(x, top_plus);
            return D * (-0.25 * plus.hazard_at(r) + 0.5 * k1 * std::sqrt(plus.tail_at(r)));
        }
        const double r = std::min(-x, top_minus);
        return D * (0.25 * minus.hazard_at(r) - 0.5 * k2 * std::sqrt(minus.tail_at(r)));
    };
    // (2/D)∫_0^x b0 = ½ log tail(|x|) + k ∫_0^{|x|} tail^{1/2}
    auto phi = [=](double x) {
        if (x >= 0.0) return 0.5 * plus.log_tail_at(x) + k1 * plus.sqrt_tail_cumulative(x);
        return 0.5 * minus.log_tail_at(-x) + k2 * minus.sqrt_tail_cumulative(-x);
    };

    BoundaryFlags flags;
    flags.left = boundary_for(minus, cfg);
    flags.right = boundary_for(plus, cfg);
    flags.singular_left = std::isfinite(minus.extent()) && minus.endpoint_atom_mass() == 0.0;
    flags.singular_right = std::isfinite(plus.extent()) && plus.endpoint_atom_mass() == 0.0;
    return Drift(b, t.support(), D, flags, phi);
}

ScaledCdf cdf_from_drift(const Drift& d, const QuadConfig& cfg) {
    auto sp = std::make_shared<const SpeedProfile>(d, cfg);
    if (!sp->finite()) throw Error(ErrorCode::NotAdmissible, "speed measure is not finite");
    const double Z = sp->total();
    const Interval dom = d.domain();
    ScaledCdf out{
        [sp, Z, dom](double x) {
            if (x <= dom.lo) return 0.0;
            if (x >= dom.hi) return 1.0;
            return sp->below(x) / Z;
        },
        [sp, Z](double x) { return std::exp(sp->log_density(x)) / Z; },
        dom,
        1.0,
        0.0,
        [sp](double x) { return sp->log_density(x); },
    };
    return out;
}

Drift drift_from_cdf(const ScaledCdf& F, double D) {
    const ScaledCdf cdf = F;
    auto log_f = [cdf](double x) {
        if (cdf.log_density_ratio) return cdf.log_density_ratio(x);
        const double fx = cdf.f(x);
        const double f0 = cdf.f(0.0);
        if (!(fx > 0.0) || !(f0 > 0.0)) throw Error(ErrorCode::ZeroDensity, "density vanishes in the interior");
        return std::log(fx / f0);
    };
    auto b = [cdf, D, log_f](double x) {
        const double h = std::max(1e-6, 1e-6 * std::fabs(x));
        if (!(cdf.f(x) > 0.0)) throw Error(ErrorCode::ZeroDensity, "density vanishes in the interior");
        if (cdf.log_density_ratio) return 0.5 * D * (log_f(x + h) - log_f(x - h)) / (2.0 * h);
        return 0.5 * D * (cdf.f(x + h) - cdf.f(x - h)) / (2.0 * h * cdf.f(x));
    };
    auto phi = [log_f](double x) { return log_f(x); };
    BoundaryFlags flags;
    flags.left = std::isfinite(F.domain.lo) ? BoundaryKind::reflecting : BoundaryKind::open_infinite;
    flags.right = std::isfinite(F.domain.hi) ? BoundaryKind::reflecting : BoundaryKind::open_infinite;
    return Drift(b, F.domain, D, flags, phi);
}

ScaledCdf critical_cdf(const TargetDistribution& t, const QuadConfig& cfg) {
    const CriticalConstants c = critical_constants(t, cfg);
    const HalfSupportMeasure plus = t.plus();
    const HalfSupportMeasure minus = t.minus();
    const Interval dom = t.support();
    const double k1 = c.k1;
    const double k2 = c.k2;
    const double p = t.p();

    auto F = [=](double x) {
        if (x <= dom.lo) return 0.0;
        if (x >= dom.hi) return 1.0;
        if (x >= 0.0) return std::exp(-k1 * plus.sqrt_tail_remaining(x));
        return -std::expm1(-k2 * minus.sqrt_tail_remaining(-x));
    };
    auto f = [=](double x) {
        if (x <= dom.lo || x >= dom.hi) return 0.0;
        if (x >= 0.0) return k1 * std::sqrt(plus.tail_at(x)) * std::exp(-k1 * plus.sqrt_tail_remaining(x));
        return k2 * std::sqrt(minus.tail_at(-x)) * std::exp(-k2 * minus.sqrt_tail_remaining(-x));
    };
    auto log_ratio = [=](double x) {
        if (x >= 0.0) return 0.5 * plus.log_tail_at(x) + k1 * plus.sqrt_tail_cumulative(x);
        return 0.5 * minus.log_tail_at(-x) + k2 * minus.sqrt_tail_cumulative(-x);
    };
    return ScaledCdf{F, f, dom, 1.0, k1 * (1.0 - p) - k2 * p, log_ratio};
}

std::vector<DriftTableRow> drift_table(const Drift& d, const ScaledCdf& F, Interval window, int n) {
    if (n < 1) throw Error(ErrorCode::BadParams, "drift table needs at least one row");
    if (!window.finite()) throw Error(ErrorCode::BadParams, "drift table window must be finite");
    std::vector<DriftTableRow> rows;
    rows.reserve(n);
    const double step = window.width() / n;
    for (int i = 0; i < n; ++i) {
        const double x = window.lo + (i + 0.5) * step;
        rows.push_back({x, d(x), F.F(x), F.f(x)});
    }
    return rows;
}

void write_drift_table_csv(std::ostream& os, const std::vector<DriftTableRow>& rows) {
    os << "x,b,F,f\n";
    char buf[128];
    for (const DriftTableRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.x, r.b, r.F, r.f);
        os << buf;
    }
}

} // namespace diffsearch
