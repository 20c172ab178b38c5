#include "diffsearch/functional.hpp"

#include "diffsearch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace diffsearch {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void require_support_inside(const Interval& domain, const TargetDistribution& t) {
    const double slack = 1e-12;
    if (t.minus().extent() > -domain.lo * (1.0 + slack) || t.plus().extent() > domain.hi * (1.0 + slack))
        throw Error(ErrorCode::NotAdmissible, "target support extends beyond the drift domain");
}

std::vector<double> signed_breakpoints(const HalfSupportMeasure& m) {
    std::vector<double> out = m.breakpoints();
    if (m.side() == Side::negative)
        for (double& x : out) x = -x;
    return out;
}

// c- and c+ of the infimum formula.
std::pair<double, double> side_weights(double p) { return {(1.0 - p) / -std::log(p), p / -std::log1p(-p)}; }

} // namespace

const char* to_string(InfimumVerdict v) {
    switch (v) {
    case InfimumVerdict::finite: return "finite";
    case InfimumVerdict::infinite: return "infinite";
    case InfimumVerdict::unknown_one_sided: return "unknown_one_sided";
    case InfimumVerdict::unbalanced_bound: return "unbalanced_bound";
    }
    return "?";
}

PerturbationCdf PerturbationCdf::raised_cosine(double center, double half_width) {
    if (!(half_width > 0)) throw Error(ErrorCode::BadParams, "bump needs a positive width");
    const double c = center;
    const double w = half_width;
    auto q = [c, w](double x) {
        const double u = (x - c) / w;
        if (u <= -1.0 || u >= 1.0) return 0.0;
        return (1.0 + std::cos(std::numbers::pi * u)) / (2.0 * w);
    };
    auto Q = [c, w](double x) {
        const double u = (x - c) / w;
        if (u <= -1.0) return 0.0;
        if (u >= 1.0) return 1.0;
        return 0.5 * (u + 1.0) + std::sin(std::numbers::pi * u) / (2.0 * std::numbers::pi);
    };
    return PerturbationCdf{Q, q, Interval(c - w, c + w), {c - w, c + w}, 1.0};
}

PerturbationCdf PerturbationCdf::from_cdf(const ScaledCdf& F) {
    return PerturbationCdf{F.F, F.f, F.domain, {}, F.scale};
}

HittingTime expected_hitting_time(const SpeedProfile& sp, double a, const QuadConfig& cfg) {
    const Drift& d = sp.drift();
    const Interval dom = d.domain();
    if (a == 0.0) return {a, QuadResult{0.0, 0.0, true, false}};
    if (!(a >= dom.lo && a <= dom.hi)) throw Error(ErrorCode::OutOfSupport, "target outside the drift domain");
    if ((a == dom.hi && d.boundaries().right != BoundaryKind::reflecting) ||
        (a == dom.lo && d.boundaries().left != BoundaryKind::reflecting))
        throw Error(ErrorCode::OutOfSupport, "target at an unreachable boundary");
    if (!sp.finite()) throw Error(ErrorCode::NotAdmissible, "speed measure is not finite");

    const double scale = 2.0 / d.diffusion();
    if (a > 0.0) {
        auto g = [&sp](double x) { return std::exp(std::log(sp.below(x)) - sp.log_density(x)); };
        return {a, scaled(integrate(g, Interval(0.0, a), cfg), scale)};
    }
    auto g = [&sp](double x) { return std::exp(std::log(sp.above(x)) - sp.log_density(x)); };
    return {a, scaled(integrate(g, Interval(a, 0.0), cfg), scale)};
}

HittingTime expected_hitting_time(const Drift& d, double a, const QuadConfig& cfg) {
    if (a == 0.0) return {a, QuadResult{0.0, 0.0, true, false}};
    return expected_hitting_time(SpeedProfile(d, cfg), a, cfg);
}

SearchValue expected_search_time(const SpeedProfile& sp, const TargetDistribution& t, const QuadConfig& cfg) {
    const Drift& d = sp.drift();
    require_support_inside(d.domain(), t);
    if (!sp.finite()) throw Error(ErrorCode::NotAdmissible, "speed measure is not finite");
    const double scale = 2.0 / d.diffusion();
    const HalfSupportMeasure& plus = t.plus();
    const HalfSupportMeasure& minus = t.minus();

    auto g_plus = [&](double x) {
        const double lt = plus.log_tail_at(x);
        if (lt == -inf) return 0.0;
        return std::exp(lt - sp.log_density(x) + std::log(sp.below(x)));
    };
    auto g_minus = [&](double x) {
        const double lt = minus.log_tail_at(-x);
        if (lt == -inf) return 0.0;
        return std::exp(lt - sp.log_density(x) + std::log(sp.above(x)));
    };
    const QuadResult rp =
        integrate_pieces(g_plus, Interval(0.0, std::min(plus.extent(), d.domain().hi)), signed_breakpoints(plus), cfg);
    const QuadResult rm = integrate_pieces(g_minus, Interval(std::max(-minus.extent(), d.domain().lo), 0.0),
                                           signed_breakpoints(minus), cfg);
    SearchValue out;
    out.plus_part = scaled(rp, scale * t.p());
    out.minus_part = scaled(rm, scale * (1.0 - t.p()));
    out.value = combine(out.minus_part, out.plus_part);
    return out;
}

SearchValue expected_search_time(const Drift& d, const TargetDistribution& t, const QuadConfig& cfg) {
    return expected_search_time(SpeedProfile(d, cfg), t, cfg);
}

double search_time_by_atoms(const SpeedProfile& sp, const TargetDistribution& t, const QuadConfig& cfg) {
    if (t.minus().kind() != MeasureKind::discrete || t.plus().kind() != MeasureKind::discrete)
        throw Error(ErrorCode::BadParams, "atom sums need discrete halves");
    double total = 0.0;
    for (const auto& [r, m] : t.minus().atoms()) total += (1.0 - t.p()) * m * expected_hitting_time(sp, -r, cfg).value.value;
    for (const auto& [r, m] : t.plus().atoms()) total += t.p() * m * expected_hitting_time(sp, r, cfg).value.value;
    return total;
}

QuadResult g2(const ScaledCdf& F, const TargetDistribution& t, const QuadConfig& cfg,
              const std::vector<double>& extra_breakpoints) {
    require_support_inside(F.domain, t);
    const HalfSupportMeasure& plus = t.plus();
    const HalfSupportMeasure& minus = t.minus();
    auto ratio = [](double tail, double num, double den, double x) {
        if (tail == 0.0) return 0.0;
        if (!(den > 0.0)) {
            std::ostringstream os;
            os << "density is not positive at x = " << x;
            throw Error(ErrorCode::ZeroDensity, os.str());
        }
        return tail * num / den;
    };
    auto g_plus = [&](double x) { return ratio(plus.tail_at(x), F.F(x), F.f(x), x); };
    auto g_minus = [&](double x) { return ratio(minus.tail_at(-x), F.scale - F.F(x), F.f(x), x); };

    std::vector<double> bp_plus = signed_breakpoints(plus);
    std::vector<double> bp_minus = signed_breakpoints(minus);
    for (double x : extra_breakpoints) (x > 0 ? bp_plus : bp_minus).push_back(x);
    const QuadResult rp = integrate_pieces(g_plus, Interval(0.0, plus.extent()), bp_plus, cfg);
    const QuadResult rm = integrate_pieces(g_minus, Interval(-minus.extent(), 0.0), bp_minus, cfg);
    return combine(scaled(rm, 1.0 - t.p()), scaled(rp, t.p()));
}

InfimumResult infimum_value(const TargetDistribution& t, double D, const QuadConfig& cfg) {
    if (!(D > 0)) throw Error(ErrorCode::BadParams, "diffusion rate must be positive");
    InfimumResult out{InfimumVerdict::finite, nan, nan, nan, sqrt_tail_integrals(t, cfg)};
    const bool dm = out.integrals.minus_integral.diverged;
    const bool dp = out.integrals.plus_integral.diverged;
    if (dm && dp) {
        out.verdict = InfimumVerdict::infinite;
        out.value = inf;
        return out;
    }
    if (dm || dp) {
        out.verdict = InfimumVerdict::unknown_one_sided;
        return out;
    }
    const auto [cm, cp] = side_weights(t.p());
    const double Im = out.integrals.minus_integral.value;
    const double Ip = out.integrals.plus_integral.value;
    out.minus_term = 2.0 / D * cm * Im * Im;
    out.plus_term = 2.0 / D * cp * Ip * Ip;
    out.value = out.minus_term + out.plus_term;
    const double rhs = balance_rhs(t.p());
    if (std::fabs(Ip / Im - rhs) > 1e-9 * std::max(1.0, rhs)) {
        out.verdict = InfimumVerdict::unbalanced_bound;
        const double gap = cm * Im - cp * Ip;
        out.value -= 2.0 / D * gap * gap;
    }
    return out;
}

double unbalanced_bound_three_term(const TargetDistribution& t, double D, const QuadConfig& cfg) {
    const SqrtTailIntegrals s = sqrt_tail_integrals(t, cfg);
    if (s.minus_integral.diverged || s.plus_integral.diverged)
        throw Error(ErrorCode::DivergentTail, "the bound needs finite sqrt-tail integrals");
    const auto [cm, cp] = side_weights(t.p());
    const double Im = s.minus_integral.value;
    const double Ip = s.plus_integral.value;
    return 2.0 / D * (cm * (1.0 - cm) * Im * Im + cp * (1.0 - cp) * Ip * Ip + 2.0 * cm * cp * Im * Ip);
}

double avgdist_lower_bound(const TargetDistribution& t, double D, const QuadConfig& cfg) {
    const QuadResult em = expected_distance(t.minus(), cfg);
    const QuadResult ep = expected_distance(t.plus(), cfg);
    if (em.diverged || ep.diverged) return inf;
    const auto [cm, cp] = side_weights(t.p());
    return 2.0 / D * (cm * em.value * em.value + cp * ep.value * ep.value);
}

double first_variation(const ScaledCdf& F, const TargetDistribution& t, const PerturbationCdf& pert, double h,
                       const QuadConfig& cfg) {
    if (!(h > 0)) throw Error(ErrorCode::BadParams, "finite-difference step must be positive");
    auto shifted = [&](double e) {
        ScaledCdf G = F;
        const RealFunction F0 = F.F;
        const RealFunction f0 = F.f;
        const RealFunction Q = pert.Q;
        const RealFunction q = pert.q;
        G.F = [F0, Q, e](double x) { return F0(x) + e * Q(x); };
        G.f = [f0, q, e](double x) { return f0(x) + e * q(x); };
        G.scale = F.scale + e * pert.mass;
        G.log_density_ratio = {};
        return G;
    };
    std::vector<double> bps = pert.kinks;
    const double up = g2(shifted(h), t, cfg, bps).value;
    const double down = g2(shifted(-h), t, cfg, bps).value;
    return (up - down) / (2.0 * h);
}

double first_variation(const Drift& d, const TargetDistribution& t, const PerturbationCdf& pert, double h,
                       const QuadConfig& cfg) {
    return first_variation(cdf_from_drift(d, cfg), t, pert, h, cfg);
}

std::vector<PerturbationCdf> bump_family(Interval window, int count) {
    if (!window.finite() || count < 1) throw Error(ErrorCode::BadParams, "bump family needs a finite window");
    const double w = window.width() / 16.0;
    std::vector<PerturbationCdf> out;
    for (int i = 0; i < count; ++i) {
        const double s = count == 1 ? 0.5 : static_cast<double>(i) / (count - 1);
        out.push_back(PerturbationCdf::raised_cosine(window.lo + w + s * (window.width() - 2.0 * w), w));
    }
    return out;
}

ConvexityProbe convexity_values(const Drift& d1, const Drift& d2, const TargetDistribution& t, int n_points,
                                const QuadConfig& cfg) {
    if (n_points < 3) throw Error(ErrorCode::BadParams, "convexity probe needs at least three points");
    ConvexityProbe out{true, {}, inf};
    for (int i = 0; i < n_points; ++i) {
        const double s = static_cast<double>(i) / (n_points - 1);
        out.values.push_back(expected_search_time(mix(d1, d2, s), t, cfg).value.value);
    }
    double scale = 0.0;
    for (double v : out.values) scale = std::max(scale, std::fabs(v));
    for (int i = 1; i + 1 < n_points; ++i) {
        const double second = out.values[i - 1] - 2.0 * out.values[i] + out.values[i + 1];
        out.worst_second_difference = std::min(out.worst_second_difference, second);
        if (second < -1e-7 * scale) out.convex = false;
    }
    return out;
}

bool convexity_probe(const Drift& d1, const Drift& d2, const TargetDistribution& t, int n_points,
                     const QuadConfig& cfg) {
    return convexity_values(d1, d2, t, n_points, cfg).convex;
}

} // namespace diffsearch
