#include "diffsearch/approx.hpp"

#include "diffsearch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <ostream>

namespace diffsearch {

namespace {

constexpr double tail_floor = 1e-20;
constexpr std::size_t max_knots = std::size_t{1} << 20;

// Knots (j/n, tail) of the shifted measure, stopping once j/n passes r_max.
std::vector<std::pair<double, double>> shifted_knots(const HalfSupportMeasure& m, int n, ShiftDirection direction,
                                                     double r_max) {
    const double step = 1.0 / n;
    std::vector<std::pair<double, double>> knots{{0.0, 1.0}};
    // tail of the shifted measure at j/n is the original tail at (j -/+ 1)/n
    const int offset = direction == ShiftDirection::outward ? -1 : 1;
    for (std::size_t j = 1; knots.size() < max_knots; ++j) {
        const double r = static_cast<double>(j) * step;
        const double t = m.tail_at(static_cast<double>(static_cast<long>(j) + offset) * step);
        knots.emplace_back(r, std::min(t, knots.back().second));
        if (t == 0.0 || t < tail_floor || r >= r_max) break;
    }
    if (knots.back().second < tail_floor) knots.back().second = 0.0;
    return knots;
}

} // namespace

const char* to_string(ApproxVariant v) {
    switch (v) {
    case ApproxVariant::outward: return "outward";
    case ApproxVariant::inward: return "inward";
    case ApproxVariant::truncated: return "truncated";
    }
    return "?";
}

ApproxVariant approx_variant_from_string(const std::string& name) {
    if (name == "outward") return ApproxVariant::outward;
    if (name == "inward") return ApproxVariant::inward;
    if (name == "truncated") return ApproxVariant::truncated;
    throw Error(ErrorCode::BadParams, "unknown approximation variant: " + name);
}

HalfSupportMeasure discretize_shift(const HalfSupportMeasure& m, int n, ShiftDirection direction) {
    if (n < 1) throw Error(ErrorCode::BadParams, "discretization needs n >= 1");
    return HalfSupportMeasure::tabulated(m.side(), shifted_knots(m, n, direction, m.extent() + 2.0 / n));
}

HalfSupportMeasure truncate(const HalfSupportMeasure& m, int n) {
    if (n < 1) throw Error(ErrorCode::BadParams, "truncation needs n >= 1");
    const double cut = static_cast<double>(n);
    const double end = cut + 1.0 / n;
    if (m.extent() <= cut) return m;
    const double rest = m.tail_at(cut);
    if (m.kind() == MeasureKind::tabulated) {
        std::vector<std::pair<double, double>> knots;
        for (const auto& k : m.knots())
            if (k.first < cut) knots.push_back(k);
        knots.emplace_back(cut, rest);
        knots.emplace_back(end, 0.0);
        return HalfSupportMeasure::tabulated(m.side(), std::move(knots));
    }
    CustomTail spec;
    spec.tail = [m, cut, end, rest](double r) {
        if (r <= cut) return m.tail_at(r);
        if (r >= end) return 0.0;
        return rest * (end - r) / (end - cut);
    };
    if (m.has_density()) {
        spec.density = [m, cut, end, rest](double r) {
            if (r < cut) return m.density_at(r);
            if (r >= end) return 0.0;
            return rest / (end - cut);
        };
    }
    spec.extent = end;
    for (double b : m.breakpoints())
        if (b < cut) spec.breakpoints.push_back(b);
    spec.breakpoints.push_back(cut);
    return HalfSupportMeasure::from_functions(m.side(), std::move(spec));
}

double rebalance(const HalfSupportMeasure& minus, const HalfSupportMeasure& plus, const QuadConfig& cfg) {
    const QuadResult im = sqrt_tail_integral(minus, cfg);
    const QuadResult ip = sqrt_tail_integral(plus, cfg);
    if (im.diverged || ip.diverged) throw Error(ErrorCode::DivergentTail, "rebalancing needs finite sqrt-tail integrals");
    if (!(im.value > 0 && ip.value > 0)) throw Error(ErrorCode::BadParams, "sqrt-tail integrals must be positive");
    const double target = std::log(ip.value / im.value);
    auto g = [target](double p) { return std::log(balance_rhs(p)) - target; };
    return find_root(g, 1e-12, 1.0 - 1e-12, 1e-16);
}

std::vector<ApproximationStep> approximation_sequence(const TargetDistribution& t, int n_max, ApproxVariant variant,
                                                      double D, const QuadConfig& cfg) {
    if (n_max < 1) throw Error(ErrorCode::BadParams, "n_max must be at least 1");
    if (!(D > 0)) throw Error(ErrorCode::BadParams, "diffusion rate must be positive");

    auto half = [variant](const HalfSupportMeasure& m, int n) {
        switch (variant) {
        case ApproxVariant::outward: return discretize_shift(m, n, ShiftDirection::outward);
        case ApproxVariant::inward: return discretize_shift(m, n, ShiftDirection::inward);
        case ApproxVariant::truncated:
            // only the part up to n + 1/n survives the truncation
            return truncate(HalfSupportMeasure::tabulated(
                                m.side(), shifted_knots(m, n, ShiftDirection::inward, n + 0.5 / n)),
                            n);
        }
        throw Error(ErrorCode::BadParams, "unknown approximation variant");
    };
    auto step = [&t, &half, D, cfg](int n) {
        const HalfSupportMeasure minus = half(t.minus(), n);
        const HalfSupportMeasure plus = half(t.plus(), n);
        const double pn = rebalance(minus, plus, cfg);
        const TargetDistribution mn(pn, minus, plus);
        const double im = minus.sqrt_tail_total();
        const double ip = plus.sqrt_tail_total();
        const double value =
            2.0 / D * ((1.0 - pn) / -std::log(pn) * im * im + pn / -std::log1p(-pn) * ip * ip);
        return ApproximationStep{n, mn, pn, optimal_drift(mn, D, cfg), value, im, ip};
    };

    std::vector<std::future<ApproximationStep>> jobs;
    for (int n = 1; n <= n_max; ++n) jobs.push_back(std::async(std::launch::async, step, n));
    std::vector<ApproximationStep> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

void write_approximation_csv(std::ostream& os, const std::vector<ApproximationStep>& steps) {
    os << "n,p_n,value,sqrt_minus,sqrt_plus\n";
    char buf[256];
    for (const ApproximationStep& s : steps) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", s.n, s.p_n, s.value, s.sqrt_minus,
                      s.sqrt_plus);
        os << buf;
    }
}

} // namespace diffsearch
