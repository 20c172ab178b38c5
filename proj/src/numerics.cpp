#include "diffsearch/numerics.hpp"

#include "diffsearch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace diffsearch {

const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::DivergentTail: return "DivergentTail";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::NoDensity: return "NoDensity";
    case ErrorCode::ZeroDensity: return "ZeroDensity";
    case ErrorCode::NotAdmissible: return "NotAdmissible";
    case ErrorCode::OutOfSupport: return "OutOfSupport";
    case ErrorCode::UnreachableTarget: return "UnreachableTarget";
    case ErrorCode::MalformedSpec: return "MalformedSpec";
    }
    return "Error";
}

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (std::isnan(lo) || std::isnan(hi) || !(lo < hi)) {
        std::ostringstream os;
        os << "interval requires lo < hi, got (" << lo << ", " << hi << ")";
        throw Error(ErrorCode::BadParams, os.str());
    }
}

bool Interval::finite() const { return std::isfinite(lo) && std::isfinite(hi); }

void QuadConfig::validate() const {
    if (!(rel_tol > 0) || !(abs_tol > 0) || max_subdivisions < 1 || !(divergence_threshold > 0))
        throw Error(ErrorCode::BadParams, "invalid quadrature configuration");
}

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double eps = std::numeric_limits<double>::epsilon();

// Kronrod 21-point abscissae and weights; odd entries are the 10-point Gauss nodes.
constexpr double xgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr double wgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525532272, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double wg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr int max_depth = 64;
constexpr int ring_check_depth = 40;
constexpr double ring_divergence_exponent = 1.15;

// Integrand pulled back to u in (0,1). Finite intervals use the smoothstep
// x = a + (b-a) u^2 (3-2u); half-lines compose it with t/(1-t).
class Mapped {
public:
    enum class Kind { finite, upper_infinite, lower_infinite };

    Mapped(FunctionRef f, double a, double b, Kind kind) : f_(f), a_(a), b_(b), kind_(kind) {}

    double operator()(double u) const {
        // A node rounded onto an end of (0,1) carries zero weight.
        if (!(u > 0.0 && u < 1.0)) return 0.0;
        const double v = 1.0 - u;
        const double s = u * u * (3.0 - 2.0 * u);
        const double sc = v * v * (1.0 + 2.0 * u);
        const double jac = 6.0 * u * v;
        double x = 0.0;
        double dx = 0.0;
        switch (kind_) {
        case Kind::finite: {
            const double w = b_ - a_;
            x = u <= 0.5 ? a_ + w * s : b_ - w * sc;
            if (x <= a_) x = std::nextafter(a_, b_);
            if (x >= b_) x = std::nextafter(b_, a_);
            dx = w * jac;
            break;
        }
        case Kind::upper_infinite:
            x = a_ + s / sc;
            if (x <= a_) x = std::nextafter(a_, inf);
            dx = jac / (sc * sc);
            break;
        case Kind::lower_infinite:
            x = b_ - s / sc;
            if (x >= b_) x = std::nextafter(b_, -inf);
            dx = jac / (sc * sc);
            break;
        }
        const double fx = f_(x);
        if (std::isnan(fx)) {
            std::ostringstream os;
            os << "integrand returned NaN at x = " << x;
            throw Error(ErrorCode::NonFiniteEvaluation, os.str());
        }
        if (fx == 0.0) return 0.0;
        return fx * dx;
    }

private:
    FunctionRef f_;
    double a_;
    double b_;
    Kind kind_;
};

struct Estimate {
    double value;
    double error;
};

Estimate gauss_kronrod(const Mapped& g, double a, double b) {
    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    const double dhlgth = std::fabs(hlgth);

    double fv1[10];
    double fv2[10];
    const double fc = g(centr);
    double resg = 0.0;
    double resk = fc * wgk[10];
    double resabs = std::fabs(resk);
    for (int j = 0; j < 5; ++j) {
        const int jtw = 2 * j + 1;
        const double absc = hlgth * xgk[jtw];
        const double f1 = g(centr - absc);
        const double f2 = g(centr + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += wg[j] * (f1 + f2);
        resk += wgk[jtw] * (f1 + f2);
        resabs += wgk[jtw] * (std::fabs(f1) + std::fabs(f2));
    }
    for (int j = 0; j < 5; ++j) {
        const int jtwm1 = 2 * j;
        const double absc = hlgth * xgk[jtwm1];
        const double f1 = g(centr - absc);
        const double f2 = g(centr + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += wgk[jtwm1] * (f1 + f2);
        resabs += wgk[jtwm1] * (std::fabs(f1) + std::fabs(f2));
    }
    const double reskh = resk * 0.5;
    double resasc = wgk[10] * std::fabs(fc - reskh);
    for (int j = 0; j < 10; ++j)
        resasc += wgk[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));

    const double result = resk * hlgth;
    resabs *= dhlgth;
    resasc *= dhlgth;
    double abserr = std::fabs((resk - resg) * hlgth);
    if (resasc != 0.0 && abserr != 0.0)
        abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        abserr = std::max(eps * 50.0 * resabs, abserr);
    return {result, abserr};
}

struct Segment {
    double a;
    double b;
    double value;
    double error;
    int depth;
};

struct ByError {
    bool operator()(const Segment& x, const Segment& y) const { return x.error < y.error; }
};

// Rings are the contributions of [h/2, h] next to an endpoint, indexed by depth.
// Power-law decay in depth with exponent at most ~1 means the partial sums keep
// growing like a logarithm or faster: a non-integrable endpoint.
bool rings_diverge(const std::vector<double>& rings, int depth, int min_depth) {
    if (depth < min_depth) return false;
    const int half = depth / 2;
    const double far = rings[half];
    const double near = rings[depth];
    if (!(far > 0.0) || !(near > 0.0) || !std::isfinite(far) || !std::isfinite(near))
        return !std::isfinite(near) && !std::isnan(near);
    const double beta = std::log(far / near) / std::log(static_cast<double>(depth) / half);
    return beta <= ring_divergence_exponent;
}

QuadResult diverged_result(double partial) {
    QuadResult r;
    r.value = partial < 0 ? -inf : inf;
    r.abs_error_estimate = inf;
    r.diverged = true;
    return r;
}

QuadResult adapt(const Mapped& g, const QuadConfig& cfg) {
    std::priority_queue<Segment, std::vector<Segment>, ByError> active;
    std::vector<Segment> frozen;
    std::vector<double> rings_lo(max_depth + 2, 0.0);
    std::vector<double> rings_hi(max_depth + 2, 0.0);
    int deepest_lo = 0;
    int deepest_hi = 0;

    auto make = [&](double a, double b, int depth) {
        const Estimate e = gauss_kronrod(g, a, b);
        return Segment{a, b, e.value, e.error, depth};
    };

    double sum_value = 0.0;
    double sum_error = 0.0;
    for (auto [a, b] : {std::pair{0.0, 0.5}, std::pair{0.5, 1.0}}) {
        Segment s = make(a, b, 1);
        sum_value += s.value;
        sum_error += s.error;
        active.push(s);
    }

    auto exact_sums = [&]() {
        double v = 0.0;
        double e = 0.0;
        auto copy = active;
        while (!copy.empty()) {
            v += copy.top().value;
            e += copy.top().error;
            copy.pop();
        }
        for (const Segment& s : frozen) {
            v += s.value;
            e += s.error;
        }
        return std::pair{v, e};
    };

    int count = 2;
    int since_resum = 0;
    double frozen_error = 0.0;
    while (true) {
        if (!std::isfinite(sum_value)) {
            // A non-finite segment estimate. Only an endpoint may legitimately blow up.
            return diverged_result(sum_value);
        }
        if (std::fabs(sum_value) > cfg.divergence_threshold) return diverged_result(sum_value);

        const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(sum_value));
        if (sum_error <= tol || active.empty()) {
            auto [v, e] = exact_sums();
            sum_value = v;
            sum_error = e;
            const double tol2 = std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(v));
            if (e <= tol2) return QuadResult{v, e, true, false};
            if (active.empty()) return QuadResult{v, e, false, false};
        }
        if (count >= cfg.max_subdivisions) {
            if (rings_diverge(rings_lo, deepest_lo, 16) || rings_diverge(rings_hi, deepest_hi, 16))
                return diverged_result(sum_value);
            std::ostringstream os;
            os << "no convergence after " << count << " subdivisions (estimate " << sum_value
               << ", error " << sum_error << ")";
            throw Error(ErrorCode::BudgetExhausted, os.str());
        }

        Segment s = active.top();
        active.pop();
        const double mid = 0.5 * (s.a + s.b);
        const bool at_lo = s.a == 0.0;
        const bool at_hi = s.b == 1.0;
        if (s.depth >= max_depth || !(mid > s.a && mid < s.b) ||
            (s.b - s.a) <= 32.0 * eps * std::max(std::fabs(s.a), std::fabs(s.b))) {
            frozen.push_back(s);
            frozen_error += s.error;
            if (frozen_error > std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(sum_value))) {
                // Unrefinable segments alone exceed the tolerance.
                if (rings_diverge(rings_lo, deepest_lo, 16) || rings_diverge(rings_hi, deepest_hi, 16))
                    return diverged_result(sum_value);
                auto [v, e] = exact_sums();
                return QuadResult{v, e, false, false};
            }
            continue;
        }
        Segment left = make(s.a, mid, s.depth + 1);
        Segment right = make(mid, s.b, s.depth + 1);
        ++count;

        if (at_lo) {
            rings_lo[left.depth] = std::fabs(right.value);
            deepest_lo = std::max(deepest_lo, left.depth);
            if (!std::isfinite(left.value)) return diverged_result(sum_value);
            if (left.depth >= ring_check_depth && rings_diverge(rings_lo, left.depth, ring_check_depth))
                return diverged_result(sum_value);
        }
        if (at_hi) {
            rings_hi[right.depth] = std::fabs(left.value);
            deepest_hi = std::max(deepest_hi, right.depth);
            if (!std::isfinite(right.value)) return diverged_result(sum_value);
            if (right.depth >= ring_check_depth && rings_diverge(rings_hi, right.depth, ring_check_depth))
                return diverged_result(sum_value);
        }
        if (!std::isfinite(left.value) || !std::isfinite(right.value)) {
            throw Error(ErrorCode::NonFiniteEvaluation, "integrand is not finite in the interior");
        }

        sum_value += left.value + right.value - s.value;
        sum_error += left.error + right.error - s.error;
        active.push(left);
        active.push(right);
        if (++since_resum >= 256) {
            auto [v, e] = exact_sums();
            sum_value = v;
            sum_error = e;
            since_resum = 0;
        }
    }
}

QuadResult integrate_one_sided(FunctionRef f, double lo, double hi, const QuadConfig& cfg) {
    if (std::isfinite(lo) && std::isfinite(hi))
        return adapt(Mapped(f, lo, hi, Mapped::Kind::finite), cfg);
    if (std::isfinite(lo)) return adapt(Mapped(f, lo, inf, Mapped::Kind::upper_infinite), cfg);
    return adapt(Mapped(f, -inf, hi, Mapped::Kind::lower_infinite), cfg);
}

} // namespace

QuadResult combine(const QuadResult& a, const QuadResult& b) {
    QuadResult r;
    r.diverged = a.diverged || b.diverged;
    if (r.diverged) {
        const double partial = (a.diverged ? a.value : 0.0) + (b.diverged ? b.value : 0.0);
        r.value = std::isnan(partial) ? inf : partial;
        r.abs_error_estimate = inf;
        return r;
    }
    r.value = a.value + b.value;
    r.abs_error_estimate = a.abs_error_estimate + b.abs_error_estimate;
    r.converged = a.converged && b.converged;
    return r;
}

QuadResult scaled(QuadResult r, double factor) {
    r.value *= factor;
    r.abs_error_estimate *= std::fabs(factor);
    return r;
}

QuadResult integrate(FunctionRef f, Interval iv, const QuadConfig& cfg) {
    cfg.validate();
    if (std::isinf(iv.lo) && std::isinf(iv.hi)) {
        return combine(integrate_one_sided(f, -inf, 0.0, cfg), integrate_one_sided(f, 0.0, inf, cfg));
    }
    return integrate_one_sided(f, iv.lo, iv.hi, cfg);
}

QuadResult integrate_pieces(FunctionRef f, Interval iv, const std::vector<double>& breakpoints,
                            const QuadConfig& cfg) {
    std::vector<double> cuts{iv.lo};
    std::vector<double> inner;
    for (double c : breakpoints)
        if (c > iv.lo && c < iv.hi) inner.push_back(c);
    std::sort(inner.begin(), inner.end());
    for (double c : inner)
        if (c > cuts.back()) cuts.push_back(c);
    cuts.push_back(iv.hi);

    QuadResult total{0.0, 0.0, true, false};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        total = combine(total, integrate(f, Interval(cuts[i], cuts[i + 1]), cfg));
        if (total.diverged) return total;
    }
    total.converged = total.converged &&
                      total.abs_error_estimate <=
                          std::max(cfg.abs_tol * (cuts.size() - 1), cfg.rel_tol * std::fabs(total.value));
    return total;
}

double find_root(FunctionRef g, double lo, double hi, double tol) {
    double a = lo;
    double b = hi;
    double fa = g(a);
    double fb = g(b);
    if (std::isnan(fa) || std::isnan(fb))
        throw Error(ErrorCode::NonFiniteEvaluation, "root function is NaN at the bracket");
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) {
        std::ostringstream os;
        os << "g(" << lo << ") = " << fa << " and g(" << hi << ") = " << fb << " share a sign";
        throw Error(ErrorCode::NoBracket, os.str());
    }
    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    for (int iter = 0; iter < 300; ++iter) {
        if ((fb > 0) == (fc > 0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * eps * std::fabs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            const double s = fb / fa;
            double p;
            double q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::fabs(p);
            const double min1 = 3.0 * xm * q - std::fabs(tol1 * q);
            const double min2 = std::fabs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::fabs(d) > tol1 ? d : std::copysign(tol1, xm);
        fb = g(b);
        if (std::isnan(fb)) throw Error(ErrorCode::NonFiniteEvaluation, "root function is NaN");
    }
    return b;
}

CumulativeIntegral::CumulativeIntegral(RealFunction g, double extent, const QuadConfig& cfg)
    : g_(std::move(g)), extent_(extent), cfg_(cfg), prefix_(cells + 1, 0.0), suffix_(cells + 1, 0.0) {
    if (!(extent > 0)) throw Error(ErrorCode::BadParams, "cumulative integral needs a positive extent");
    std::vector<double> cell(cells, 0.0);
    for (int k = 0; k < cells; ++k) {
        const QuadResult r = integrate(g_, Interval(node(k), node(k + 1)), cfg_);
        cell[k] = r.value;
        if (r.diverged) total_finite_ = false;
    }
    for (int k = 0; k < cells; ++k) prefix_[k + 1] = prefix_[k] + cell[k];
    for (int k = cells - 1; k >= 0; --k) suffix_[k] = suffix_[k + 1] + cell[k];
    total_ = total_finite_ ? prefix_[cells] : inf;
}

double CumulativeIntegral::node(int k) const {
    if (k <= 0) return 0.0;
    if (k >= cells) return extent_;
    const double t = static_cast<double>(k) / cells;
    if (std::isfinite(extent_)) return extent_ * t;
    return t / (1.0 - t);
}

int CumulativeIntegral::cell_of(double r) const {
    const double t = std::isfinite(extent_) ? r / extent_ : r / (1.0 + r);
    int k = std::clamp(static_cast<int>(t * cells), 0, cells - 1);
    while (k > 0 && node(k) > r) --k;
    while (k < cells - 1 && node(k + 1) <= r) ++k;
    return k;
}

double CumulativeIntegral::operator()(double r) const {
    if (r <= 0.0) return 0.0;
    if (r >= extent_) return total_;
    const int k = cell_of(r);
    const double base = node(k);
    if (r == base) return prefix_[k];
    return prefix_[k] + integrate(g_, Interval(base, r), cfg_).value;
}

double CumulativeIntegral::remaining(double r) const {
    if (r >= extent_) return 0.0;
    if (r <= 0.0) return total_;
    const int k = cell_of(r);
    const double next = node(k + 1);
    if (r == next) return suffix_[k + 1];
    return integrate(g_, Interval(r, next), cfg_).value + suffix_[k + 1];
}

} // namespace diffsearch
