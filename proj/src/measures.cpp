#include "diffsearch/measures.hpp"

#include "diffsearch/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace diffsearch {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();

[[noreturn]] void bad_params(const std::string& msg) { throw Error(ErrorCode::BadParams, msg); }

// ∫ over a segment of width w of sqrt of a linear function from a to b.
double sqrt_linear_segment(double w, double a, double b) {
    const double sa = std::sqrt(a);
    const double sb = std::sqrt(b);
    if (sa + sb == 0.0) return 0.0;
    return (2.0 / 3.0) * w * (a + sa * sb + b) / (sa + sb);
}

double generic_quantile(const detail::TailModel& m, double u);

} // namespace

namespace detail {

class TailModel {
public:
    virtual ~TailModel() = default;
    virtual MeasureKind kind() const = 0;
    virtual double extent() const = 0;
    virtual double endpoint_atom() const = 0;
    virtual bool has_density() const = 0;
    virtual double tail(double r) const = 0;
    virtual double log_tail(double r) const { return std::log(tail(r)); }
    virtual double density(double r) const = 0;
    virtual double hazard(double r) const {
        const double t = tail(r);
        return t > 0.0 ? density(r) / t : inf;
    }
    virtual double sqrt_cumulative(double r) const = 0;
    virtual double sqrt_remaining(double r) const { return sqrt_total() - sqrt_cumulative(r); }
    virtual double sqrt_total() const = 0;
    virtual std::vector<double> breakpoints() const { return {}; }
    virtual double quantile(double u) const { return generic_quantile(*this, u); }

    virtual const std::vector<std::pair<double, double>>& knots() const { return empty_; }
    virtual const std::vector<std::pair<double, double>>& atoms() const { return empty_; }

private:
    static inline const std::vector<std::pair<double, double>> empty_{};
};

} // namespace detail

namespace {

using detail::TailModel;

double generic_quantile(const TailModel& m, double u) {
    if (u >= 1.0) return 0.0;
    double lo = 0.0;
    double hi = m.extent();
    if (!std::isfinite(hi)) {
        hi = 1.0;
        while (m.tail(hi) > u) hi *= 2.0;
    }
    if (m.tail(hi) > u) return hi;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (m.tail(mid) > u)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

class Degenerate final : public TailModel {
public:
    explicit Degenerate(double A) : A_(A) {}
    MeasureKind kind() const override { return MeasureKind::closed_form; }
    double extent() const override { return A_; }
    double endpoint_atom() const override { return 1.0; }
    bool has_density() const override { return true; }
    double tail(double r) const override { return r < A_ ? 1.0 : 0.0; }
    double log_tail(double r) const override { return r < A_ ? 0.0 : -inf; }
    double density(double) const override { return 0.0; }
    double hazard(double) const override { return 0.0; }
    double sqrt_cumulative(double r) const override { return std::clamp(r, 0.0, A_); }
    double sqrt_remaining(double r) const override { return A_ - sqrt_cumulative(r); }
    double sqrt_total() const override { return A_; }
    double quantile(double u) const override { return u >= 1.0 ? 0.0 : A_; }

private:
    double A_;
};

class Uniform final : public TailModel {
public:
    explicit Uniform(double A) : A_(A) {}
    MeasureKind kind() const override { return MeasureKind::closed_form; }
    double extent() const override { return A_; }
    double endpoint_atom() const override { return 0.0; }
    bool has_density() const override { return true; }
    double tail(double r) const override { return r <= 0 ? 1.0 : (r < A_ ? (A_ - r) / A_ : 0.0); }
    double density(double r) const override { return r < A_ ? 1.0 / A_ : 0.0; }
    double hazard(double r) const override { return r < A_ ? 1.0 / (A_ - std::max(r, 0.0)) : inf; }
    double sqrt_cumulative(double r) const override { return sqrt_total() - sqrt_remaining(r); }
    double sqrt_remaining(double r) const override { return sqrt_total() * std::pow(tail(r), 1.5); }
    double sqrt_total() const override { return 2.0 * A_ / 3.0; }
    double quantile(double u) const override { return u >= 1.0 ? 0.0 : A_ * (1.0 - std::max(u, 0.0)); }

private:
    double A_;
};

class Exponential final : public TailModel {
public:
    explicit Exponential(double lambda) : l_(lambda) {}
    MeasureKind kind() const override { return MeasureKind::closed_form; }
    double extent() const override { return inf; }
    double endpoint_atom() const override { return 0.0; }
    bool has_density() const override { return true; }
    double tail(double r) const override { return r <= 0 ? 1.0 : std::exp(-l_ * r); }
    double log_tail(double r) const override { return r <= 0 ? 0.0 : -l_ * r; }
    double density(double r) const override { return l_ * tail(r); }
    double hazard(double) const override { return l_; }
    double sqrt_cumulative(double r) const override { return r <= 0 ? 0.0 : -(2.0 / l_) * std::expm1(-0.5 * l_ * r); }
    double sqrt_remaining(double r) const override { return r <= 0 ? sqrt_total() : (2.0 / l_) * std::exp(-0.5 * l_ * r); }
    double sqrt_total() const override { return 2.0 / l_; }
    double quantile(double u) const override { return u >= 1.0 ? 0.0 : -std::log(u) / l_; }

private:
    double l_;
};

class Pareto final : public TailModel {
public:
    Pareto(double alpha, double A0) : a_(alpha), A0_(A0) {}
    MeasureKind kind() const override { return MeasureKind::closed_form; }
    double extent() const override { return inf; }
    double endpoint_atom() const override { return 0.0; }
    bool has_density() const override { return true; }
    double tail(double r) const override { return r < A0_ ? 1.0 : std::pow(r / A0_, -a_); }
    double log_tail(double r) const override { return r < A0_ ? 0.0 : -a_ * std::log(r / A0_); }
    double density(double r) const override { return r < A0_ ? 0.0 : (a_ / A0_) * std::pow(r / A0_, -a_ - 1.0); }
    double hazard(double r) const override { return r < A0_ ? 0.0 : a_ / r; }
    double sqrt_cumulative(double r) const override {
        if (r <= A0_) return std::max(r, 0.0);
        const double e = 1.0 - 0.5 * a_;
        if (e == 0.0) return A0_ + A0_ * std::log(r / A0_);
        return A0_ + (A0_ / e) * (std::pow(r / A0_, e) - 1.0);
    }
    double sqrt_remaining(double r) const override {
        if (a_ <= 2.0) return inf;
        const double e = 0.5 * a_ - 1.0;
        if (r <= A0_) return (A0_ - std::max(r, 0.0)) + A0_ / e;
        return (A0_ / e) * std::pow(r / A0_, -e);
    }
    double sqrt_total() const override { return a_ > 2.0 ? A0_ + 2.0 * A0_ / (a_ - 2.0) : inf; }
    std::vector<double> breakpoints() const override { return {A0_}; }
    double quantile(double u) const override { return u >= 1.0 ? 0.0 : A0_ * std::pow(u, -1.0 / a_); }

private:
    double a_;
    double A0_;
};

// Models without a closed-form sqrt-tail cumulative share this integral.
class NumericSqrt {
public:
    NumericSqrt(const TailModel& m, double extent)
        : cum_([&m](double r) { return std::sqrt(m.tail(r)); }, extent) {}
    const CumulativeIntegral& cum() const { return cum_; }

private:
    CumulativeIntegral cum_;
};

class Gaussian final : public TailModel {
public:
    explicit Gaussian(double sigma) : s_(sigma), sqrt_(*this, inf) {}
    MeasureKind kind() const override { return MeasureKind::closed_form; }
    double extent() const override { return inf; }
    double endpoint_atom() const override { return 0.0; }
    bool has_density() const override { return true; }
    double tail(double r) const override { return r <= 0 ? 1.0 : std::erfc(r / (s_ * std::numbers::sqrt2)); }
    double log_tail(double r) const override {
        const double z = r / (s_ * std::numbers::sqrt2);
        if (z < 25.0) return std::log(tail(r));
        const double z2 = z * z;
        const double series = 1.0 - 1.0 / (2.0 * z2) + 3.0 / (4.0 * z2 * z2) - 15.0 / (8.0 * z2 * z2 * z2);
        return -z2 - std::log(z * std::sqrt(std::numbers::pi)) + std::log(series);
    }
    double log_density(double r) const {
        return 0.5 * std::log(2.0 / std::numbers::pi) - std::log(s_) - 0.5 * (r / s_) * (r / s_);
    }
    double density(double r) const override { return r < 0 ? 0.0 : std::exp(log_density(r)); }
    double hazard(double r) const override { return std::exp(log_density(std::max(r, 0.0)) - log_tail(r)); }
    double sqrt_cumulative(double r) const override { return sqrt_.cum()(r); }
    double sqrt_remaining(double r) const override { return sqrt_.cum().remaining(r); }
    double sqrt_total() const override { return sqrt_.cum().total(); }

private:
    double s_;
    NumericSqrt sqrt_;
};

class Custom final : public TailModel {
public:
    explicit Custom(CustomTail spec) : spec_(std::move(spec)), sqrt_(*this, spec_.extent) {
        std::sort(spec_.breakpoints.begin(), spec_.breakpoints.end());
    }
    MeasureKind kind() const override { return MeasureKind::closed_form; }
    double extent() const override { return spec_.extent; }
    double endpoint_atom() const override { return spec_.endpoint_atom; }
    bool has_density() const override { return static_cast<bool>(spec_.density); }
    double tail(double r) const override {
        if (r <= 0) return 1.0;
        if (r >= spec_.extent) return 0.0;
        return spec_.tail(r);
    }
    double density(double r) const override {
        if (!spec_.density) throw Error(ErrorCode::NoDensity, "custom measure has no density");
        return r >= spec_.extent ? 0.0 : spec_.density(std::max(r, 0.0));
    }
    double sqrt_cumulative(double r) const override { return sqrt_.cum()(r); }
    double sqrt_remaining(double r) const override { return sqrt_.cum().remaining(r); }
    double sqrt_total() const override { return sqrt_.cum().total(); }
    std::vector<double> breakpoints() const override { return spec_.breakpoints; }

private:
    CustomTail spec_;
    NumericSqrt sqrt_;
};

class PiecewiseLinear final : public TailModel {
public:
    explicit PiecewiseLinear(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
        if (knots_.size() < 2) bad_params("a tabulated tail needs at least two knots");
        if (knots_[0].first != 0.0) bad_params("the first tail knot must sit at distance 0");
        if (std::fabs(knots_[0].second - 1.0) > 1e-12) bad_params("the tail at the origin must equal 1");
        knots_[0].second = 1.0;
        for (std::size_t j = 1; j < knots_.size(); ++j) {
            const auto [r, t] = knots_[j];
            if (!(r > knots_[j - 1].first) || !std::isfinite(r))
                bad_params("tail knots must have strictly increasing finite distances");
            if (!(t >= 0.0) || t > knots_[j - 1].second + 1e-15)
                bad_params("tail knots must be non-increasing and non-negative");
            knots_[j].second = std::min(t, knots_[j - 1].second);
        }
        // Drop knots after the tail reaches zero: that distance is the support bound.
        for (std::size_t j = 1; j < knots_.size(); ++j) {
            if (knots_[j].second == 0.0) {
                knots_.resize(j + 1);
                break;
            }
        }
        const std::size_t n = knots_.size();
        r_.resize(n);
        t_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            r_[j] = knots_[j].first;
            t_[j] = knots_[j].second;
        }
        sqrt_prefix_.assign(n, 0.0);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const double w = r_[j + 1] - r_[j];
            sqrt_prefix_[j + 1] = sqrt_prefix_[j] + sqrt_linear_segment(w, t_[j], t_[j + 1]);
        }
    }

    MeasureKind kind() const override { return MeasureKind::tabulated; }
    double extent() const override { return r_.back(); }
    double endpoint_atom() const override { return t_.back(); }
    bool has_density() const override { return true; }

    double tail(double r) const override {
        if (r <= 0) return 1.0;
        if (r >= r_.back()) return 0.0;
        const std::size_t j = segment(r);
        const double w = r_[j + 1] - r_[j];
        const double s = (r - r_[j]) / w;
        return t_[j] + s * (t_[j + 1] - t_[j]);
    }
    double density(double r) const override {
        if (r >= r_.back()) return 0.0;
        const std::size_t j = segment(std::max(r, 0.0));
        return (t_[j] - t_[j + 1]) / (r_[j + 1] - r_[j]);
    }
    double sqrt_cumulative(double r) const override {
        if (r <= 0) return 0.0;
        if (r >= r_.back()) return sqrt_prefix_.back();
        const std::size_t j = segment(r);
        return sqrt_prefix_[j] + sqrt_linear_segment(r - r_[j], t_[j], tail(r));
    }
    double sqrt_remaining(double r) const override {
        if (r <= 0) return sqrt_prefix_.back();
        if (r >= r_.back()) return 0.0;
        const std::size_t j = segment(r);
        return sqrt_linear_segment(r_[j + 1] - r, tail(r), t_[j + 1]) + (sqrt_prefix_.back() - sqrt_prefix_[j + 1]);
    }
    double sqrt_total() const override { return sqrt_prefix_.back(); }
    std::vector<double> breakpoints() const override { return {r_.begin() + 1, r_.end() - 1}; }
    double quantile(double u) const override {
        if (u >= 1.0) return 0.0;
        if (t_.back() > u) return r_.back();
        // first knot with tail <= u
        const auto it = std::partition_point(t_.begin(), t_.end(), [u](double t) { return t > u; });
        const std::size_t j = static_cast<std::size_t>(it - t_.begin());
        if (j == 0) return 0.0;
        const double frac = (t_[j - 1] - u) / (t_[j - 1] - t_[j]);
        return r_[j - 1] + frac * (r_[j] - r_[j - 1]);
    }
    const std::vector<std::pair<double, double>>& knots() const override { return knots_; }

private:
    std::size_t segment(double r) const {
        const auto it = std::upper_bound(r_.begin(), r_.end(), r);
        const std::size_t j = static_cast<std::size_t>(it - r_.begin());
        return std::min(j == 0 ? 0 : j - 1, r_.size() - 2);
    }

    std::vector<std::pair<double, double>> knots_;
    std::vector<double> r_;
    std::vector<double> t_;
    std::vector<double> sqrt_prefix_;
};

class Discrete final : public TailModel {
public:
    explicit Discrete(std::vector<std::pair<double, double>> atoms) {
        if (atoms.empty()) bad_params("a discrete half needs at least one atom");
        std::sort(atoms.begin(), atoms.end());
        double total = 0.0;
        for (const auto& [r, m] : atoms) {
            if (!(r > 0.0) || !std::isfinite(r)) bad_params("atoms must sit at positive finite distances");
            if (!(m > 0.0)) bad_params("atom masses must be positive");
            if (!atoms_.empty() && atoms_.back().first == r)
                atoms_.back().second += m;
            else
                atoms_.emplace_back(r, m);
            total += m;
        }
        if (std::fabs(total - 1.0) > 1e-9) bad_params("atom masses must sum to 1");
        for (auto& a : atoms_) a.second /= total;

        const std::size_t n = atoms_.size();
        suffix_.assign(n + 1, 0.0);
        for (std::size_t i = n; i-- > 0;) suffix_[i] = suffix_[i + 1] + atoms_[i].second;
        suffix_[0] = 1.0;
        sqrt_prefix_.assign(n + 1, 0.0);
        double prev = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sqrt_prefix_[i + 1] = sqrt_prefix_[i] + (atoms_[i].first - prev) * std::sqrt(suffix_[i]);
            prev = atoms_[i].first;
        }
    }

    MeasureKind kind() const override { return MeasureKind::discrete; }
    double extent() const override { return atoms_.back().first; }
    double endpoint_atom() const override { return atoms_.back().second; }
    bool has_density() const override { return false; }
    double tail(double r) const override { return suffix_[first_beyond(r)]; }
    double density(double) const override {
        throw Error(ErrorCode::NoDensity, "discrete half-measure has no density");
    }
    double hazard(double) const override {
        throw Error(ErrorCode::NoDensity, "discrete half-measure has no density");
    }
    double sqrt_cumulative(double r) const override {
        if (r <= 0) return 0.0;
        const std::size_t i = first_beyond(r);
        if (i >= atoms_.size()) return sqrt_prefix_.back();
        const double prev = i == 0 ? 0.0 : atoms_[i - 1].first;
        return sqrt_prefix_[i] + (r - prev) * std::sqrt(suffix_[i]);
    }
    double sqrt_total() const override { return sqrt_prefix_.back(); }
    std::vector<double> breakpoints() const override {
        std::vector<double> b;
        for (std::size_t i = 0; i + 1 < atoms_.size(); ++i) b.push_back(atoms_[i].first);
        return b;
    }
    double quantile(double u) const override {
        if (u >= 1.0) return 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            if (suffix_[i + 1] <= u) return atoms_[i].first;
        return atoms_.back().first;
    }
    const std::vector<std::pair<double, double>>& atoms() const override { return atoms_; }

private:
    std::size_t first_beyond(double r) const {
        const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), r,
                                         [](double x, const std::pair<double, double>& a) { return x < a.first; });
        return static_cast<std::size_t>(it - atoms_.begin());
    }

    std::vector<std::pair<double, double>> atoms_;
    std::vector<double> suffix_;
    std::vector<double> sqrt_prefix_;
};

void require_positive(const ParamMap& params, const std::string& key, double& out) {
    const auto it = params.find(key);
    if (it == params.end()) bad_params("missing parameter '" + key + "'");
    if (!(it->second > 0.0) || !std::isfinite(it->second))
        bad_params("parameter '" + key + "' must be positive and finite");
    out = it->second;
}

} // namespace

const char* to_string(Side side) { return side == Side::negative ? "negative" : "positive"; }

const char* to_string(MeasureKind kind) {
    switch (kind) {
    case MeasureKind::closed_form: return "closed_form";
    case MeasureKind::tabulated: return "tabulated";
    case MeasureKind::discrete: return "discrete";
    }
    return "?";
}

const char* to_string(Family family) {
    switch (family) {
    case Family::degenerate: return "degenerate";
    case Family::uniform: return "uniform";
    case Family::exponential: return "exponential";
    case Family::gaussian: return "gaussian";
    case Family::pareto: return "pareto";
    case Family::custom: return "custom";
    }
    return "?";
}

Family family_from_string(const std::string& name) {
    for (Family f : {Family::degenerate, Family::uniform, Family::exponential, Family::gaussian, Family::pareto})
        if (name == to_string(f)) return f;
    bad_params("unknown family '" + name + "'");
}

HalfSupportMeasure::HalfSupportMeasure(Side side, std::shared_ptr<const detail::TailModel> model,
                                       std::optional<FamilyParams> family)
    : side_(side), model_(std::move(model)), family_(std::move(family)) {}

HalfSupportMeasure HalfSupportMeasure::degenerate(Side side, double A) {
    if (!(A > 0) || !std::isfinite(A)) bad_params("degenerate needs A > 0");
    return {side, std::make_shared<Degenerate>(A), FamilyParams{Family::degenerate, {{"A", A}}}};
}

HalfSupportMeasure HalfSupportMeasure::uniform(Side side, double A) {
    if (!(A > 0) || !std::isfinite(A)) bad_params("uniform needs A > 0");
    return {side, std::make_shared<Uniform>(A), FamilyParams{Family::uniform, {{"A", A}}}};
}

HalfSupportMeasure HalfSupportMeasure::exponential(Side side, double lambda) {
    if (!(lambda > 0) || !std::isfinite(lambda)) bad_params("exponential needs lambda > 0");
    return {side, std::make_shared<Exponential>(lambda), FamilyParams{Family::exponential, {{"lambda", lambda}}}};
}

HalfSupportMeasure HalfSupportMeasure::gaussian(Side side, double sigma) {
    if (!(sigma > 0) || !std::isfinite(sigma)) bad_params("gaussian needs sigma > 0");
    return {side, std::make_shared<Gaussian>(sigma), FamilyParams{Family::gaussian, {{"sigma", sigma}}}};
}

HalfSupportMeasure HalfSupportMeasure::pareto(Side side, double alpha, double A0) {
    if (!(alpha > 0) || !(A0 > 0) || !std::isfinite(alpha) || !std::isfinite(A0))
        bad_params("pareto needs alpha > 0 and A0 > 0");
    return {side, std::make_shared<Pareto>(alpha, A0),
            FamilyParams{Family::pareto, {{"alpha", alpha}, {"A0", A0}}}};
}

HalfSupportMeasure HalfSupportMeasure::tabulated(Side side, std::vector<std::pair<double, double>> knots) {
    return {side, std::make_shared<PiecewiseLinear>(std::move(knots)), std::nullopt};
}

HalfSupportMeasure HalfSupportMeasure::discrete(Side side, std::vector<std::pair<double, double>> atoms) {
    return {side, std::make_shared<Discrete>(std::move(atoms)), std::nullopt};
}

HalfSupportMeasure HalfSupportMeasure::from_functions(Side side, CustomTail spec) {
    if (!spec.tail) bad_params("custom measure needs a tail function");
    if (!(spec.extent > 0)) bad_params("custom measure needs a positive extent");
    if (spec.endpoint_atom < 0 || spec.endpoint_atom >= 1) bad_params("endpoint atom must lie in [0,1)");
    if (!std::isfinite(spec.extent) && spec.endpoint_atom != 0) bad_params("endpoint atom needs a finite bound");
    return {side, std::make_shared<Custom>(std::move(spec)), FamilyParams{Family::custom, {}}};
}

HalfSupportMeasure HalfSupportMeasure::mirrored() const {
    return {side_ == Side::negative ? Side::positive : Side::negative, model_, family_};
}

MeasureKind HalfSupportMeasure::kind() const { return model_->kind(); }
double HalfSupportMeasure::extent() const { return model_->extent(); }
double HalfSupportMeasure::support_bound() const {
    return side_ == Side::negative ? -model_->extent() : model_->extent();
}
double HalfSupportMeasure::endpoint_atom_mass() const { return model_->endpoint_atom(); }
bool HalfSupportMeasure::has_density() const { return model_->has_density(); }

double HalfSupportMeasure::tail(double x) const {
    const double r = side_ == Side::negative ? -x : x;
    return r < 0 ? 1.0 : model_->tail(r);
}

double HalfSupportMeasure::density(double x) const {
    const double r = side_ == Side::negative ? -x : x;
    return r < 0 ? 0.0 : model_->density(r);
}

double HalfSupportMeasure::tail_at(double r) const { return model_->tail(r); }
double HalfSupportMeasure::log_tail_at(double r) const { return model_->log_tail(r); }
double HalfSupportMeasure::density_at(double r) const { return model_->density(r); }
double HalfSupportMeasure::hazard_at(double r) const { return model_->hazard(r); }
double HalfSupportMeasure::sqrt_tail_cumulative(double r) const { return model_->sqrt_cumulative(r); }
double HalfSupportMeasure::sqrt_tail_remaining(double r) const { return model_->sqrt_remaining(r); }
double HalfSupportMeasure::sqrt_tail_total() const { return model_->sqrt_total(); }
std::vector<double> HalfSupportMeasure::breakpoints() const { return model_->breakpoints(); }
double HalfSupportMeasure::quantile(double u) const { return model_->quantile(u); }
const std::vector<std::pair<double, double>>& HalfSupportMeasure::knots() const { return model_->knots(); }
const std::vector<std::pair<double, double>>& HalfSupportMeasure::atoms() const { return model_->atoms(); }

TargetDistribution::TargetDistribution(double p, HalfSupportMeasure minus, HalfSupportMeasure plus)
    : p_(p), minus_(std::move(minus)), plus_(std::move(plus)) {
    if (!(p > 0.0 && p < 1.0)) bad_params("p must lie strictly between 0 and 1");
    if (minus_.side() != Side::negative) bad_params("minus half must be on the negative side");
    if (plus_.side() != Side::positive) bad_params("plus half must be on the positive side");
}

TargetDistribution TargetDistribution::symmetric(const HalfSupportMeasure& plus) {
    const HalfSupportMeasure pos = plus.side() == Side::positive ? plus : plus.mirrored();
    return TargetDistribution(0.5, pos.mirrored(), pos);
}

QuadResult sqrt_tail_integral(const HalfSupportMeasure& m, const QuadConfig& cfg) {
    if (m.kind() != MeasureKind::closed_form) return QuadResult{m.sqrt_tail_total(), 0.0, true, false};
    return integrate_pieces([&m](double r) { return std::sqrt(m.tail_at(r)); }, Interval(0.0, m.extent()),
                            m.breakpoints(), cfg);
}

SqrtTailIntegrals sqrt_tail_integrals(const TargetDistribution& t, const QuadConfig& cfg) {
    return {sqrt_tail_integral(t.minus(), cfg), sqrt_tail_integral(t.plus(), cfg)};
}

double balance_rhs(double p) { return ((1.0 - p) * std::log1p(-p)) / (p * std::log(p)); }

BalanceRatio balance_ratio(const TargetDistribution& t, const QuadConfig& cfg) {
    const SqrtTailIntegrals s = sqrt_tail_integrals(t, cfg);
    if (s.minus_integral.diverged || s.plus_integral.diverged)
        throw Error(ErrorCode::DivergentTail, "a sqrt-tail integral diverges; the balance ratio is undefined");
    return {s.plus_integral.value / s.minus_integral.value, balance_rhs(t.p())};
}

bool is_balanced(const TargetDistribution& t, double tol, const QuadConfig& cfg) {
    const BalanceRatio b = balance_ratio(t, cfg);
    return std::fabs(b.lhs - b.rhs) <= tol * std::max(1.0, std::fabs(b.rhs));
}

QuadResult log_moment(const HalfSupportMeasure& m, double power, const QuadConfig& cfg) {
    auto weight = [power](double r) {
        const double l = std::fabs(std::log(r));
        return l == 0.0 ? 0.0 : r * r * std::pow(l, power);
    };
    if (m.kind() == MeasureKind::discrete) {
        double s = 0.0;
        for (const auto& [r, w] : m.atoms()) s += weight(r) * w;
        return {s, 0.0, true, false};
    }
    if (!m.has_density()) throw Error(ErrorCode::NoDensity, "moment needs a density or atoms");
    QuadResult r = integrate_pieces([&](double x) { return weight(x) * m.density_at(x); },
                                    Interval(0.0, m.extent()), m.breakpoints(), cfg);
    if (!r.diverged && m.endpoint_atom_mass() > 0) r.value += m.endpoint_atom_mass() * weight(m.extent());
    return r;
}

QuadResult moment_sufficiency(const HalfSupportMeasure& m, double eps, const QuadConfig& cfg) {
    if (!(eps > 0)) bad_params("moment sufficiency needs eps > 0");
    return log_moment(m, 1.0 + eps, cfg);
}

QuadResult expected_distance(const HalfSupportMeasure& m, const QuadConfig& cfg) {
    if (m.kind() != MeasureKind::closed_form) {
        // Exact for piecewise-linear and step tails.
        double total = 0.0;
        if (m.kind() == MeasureKind::discrete) {
            for (const auto& [r, w] : m.atoms()) total += r * w;
        } else {
            const auto& k = m.knots();
            for (std::size_t j = 0; j + 1 < k.size(); ++j)
                total += 0.5 * (k[j + 1].first - k[j].first) * (k[j].second + k[j + 1].second);
        }
        return {total, 0.0, true, false};
    }
    return integrate_pieces([&m](double r) { return m.tail_at(r); }, Interval(0.0, m.extent()), m.breakpoints(),
                            cfg);
}

double effective_extent(const HalfSupportMeasure& m, double mass) {
    if (std::isfinite(m.extent())) return m.extent();
    return m.quantile(mass);
}

HalfSupportMeasure family_half(Side side, Family family, const ParamMap& params) {
    double a = 0.0;
    double b = 0.0;
    switch (family) {
    case Family::degenerate:
        require_positive(params, "A", a);
        return HalfSupportMeasure::degenerate(side, a);
    case Family::uniform:
        require_positive(params, "A", a);
        return HalfSupportMeasure::uniform(side, a);
    case Family::exponential:
        require_positive(params, "lambda", a);
        return HalfSupportMeasure::exponential(side, a);
    case Family::gaussian:
        require_positive(params, "sigma", a);
        return HalfSupportMeasure::gaussian(side, a);
    case Family::pareto:
        require_positive(params, "alpha", a);
        require_positive(params, "A0", b);
        return HalfSupportMeasure::pareto(side, a, b);
    case Family::custom: break;
    }
    bad_params("custom family cannot be built from parameters");
}

TargetDistribution catalog(const std::string& name, const ParamMap& params) {
    const Family family = family_from_string(name);
    if (family == Family::pareto) {
        const auto it = params.find("alpha");
        if (it != params.end() && !(it->second > 2.0)) bad_params("catalog pareto needs alpha > 2");
    }
    return TargetDistribution::symmetric(family_half(Side::positive, family, params));
}

} // namespace diffsearch
