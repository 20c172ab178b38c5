#pragma once

#include <functional>
#include <memory>
#include <type_traits>
#include <vector>

namespace diffsearch {

using RealFunction = std::function<double(double)>;

/// Non-owning reference to a callable double(double). The referenced callable
/// must outlive the reference.
class FunctionRef {
public:
    template <typename F>
        requires(!std::is_same_v<std::remove_cvref_t<F>, FunctionRef> &&
                 std::is_invocable_r_v<double, F&, double>)
    FunctionRef(F&& f) noexcept
        : obj_(const_cast<void*>(static_cast<const void*>(std::addressof(f)))),
          call_(&invoke<std::remove_reference_t<F>>) {}

    double operator()(double x) const { return call_(obj_, x); }

private:
    template <typename F>
    static double invoke(void* obj, double x) { return (*static_cast<F*>(obj))(x); }

    void* obj_;
    double (*call_)(void*, double);
};

/// Open interval with possibly infinite ends.
struct Interval {
    double lo;
    double hi;

    Interval(double lo_, double hi_);
    bool finite() const;
    double width() const { return hi - lo; }
    bool contains(double x) const { return x > lo && x < hi; }
};

struct QuadConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    int max_subdivisions = 10'000;
    double divergence_threshold = 1e12;

    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    bool converged = false;
    bool diverged = false;
};

/// Adaptive Gauss-Kronrod (10/21) quadrature. Finite intervals are smoothed by
/// a cubic endpoint substitution, half-lines are mapped onto (0,1) first.
/// A non-integrable endpoint yields diverged=true rather than an error.
QuadResult integrate(FunctionRef f, Interval iv, const QuadConfig& cfg = {});

/// Integrates piece by piece between sorted breakpoints falling inside iv.
QuadResult integrate_pieces(FunctionRef f, Interval iv, const std::vector<double>& breakpoints,
                            const QuadConfig& cfg = {});

/// Sums of partial results. Convergence requires every part to converge.
QuadResult combine(const QuadResult& a, const QuadResult& b);
QuadResult scaled(QuadResult r, double factor);

/// Brent's method on a sign-changing bracket.
double find_root(FunctionRef g, double lo, double hi, double tol);

/// r -> ∫_0^r g(s) ds on [0, extent], with checkpoints at 128 equal steps of
/// the (mapped, when extent is infinite) range. Immutable after construction.
class CumulativeIntegral {
public:
    CumulativeIntegral(RealFunction g, double extent, const QuadConfig& cfg = {});

    double operator()(double r) const;
    /// ∫_r^extent g, computed without cancellation against the total.
    double remaining(double r) const;
    double total() const { return total_; }
    bool total_finite() const { return total_finite_; }
    double extent() const { return extent_; }

private:
    static constexpr int cells = 128;

    double node(int k) const;
    int cell_of(double r) const;

    RealFunction g_;
    double extent_;
    QuadConfig cfg_;
    std::vector<double> prefix_;
    std::vector<double> suffix_;
    double total_ = 0.0;
    bool total_finite_ = true;
};

} // namespace diffsearch
