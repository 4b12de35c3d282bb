#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature with global bisection, plus a
// fixed Gauss-Legendre rule for inner integrals whose cost must be bounded.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hetnet {

/// How an integral over [a, inf) is reduced to a finite computation.
enum class TailMapping {
    rational,  ///< x = a + L t / (1 - t), t in [0, 1)
    truncate,  ///< integrate over [a, a + L] only; L must bound the integrand's support
};

struct QuadratureSpec {
    double rel_tol = 1e-7;
    double abs_tol = 1e-10;
    int max_subdivisions = 200;
    TailMapping tail = TailMapping::rational;
    /// Length scale L of the semi-infinite mapping (or truncation length).
    double tail_scale = 1.0;

    void validate() const;

    QuadratureSpec with_tol(double rel, double abs) const {
        QuadratureSpec s = *this;
        s.rel_tol = rel;
        s.abs_tol = abs;
        return s;
    }
    QuadratureSpec with_scale(double scale) const {
        QuadratureSpec s = *this;
        s.tail_scale = scale;
        return s;
    }
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    int subdivisions = 0;
};

/// Thrown when the adaptive scheme exhausts `max_subdivisions` before the
/// requested tolerance is met. Carries the best available estimate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const QuadResult& best, const std::string& where)
        : std::runtime_error(where + ": quadrature did not converge (estimate " +
                             std::to_string(best.value) + ", error " +
                             std::to_string(best.error) + ")"),
          best_(best) {}

    const QuadResult& best() const noexcept { return best_; }

private:
    QuadResult best_;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
};

// One 15-point Kronrod panel with the QUADPACK error heuristic.
template <class F>
Segment gk15(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(centre - dx);
        const double f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double mean = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

    const double h = std::abs(half);
    double err = std::abs((resk - resg) * half);
    resasc *= h;
    resabs *= h;
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {a, b, resk * half, err};
}

template <class F>
QuadResult adaptive(F& f, double a, double b, const QuadratureSpec& spec, bool& converged) {
    std::vector<Segment> heap;
    heap.reserve(static_cast<std::size_t>(spec.max_subdivisions) + 2);
    auto by_error = [](const Segment& x, const Segment& y) { return x.error < y.error; };

    heap.push_back(gk15(f, a, b));
    double total = heap.front().value;
    double error = heap.front().error;
    int evaluations = 15;
    converged = false;

    while (true) {
        if (error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
            converged = true;
            break;
        }
        if (static_cast<int>(heap.size()) >= spec.max_subdivisions) break;
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const Segment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Interval collapsed to machine resolution; accept what we have.
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), by_error);
            break;
        }
        const Segment left = gk15(f, worst.a, mid);
        const Segment right = gk15(f, mid, worst.b);
        evaluations += 30;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), by_error);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
    }

    // Re-sum to shed the drift of the running totals.
    total = 0.0;
    error = 0.0;
    for (const auto& s : heap) {
        total += s.value;
        error += s.error;
    }
    if (!converged) converged = error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
    return {total, error, evaluations, static_cast<int>(heap.size())};
}

} // namespace detail

/// Adaptive integral of `f` over [a, b]; `b` may be +infinity, in which case
/// `spec.tail` decides how the tail is handled. Throws ConvergenceError when
/// the tolerance max(abs_tol, rel_tol |I|) cannot be met.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
    spec.validate();
    if (a == b) return {};
    if (b < a) {
        QuadResult r = integrate(f, b, a, spec);
        r.value = -r.value;
        return r;
    }
    bool converged = false;
    QuadResult r;
    if (std::isinf(b)) {
        const double scale = spec.tail_scale;
        if (spec.tail == TailMapping::truncate) {
            r = detail::adaptive(f, a, a + scale, spec, converged);
        } else {
            auto mapped = [&](double t) {
                const double one_minus = 1.0 - t;
                const double x = a + scale * t / one_minus;
                const double v = f(x);
                return v == 0.0 ? 0.0 : v * scale / (one_minus * one_minus);
            };
            r = detail::adaptive(mapped, 0.0, 1.0, spec, converged);
        }
    } else {
        r = detail::adaptive(f, a, b, spec, converged);
    }
    if (!converged) throw ConvergenceError(r, "integrate");
    return r;
}

/// Convenience wrapper returning only the value.
template <class F>
double quad(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
    return integrate(std::forward<F>(f), a, b, spec).value;
}

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
public:
    explicit GaussLegendre(int n);

    int size() const noexcept { return static_cast<int>(nodes_.size()); }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// Shared instance for the given order (built once, then read-only).
    static const GaussLegendre& get(int n);

    /// Composite rule over [a, b] split into `panels` equal pieces.
    template <class F>
    double apply(F&& f, double a, double b, int panels = 1) const {
        const double width = (b - a) / panels;
        double sum = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double lo = a + p * width;
            const double centre = lo + 0.5 * width;
            const double half = 0.5 * width;
            double s = 0.0;
            for (std::size_t k = 0; k < nodes_.size(); ++k) s += weights_[k] * f(centre + half * nodes_[k]);
            sum += s * half;
        }
        return sum;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

} // namespace hetnet
