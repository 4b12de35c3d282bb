#include "hetnet/specfun.hpp"

#include "hetnet/errors.hpp"
#include "hetnet/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hetnet::specfun {

namespace {

constexpr double kSeriesLimit = 15.0;
constexpr double kI0Overflow = 713.98;

void require_nonnegative(double v, const char* what) {
    if (!(v >= 0.0)) throw std::domain_error(std::string(what) + " must be nonnegative");
}

// e^{-z} sum_k (z^2/4)^k / (k!)^2
double i0_scaled_series(double z) {
    const double q = 0.25 * z * z;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum * std::exp(-z);
}

// (2 pi z)^{-1/2} sum_k ((2k-1)!!)^2 / (k! (8z)^k), truncated at the smallest term.
double i0_scaled_asymptotic(double z) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double ratio = (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * z * k);
        if (ratio >= 1.0) break;
        term *= ratio;
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

// sum_{k >= k0} r^k e^{-x} I_k(x) for 0 <= r <= 1 and k0 in {0, 1}, by Miller's
// backward recurrence normalised with e^x = I_0(x) + 2 sum_{k>=1} I_k(x).
double scaled_bessel_sum(double x, double r, int k0) {
    if (x == 0.0) return k0 == 0 ? 1.0 : 0.0;
    const int start = 30 + static_cast<int>(std::ceil(std::sqrt(80.0 * x)) + std::min(x, 40.0));
    double upper = 0.0;  // I_{k+1}
    double cur = 1e-30;  // I_k, arbitrary scale
    double horner = 0.0; // sum_{m >= k} r^{m-k} I_m
    double norm = 0.0;   // 2 sum_{m >= k} I_m
    for (int k = start; k >= 1; --k) {
        horner = cur + r * horner;
        norm += 2.0 * cur;
        const double lower = upper + (2.0 * k / x) * cur;
        upper = cur;
        cur = lower;
        if (cur > 1e250) {
            cur *= 1e-250;
            upper *= 1e-250;
            horner *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += cur;
    const double sum = k0 == 0 ? cur + r * horner : r * horner;
    return sum / norm;
}

} // namespace

double bessel_i0_scaled(double z) {
    require_nonnegative(z, "bessel_i0: argument");
    return z < kSeriesLimit ? i0_scaled_series(z) : i0_scaled_asymptotic(z);
}

double bessel_i0(double z) {
    require_nonnegative(z, "bessel_i0: argument");
    if (z > kI0Overflow) throw std::range_error("bessel_i0: result overflows for z = " + std::to_string(z));
    if (z < kSeriesLimit) {
        const double q = 0.25 * z * z;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 200; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return sum;
    }
    return i0_scaled_asymptotic(z) * std::exp(z);
}

double marcum_q1(double a, double b) {
    require_nonnegative(a, "marcum_q1: a");
    require_nonnegative(b, "marcum_q1: b");
    if (b == 0.0) return 1.0;
    if (a == 0.0) return std::exp(-0.5 * b * b);
    const double gap = b - a;
    if (a < b) {
        if (gap > 38.6) return 0.0;
        return std::exp(-0.5 * gap * gap) * scaled_bessel_sum(a * b, a / b, 0);
    }
    if (-gap > 38.6) return 1.0;
    return 1.0 - std::exp(-0.5 * gap * gap) * scaled_bessel_sum(a * b, b / a, 1);
}

double marcum_q1_complement(double a, double b) {
    require_nonnegative(a, "marcum_q1_complement: a");
    require_nonnegative(b, "marcum_q1_complement: b");
    if (b == 0.0) return 0.0;
    if (a == 0.0) return -std::expm1(-0.5 * b * b);
    const double gap = b - a;
    if (a < b) {
        if (gap > 38.6) return 1.0;
        return 1.0 - std::exp(-0.5 * gap * gap) * scaled_bessel_sum(a * b, a / b, 0);
    }
    if (-gap > 38.6) return 0.0;
    return std::exp(-0.5 * gap * gap) * scaled_bessel_sum(a * b, b / a, 1);
}

double rician_pdf(double a, double b) {
    require_nonnegative(a, "rician_pdf: a");
    require_nonnegative(b, "rician_pdf: b");
    const double gap = a - b;
    return b * std::exp(-0.5 * gap * gap) * bessel_i0_scaled(a * b);
}

namespace {

// sum_n c/(c+n) (-w)^n = 2F1[1, c; c+1; -w] for 0 <= w <= 1/2.
double f21_unit_series(double c, double w) {
    double sum = 0.0;
    double power = 1.0;
    for (int n = 0; n < 200; ++n) {
        const double term = c / (c + n) * power;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        power *= -w;
    }
    return sum;
}

} // namespace

double gauss_2f1_interference(double beta, double s) {
    if (!(beta > 2.0)) throw DivergentPathlossError(beta);
    require_nonnegative(s, "gauss_2f1_interference: s");
    const double b = 1.0 - 2.0 / beta;
    if (s <= 0.5) return f21_unit_series(b, s);
    if (s <= 2.0) {
        // b int_0^1 t^{b-1} / (1 + s t) dt with t = v^{1/b}
        const double inv_b = 1.0 / b;
        QuadratureSpec spec;
        spec.rel_tol = 2e-13;
        spec.abs_tol = 1e-16;
        return quad([&](double v) { return 1.0 / (1.0 + s * std::pow(v, inv_b)); }, 0.0, 1.0, spec);
    }
    // b [ int_0^inf - int_1^inf ] t^{b-1} / (1 + s t) dt
    const double reflection = std::numbers::pi / std::sin(std::numbers::pi * b) * std::pow(s, -b);
    const double tail = f21_unit_series(1.0 - b, 1.0 / s) / (s * (1.0 - b));
    return b * (reflection - tail);
}

double interference_tail(double beta, double u) {
    if (!(beta > 2.0)) throw DivergentPathlossError(beta);
    require_nonnegative(u, "interference_tail: u");
    return u * gauss_2f1_interference(beta, u) / (beta - 2.0);
}

} // namespace hetnet::specfun
