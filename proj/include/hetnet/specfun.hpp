#pragma once

// Special functions behind the contact-distance and interference formulas.
// All functions are pure and safe to call concurrently.

namespace hetnet::specfun {

/// Modified Bessel function of the first kind, order zero, for z >= 0.
/// Throws std::domain_error for negative z and std::range_error when the
/// result overflows a double (z above ~713.98).
double bessel_i0(double z);

/// Exponentially scaled e^{-z} I0(z); finite for every z >= 0.
double bessel_i0_scaled(double z);

/// First-order Marcum Q-function Q1(a, b) = int_b^inf x exp(-(x^2+a^2)/2) I0(a x) dx.
double marcum_q1(double a, double b);

/// 1 - Q1(a, b), the Rician CDF, evaluated without cancellation when small.
double marcum_q1_complement(double a, double b);

/// Rician density q(a, b) = b exp(-(a^2+b^2)/2) I0(a b).
double rician_pdf(double a, double b);

/// 2F1[1, 1 - 2/beta; 2 - 2/beta; -s] for beta > 2 and s >= 0.
/// Throws DivergentPathlossError for beta <= 2.
double gauss_2f1_interference(double beta, double s);

/// int_1^inf w / (1 + w^beta / u) dw = u 2F1[1, 1-2/beta; 2-2/beta; -u] / (beta - 2).
/// This is the normalised aggregate-interference integral behind every
/// Poisson-field Laplace factor; it grows like u^{2/beta} for large u.
double interference_tail(double beta, double u);

} // namespace hetnet::specfun
