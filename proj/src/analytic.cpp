#include "cwcs/analytic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cwcs {

namespace {

constexpr double kTwoOverSqrtPi = 1.1283791670955125738961589031;
constexpr double kOneOverSqrtPi = 0.5641895835477562869480794516;

// erf(x) = 2/sqrt(pi) * sum_{n>=0} (-1)^n x^(2n+1) / (n! (2n+1)); the terms
// drop below 1e-18 within ~35 iterations for |x| <= 2.
double erf_series(double x) {
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 80; ++n) {
        term *= -x2 / n;
        const double inc = term / (2 * n + 1);
        sum += inc;
        if (std::abs(inc) < 1e-18 * std::abs(sum)) break;
    }
    return kTwoOverSqrtPi * sum;
}

// erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
// evaluated by the modified Lentz algorithm; reliable for x >= 2.
double erfc_continued_fraction(double x) {
    const double tiny = 1e-300;
    double b = x;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int n = 1; n < 300; ++n) {
        const double a = 0.5 * n;
        b = x;  // partial denominators are all x; numerators climb by 1/2
        d = b + a * d;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return std::exp(-x * x) * kOneOverSqrtPi * h;
}

}  // namespace

double erfc(double x) {
    if (!std::isfinite(x)) {
        throw std::domain_error("erfc: argument must be finite");
    }
    if (x < 0.0) return 2.0 - erfc(-x);
    if (x <= 2.0) return 1.0 - erf_series(x);
    if (x > 27.0) return 0.0;  // below double underflow of e^{-x^2}
    return erfc_continued_fraction(x);
}

double ber_optimal(double p_total, double sigma_w) {
    if (!std::isfinite(p_total) || !std::isfinite(sigma_w) || sigma_w < 0.0) {
        throw std::invalid_argument("ber_optimal: need finite p_total and sigma_w >= 0");
    }
    if (sigma_w == 0.0) {
        if (p_total > 0.0) return 0.0;
        if (p_total < 0.0) return 1.0;
        return 0.5;
    }
    return 0.5 * erfc(p_total / (std::sqrt(2.0) * sigma_w));
}

double ber_suboptimal(double p_total, double k_const, double sigma_w,
                      const WaveformParams& params) {
    params.validate();
    if (!std::isfinite(p_total) || !std::isfinite(k_const) || !std::isfinite(sigma_w) ||
        sigma_w <= 0.0) {
        throw std::invalid_argument("ber_suboptimal: need finite inputs and sigma_w > 0");
    }
    if (k_const == 0.0) return ber_optimal(p_total, sigma_w);

    const double growth = std::exp(params.beta / params.f) - 1.0;
    const double m = std::abs(k_const) / growth;  // half-width of the ISI support
    const double s = std::sqrt(2.0) * sigma_w;
    const double z1 = (p_total + m) / s;
    const double z2 = (p_total - m) / s;
    return s * growth / (4.0 * std::abs(k_const)) *
           (z1 * erfc(z1) - z2 * erfc(z2) - std::exp(-z1 * z1) * kOneOverSqrtPi +
            std::exp(-z2 * z2) * kOneOverSqrtPi);
}

double single_path_lower_bound(double ebn0_db) {
    if (!std::isfinite(ebn0_db)) {
        throw std::invalid_argument("single_path_lower_bound: ebn0_db must be finite");
    }
    return 0.5 * erfc(std::sqrt(std::pow(10.0, ebn0_db / 10.0)));
}

}  // namespace cwcs
