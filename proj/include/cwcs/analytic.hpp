#pragma once

#include "cwcs/policy.hpp"
#include "cwcs/waveform.hpp"

namespace cwcs {

struct BerPrediction {
    double ebn0_db = 0.0;
    double ber = 0.0;
    ThresholdPolicy policy = ThresholdPolicy::OptimalGenie;
};

// Complementary error function, implemented locally for bit-stable results:
// Maclaurin series of erf for |x| <= 2, Lentz continued fraction beyond,
// reflection for negative arguments. Absolute error below 1e-13 for |x| <= 6.
double erfc(double x);

// Error probability with the exact interference threshold:
// 0.5 * erfc(p_total / sqrt(2 sigma_w^2)).
double ber_optimal(double p_total, double sigma_w);

// Error probability when only past interference is cancelled and the future
// tail is treated as uniform on [-M, M], M = |k_const| / (e^{beta/f} - 1):
//   s(e^{beta/f}-1)/(4|K|) * [z1 erfc(z1) - z2 erfc(z2) - e^{-z1^2}/sqrt(pi)
//                             + e^{-z2^2}/sqrt(pi)]
// with s = sqrt(2 sigma_w^2), z1 = (P+M)/s, z2 = (P-M)/s.
double ber_suboptimal(double p_total, double k_const, double sigma_w,
                      const WaveformParams& params);

// Single-path matched-filter bound; with E_b equal to the pulse energy this
// collapses to 0.5 * erfc(sqrt(10^(ebn0_db/10))).
double single_path_lower_bound(double ebn0_db);

}  // namespace cwcs
