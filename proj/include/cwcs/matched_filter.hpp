#pragma once

#include <cstdint>
#include <vector>

#include "cwcs/channel.hpp"
#include "cwcs/rng.hpp"
#include "cwcs/waveform.hpp"

namespace cwcs {

// Closed-form pulse autocorrelation rho(delta) = integral p(tau) p(tau+delta) dtau.
// The integral is even in delta; both trigonometric phases are evaluated at
// omega*|delta|, which coincides with the piecewise closed form on its stated
// domain and extends it symmetrically to negative offsets.
double pulse_autocorrelation(double delta, const WaveformParams& params);

// C_{l,i} = alpha_l * rho(tau_l + i/f).
double correlation_coefficient(double alpha_l, double tau_l, int i,
                               const WaveformParams& params);

// Precomputed correlation coefficients for one channel.
class CorrelationTable {
  public:
    CorrelationTable(const ChannelModel& channel, const WaveformParams& params, int depth);

    double c(std::size_t l, int i) const;  // C_{l,i}; zero outside the stored depth
    double c_sum(int i) const;             // sum over paths of C_{l,i}
    int depth() const { return depth_; }
    double p_total() const { return p_total_; }   // P = sum_l C_{l,0}
    double k_const() const { return k_const_; }   // K (signed)
    double e_p() const { return e_p_; }           // pulse energy, rho(0)
    double isi_support() const;                   // M = |K| / (e^{beta/f} - 1)
    const ChannelModel& channel() const { return channel_; }
    const WaveformParams& params() const { return params_; }

  private:
    ChannelModel channel_;
    WaveformParams params_;
    int depth_;
    std::vector<std::vector<double>> per_path_;  // [l][i + depth]
    std::vector<double> sum_;                    // [i + depth]
    double p_total_ = 0.0, k_const_ = 0.0, e_p_ = 0.0;
};

// depth defaults to 40 + ceil(max tau * f) so recursion identities hold to
// below 1e-9 truncation error.
CorrelationTable build_correlation_table(const ChannelModel& channel,
                                         const WaveformParams& params, int depth = -1);

// Filtered-noise standard deviation sigma_W = sqrt((n0/2) * E_p).
double filtered_noise_sigma(double n0, double e_p);

// Convolution with g(t) = p(-t), scaled by dt; output shares the input grid so
// sample n*oversampling is y_n = y(n/f).
SampledSignal matched_filter(const SampledSignal& received, const WaveformParams& params,
                             int history_depth = 40);

struct FilteredSeries {
    std::vector<double> y;
    double sigma_w = 0.0;
};

// Semi-analytic symbol-rate generator y_n = sum_i c_sum(i) s_{n+i} + W_n with
// W_n i.i.d. N(0, sigma_w^2). Windows are truncated at the sequence edges,
// consistent with superposition of exactly the given symbols.
FilteredSeries symbol_level_output(const SymbolSequence& symbols, const CorrelationTable& table,
                                   double sigma_w, RngStream& rng);

}  // namespace cwcs
