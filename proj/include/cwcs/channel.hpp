#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cwcs/rng.hpp"
#include "cwcs/waveform.hpp"

namespace cwcs {

struct ChannelTap {
    double delay = 0.0;  // seconds
    double gain = 1.0;   // linear attenuation
};

// Tapped-delay-line multipath channel. Taps are ordered by strictly
// increasing delay and the first delay is 0.
struct ChannelModel {
    std::vector<ChannelTap> taps;
    double gamma = 0.0;  // damping coefficient when built from exponential_channel

    std::size_t paths() const { return taps.size(); }
    double max_delay() const;
    void validate() const;
};

// alpha_l = e^{-gamma * tau_l}.
ChannelModel exponential_channel(const std::vector<double>& delays, double gamma);

// Parse a channel description file: one "delay gain" (or "delay,gain") pair
// per line; '#' starts a comment.
ChannelModel load_channel_file(const std::string& path);

struct NoiseSpec {
    double ebn0_db = 0.0;
    double n0 = 0.0;  // one-sided PSD
    std::uint64_t seed = 0;
};

// N0 from Eb/N0 with the Eb = E_p convention.
double ebn0_to_n0(double ebn0_db, double e_p);

// sum_l alpha_l x(t - tau_l); output longer than the input by the maximum
// delay. Delays must sit on the sample grid.
SampledSignal propagate(const SampledSignal& signal, const ChannelModel& channel);

// Adds i.i.d. N(0, n0/(2 dt)) samples (discrete white noise of two-sided PSD
// N0/2) in place on a copy.
SampledSignal add_awgn(const SampledSignal& signal, double n0, RngStream& rng);

// Receiver-side channel error: each gain gets an independent additive
// Uniform[-epsilon*gain, +epsilon*gain] offset; delays are untouched.
ChannelModel perturb_channel(const ChannelModel& channel, double epsilon, RngStream& rng);

// Per-frame channel with gamma ~ Uniform[lo, hi], keyed by (seed, frame_index).
ChannelModel quasi_static_channel(const std::vector<double>& delays,
                                  std::pair<double, double> gamma_range,
                                  std::uint64_t frame_index, std::uint64_t seed);

// Noiseless symbol-rate received series r_n = sum_l alpha_l x_{n - tau_l f}
// computed from the exact sampled-map closed form (requires delays on the
// symbol grid). Entries whose delayed index precedes the sequence treat the
// transmitter as silent before symbol 0.
std::vector<double> received_symbol_series(const SymbolSequence& symbols,
                                           const ChannelModel& channel,
                                           const WaveformParams& params, int depth = 40);

}  // namespace cwcs
