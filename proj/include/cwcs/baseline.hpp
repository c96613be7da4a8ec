#pragma once

#include <vector>

#include "cwcs/channel.hpp"
#include "cwcs/waveform.hpp"

namespace cwcs {

struct EqualizerTaps {
    std::vector<double> weights;
    int decision_delay = 0;
};

struct ChannelEstimate {
    std::vector<ChannelTap> taps;
    double residual = 0.0;  // Euclidean norm of the least-squares fit residual
};

// Symbol-rate BPSK with integer-symbol channel delays: the transmitted sample
// is the symbol itself and the channel is a tapped delay line.
std::vector<double> bpsk_transmit(const SymbolSequence& symbols);
std::vector<double> bpsk_propagate(const std::vector<double>& tx, const ChannelModel& channel,
                                   const WaveformParams& params);
std::vector<int> bpsk_detect(const std::vector<double>& equalized);

// Linear MMSE equalizer: solves (H^T H + noise_var I) w = H^T e_delay, where H
// is the convolution matrix of the estimated impulse response and e_delay
// selects the composite-response tap to drive to one. Apply as
// z[n] = sum_j w_j u[n + delay - j]. Tap delays are converted to whole-symbol
// shifts via params.f.
EqualizerTaps mmse_design(const ChannelEstimate& estimate, double noise_var, int num_taps = 15,
                          int decision_delay = 7, const WaveformParams& params = {});

std::vector<double> equalize(const std::vector<double>& received, const EqualizerTaps& eq);

// Regression model relating training symbols to received samples: either the
// plain tapped delay line, or the matched-filter output where each tap
// contributes through the pulse-autocorrelation kernel.
enum class TrainingModel { SymbolRate, MatchedFilter };

// Fits tap gains on a known delay grid by least squares. Only rows whose
// regressor window lies fully inside the training block are used, so a
// noiseless fit recovers the gains exactly. kernel_depth = -1 selects
// 40 + ceil(max delay * f), the generator's own truncation depth.
ChannelEstimate ls_estimate(const std::vector<int>& training_tx,
                            const std::vector<double>& training_rx,
                            const std::vector<double>& delay_grid, const WaveformParams& params,
                            TrainingModel model, int kernel_depth = -1);

}  // namespace cwcs
