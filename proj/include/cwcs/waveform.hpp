#pragma once

#include <cstdint>
#include <vector>

namespace cwcs {

// System parameters of the chaotic waveform generator. The oscillator is
// stable-by-construction only for 0 < beta <= f*ln2, which we enforce.
struct WaveformParams {
    double f = 1.0;          // base frequency == symbol rate (Hz)
    double beta = 0.65;      // damping/growth exponent (1/s)
    int oversampling = 16;   // samples per symbol period

    double omega() const;    // always 2*pi*f
    double dt() const;       // 1 / (f * oversampling)
    void validate() const;   // throws std::invalid_argument on bad values
};

// Bipolar symbol sequence; s_m = 2*b_m - 1.
struct SymbolSequence {
    std::vector<int> symbols;  // entries in {-1, +1}

    static SymbolSequence from_bits(const std::vector<int>& bits);
    std::vector<int> bits() const;
    std::size_t size() const { return symbols.size(); }
    void validate() const;
};

// Uniformly sampled real signal.
struct SampledSignal {
    std::vector<double> samples;
    double dt = 0.0;
    double t0 = 0.0;
};

// Basis pulse p(t): growing oscillation for t < 0, main lobe on [0, 1/f),
// identically zero for t >= 1/f. Throws std::domain_error for non-finite t.
double basis_pulse(double t, const WaveformParams& params);

// Initial condition encoding a block of block_length symbols:
//   x_e(j) = (1 - e^{-beta/f}) * sum_{i=j*Nc+1}^{(j+1)*Nc} s_i e^{-(i-1)beta/f}
// with s_i the i-th symbol (1-based) of the sequence.
double encode_initial_condition(const SymbolSequence& symbols, int block_index,
                                int block_length, const WaveformParams& params);

// Superposition synthesis x(t) = sum_m s_m p(t - m/f), sampled at
// f*oversampling over [0, N/f). history_depth bounds the future-tail
// truncation of each pulse (the t<0 branch), in symbol periods.
SampledSignal synthesize(const SymbolSequence& symbols, const WaveformParams& params,
                         int history_depth = 40);

// Forward iteration of the sampled map x_{n+1} = e^{beta/f} x_n - (e^{beta/f}-1) s_n.
// Returns x_0 .. x_N (N+1 values for N symbols).
std::vector<double> symbol_map_iterate(double x0, const SymbolSequence& symbols,
                                       const WaveformParams& params);

// Closed-form sampled value x_n = (1-e^{-beta/f}) * sum_{i>=0} s_{n+i} e^{-i*beta/f},
// truncated at depth symbols or the end of the sequence, whichever comes first.
double encoded_state(const SymbolSequence& symbols, std::size_t n, int depth,
                     const WaveformParams& params);

}  // namespace cwcs
