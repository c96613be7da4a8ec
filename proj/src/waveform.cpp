#include "cwcs/waveform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cwcs {

double WaveformParams::omega() const { return 2.0 * std::numbers::pi * f; }

double WaveformParams::dt() const { return 1.0 / (f * oversampling); }

void WaveformParams::validate() const {
    if (!(f > 0.0) || !std::isfinite(f))
        throw std::invalid_argument("WaveformParams: f must be positive and finite");
    if (!(beta > 0.0) || !(beta <= f * std::numbers::ln2))
        throw std::invalid_argument("WaveformParams: beta must satisfy 0 < beta <= f*ln2");
    if (oversampling < 2)
        throw std::invalid_argument("WaveformParams: oversampling must be >= 2");
}

SymbolSequence SymbolSequence::from_bits(const std::vector<int>& bits) {
    SymbolSequence s;
    s.symbols.reserve(bits.size());
    for (int b : bits) {
        if (b != 0 && b != 1) throw std::invalid_argument("bits must be 0 or 1");
        s.symbols.push_back(2 * b - 1);
    }
    return s;
}

std::vector<int> SymbolSequence::bits() const {
    std::vector<int> b;
    b.reserve(symbols.size());
    for (int s : symbols) b.push_back((s + 1) / 2);
    return b;
}

void SymbolSequence::validate() const {
    if (symbols.empty()) throw std::invalid_argument("SymbolSequence: empty");
    for (int s : symbols)
        if (s != -1 && s != 1)
            throw std::invalid_argument("SymbolSequence: symbols must be -1 or +1");
}

double basis_pulse(double t, const WaveformParams& params) {
    if (!std::isfinite(t)) throw std::domain_error("basis_pulse: non-finite t");
    const double f = params.f, beta = params.beta, om = params.omega();
    if (t >= 1.0 / f) return 0.0;
    const double osc = std::cos(om * t) - beta / om * std::sin(om * t);
    if (t < 0.0) return (1.0 - std::exp(-beta / f)) * std::exp(beta * t) * osc;
    return 1.0 - std::exp(beta * (t - 1.0 / f)) * osc;
}

double encode_initial_condition(const SymbolSequence& symbols, int block_index,
                                int block_length, const WaveformParams& params) {
    params.validate();
    if (block_index < 0) throw std::invalid_argument("encode_initial_condition: block_index < 0");
    if (block_length < 1) throw std::invalid_argument("encode_initial_condition: block_length < 1");
    const std::size_t hi = static_cast<std::size_t>(block_index + 1) *
                           static_cast<std::size_t>(block_length);
    if (symbols.size() < hi)
        throw std::out_of_range("encode_initial_condition: sequence shorter than block " +
                                std::to_string(block_index));
    const double q = params.beta / params.f;
    double acc = 0.0;
    // i runs 1-based over the block; s_i is symbols[i-1].
    for (std::size_t i = hi; i > hi - static_cast<std::size_t>(block_length); --i)
        acc += symbols.symbols[i - 1] * std::exp(-static_cast<double>(i - 1) * q);
    return (1.0 - std::exp(-q)) * acc;
}

SampledSignal synthesize(const SymbolSequence& symbols, const WaveformParams& params,
                         int history_depth) {
    params.validate();
    symbols.validate();
    if (history_depth < 1) throw std::invalid_argument("synthesize: history_depth < 1");
    const int q = params.oversampling;
    const double dt = params.dt();
    const std::size_t n_sym = symbols.size();

    // One pulse, tabulated on the sample grid over [-history_depth, +1] symbol
    // periods; every symbol adds a shifted copy of this kernel.
    const int j_lo = -history_depth * q;
    const int j_hi = q;  // p(t) = 0 for t >= 1/f
    std::vector<double> kernel(static_cast<std::size_t>(j_hi - j_lo) + 1);
    for (int j = j_lo; j <= j_hi; ++j)
        kernel[static_cast<std::size_t>(j - j_lo)] = basis_pulse(j * dt, params);

    SampledSignal out;
    out.dt = dt;
    out.t0 = 0.0;
    out.samples.assign(n_sym * static_cast<std::size_t>(q), 0.0);
    const long total = static_cast<long>(out.samples.size());
    for (std::size_t m = 0; m < n_sym; ++m) {
        const double s = symbols.symbols[m];
        const long base = static_cast<long>(m) * q;
        const long k_begin = std::max(0L, base + j_lo);
        const long k_end = std::min(total, base + j_hi + 1);
        const double* kern = kernel.data() + (k_begin - base - j_lo);
        double* dst = out.samples.data() + k_begin;
        for (long k = 0; k < k_end - k_begin; ++k) dst[k] += s * kern[k];
    }
    return out;
}

std::vector<double> symbol_map_iterate(double x0, const SymbolSequence& symbols,
                                       const WaveformParams& params) {
    params.validate();
    const double g = std::exp(params.beta / params.f);
    std::vector<double> x;
    x.reserve(symbols.size() + 1);
    x.push_back(x0);
    for (int s : symbols.symbols) x.push_back(g * x.back() - (g - 1.0) * s);
    return x;
}

double encoded_state(const SymbolSequence& symbols, std::size_t n, int depth,
                     const WaveformParams& params) {
    const double q = params.beta / params.f;
    const std::size_t hi = std::min(symbols.size(), n + static_cast<std::size_t>(depth) + 1);
    double acc = 0.0;
    for (std::size_t m = hi; m > n; --m)
        acc += symbols.symbols[m - 1] * std::exp(-static_cast<double>(m - 1 - n) * q);
    return (1.0 - std::exp(-q)) * acc;
}

}  // namespace cwcs
