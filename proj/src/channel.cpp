#include "cwcs/channel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cwcs {

double ChannelModel::max_delay() const {
    double m = 0.0;
    for (const auto& t : taps) m = std::max(m, t.delay);
    return m;
}

void ChannelModel::validate() const {
    if (taps.empty()) throw std::invalid_argument("ChannelModel: no taps");
    if (taps.front().delay != 0.0)
        throw std::invalid_argument("ChannelModel: first tap delay must be 0");
    for (std::size_t l = 0; l < taps.size(); ++l) {
        // Estimated gains may stray slightly negative at low SNR, so only zero
        // and non-finite values are rejected.
        if (taps[l].gain == 0.0 || !std::isfinite(taps[l].gain))
            throw std::invalid_argument("ChannelModel: gains must be nonzero and finite");
        if (l > 0 && !(taps[l].delay > taps[l - 1].delay))
            throw std::invalid_argument("ChannelModel: delays must be strictly increasing");
    }
}

ChannelModel exponential_channel(const std::vector<double>& delays, double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("exponential_channel: gamma < 0");
    ChannelModel ch;
    ch.gamma = gamma;
    for (double d : delays) {
        if (d < 0.0) throw std::invalid_argument("exponential_channel: negative delay");
        ch.taps.push_back({d, std::exp(-gamma * d)});
    }
    ch.validate();
    return ch;
}

ChannelModel load_channel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open channel file: " + path);
    ChannelModel ch;
    ch.gamma = std::nan("");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream ls(line);
        double delay, gain;
        if (ls >> delay >> gain) {
            std::string extra;
            if (ls >> extra)
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": trailing text after delay/gain pair");
            ch.taps.push_back({delay, gain});
        } else if (line.find_first_not_of(" \t\r") != std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 'delay gain'");
        }
    }
    if (ch.taps.empty()) throw std::runtime_error("channel file has no taps: " + path);
    ch.validate();
    return ch;
}

double ebn0_to_n0(double ebn0_db, double e_p) {
    return e_p / std::pow(10.0, ebn0_db / 10.0);
}

SampledSignal propagate(const SampledSignal& signal, const ChannelModel& channel) {
    channel.validate();
    if (signal.dt <= 0.0) throw std::invalid_argument("propagate: signal.dt must be positive");
    std::vector<long> shifts;
    shifts.reserve(channel.taps.size());
    for (const auto& tap : channel.taps) {
        const double ratio = tap.delay / signal.dt;
        const long shift = std::lround(ratio);
        if (std::abs(ratio - shift) > 1e-9)
            throw std::invalid_argument(
                "propagate: tap delay " + std::to_string(tap.delay) +
                " is not on the sample grid; use a finer oversampling");
        shifts.push_back(shift);
    }
    SampledSignal out;
    out.dt = signal.dt;
    out.t0 = signal.t0;
    out.samples.assign(signal.samples.size() + static_cast<std::size_t>(shifts.back()), 0.0);
    for (std::size_t l = 0; l < channel.taps.size(); ++l) {
        const double g = channel.taps[l].gain;
        const long sh = shifts[l];
        for (std::size_t k = 0; k < signal.samples.size(); ++k)
            out.samples[k + static_cast<std::size_t>(sh)] += g * signal.samples[k];
    }
    return out;
}

SampledSignal add_awgn(const SampledSignal& signal, double n0, RngStream& rng) {
    if (n0 < 0.0) throw std::invalid_argument("add_awgn: n0 < 0");
    SampledSignal out = signal;
    if (n0 == 0.0) return out;
    const double sigma = std::sqrt(n0 / (2.0 * signal.dt));
    for (double& v : out.samples) v += rng.normal(sigma);
    return out;
}

ChannelModel perturb_channel(const ChannelModel& channel, double epsilon, RngStream& rng) {
    if (epsilon < 0.0 || epsilon >= 1.0)
        throw std::invalid_argument("perturb_channel: epsilon must be in [0, 1)");
    ChannelModel out = channel;
    if (epsilon == 0.0) return out;
    for (auto& tap : out.taps)
        tap.gain += rng.uniform(-epsilon * tap.gain, epsilon * tap.gain);
    return out;
}

ChannelModel quasi_static_channel(const std::vector<double>& delays,
                                  std::pair<double, double> gamma_range,
                                  std::uint64_t frame_index, std::uint64_t seed) {
    if (gamma_range.second < gamma_range.first)
        throw std::invalid_argument("quasi_static_channel: bad gamma range");
    RngStream rng(seed, stream_salt::gamma_draw, frame_index);
    const double gamma = gamma_range.first == gamma_range.second
                             ? gamma_range.first
                             : rng.uniform(gamma_range.first, gamma_range.second);
    return exponential_channel(delays, gamma);
}

std::vector<double> received_symbol_series(const SymbolSequence& symbols,
                                           const ChannelModel& channel,
                                           const WaveformParams& params, int depth) {
    channel.validate();
    params.validate();
    std::vector<long> shifts;
    for (const auto& tap : channel.taps) {
        const double ratio = tap.delay * params.f;
        const long shift = std::lround(ratio);
        if (std::abs(ratio - shift) > 1e-9)
            throw std::invalid_argument(
                "received_symbol_series: delays must be integer symbol periods");
        shifts.push_back(shift);
    }
    const std::size_t n = symbols.size();
    std::vector<double> x(n);
    for (std::size_t m = 0; m < n; ++m) x[m] = encoded_state(symbols, m, depth, params);
    std::vector<double> r(n, 0.0);
    for (std::size_t l = 0; l < channel.taps.size(); ++l)
        for (std::size_t m = static_cast<std::size_t>(shifts[l]); m < n; ++m)
            r[m] += channel.taps[l].gain * x[m - static_cast<std::size_t>(shifts[l])];
    return r;
}

}  // namespace cwcs
