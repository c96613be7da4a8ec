#include "cwcs/matched_filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cwcs {

double pulse_autocorrelation(double delta, const WaveformParams& params) {
    params.validate();
    if (!std::isfinite(delta)) {
        throw std::domain_error("pulse_autocorrelation: delta must be finite");
    }
    const double f = params.f;
    const double beta = params.beta;
    const double omega = params.omega();
    const double ad = std::abs(delta);

    const double w2 = omega * omega;
    const double b2 = beta * beta;
    const double a_coef = (w2 - 3.0 * b2) * f / (4.0 * beta * (w2 + b2));
    const double b_coef = (3.0 * w2 - b2) * f / (4.0 * omega * (w2 + b2));
    const double d = std::exp(-beta * ad);
    const double ebf = std::exp(beta / f);
    const double cosw = std::cos(omega * ad);
    const double sinw = std::sin(omega * ad);

    if (ad * f >= 1.0) {
        return d * (2.0 - 1.0 / ebf - ebf) * (a_coef * cosw + b_coef * sinw);
    }
    return a_coef * (d * (2.0 - 1.0 / ebf) - (1.0 / ebf) / d) * cosw +
           b_coef * (d * (2.0 - 1.0 / ebf) + (1.0 / ebf) / d) * sinw + 1.0 - f * ad;
}

double correlation_coefficient(double alpha_l, double tau_l, int i,
                               const WaveformParams& params) {
    return alpha_l * pulse_autocorrelation(tau_l + static_cast<double>(i) / params.f, params);
}

CorrelationTable::CorrelationTable(const ChannelModel& channel, const WaveformParams& params,
                                   int depth)
    : channel_(channel), params_(params), depth_(depth) {
    channel_.validate();
    params_.validate();
    if (depth_ < 1) {
        throw std::invalid_argument("CorrelationTable: depth must be positive");
    }
    const std::size_t n = 2 * static_cast<std::size_t>(depth_) + 1;
    per_path_.assign(channel_.paths(), std::vector<double>(n, 0.0));
    sum_.assign(n, 0.0);
    for (std::size_t l = 0; l < channel_.paths(); ++l) {
        const auto& tap = channel_.taps[l];
        for (int i = -depth_; i <= depth_; ++i) {
            const double v = correlation_coefficient(tap.gain, tap.delay, i, params_);
            per_path_[l][static_cast<std::size_t>(i + depth_)] = v;
            sum_[static_cast<std::size_t>(i + depth_)] += v;
        }
        p_total_ += per_path_[l][static_cast<std::size_t>(depth_)];
    }
    e_p_ = pulse_autocorrelation(0.0, params_);

    // K collects the coefficient of the geometric future tail:
    // C_{l,i} = alpha_l e^{-beta(tau_l + i/f)} (A cos + B sin)(omega(tau_l+i/f))
    // for tau_l + i/f >= 1/f, and the recursion weight is e^{beta/f}C_i - C_{i-1}.
    const double f = params_.f;
    const double beta = params_.beta;
    const double omega = params_.omega();
    const double w2 = omega * omega;
    const double b2 = beta * beta;
    const double a_coef = (w2 - 3.0 * b2) * f / (4.0 * beta * (w2 + b2));
    const double b_coef = (3.0 * w2 - b2) * f / (4.0 * omega * (w2 + b2));
    const double ebf = std::exp(beta / f);
    k_const_ = 0.0;
    for (const auto& tap : channel_.taps) {
        k_const_ += tap.gain * (2.0 - 1.0 / ebf - ebf) * std::exp(-beta * tap.delay) *
                    (a_coef * std::cos(omega * tap.delay) + b_coef * std::sin(omega * tap.delay));
    }
}

double CorrelationTable::c(std::size_t l, int i) const {
    if (l >= per_path_.size()) {
        throw std::out_of_range("CorrelationTable::c: path index out of range");
    }
    if (i < -depth_ || i > depth_) return 0.0;
    return per_path_[l][static_cast<std::size_t>(i + depth_)];
}

double CorrelationTable::c_sum(int i) const {
    if (i < -depth_ || i > depth_) return 0.0;
    return sum_[static_cast<std::size_t>(i + depth_)];
}

double CorrelationTable::isi_support() const {
    return std::abs(k_const_) / (std::exp(params_.beta / params_.f) - 1.0);
}

CorrelationTable build_correlation_table(const ChannelModel& channel,
                                         const WaveformParams& params, int depth) {
    if (depth < 0) {
        depth = 40 + static_cast<int>(std::ceil(channel.max_delay() * params.f));
    }
    return CorrelationTable(channel, params, depth);
}

double filtered_noise_sigma(double n0, double e_p) {
    if (!(n0 >= 0.0) || !std::isfinite(n0)) {
        throw std::invalid_argument("filtered_noise_sigma: n0 must be non-negative");
    }
    if (!(e_p > 0.0)) {
        throw std::invalid_argument("filtered_noise_sigma: pulse energy must be positive");
    }
    return std::sqrt(0.5 * n0 * e_p);
}

SampledSignal matched_filter(const SampledSignal& received, const WaveformParams& params,
                             int history_depth) {
    params.validate();
    if (history_depth < 1) {
        throw std::invalid_argument("matched_filter: history_depth must be positive");
    }
    const double dt = params.dt();
    if (std::abs(received.dt - dt) > 1e-12 * dt) {
        throw std::invalid_argument("matched_filter: input grid does not match params");
    }
    const int q = params.oversampling;
    // Filtering with g(t) = p(-t) is the correlation y(t) = sum_j r(t + j dt) p(j dt) dt.
    // p's support is (-inf, 1/f): the decaying left tail is truncated at
    // history_depth symbols, the main lobe covers one symbol forward.
    const int j_lo = -history_depth * q;
    const int j_hi = q;
    std::vector<double> pulse(static_cast<std::size_t>(j_hi - j_lo + 1));
    for (int j = j_lo; j <= j_hi; ++j) {
        pulse[static_cast<std::size_t>(j - j_lo)] = basis_pulse(j * dt, params);
    }
    const std::size_t n = received.samples.size();
    SampledSignal out;
    out.dt = dt;
    out.t0 = received.t0;
    out.samples.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int j = j_lo; j <= j_hi; ++j) {
            const long long idx = static_cast<long long>(k) + j;
            if (idx < 0 || idx >= static_cast<long long>(n)) continue;
            acc += received.samples[static_cast<std::size_t>(idx)] *
                   pulse[static_cast<std::size_t>(j - j_lo)];
        }
        out.samples[k] = acc * dt;
    }
    return out;
}

FilteredSeries symbol_level_output(const SymbolSequence& symbols, const CorrelationTable& table,
                                   double sigma_w, RngStream& rng) {
    symbols.validate();
    if (!(sigma_w >= 0.0) || !std::isfinite(sigma_w)) {
        throw std::invalid_argument("symbol_level_output: sigma_w must be non-negative");
    }
    const int depth = table.depth();
    const auto n = static_cast<long long>(symbols.size());
    FilteredSeries out;
    out.sigma_w = sigma_w;
    out.y.assign(symbols.size(), 0.0);
    for (long long m = 0; m < n; ++m) {
        double acc = 0.0;
        const long long i_lo = std::max<long long>(-depth, -m);
        const long long i_hi = std::min<long long>(depth, n - 1 - m);
        for (long long i = i_lo; i <= i_hi; ++i) {
            acc += table.c_sum(static_cast<int>(i)) *
                   symbols.symbols[static_cast<std::size_t>(m + i)];
        }
        if (sigma_w > 0.0) acc += rng.normal(sigma_w);
        out.y[static_cast<std::size_t>(m)] = acc;
    }
    return out;
}

}  // namespace cwcs
