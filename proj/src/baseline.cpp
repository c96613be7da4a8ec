#include "cwcs/baseline.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "cwcs/matched_filter.hpp"

namespace cwcs {

namespace {

// Integer symbol delay of a tap, rejecting fractional delays: the symbol-rate
// models have no way to express them.
int integer_delay(double delay, double f, const char* who) {
    const double d = delay * f;
    const double r = std::round(d);
    if (std::abs(d - r) > 1e-9) {
        throw std::invalid_argument(std::string(who) +
                                    ": tap delays must be whole symbols in this model");
    }
    return static_cast<int>(r);
}

}  // namespace

std::vector<double> bpsk_transmit(const SymbolSequence& symbols) {
    symbols.validate();
    return std::vector<double>(symbols.symbols.begin(), symbols.symbols.end());
}

std::vector<double> bpsk_propagate(const std::vector<double>& tx, const ChannelModel& channel,
                                   const WaveformParams& params) {
    channel.validate();
    params.validate();
    std::vector<double> rx(tx.size(), 0.0);
    for (const auto& tap : channel.taps) {
        const int d = integer_delay(tap.delay, params.f, "bpsk_propagate");
        for (std::size_t n = static_cast<std::size_t>(d); n < tx.size(); ++n) {
            rx[n] += tap.gain * tx[n - static_cast<std::size_t>(d)];
        }
    }
    return rx;
}

std::vector<int> bpsk_detect(const std::vector<double>& equalized) {
    std::vector<int> out(equalized.size());
    for (std::size_t n = 0; n < equalized.size(); ++n) {
        out[n] = equalized[n] > 0.0 ? 1 : -1;
    }
    return out;
}

EqualizerTaps mmse_design(const ChannelEstimate& estimate, double noise_var, int num_taps,
                          int decision_delay, const WaveformParams& params) {
    params.validate();
    if (estimate.taps.empty()) {
        throw std::invalid_argument("mmse_design: channel estimate has no taps");
    }
    if (num_taps < 1) {
        throw std::invalid_argument("mmse_design: need at least one equalizer tap");
    }
    if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) {
        throw std::invalid_argument("mmse_design: noise_var must be non-negative");
    }
    int memory = 0;
    for (const auto& tap : estimate.taps) {
        memory = std::max(memory, integer_delay(tap.delay, params.f, "mmse_design"));
    }
    const int response_len = num_taps + memory;
    if (decision_delay < 0 || decision_delay >= response_len) {
        throw std::invalid_argument("mmse_design: decision delay outside the composite response");
    }

    std::vector<double> h(static_cast<std::size_t>(memory) + 1, 0.0);
    for (const auto& tap : estimate.taps) {
        h[static_cast<std::size_t>(integer_delay(tap.delay, params.f, "mmse_design"))] +=
            tap.gain;
    }

    Eigen::MatrixXd conv = Eigen::MatrixXd::Zero(response_len, num_taps);
    for (int j = 0; j < num_taps; ++j) {
        for (int k = 0; k <= memory; ++k) conv(j + k, j) = h[static_cast<std::size_t>(k)];
    }
    Eigen::VectorXd target = Eigen::VectorXd::Zero(response_len);
    target(decision_delay) = 1.0;

    const Eigen::MatrixXd gram =
        conv.transpose() * conv + noise_var * Eigen::MatrixXd::Identity(num_taps, num_taps);
    const Eigen::VectorXd rhs = conv.transpose() * target;

    Eigen::VectorXd w;
    if (noise_var > 0.0) {
        w = gram.ldlt().solve(rhs);
    } else {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
        if (!lu.isInvertible()) {
            throw std::runtime_error(
                "mmse_design: normal equations are singular (zero noise_var, rank-deficient "
                "channel)");
        }
        w = lu.solve(rhs);
    }

    EqualizerTaps eq;
    eq.decision_delay = decision_delay;
    eq.weights.assign(w.data(), w.data() + w.size());
    return eq;
}

std::vector<double> equalize(const std::vector<double>& received, const EqualizerTaps& eq) {
    if (eq.weights.empty()) {
        throw std::invalid_argument("equalize: equalizer has no taps");
    }
    const auto n_taps = static_cast<long long>(eq.weights.size());
    const auto n = static_cast<long long>(received.size());
    std::vector<double> out(received.size(), 0.0);
    for (long long m = 0; m < n; ++m) {
        double acc = 0.0;
        for (long long j = 0; j < n_taps; ++j) {
            const long long idx = m + eq.decision_delay - j;
            if (idx < 0 || idx >= n) continue;
            acc += eq.weights[static_cast<std::size_t>(j)] *
                   received[static_cast<std::size_t>(idx)];
        }
        out[static_cast<std::size_t>(m)] = acc;
    }
    return out;
}

ChannelEstimate ls_estimate(const std::vector<int>& training_tx,
                            const std::vector<double>& training_rx,
                            const std::vector<double>& delay_grid, const WaveformParams& params,
                            TrainingModel model, int kernel_depth) {
    params.validate();
    if (training_tx.size() != training_rx.size()) {
        throw std::invalid_argument("ls_estimate: tx/rx training lengths differ");
    }
    if (delay_grid.empty()) {
        throw std::invalid_argument("ls_estimate: empty delay grid");
    }
    const auto n = static_cast<long long>(training_tx.size());
    const auto n_unknown = static_cast<long long>(delay_grid.size());

    long long row_lo = 0, row_hi = n - 1;
    if (model == TrainingModel::SymbolRate) {
        int max_d = 0;
        for (double d : delay_grid) max_d = std::max(max_d, integer_delay(d, params.f, "ls_estimate"));
        row_lo = max_d;
    } else {
        if (kernel_depth < 0) {
            double max_d = 0.0;
            for (double d : delay_grid) max_d = std::max(max_d, d);
            kernel_depth = 40 + static_cast<int>(std::ceil(max_d * params.f));
        }
        row_lo = kernel_depth;
        row_hi = n - 1 - kernel_depth;
    }
    const long long rows = row_hi - row_lo + 1;
    if (rows < 2 * n_unknown) {
        throw std::invalid_argument("ls_estimate: training too short for the delay grid");
    }

    std::vector<std::vector<double>> kernels;
    if (model == TrainingModel::MatchedFilter) {
        kernels.resize(delay_grid.size());
        for (std::size_t l = 0; l < delay_grid.size(); ++l) {
            kernels[l].resize(2 * static_cast<std::size_t>(kernel_depth) + 1);
            for (int i = -kernel_depth; i <= kernel_depth; ++i) {
                kernels[l][static_cast<std::size_t>(i + kernel_depth)] =
                    pulse_autocorrelation(delay_grid[l] + i / params.f, params);
            }
        }
    }

    Eigen::MatrixXd x(rows, n_unknown);
    Eigen::VectorXd b(rows);
    for (long long r = 0; r < rows; ++r) {
        const long long m = row_lo + r;
        b(r) = training_rx[static_cast<std::size_t>(m)];
        for (long long l = 0; l < n_unknown; ++l) {
            if (model == TrainingModel::SymbolRate) {
                const int d =
                    integer_delay(delay_grid[static_cast<std::size_t>(l)], params.f, "ls_estimate");
                x(r, l) = training_tx[static_cast<std::size_t>(m - d)];
            } else {
                double acc = 0.0;
                const auto& kern = kernels[static_cast<std::size_t>(l)];
                for (int i = -kernel_depth; i <= kernel_depth; ++i) {
                    acc += kern[static_cast<std::size_t>(i + kernel_depth)] *
                           training_tx[static_cast<std::size_t>(m + i)];
                }
                x(r, l) = acc;
            }
        }
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < n_unknown) {
        throw std::runtime_error("ls_estimate: training regressors are rank deficient");
    }
    const Eigen::VectorXd g = qr.solve(b);

    ChannelEstimate est;
    est.taps.reserve(delay_grid.size());
    for (long long l = 0; l < n_unknown; ++l) {
        est.taps.push_back({delay_grid[static_cast<std::size_t>(l)], g(l)});
    }
    est.residual = (b - x * g).norm();
    return est;
}

}  // namespace cwcs
