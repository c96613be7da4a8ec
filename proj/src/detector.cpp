#include "cwcs/detector.hpp"

#include <cmath>
#include <stdexcept>

namespace cwcs {

int PolicyConfig::resolved_past_depth(const ChannelModel& channel,
                                      const WaveformParams& params) const {
    if (past_depth > 0) return past_depth;
    if (kind == ThresholdPolicy::OptimalGenie) return 40;
    return 5 + static_cast<int>(std::ceil(channel.max_delay() * params.f));
}

void PolicyConfig::validate() const {
    if (past_depth != -1 && past_depth < 1) {
        throw std::invalid_argument("PolicyConfig: past_depth must be positive (or -1 for default)");
    }
    if (kind == ThresholdPolicy::OptimalGenie && future_depth < 1) {
        throw std::invalid_argument("PolicyConfig: future_depth must be positive");
    }
}

std::vector<ReturnMapPoint> return_map(const std::vector<double>& series,
                                       const SymbolSequence& symbols,
                                       const std::vector<int>& label_offsets) {
    if (series.size() < 2) {
        throw std::invalid_argument("return_map: need at least two samples");
    }
    if (symbols.size() < series.size()) {
        throw std::invalid_argument("return_map: symbols must cover the series");
    }
    symbols.validate();
    std::vector<ReturnMapPoint> points;
    points.reserve(series.size() - 1);
    const auto n_sym = static_cast<long long>(symbols.size());
    for (std::size_t n = 0; n + 1 < series.size(); ++n) {
        bool in_range = true;
        for (int off : label_offsets) {
            const long long idx = static_cast<long long>(n) + off;
            if (idx < 0 || idx >= n_sym) { in_range = false; break; }
        }
        if (!in_range) continue;
        ReturnMapPoint pt;
        pt.u_n = series[n];
        pt.u_next = series[n + 1];
        pt.true_s_n = symbols.symbols[n];
        pt.group_label.reserve(label_offsets.size());
        for (int off : label_offsets) {
            pt.group_label.push_back(symbols.symbols[static_cast<std::size_t>(
                static_cast<long long>(n) + off)]);
        }
        points.push_back(std::move(pt));
    }
    return points;
}

double prefilter_threshold(double r_next, const std::vector<int>& symbols, std::size_t n,
                           const ChannelModel& channel, const WaveformParams& params) {
    channel.validate();
    params.validate();
    const double decay = std::exp(-params.beta / params.f);
    double theta = decay * r_next;
    for (std::size_t l = 1; l < channel.paths(); ++l) {
        const int shift = static_cast<int>(std::ceil(-channel.taps[l].delay * params.f));
        if (shift > -1) {
            throw std::invalid_argument(
                "prefilter_threshold: echoes must be delayed by at least one symbol");
        }
        const long long idx = static_cast<long long>(n) + shift;
        if (idx < 0 || idx >= static_cast<long long>(symbols.size())) {
            throw std::invalid_argument(
                "prefilter_threshold: past symbol unavailable; preamble too short");
        }
        theta += (1.0 - decay) * channel.taps[l].gain *
                 symbols[static_cast<std::size_t>(idx)];
    }
    return theta;
}

double suboptimal_threshold(const std::vector<int>& symbols, std::size_t n,
                            const CorrelationTable& table, int past_depth) {
    if (past_depth < 1) {
        throw std::invalid_argument("suboptimal_threshold: past_depth must be positive");
    }
    if (static_cast<long long>(n) - past_depth < 0) {
        throw std::invalid_argument(
            "suboptimal_threshold: decoded history too short; preamble too short");
    }
    if (n > symbols.size()) {
        throw std::invalid_argument("suboptimal_threshold: index beyond symbol buffer");
    }
    double acc = 0.0;
    for (int i = -past_depth; i <= -1; ++i) {
        acc += table.c_sum(i) * symbols[static_cast<std::size_t>(static_cast<long long>(n) + i)];
    }
    return acc;
}

double optimal_threshold(const std::vector<int>& symbols, std::size_t n,
                         const CorrelationTable& table, int past_depth, int future_depth) {
    if (past_depth < 1 || future_depth < 1) {
        throw std::invalid_argument("optimal_threshold: depths must be positive");
    }
    if (n >= symbols.size()) {
        throw std::invalid_argument("optimal_threshold: index beyond symbol buffer");
    }
    const auto nn = static_cast<long long>(n);
    double acc = 0.0;
    for (long long i = std::max<long long>(-past_depth, -nn); i <= -1; ++i) {
        acc += table.c_sum(static_cast<int>(i)) * symbols[static_cast<std::size_t>(nn + i)];
    }
    const auto n_sym = static_cast<long long>(symbols.size());
    const double k = table.k_const();
    const double decay = std::exp(-table.params().beta / table.params().f);
    double w = 1.0;
    for (long long i = 1; i <= future_depth && nn + i < n_sym; ++i) {
        w *= decay;
        acc += k * w * symbols[static_cast<std::size_t>(nn + i)];
    }
    return acc;
}

DetectionResult detect(const std::vector<double>& series, const PolicyConfig& policy,
                       const CorrelationTable& table, const std::vector<int>& preamble,
                       const std::vector<int>* truth) {
    policy.validate();
    const ChannelModel& channel = table.channel();
    const WaveformParams& params = table.params();
    const std::size_t n0 = preamble.size();
    const bool lookahead = policy.kind == ThresholdPolicy::PreFilterRegroup;
    if (series.size() < n0 + (lookahead ? 2 : 1)) {
        throw std::invalid_argument("detect: series too short for any decision");
    }
    if (truth != nullptr && truth->size() < series.size()) {
        throw std::invalid_argument("detect: truth must cover the series");
    }
    if (policy.kind == ThresholdPolicy::OptimalGenie && truth == nullptr) {
        throw std::invalid_argument("detect: OptimalGenie requires the true symbols");
    }
    const int past_depth = policy.resolved_past_depth(channel, params);
    if (policy.kind == ThresholdPolicy::SuboptimalPast &&
        static_cast<int>(n0) < past_depth) {
        throw std::invalid_argument("detect: preamble shorter than the past-ISI depth");
    }
    if (policy.kind == ThresholdPolicy::PreFilterRegroup) {
        for (std::size_t l = 1; l < channel.paths(); ++l) {
            const int need = -static_cast<int>(std::ceil(-channel.taps[l].delay * params.f));
            if (static_cast<int>(n0) < need) {
                throw std::invalid_argument("detect: preamble shorter than the deepest echo");
            }
        }
    }

    std::vector<int> symbols(series.size(), 0);
    for (std::size_t m = 0; m < n0; ++m) symbols[m] = preamble[m];

    const std::size_t last = series.size() - (lookahead ? 2 : 1);
    DetectionResult result;
    result.first_index = n0;
    result.decided.reserve(last - n0 + 1);
    result.thresholds.reserve(last - n0 + 1);
    if (truth != nullptr) result.errors = 0;

    for (std::size_t n = n0; n <= last; ++n) {
        double theta = 0.0;
        switch (policy.kind) {
            case ThresholdPolicy::Zero:
                break;
            case ThresholdPolicy::PreFilterRegroup:
                theta = prefilter_threshold(series[n + 1], symbols, n, channel, params);
                break;
            case ThresholdPolicy::SuboptimalPast:
                theta = suboptimal_threshold(symbols, n, table, past_depth);
                break;
            case ThresholdPolicy::OptimalGenie:
                theta = optimal_threshold(*truth, n, table, past_depth, policy.future_depth);
                break;
        }
        const int decision = series[n] > theta ? 1 : -1;
        symbols[n] = decision;
        result.decided.push_back(decision);
        result.thresholds.push_back(theta);
        if (truth != nullptr && decision != (*truth)[n]) ++result.errors;
    }
    return result;
}

double judgment_distance(const CorrelationTable& table, MapStage stage, bool regrouped) {
    const ChannelModel& channel = table.channel();
    const WaveformParams& params = table.params();
    const double decay = std::exp(-params.beta / params.f);
    if (stage == MapStage::Prefilter) {
        double jd = 2.0 * (1.0 - decay);
        if (!regrouped) {
            // Without conditioning on past symbols the closest branches differ
            // in s_n and every echoed symbol at once.
            double echo = 0.0;
            for (std::size_t l = 1; l < channel.paths(); ++l) echo += channel.taps[l].gain;
            jd *= (1.0 - echo);
        }
        return jd;
    }
    return 2.0 * (table.c_sum(0) - decay * table.c_sum(-1));
}

}  // namespace cwcs
