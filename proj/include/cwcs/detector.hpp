#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cwcs/channel.hpp"
#include "cwcs/matched_filter.hpp"
#include "cwcs/policy.hpp"
#include "cwcs/waveform.hpp"

namespace cwcs {

struct PolicyConfig {
    ThresholdPolicy kind = ThresholdPolicy::OptimalGenie;
    // -1 selects the policy default: 5 + ceil(max tau * f) past symbols for
    // SuboptimalPast, 40 for OptimalGenie.
    int past_depth = -1;
    int future_depth = 40;

    int resolved_past_depth(const ChannelModel& channel, const WaveformParams& params) const;
    void validate() const;
};

struct ReturnMapPoint {
    double u_n = 0.0;
    double u_next = 0.0;
    std::vector<int> group_label;  // conditioning symbols, in label_offsets order
    int true_s_n = 0;
};

struct DetectionResult {
    std::vector<int> decided;        // one entry per decided index
    std::vector<double> thresholds;  // theta_n used for each decision
    std::size_t first_index = 0;     // global index of decided[0]
    long long errors = -1;           // -1 when no truth was supplied
};

// Pairs (u_n, u_{n+1}) labelled by the symbols at n + offset for each entry of
// label_offsets. Points whose labels would fall outside the sequence are
// skipped, so every emitted point carries a complete label.
std::vector<ReturnMapPoint> return_map(const std::vector<double>& series,
                                       const SymbolSequence& symbols,
                                       const std::vector<int>& label_offsets);

// theta_n = e^{-beta/f} r_{n+1} + (1 - e^{-beta/f}) sum_{l>=1} alpha_l s_{n+ceil(-tau_l f)}.
// Requires every echo to be delayed by at least one symbol so the regrouping
// only conditions on already-decided symbols.
double prefilter_threshold(double r_next, const std::vector<int>& symbols, std::size_t n,
                           const ChannelModel& channel, const WaveformParams& params);

// theta_n = I_past = sum_{i=-past_depth}^{-1} s_{n+i} * sum_l C_{l,i}.
double suboptimal_threshold(const std::vector<int>& symbols, std::size_t n,
                            const CorrelationTable& table, int past_depth);

// theta_n = I_past + I_future with the geometric tail
// I_future = K * sum_{i=1}^{future_depth} s_{n+i} e^{-beta i / f};
// both sums truncate at the ends of the supplied sequence.
double optimal_threshold(const std::vector<int>& symbols, std::size_t n,
                         const CorrelationTable& table, int past_depth, int future_depth);

// Sequential decision-feedback detection over series[m] (one sample per
// symbol). Symbols below preamble.size() are taken as known; decisions start
// there and feed later thresholds. OptimalGenie reads truth instead and
// requires it. PreFilterRegroup needs one-sample lookahead, so its last
// decision lands at series.size() - 2. Ties decide -1.
DetectionResult detect(const std::vector<double>& series, const PolicyConfig& policy,
                       const CorrelationTable& table, const std::vector<int>& preamble,
                       const std::vector<int>* truth = nullptr);

enum class MapStage { Prefilter, Filtered };

// Horizontal gap between the closest return-map branches that disagree on s_n.
// Prefilter, regrouped: 2(1-e^{-beta/f}); ungrouped: scaled by (1 - sum of
// echo gains). Filtered: 2 sum_l (C_{l,0} - e^{-beta/f} C_{l,-1}).
double judgment_distance(const CorrelationTable& table, MapStage stage, bool regrouped = true);

}  // namespace cwcs
