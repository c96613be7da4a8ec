#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "cwcs/channel.hpp"
#include "cwcs/detector.hpp"
#include "cwcs/matched_filter.hpp"
#include "cwcs/rng.hpp"
#include "cwcs/waveform.hpp"

using namespace cwcs;

namespace {

SymbolSequence random_symbols(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed);
    SymbolSequence seq;
    seq.symbols.resize(n);
    for (auto& s : seq.symbols) s = rng.bipolar();
    return seq;
}

// Sorted cluster centers of one-step drive values d_n = u_{n+1} - e^{beta/f} u_n,
// with clusters separated by more than gap.
std::vector<double> drive_clusters(const std::vector<double>& series,
                                   const WaveformParams& p, std::size_t warmup,
                                   double gap) {
    const double growth = std::exp(p.beta / p.f);
    std::vector<double> d;
    for (std::size_t n = warmup; n + 1 < series.size(); ++n) {
        d.push_back(series[n + 1] - growth * series[n]);
    }
    std::sort(d.begin(), d.end());
    std::vector<double> centers;
    for (std::size_t i = 0; i < d.size();) {
        std::size_t j = i;
        while (j + 1 < d.size() && d[j + 1] - d[j] < gap) ++j;
        centers.push_back(0.5 * (d[i] + d[j]));
        i = j + 1;
    }
    return centers;
}

}  // namespace

TEST_CASE("policy depth defaults") {
    const WaveformParams p;
    const ChannelModel two = exponential_channel({0.0, 1.0}, 0.6);
    const ChannelModel three = exponential_channel({0.0, 1.0, 2.0}, 0.6);

    PolicyConfig sub;
    sub.kind = ThresholdPolicy::SuboptimalPast;
    CHECK(sub.resolved_past_depth(two, p) == 6);
    CHECK(sub.resolved_past_depth(three, p) == 7);
    sub.past_depth = 11;
    CHECK(sub.resolved_past_depth(three, p) == 11);

    PolicyConfig genie;
    genie.kind = ThresholdPolicy::OptimalGenie;
    CHECK(genie.resolved_past_depth(two, p) == 40);

    PolicyConfig bad;
    bad.past_depth = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("threshold building blocks match their definitions") {
    const WaveformParams p;
    const ChannelModel ch = exponential_channel({0.0, 1.0}, 0.6);
    const CorrelationTable table = build_correlation_table(ch, p);
    const SymbolSequence seq = random_symbols(60, 3);
    const std::vector<int>& s = seq.symbols;

    const std::size_t n = 30;
    double past = 0.0;
    for (int i = -6; i <= -1; ++i) {
        past += table.c_sum(i) * s[static_cast<std::size_t>(static_cast<int>(n) + i)];
    }
    CHECK(std::abs(suboptimal_threshold(s, n, table, 6) - past) < 1e-14);

    double full = past;
    const double decay = std::exp(-p.beta / p.f);
    double w = 1.0;
    for (int i = 1; i <= 12; ++i) {
        w *= decay;
        full += table.k_const() * w * s[n + static_cast<std::size_t>(i)];
    }
    CHECK(std::abs(optimal_threshold(s, n, table, 6, 12) - full) < 1e-13);

    // Pre-filter regrouping: theta_n = e^{-q} r_{n+1} + (1-e^{-q}) alpha_1 s_{n-1}.
    const double r_next = 0.8125;
    const double expect = decay * r_next + (1.0 - decay) * ch.taps[1].gain *
                                               s[n - 1];
    CHECK(std::abs(prefilter_threshold(r_next, s, n, ch, p) - expect) < 1e-14);

    // Echoes inside the first symbol period cannot be regrouped causally.
    const ChannelModel tight{{{0.0, 1.0}, {0.5, 0.6}}, 0.0};
    CHECK_THROWS_AS(prefilter_threshold(r_next, s, n, tight, p), std::invalid_argument);
}

TEST_CASE("pre-filter return map splits into 2^L branches") {
    const WaveformParams p;
    const std::size_t n_sym = 4000;

    struct Case {
        std::vector<double> delays;
        double gamma;
        std::size_t branches;
    };
    const Case cases[] = {
        {{0.0}, 0.0, 2},
        {{0.0, 1.0}, 0.9, 4},
        {{0.0, 1.0, 2.0}, 0.6, 8},
    };
    for (const auto& c : cases) {
        const ChannelModel ch = exponential_channel(c.delays, c.gamma);
        const SymbolSequence seq = random_symbols(n_sym, 17);
        const std::vector<double> r = received_symbol_series(seq, ch, p);
        const std::vector<double> centers = drive_clusters(r, p, 60, 1e-6);
        CHECK(centers.size() == c.branches);
    }
}

TEST_CASE("measured branch separations reproduce the judgment distances") {
    const WaveformParams p;
    const ChannelModel ch = exponential_channel({0.0, 1.0}, 0.9);
    const CorrelationTable table = build_correlation_table(ch, p);
    const SymbolSequence seq = random_symbols(4000, 19);
    const std::vector<double> r = received_symbol_series(seq, ch, p);

    const std::vector<double> centers = drive_clusters(r, p, 60, 1e-6);
    REQUIRE(centers.size() == 4);
    const double growth = std::exp(p.beta / p.f);

    // Branch lines satisfy u_{n+1} = e^{q} u_n + d, so a drive gap of
    // delta d corresponds to a horizontal gap of delta d / e^{q}.
    // Sorted drives: d(s_n, s_{n-1}) = -(e^q - 1)(s_n + alpha_1 s_{n-1});
    // adjacent-in-s_n pairs share s_{n-1}.
    const double regrouped_gap = (centers[3] - centers[1]) / growth;
    CHECK(regrouped_gap ==
          doctest::Approx(judgment_distance(table, MapStage::Prefilter, true))
              .epsilon(1e-9));
    CHECK(regrouped_gap == doctest::Approx(0.955908446477967904).epsilon(1e-9));

    // Ignoring the echo symbol, the closest opposite-sign branches are the
    // middle pair.
    const double ungrouped_gap = (centers[2] - centers[1]) / growth;
    CHECK(ungrouped_gap ==
          doctest::Approx(judgment_distance(table, MapStage::Prefilter, false))
              .epsilon(1e-9));
    CHECK(ungrouped_gap == doctest::Approx(0.567265074650255796).epsilon(1e-9));
}

TEST_CASE("filtered-map branch separation matches its closed form") {
    const WaveformParams p;
    const ChannelModel ch = exponential_channel({0.0, 1.0}, 0.9);
    const CorrelationTable table = build_correlation_table(ch, p);
    const double growth = std::exp(p.beta / p.f);

    // Embed each (s_{n-1}, s_n, s_{n+1}) combination in an otherwise fixed
    // alternating sequence; everything outside the three labelled symbols
    // cancels when comparing drives within a (s_{n-1}, s_{n+1}) group.
    const int hist = 14;
    std::map<std::pair<int, int>, std::map<int, double>> drives;
    for (int a : {-1, 1}) {
        for (int b : {-1, 1}) {
            for (int c : {-1, 1}) {
                SymbolSequence seq;
                for (int i = 0; i < hist; ++i) seq.symbols.push_back(i % 2 ? -1 : 1);
                seq.symbols.push_back(a);  // s_{n-1}
                seq.symbols.push_back(b);  // s_n
                seq.symbols.push_back(c);  // s_{n+1}
                for (int i = 0; i < hist; ++i) seq.symbols.push_back(i % 2 ? -1 : 1);

                RngStream rng(1);
                const FilteredSeries fs = symbol_level_output(seq, table, 0.0, rng);
                const std::size_t n = static_cast<std::size_t>(hist) + 1;  // index of s_n
                const double d = fs.y[n + 1] - growth * fs.y[n];
                drives[{a, c}][b] = d;
            }
        }
    }
    const double expected = judgment_distance(table, MapStage::Filtered);
    CHECK(expected == doctest::Approx(2.14964779237569902).epsilon(1e-12));
    for (const auto& [group, by_b] : drives) {
        const double gap = (by_b.at(1) - by_b.at(-1)) / growth;
        CHECK(std::abs(gap) == doctest::Approx(expected).epsilon(1e-9));
    }
    // The filtered map's decision gap is wider than the unconditioned
    // pre-filter gap, which is the point of filtering before detection.
    CHECK(expected > judgment_distance(table, MapStage::Prefilter, false));
}

TEST_CASE("return map labelling") {
    const WaveformParams p;
    const ChannelModel ch = exponential_channel({0.0, 1.0}, 0.6);
    const SymbolSequence seq = random_symbols(50, 9);
    const std::vector<double> r = received_symbol_series(seq, ch, p);

    const auto points = return_map(r, seq, {0, -1});
    REQUIRE(points.size() == r.size() - 2);  // n = 0 lacks the -1 label
    for (std::size_t k = 0; k < points.size(); ++k) {
        const std::size_t n = k + 1;
        CHECK(points[k].u_n == r[n]);
        CHECK(points[k].u_next == r[n + 1]);
        CHECK(points[k].true_s_n == seq.symbols[n]);
        REQUIRE(points[k].group_label.size() == 2);
        CHECK(points[k].group_label[0] == seq.symbols[n]);
        CHECK(points[k].group_label[1] == seq.symbols[n - 1]);
    }
}

TEST_CASE("noiseless detection is error free on each policy's domain") {
    const WaveformParams p;
    const ChannelModel ch = exponential_channel({0.0, 1.0}, 0.6);
    const CorrelationTable table = build_correlation_table(ch, p);
    const SymbolSequence seq = random_symbols(2000, 23);
    const std::vector<int>& truth = seq.symbols;

    RngStream rng(1);
    const FilteredSeries fs = symbol_level_output(seq, table, 0.0, rng);

    PolicyConfig genie;
    genie.kind = ThresholdPolicy::OptimalGenie;
    const DetectionResult g = detect(fs.y, genie, table, {}, &truth);
    CHECK(g.errors == 0);
    CHECK(g.decided.size() == seq.size());
    CHECK(g.first_index == 0);

    PolicyConfig sub;
    sub.kind = ThresholdPolicy::SuboptimalPast;
    const std::vector<int> preamble(truth.begin(), truth.begin() + 6);
    const DetectionResult su = detect(fs.y, sub, table, preamble, &truth);
    CHECK(su.errors == 0);
    CHECK(su.decided.size() == seq.size() - 6);
    CHECK(su.first_index == 6);
    CHECK(su.thresholds.size() == su.decided.size());

    PolicyConfig pre;
    pre.kind = ThresholdPolicy::PreFilterRegroup;
    const std::vector<double> r = received_symbol_series(seq, ch, p);
    const std::vector<int> pre_preamble(truth.begin(), truth.begin() + 1);
    const DetectionResult pr = detect(r, pre, table, pre_preamble, &truth);
    CHECK(pr.errors == 0);
    CHECK(pr.decided.size() == seq.size() - 2);  // one-sample lookahead

    // The single-path filtered series also survives a bare sign detector.
    const CorrelationTable t1 = build_correlation_table(exponential_channel({0.0}, 0.0), p);
    RngStream rng2(1);
    const FilteredSeries fs1 = symbol_level_output(seq, t1, 0.0, rng2);
    PolicyConfig zero;
    zero.kind = ThresholdPolicy::Zero;
    const DetectionResult z = detect(fs1.y, zero, t1, {}, &truth);
    CHECK(z.errors == 0);
}

TEST_CASE("decisions feed back into later thresholds") {
    const WaveformParams p;
    const ChannelModel ch = exponential_channel({0.0, 1.0}, 0.6);
    const CorrelationTable table = build_correlation_table(ch, p);
    const SymbolSequence seq = random_symbols(400, 29);
    const std::vector<int>& truth = seq.symbols;

    RngStream rng(1);
    FilteredSeries fs = symbol_level_output(seq, table, 0.0, rng);
    fs.y[200] = -5.0 * truth[200];  // unmistakably wrong sample

    PolicyConfig sub;
    sub.kind = ThresholdPolicy::SuboptimalPast;
    const std::vector<int> preamble(truth.begin(), truth.begin() + 6);
    const DetectionResult det = detect(fs.y, sub, table, preamble, &truth);
    CHECK(det.decided[200 - 6] != truth[200]);
    CHECK(det.errors >= 1);

    // The genie reads true symbols, so the damage stays local.
    PolicyConfig genie;
    genie.kind = ThresholdPolicy::OptimalGenie;
    const DetectionResult gd = detect(fs.y, genie, table, {}, &truth);
    CHECK(gd.errors == 1);
}

TEST_CASE("detector input validation") {
    const WaveformParams p;
    const ChannelModel ch = exponential_channel({0.0, 1.0}, 0.6);
    const CorrelationTable table = build_correlation_table(ch, p);
    const std::vector<double> series(100, 0.1);
    const SymbolSequence seq = random_symbols(100, 31);
    const std::vector<int>& truth = seq.symbols;

    PolicyConfig genie;
    genie.kind = ThresholdPolicy::OptimalGenie;
    CHECK_THROWS_AS(detect(series, genie, table, {}, nullptr), std::invalid_argument);

    PolicyConfig sub;
    sub.kind = ThresholdPolicy::SuboptimalPast;
    const std::vector<int> short_preamble(truth.begin(), truth.begin() + 3);
    CHECK_THROWS_AS(detect(series, sub, table, short_preamble, &truth),
                    std::invalid_argument);

    PolicyConfig pre;
    pre.kind = ThresholdPolicy::PreFilterRegroup;
    CHECK_THROWS_AS(detect(series, pre, table, {}, &truth), std::invalid_argument);
}

TEST_CASE("ties resolve to the negative symbol") {
    const WaveformParams p;
    const CorrelationTable table = build_correlation_table(exponential_channel({0.0}, 0.0), p);
    std::vector<double> series{0.0, 0.4, -0.2};
    PolicyConfig zero;
    zero.kind = ThresholdPolicy::Zero;
    const DetectionResult det = detect(series, zero, table, {});
    REQUIRE(det.decided.size() == 3);
    CHECK(det.decided[0] == -1);
    CHECK(det.decided[1] == 1);
    CHECK(det.decided[2] == -1);
    CHECK(det.errors == -1);  // no truth supplied
}
