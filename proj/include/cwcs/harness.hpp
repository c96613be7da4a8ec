#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cwcs/baseline.hpp"
#include "cwcs/channel.hpp"
#include "cwcs/detector.hpp"
#include "cwcs/matched_filter.hpp"
#include "cwcs/policy.hpp"
#include "cwcs/waveform.hpp"

namespace cwcs {

enum class Fidelity { Sample, Symbol };

std::string to_string(Fidelity f);
Fidelity fidelity_from_string(const std::string& s);

// What the receiver chain does with a realization. The first four drive the
// threshold detector; the last two are the linear-equalizer comparators.
enum class ChainKind { Zero, Prefilter, Subopt, Genie, ZeroMmse, BpskMmse };

std::string to_string(ChainKind c);
ChainKind chain_from_string(const std::string& s);

struct ExperimentConfig {
    WaveformParams params;
    ChannelModel channel;
    std::vector<double> ebn0_db = {0, 2, 4, 6, 8, 10, 12, 14};
    ChainKind chain = ChainKind::Genie;
    PolicyConfig policy;  // depth overrides for the threshold chains
    Fidelity fidelity = Fidelity::Symbol;

    long long trials = 0;          // fixed trial count per point; 0 = adaptive
    long long target_errors = 100; // adaptive stop (checked at batch bounds)
    long long max_trials = 4000000;
    int symbols_per_trial = 1024;  // decisions contributed by one trial

    double epsilon = 0.0;     // receiver-side channel-knowledge error
    std::uint64_t seed = 1;
    int workers = 0;          // 0 = hardware concurrency

    int mmse_taps = 3;        // equalizer comparators
    int mmse_delay = 1;

    // framed quasi-static mode
    int frame_bits = 4096;
    int training_bits = 256;
    std::pair<double, double> gamma_range{0.6, 0.6};
    bool perfect_estimation = false;

    void validate() const;
};

struct WilsonInterval {
    double lo = 0.0;
    double hi = 0.0;
};

// 95% score interval for errors/decisions.
WilsonInterval wilson_interval(long long errors, long long decisions);

struct BerPoint {
    double ebn0_db = 0.0;
    long long errors = 0;
    long long decisions = 0;
    double ber = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

struct BerCurve {
    std::vector<BerPoint> points;
    std::string policy_label;
    std::string fidelity_label;
};

struct TrialOutcome {
    long long errors = 0;
    long long decisions = 0;
};

// One independent trial at one operating point. table_true must be built from
// config.channel; point_master keys the trial's random streams together with
// trial_index, so results do not depend on scheduling.
TrialOutcome run_single_trial(const ExperimentConfig& config, double ebn0_db,
                              const CorrelationTable& table_true, std::uint64_t point_master,
                              std::uint64_t trial_index);

// Accumulates trials for one Eb/N0 point (fixed count or adaptive stop at
// batch boundaries), running batches of 64 trials across workers.
BerPoint evaluate_point(const ExperimentConfig& config, double ebn0_db,
                        const CorrelationTable& table_true, std::uint64_t point_master);

BerCurve run_ber_sweep(const ExperimentConfig& config);

// Bisection in dB for the point where the Monte-Carlo BER crosses target_ber.
// Probes run adaptively with at least 100 errors each. Throws if the bracket
// does not straddle the target (e.g. an error floor above it).
double required_ebn0(const ExperimentConfig& config, double target_ber, double lo_db = 0.0,
                     double hi_db = 16.0);

// Same search on the closed-form predictions instead of simulation.
double required_ebn0_analytic(const CorrelationTable& table, ThresholdPolicy kind,
                              double target_ber, double lo_db = 0.0, double hi_db = 20.0);

struct FramedResult {
    BerCurve proposed;  // threshold detector fed by least-squares estimates
    BerCurve baseline;  // BPSK with MMSE equalization on the same frames
};

// Quasi-static frames: per frame draw gamma, send training + data, estimate
// the taps from the training block, then run both receivers on that frame.
FramedResult run_framed_quasi_static(const ExperimentConfig& config);

void emit_csv(const BerCurve& curve, std::ostream& out);
void emit_csv(const BerCurve& curve, const std::string& path);
void emit_return_map_csv(const std::vector<ReturnMapPoint>& points, std::ostream& out);
void emit_return_map_csv(const std::vector<ReturnMapPoint>& points, const std::string& path);

// key=value configuration file: '#' comments, blank lines ignored.
std::map<std::string, std::string> load_key_values(const std::string& path);

}  // namespace cwcs
