#include "cwcs/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "cwcs/analytic.hpp"
#include "cwcs/rng.hpp"

namespace cwcs {

std::string to_string(Fidelity f) {
    return f == Fidelity::Sample ? "sample" : "symbol";
}

Fidelity fidelity_from_string(const std::string& s) {
    if (s == "sample") return Fidelity::Sample;
    if (s == "symbol") return Fidelity::Symbol;
    throw std::invalid_argument("unknown fidelity '" + s + "' (expected sample|symbol)");
}

std::string to_string(ChainKind c) {
    switch (c) {
        case ChainKind::Zero: return "zero";
        case ChainKind::Prefilter: return "prefilter";
        case ChainKind::Subopt: return "subopt";
        case ChainKind::Genie: return "genie";
        case ChainKind::ZeroMmse: return "zero-mmse";
        case ChainKind::BpskMmse: return "bpsk-mmse";
    }
    throw std::logic_error("to_string: unknown ChainKind");
}

ChainKind chain_from_string(const std::string& s) {
    if (s == "zero") return ChainKind::Zero;
    if (s == "prefilter") return ChainKind::Prefilter;
    if (s == "subopt") return ChainKind::Subopt;
    if (s == "genie") return ChainKind::Genie;
    if (s == "zero-mmse") return ChainKind::ZeroMmse;
    if (s == "bpsk-mmse") return ChainKind::BpskMmse;
    throw std::invalid_argument("unknown chain '" + s +
                                "' (expected zero|prefilter|subopt|genie|zero-mmse|bpsk-mmse)");
}

void ExperimentConfig::validate() const {
    params.validate();
    channel.validate();
    policy.validate();
    if (ebn0_db.empty()) throw std::invalid_argument("config: empty Eb/N0 list");
    for (double db : ebn0_db) {
        if (!std::isfinite(db)) throw std::invalid_argument("config: non-finite Eb/N0 value");
    }
    if (trials < 0) throw std::invalid_argument("config: trials must be >= 0");
    if (trials == 0 && target_errors < 10) {
        throw std::invalid_argument("config: adaptive mode needs target_errors >= 10");
    }
    if (max_trials < 1) throw std::invalid_argument("config: max_trials must be positive");
    if (symbols_per_trial < 1) {
        throw std::invalid_argument("config: symbols_per_trial must be positive");
    }
    if (!(epsilon >= 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("config: epsilon must be in [0, 1)");
    }
    if (mmse_taps < 1 || mmse_delay < 0) {
        throw std::invalid_argument("config: bad equalizer geometry");
    }
    if (training_bits < 0 || frame_bits <= training_bits) {
        throw std::invalid_argument("config: need frame_bits > training_bits >= 0");
    }
    if (!(gamma_range.first > 0.0) || gamma_range.second < gamma_range.first) {
        throw std::invalid_argument("config: bad gamma range");
    }
    if (workers < 0) throw std::invalid_argument("config: workers must be >= 0");
}

WilsonInterval wilson_interval(long long errors, long long decisions) {
    if (decisions <= 0) throw std::invalid_argument("wilson_interval: decisions must be positive");
    if (errors < 0 || errors > decisions) {
        throw std::invalid_argument("wilson_interval: errors outside [0, decisions]");
    }
    const double z = 1.959963984540054;  // 97.5th normal percentile
    const double n = static_cast<double>(decisions);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // The boundary cases are exact analytically; rounding in center - half
    // would otherwise leave dust on the order of 1e-18.
    const double lo = errors == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = errors == decisions ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

namespace {

ThresholdPolicy policy_kind_of(ChainKind chain) {
    switch (chain) {
        case ChainKind::Zero: return ThresholdPolicy::Zero;
        case ChainKind::Prefilter: return ThresholdPolicy::PreFilterRegroup;
        case ChainKind::Subopt: return ThresholdPolicy::SuboptimalPast;
        case ChainKind::Genie: return ThresholdPolicy::OptimalGenie;
        default: break;
    }
    throw std::logic_error("policy_kind_of: not a threshold chain");
}

// Known symbols preceding the data so every chain's first decision has the
// history it needs.
int preamble_length(const ExperimentConfig& cfg) {
    switch (cfg.chain) {
        case ChainKind::Zero:
        case ChainKind::Genie:
            return 0;
        case ChainKind::Prefilter: {
            int need = 0;
            for (std::size_t l = 1; l < cfg.channel.paths(); ++l) {
                const int shift =
                    static_cast<int>(std::ceil(-cfg.channel.taps[l].delay * cfg.params.f));
                need = std::max(need, -shift);
            }
            return need;
        }
        case ChainKind::Subopt: {
            PolicyConfig pc = cfg.policy;
            pc.kind = ThresholdPolicy::SuboptimalPast;
            return pc.resolved_past_depth(cfg.channel, cfg.params);
        }
        case ChainKind::ZeroMmse:
        case ChainKind::BpskMmse:
            return cfg.mmse_taps;
    }
    return 0;
}

// Extra transmitted symbols after the data: lookahead for the pre-filter
// threshold, equalizer delay for the linear chains.
int trailing_length(const ExperimentConfig& cfg) {
    if (cfg.chain == ChainKind::Prefilter) return 1;
    if (cfg.chain == ChainKind::ZeroMmse || cfg.chain == ChainKind::BpskMmse) {
        return cfg.mmse_delay;
    }
    return 0;
}

SymbolSequence make_sequence(int n_preamble, int n_random, RngStream& rng) {
    SymbolSequence seq;
    seq.symbols.resize(static_cast<std::size_t>(n_preamble) + static_cast<std::size_t>(n_random));
    for (int m = 0; m < n_preamble; ++m) seq.symbols[static_cast<std::size_t>(m)] = m % 2 ? -1 : 1;
    for (std::size_t m = static_cast<std::size_t>(n_preamble); m < seq.symbols.size(); ++m) {
        seq.symbols[m] = rng.bipolar();
    }
    return seq;
}

// Matched-filter output at symbol instants, either from the closed-form
// symbol-rate generator or from the full waveform pipeline.
std::vector<double> filtered_series(const ExperimentConfig& cfg, const SymbolSequence& seq,
                                    const CorrelationTable& table_true, double sigma_w,
                                    double n0_psd, RngStream& rng) {
    if (cfg.fidelity == Fidelity::Symbol) {
        return symbol_level_output(seq, table_true, sigma_w, rng).y;
    }
    const SampledSignal clean = propagate(synthesize(seq, cfg.params), cfg.channel);
    const SampledSignal noisy = add_awgn(clean, n0_psd, rng);
    const SampledSignal filtered = matched_filter(noisy, cfg.params);
    const int q = cfg.params.oversampling;
    std::vector<double> out(seq.size());
    for (std::size_t m = 0; m < seq.size(); ++m) {
        out[m] = filtered.samples[m * static_cast<std::size_t>(q)];
    }
    return out;
}

long long count_sign_errors(const std::vector<double>& decision_stat,
                            const std::vector<int>& truth, std::size_t begin, std::size_t end) {
    long long errors = 0;
    for (std::size_t m = begin; m < end; ++m) {
        const int decided = decision_stat[m] > 0.0 ? 1 : -1;
        if (decided != truth[m]) ++errors;
    }
    return errors;
}

}  // namespace

TrialOutcome run_single_trial(const ExperimentConfig& cfg, double ebn0_db,
                              const CorrelationTable& table_true, std::uint64_t point_master,
                              std::uint64_t trial_index) {
    const int n0 = preamble_length(cfg);
    const int n_data = cfg.symbols_per_trial;
    const int trail = trailing_length(cfg);
    RngStream rng(point_master, stream_salt::trial, trial_index);
    const SymbolSequence seq = make_sequence(n0, n_data + trail, rng);
    const std::vector<int>& truth = seq.symbols;
    const std::vector<int> preamble(truth.begin(), truth.begin() + n0);

    ChannelModel believed = cfg.channel;
    if (cfg.epsilon > 0.0) {
        RngStream perturb_rng(point_master, stream_salt::perturb, trial_index);
        believed = perturb_channel(cfg.channel, cfg.epsilon, perturb_rng);
    }

    const double e_p = table_true.e_p();
    const double n0_psd = ebn0_to_n0(ebn0_db, e_p);
    const double sigma_w = filtered_noise_sigma(n0_psd, e_p);

    TrialOutcome out;
    switch (cfg.chain) {
        case ChainKind::Zero:
        case ChainKind::Subopt:
        case ChainKind::Genie: {
            const std::vector<double> y =
                filtered_series(cfg, seq, table_true, sigma_w, n0_psd, rng);
            PolicyConfig pc = cfg.policy;
            pc.kind = policy_kind_of(cfg.chain);
            DetectionResult det;
            if (cfg.epsilon > 0.0) {
                const CorrelationTable table_hat(believed, cfg.params, table_true.depth());
                det = detect(y, pc, table_hat, preamble, &truth);
            } else {
                det = detect(y, pc, table_true, preamble, &truth);
            }
            out.errors = det.errors;
            out.decisions = static_cast<long long>(det.decided.size());
            break;
        }
        case ChainKind::Prefilter: {
            if (cfg.fidelity == Fidelity::Sample) {
                throw std::invalid_argument(
                    "run_single_trial: the pre-filter detector runs on the symbol-rate map; use "
                    "symbol fidelity");
            }
            std::vector<double> r = received_symbol_series(seq, cfg.channel, cfg.params);
            // Symbol-rate noise in the Nyquist band of the symbol clock.
            const double sigma_r = std::sqrt(0.5 * n0_psd * cfg.params.f);
            if (sigma_r > 0.0) {
                for (double& v : r) v += rng.normal(sigma_r);
            }
            PolicyConfig pc = cfg.policy;
            pc.kind = ThresholdPolicy::PreFilterRegroup;
            DetectionResult det;
            if (cfg.epsilon > 0.0) {
                const CorrelationTable table_hat(believed, cfg.params, table_true.depth());
                det = detect(r, pc, table_hat, preamble, &truth);
            } else {
                det = detect(r, pc, table_true, preamble, &truth);
            }
            out.errors = det.errors;
            out.decisions = static_cast<long long>(det.decided.size());
            break;
        }
        case ChainKind::ZeroMmse: {
            std::vector<double> u = filtered_series(cfg, seq, table_true, sigma_w, n0_psd, rng);
            for (double& v : u) v /= e_p;
            ChannelEstimate est;
            est.taps = believed.taps;
            const double nv = (sigma_w * sigma_w) / (e_p * e_p);
            const EqualizerTaps eq =
                mmse_design(est, nv, cfg.mmse_taps, cfg.mmse_delay, cfg.params);
            const std::vector<double> z = equalize(u, eq);
            out.errors = count_sign_errors(z, truth, static_cast<std::size_t>(n0),
                                           static_cast<std::size_t>(n0 + n_data));
            out.decisions = n_data;
            break;
        }
        case ChainKind::BpskMmse: {
            if (cfg.fidelity == Fidelity::Sample) {
                throw std::invalid_argument(
                    "run_single_trial: the BPSK baseline is a symbol-rate model; use symbol "
                    "fidelity");
            }
            std::vector<double> rx = bpsk_propagate(bpsk_transmit(seq), cfg.channel, cfg.params);
            const double n0_bit = std::pow(10.0, -ebn0_db / 10.0);  // E_b = 1
            const double sigma = std::sqrt(0.5 * n0_bit);
            for (double& v : rx) v += rng.normal(sigma);
            ChannelEstimate est;
            est.taps = believed.taps;
            const EqualizerTaps eq =
                mmse_design(est, 0.5 * n0_bit, cfg.mmse_taps, cfg.mmse_delay, cfg.params);
            const std::vector<double> z = equalize(rx, eq);
            out.errors = count_sign_errors(z, truth, static_cast<std::size_t>(n0),
                                           static_cast<std::size_t>(n0 + n_data));
            out.decisions = n_data;
            break;
        }
    }
    return out;
}

namespace {

// Runs fn(i) for i in [0, count) across the workers, with results landing in
// an index-addressed array so reduction order never depends on scheduling.
template <typename Fn>
void parallel_indexed(long long count, int workers, Fn&& fn) {
    const int w_count = static_cast<int>(std::min<long long>(workers, count));
    if (w_count <= 1) {
        for (long long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(w_count));
    pool.reserve(static_cast<std::size_t>(w_count));
    for (int w = 0; w < w_count; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (long long i = w; i < count; i += w_count) fn(i);
            } catch (...) {
                failures[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
}

int effective_workers(const ExperimentConfig& cfg) {
    if (cfg.workers > 0) return cfg.workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

constexpr long long kBatch = 64;

}  // namespace

BerPoint evaluate_point(const ExperimentConfig& cfg, double ebn0_db,
                        const CorrelationTable& table_true, std::uint64_t point_master) {
    const int workers = effective_workers(cfg);
    long long done = 0, errors = 0, decisions = 0;
    while (true) {
        long long want;
        if (cfg.trials > 0) {
            want = std::min(kBatch, cfg.trials - done);
            if (want <= 0) break;
        } else {
            if (errors >= cfg.target_errors || done >= cfg.max_trials) break;
            want = std::min(kBatch, cfg.max_trials - done);
        }
        std::vector<TrialOutcome> results(static_cast<std::size_t>(want));
        parallel_indexed(want, workers, [&](long long i) {
            results[static_cast<std::size_t>(i)] =
                run_single_trial(cfg, ebn0_db, table_true, point_master,
                                 static_cast<std::uint64_t>(done + i));
        });
        for (const auto& r : results) {
            errors += r.errors;
            decisions += r.decisions;
        }
        done += want;
    }
    BerPoint point;
    point.ebn0_db = ebn0_db;
    point.errors = errors;
    point.decisions = decisions;
    point.ber = decisions > 0 ? static_cast<double>(errors) / static_cast<double>(decisions) : 0.0;
    if (decisions > 0) {
        const WilsonInterval ci = wilson_interval(errors, decisions);
        point.ci_lo = ci.lo;
        point.ci_hi = ci.hi;
    }
    return point;
}

BerCurve run_ber_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const CorrelationTable table_true = build_correlation_table(cfg.channel, cfg.params);
    BerCurve curve;
    curve.policy_label = to_string(cfg.chain);
    curve.fidelity_label = to_string(cfg.fidelity);
    curve.points.reserve(cfg.ebn0_db.size());
    for (std::size_t pi = 0; pi < cfg.ebn0_db.size(); ++pi) {
        const std::uint64_t pm = derive_stream_seed(cfg.seed, stream_salt::probe, pi);
        curve.points.push_back(evaluate_point(cfg, cfg.ebn0_db[pi], table_true, pm));
    }
    return curve;
}

double required_ebn0(const ExperimentConfig& config, double target_ber, double lo_db,
                     double hi_db) {
    config.validate();
    if (!(target_ber > 0.0 && target_ber < 0.5)) {
        throw std::invalid_argument("required_ebn0: target BER must lie in (0, 0.5)");
    }
    if (!(lo_db < hi_db)) {
        throw std::invalid_argument("required_ebn0: need lo_db < hi_db");
    }
    ExperimentConfig cfg = config;
    cfg.trials = 0;  // probes are always adaptive
    cfg.target_errors = std::max<long long>(cfg.target_errors, 100);
    // A probe only has to place its BER relative to the target, so cap the
    // trial budget near 3x what an at-target point needs for the error quota.
    // Probes far below the target then stop at the cap instead of chasing
    // errors that never come.
    const double cap_decisions =
        3.0 * static_cast<double>(cfg.target_errors) / target_ber;
    const long long cap_trials = static_cast<long long>(
        cap_decisions / static_cast<double>(cfg.symbols_per_trial)) + 1;
    cfg.max_trials = std::min(cfg.max_trials, std::max(cap_trials, kBatch));
    const CorrelationTable table_true = build_correlation_table(cfg.channel, cfg.params);

    std::uint64_t probe_index = 1000;  // distinct from sweep point streams
    const auto probe = [&](double db) {
        const std::uint64_t pm = derive_stream_seed(cfg.seed, stream_salt::probe, probe_index++);
        return evaluate_point(cfg, db, table_true, pm).ber;
    };

    const double ber_lo = probe(lo_db);
    if (ber_lo <= target_ber) {
        throw std::runtime_error("required_ebn0: BER " + std::to_string(ber_lo) + " at " +
                                 std::to_string(lo_db) +
                                 " dB is already at or below the target; lower the bracket");
    }
    const double ber_hi = probe(hi_db);
    if (ber_hi >= target_ber) {
        throw std::runtime_error("required_ebn0: BER " + std::to_string(ber_hi) + " at " +
                                 std::to_string(hi_db) +
                                 " dB does not reach the target (error floor?)");
    }
    double lo = lo_db, hi = hi_db;
    for (int iter = 0; iter < 14; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (probe(mid) > target_ber ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double required_ebn0_analytic(const CorrelationTable& table, ThresholdPolicy kind,
                              double target_ber, double lo_db, double hi_db) {
    if (kind != ThresholdPolicy::OptimalGenie && kind != ThresholdPolicy::SuboptimalPast) {
        throw std::invalid_argument(
            "required_ebn0_analytic: closed forms exist only for the full-ISI and past-ISI "
            "thresholds");
    }
    if (!(target_ber > 0.0 && target_ber < 0.5)) {
        throw std::invalid_argument("required_ebn0_analytic: target BER must lie in (0, 0.5)");
    }
    const auto ber_at = [&](double db) {
        const double n0 = ebn0_to_n0(db, table.e_p());
        const double sw = filtered_noise_sigma(n0, table.e_p());
        return kind == ThresholdPolicy::OptimalGenie
                   ? ber_optimal(table.p_total(), sw)
                   : ber_suboptimal(table.p_total(), table.k_const(), sw, table.params());
    };
    if (ber_at(lo_db) <= target_ber || ber_at(hi_db) >= target_ber) {
        throw std::runtime_error("required_ebn0_analytic: bracket does not straddle the target");
    }
    double lo = lo_db, hi = hi_db;
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (ber_at(mid) > target_ber ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

struct FrameOutcome {
    long long proposed_errors = 0;
    long long proposed_decisions = 0;
    long long baseline_errors = 0;
    long long baseline_decisions = 0;
};

FrameOutcome run_framed_frame(const ExperimentConfig& cfg, double ebn0_db,
                              const std::vector<double>& delays, std::uint64_t point_master,
                              std::uint64_t frame_index) {
    const ChannelModel channel =
        quasi_static_channel(delays, cfg.gamma_range, frame_index, cfg.seed);
    RngStream rng(point_master, stream_salt::frame, frame_index);

    const int n_train = cfg.training_bits;
    const int n_data = cfg.frame_bits - n_train;
    const int trail = cfg.mmse_delay;
    SymbolSequence seq;
    seq.symbols.resize(static_cast<std::size_t>(cfg.frame_bits + trail));
    for (auto& s : seq.symbols) s = rng.bipolar();
    const std::vector<int> training(seq.symbols.begin(), seq.symbols.begin() + n_train);

    const CorrelationTable table_true = build_correlation_table(channel, cfg.params);
    const double e_p = table_true.e_p();
    const double n0_psd = ebn0_to_n0(ebn0_db, e_p);
    const double sigma_w = filtered_noise_sigma(n0_psd, e_p);

    SymbolSequence cwcs_seq;
    cwcs_seq.symbols.assign(seq.symbols.begin(),
                            seq.symbols.begin() + cfg.frame_bits);
    const FilteredSeries fs = symbol_level_output(cwcs_seq, table_true, sigma_w, rng);

    ChannelEstimate est_cwcs;
    if (cfg.perfect_estimation) {
        est_cwcs.taps = channel.taps;
    } else {
        const std::vector<double> train_rx(fs.y.begin(), fs.y.begin() + n_train);
        est_cwcs = ls_estimate(training, train_rx, delays, cfg.params,
                               TrainingModel::MatchedFilter, table_true.depth());
    }
    ChannelModel believed;
    believed.taps = est_cwcs.taps;
    believed.gamma = channel.gamma;
    const CorrelationTable table_hat(believed, cfg.params, table_true.depth());

    PolicyConfig pc = cfg.policy;
    pc.kind = ThresholdPolicy::SuboptimalPast;
    const DetectionResult det = detect(fs.y, pc, table_hat, training, &cwcs_seq.symbols);

    FrameOutcome out;
    out.proposed_errors = det.errors;
    out.proposed_decisions = static_cast<long long>(det.decided.size());

    std::vector<double> rx = bpsk_propagate(bpsk_transmit(seq), channel, cfg.params);
    const double n0_bit = std::pow(10.0, -ebn0_db / 10.0);
    const double sigma = std::sqrt(0.5 * n0_bit);
    for (double& v : rx) v += rng.normal(sigma);

    ChannelEstimate est_bpsk;
    if (cfg.perfect_estimation) {
        est_bpsk.taps = channel.taps;
    } else {
        const std::vector<double> train_rx(rx.begin(), rx.begin() + n_train);
        est_bpsk = ls_estimate(training, train_rx, delays, cfg.params, TrainingModel::SymbolRate);
    }
    const EqualizerTaps eq =
        mmse_design(est_bpsk, 0.5 * n0_bit, cfg.mmse_taps, cfg.mmse_delay, cfg.params);
    const std::vector<double> z = equalize(rx, eq);
    out.baseline_errors = count_sign_errors(z, seq.symbols, static_cast<std::size_t>(n_train),
                                            static_cast<std::size_t>(cfg.frame_bits));
    out.baseline_decisions = n_data;
    return out;
}

}  // namespace

FramedResult run_framed_quasi_static(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<double> delays;
    delays.reserve(cfg.channel.paths());
    for (const auto& tap : cfg.channel.taps) delays.push_back(tap.delay);

    const long long frames = cfg.trials > 0 ? cfg.trials : 200;
    const int workers = effective_workers(cfg);

    FramedResult result;
    result.proposed.policy_label = "subopt";
    result.proposed.fidelity_label = "symbol";
    result.baseline.policy_label = "bpsk-mmse";
    result.baseline.fidelity_label = "symbol";

    for (std::size_t pi = 0; pi < cfg.ebn0_db.size(); ++pi) {
        const double db = cfg.ebn0_db[pi];
        const std::uint64_t pm = derive_stream_seed(cfg.seed, stream_salt::probe, pi);
        std::vector<FrameOutcome> outcomes(static_cast<std::size_t>(frames));
        parallel_indexed(frames, workers, [&](long long fi) {
            outcomes[static_cast<std::size_t>(fi)] =
                run_framed_frame(cfg, db, delays, pm, static_cast<std::uint64_t>(fi));
        });
        BerPoint prop, base;
        prop.ebn0_db = base.ebn0_db = db;
        for (const auto& frame : outcomes) {
            prop.errors += frame.proposed_errors;
            prop.decisions += frame.proposed_decisions;
            base.errors += frame.baseline_errors;
            base.decisions += frame.baseline_decisions;
        }
        for (BerPoint* p : {&prop, &base}) {
            p->ber = p->decisions > 0
                         ? static_cast<double>(p->errors) / static_cast<double>(p->decisions)
                         : 0.0;
            if (p->decisions > 0) {
                const WilsonInterval ci = wilson_interval(p->errors, p->decisions);
                p->ci_lo = ci.lo;
                p->ci_hi = ci.hi;
            }
        }
        result.proposed.points.push_back(prop);
        result.baseline.points.push_back(base);
    }
    return result;
}

namespace {

void append_number(std::string& line, double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    line.append(buf, res.ptr);
}

}  // namespace

void emit_csv(const BerCurve& curve, std::ostream& out) {
    out << "ebn0_db,errors,decisions,ber,ci_lo,ci_hi,policy,fidelity\n";
    for (const auto& p : curve.points) {
        std::string line;
        append_number(line, p.ebn0_db);
        line += ',';
        line += std::to_string(p.errors);
        line += ',';
        line += std::to_string(p.decisions);
        line += ',';
        append_number(line, p.ber);
        line += ',';
        append_number(line, p.ci_lo);
        line += ',';
        append_number(line, p.ci_hi);
        line += ',';
        line += curve.policy_label;
        line += ',';
        line += curve.fidelity_label;
        line += '\n';
        out << line;
    }
    if (!out) throw std::runtime_error("emit_csv: stream write failed");
}

void emit_csv(const BerCurve& curve, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw std::runtime_error("emit_csv: cannot open '" + path + "'");
    emit_csv(curve, file);
    file.flush();
    if (!file) throw std::runtime_error("emit_csv: write to '" + path + "' failed");
}

void emit_return_map_csv(const std::vector<ReturnMapPoint>& points, std::ostream& out) {
    out << "u_n,u_next,group,s_n\n";
    for (const auto& pt : points) {
        std::string line;
        append_number(line, pt.u_n);
        line += ',';
        append_number(line, pt.u_next);
        line += ',';
        for (int s : pt.group_label) line += (s > 0 ? '+' : '-');
        line += ',';
        line += std::to_string(pt.true_s_n);
        line += '\n';
        out << line;
    }
    if (!out) throw std::runtime_error("emit_return_map_csv: stream write failed");
}

void emit_return_map_csv(const std::vector<ReturnMapPoint>& points, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw std::runtime_error("emit_return_map_csv: cannot open '" + path + "'");
    emit_return_map_csv(points, file);
    file.flush();
    if (!file) throw std::runtime_error("emit_return_map_csv: write to '" + path + "' failed");
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

std::map<std::string, std::string> load_key_values(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw std::runtime_error("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(file, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key=value");
        }
        kv[trim(stripped.substr(0, eq))] = trim(stripped.substr(eq + 1));
    }
    return kv;
}

}  // namespace cwcs
