// Command-line front end: BER sweeps, closed-form curves, return-map dumps,
// required-Eb/N0 searches, quasi-static frame runs, and channel estimation.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cwcs/analytic.hpp"
#include "cwcs/harness.hpp"

namespace {

std::string fmt(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("cannot parse " + what + " value '" + s + "'");
    }
}

// "a,b,c" or "lo:step:hi"
std::vector<double> parse_ebn0(const std::string& s) {
    std::vector<double> out;
    if (s.find(':') != std::string::npos) {
        const auto parts = split(s, ':');
        if (parts.size() != 3) throw std::runtime_error("Eb/N0 range must be lo:step:hi");
        const double lo = to_double(parts[0], "Eb/N0");
        const double step = to_double(parts[1], "Eb/N0");
        const double hi = to_double(parts[2], "Eb/N0");
        if (step <= 0.0) throw std::runtime_error("Eb/N0 range step must be positive");
        for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
    } else {
        for (const auto& part : split(s, ',')) out.push_back(to_double(part, "Eb/N0"));
    }
    if (out.empty()) throw std::runtime_error("empty Eb/N0 list");
    return out;
}

std::vector<double> parse_delays(const std::string& s) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(to_double(part, "delay"));
    if (out.empty()) throw std::runtime_error("empty delay list");
    return out;
}

// Options shared by the simulation subcommands. A key=value file can supply
// any of them; explicit command-line flags win.
struct CommonOpts {
    std::string config_file;
    std::string channel_file;
    std::string delays = "0,1";
    double gamma = 0.6;
    double beta = 0.65;
    double f = 1.0;
    int oversampling = 16;
    std::string policy = "genie";
    std::string fidelity = "symbol";
    std::string ebn0 = "0:2:14";
    long long trials = 0;
    long long target_errors = 100;
    double epsilon = 0.0;
    std::uint64_t seed = 1;
    std::string out;
    int workers = 0;
    int symbols_per_trial = 1024;
    int mmse_taps = 3;
    int mmse_delay = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_file, "key=value file with any of these options");
    cmd->add_option("--channel", o.channel_file, "channel file: one 'delay gain' pair per line");
    cmd->add_option("--delays", o.delays, "comma list of tap delays (with --gamma)");
    cmd->add_option("--gamma", o.gamma, "damping coefficient for gains e^{-gamma*delay}");
    cmd->add_option("--beta", o.beta, "waveform damping exponent");
    cmd->add_option("--f", o.f, "base frequency / symbol rate");
    cmd->add_option("--oversampling", o.oversampling, "samples per symbol (sample fidelity)");
    cmd->add_option("--policy", o.policy,
                    "zero|prefilter|subopt|genie|zero-mmse|bpsk-mmse");
    cmd->add_option("--fidelity", o.fidelity, "sample|symbol");
    cmd->add_option("--ebn0", o.ebn0, "Eb/N0 list 'a,b,c' or range 'lo:step:hi' in dB");
    cmd->add_option("--trials", o.trials, "fixed trials per point (0 = adaptive)");
    cmd->add_option("--target-errors", o.target_errors, "adaptive stop threshold");
    cmd->add_option("--epsilon", o.epsilon, "receiver channel-knowledge error bound");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--out", o.out, "output CSV path (default: stdout)");
    cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)");
    cmd->add_option("--symbols-per-trial", o.symbols_per_trial, "data symbols per trial");
    cmd->add_option("--mmse-taps", o.mmse_taps, "equalizer tap count");
    cmd->add_option("--mmse-delay", o.mmse_delay, "equalizer decision delay");
}

// Applies config-file values for flags the user did not pass explicitly.
void apply_config_file(const CLI::App* cmd, CommonOpts& o) {
    if (o.config_file.empty()) return;
    const auto kv = cwcs::load_key_values(o.config_file);
    const auto absent = [&](const std::string& flag) { return cmd->count(flag) == 0; };
    for (const auto& [key, value] : kv) {
        if (key == "channel" && absent("--channel")) o.channel_file = value;
        else if (key == "delays" && absent("--delays")) o.delays = value;
        else if (key == "gamma" && absent("--gamma")) o.gamma = to_double(value, key);
        else if (key == "beta" && absent("--beta")) o.beta = to_double(value, key);
        else if (key == "f" && absent("--f")) o.f = to_double(value, key);
        else if (key == "oversampling" && absent("--oversampling"))
            o.oversampling = static_cast<int>(to_double(value, key));
        else if (key == "policy" && absent("--policy")) o.policy = value;
        else if (key == "fidelity" && absent("--fidelity")) o.fidelity = value;
        else if (key == "ebn0" && absent("--ebn0")) o.ebn0 = value;
        else if (key == "trials" && absent("--trials"))
            o.trials = static_cast<long long>(to_double(value, key));
        else if (key == "target-errors" && absent("--target-errors"))
            o.target_errors = static_cast<long long>(to_double(value, key));
        else if (key == "epsilon" && absent("--epsilon")) o.epsilon = to_double(value, key);
        else if (key == "seed" && absent("--seed"))
            o.seed = static_cast<std::uint64_t>(to_double(value, key));
        else if (key == "out" && absent("--out")) o.out = value;
        else if (key == "workers" && absent("--workers"))
            o.workers = static_cast<int>(to_double(value, key));
        else if (key == "symbols-per-trial" && absent("--symbols-per-trial"))
            o.symbols_per_trial = static_cast<int>(to_double(value, key));
        else if (key == "mmse-taps" && absent("--mmse-taps"))
            o.mmse_taps = static_cast<int>(to_double(value, key));
        else if (key == "mmse-delay" && absent("--mmse-delay"))
            o.mmse_delay = static_cast<int>(to_double(value, key));
        else if (key == "channel" || key == "delays" || key == "gamma" || key == "beta" ||
                 key == "f" || key == "oversampling" || key == "policy" || key == "fidelity" ||
                 key == "ebn0" || key == "trials" || key == "target-errors" ||
                 key == "epsilon" || key == "seed" || key == "out" || key == "workers" ||
                 key == "symbols-per-trial" || key == "mmse-taps" || key == "mmse-delay") {
            // overridden on the command line; keep the CLI value
        } else {
            throw std::runtime_error("unknown config key '" + key + "' in " + o.config_file);
        }
    }
}

cwcs::ChannelModel resolve_channel(const CommonOpts& o) {
    if (!o.channel_file.empty()) return cwcs::load_channel_file(o.channel_file);
    return cwcs::exponential_channel(parse_delays(o.delays), o.gamma);
}

cwcs::ExperimentConfig build_config(const CommonOpts& o) {
    cwcs::ExperimentConfig cfg;
    cfg.params.beta = o.beta;
    cfg.params.f = o.f;
    cfg.params.oversampling = o.oversampling;
    cfg.channel = resolve_channel(o);
    cfg.ebn0_db = parse_ebn0(o.ebn0);
    cfg.chain = cwcs::chain_from_string(o.policy);
    cfg.fidelity = cwcs::fidelity_from_string(o.fidelity);
    cfg.trials = o.trials;
    cfg.target_errors = o.target_errors;
    cfg.symbols_per_trial = o.symbols_per_trial;
    cfg.epsilon = o.epsilon;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    cfg.mmse_taps = o.mmse_taps;
    cfg.mmse_delay = o.mmse_delay;
    return cfg;
}

void write_text(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(out_path);
    if (!file) throw std::runtime_error("cannot open output file '" + out_path + "'");
    file << text;
    file.flush();
    if (!file) throw std::runtime_error("write to '" + out_path + "' failed");
}

int cmd_ber_sweep(const CLI::App* cmd, CommonOpts& o) {
    apply_config_file(cmd, o);
    const cwcs::ExperimentConfig cfg = build_config(o);
    const cwcs::BerCurve curve = cwcs::run_ber_sweep(cfg);
    std::ostringstream buf;
    cwcs::emit_csv(curve, buf);
    write_text(o.out, buf.str());
    return 0;
}

int cmd_analytic(const CLI::App* cmd, CommonOpts& o) {
    apply_config_file(cmd, o);
    cwcs::WaveformParams params;
    params.beta = o.beta;
    params.f = o.f;
    params.oversampling = o.oversampling;
    const cwcs::ChannelModel channel = resolve_channel(o);
    const cwcs::CorrelationTable table = cwcs::build_correlation_table(channel, params);
    std::ostringstream buf;
    buf << "ebn0_db,ber_optimal,ber_suboptimal,lower_bound\n";
    for (double db : parse_ebn0(o.ebn0)) {
        const double n0 = cwcs::ebn0_to_n0(db, table.e_p());
        const double sw = cwcs::filtered_noise_sigma(n0, table.e_p());
        buf << fmt(db) << ',' << fmt(cwcs::ber_optimal(table.p_total(), sw)) << ','
            << fmt(cwcs::ber_suboptimal(table.p_total(), table.k_const(), sw, params)) << ','
            << fmt(cwcs::single_path_lower_bound(db)) << '\n';
    }
    write_text(o.out, buf.str());
    return 0;
}

int cmd_return_map(const CLI::App* cmd, CommonOpts& o, const std::string& stage, int n_symbols) {
    apply_config_file(cmd, o);
    cwcs::WaveformParams params;
    params.beta = o.beta;
    params.f = o.f;
    params.oversampling = o.oversampling;
    const cwcs::ChannelModel channel = resolve_channel(o);

    cwcs::RngStream rng(o.seed);
    cwcs::SymbolSequence seq;
    seq.symbols.resize(static_cast<std::size_t>(n_symbols));
    for (auto& s : seq.symbols) s = rng.bipolar();

    std::vector<double> series;
    std::vector<int> offsets;
    if (stage == "prefilter") {
        series = cwcs::received_symbol_series(seq, channel, params);
        offsets.push_back(0);
        for (std::size_t l = 1; l < channel.paths(); ++l) {
            offsets.push_back(static_cast<int>(std::ceil(-channel.taps[l].delay * params.f)));
        }
    } else if (stage == "filtered") {
        const cwcs::CorrelationTable table = cwcs::build_correlation_table(channel, params);
        cwcs::RngStream noiseless(o.seed);
        series = cwcs::symbol_level_output(seq, table, 0.0, noiseless).y;
        offsets = {-1, 0, 1};
    } else {
        throw std::runtime_error("stage must be prefilter or filtered");
    }
    const auto points = cwcs::return_map(series, seq, offsets);
    std::ostringstream buf;
    cwcs::emit_return_map_csv(points, buf);
    write_text(o.out, buf.str());
    return 0;
}

int cmd_table1(const CLI::App* cmd, CommonOpts& o, double target, bool analytic_mode,
               double lo_db, double hi_db) {
    apply_config_file(cmd, o);
    cwcs::ExperimentConfig cfg = build_config(o);
    double required = 0.0;
    if (analytic_mode) {
        const cwcs::CorrelationTable table =
            cwcs::build_correlation_table(cfg.channel, cfg.params);
        const cwcs::ThresholdPolicy kind = cfg.chain == cwcs::ChainKind::Genie
                                               ? cwcs::ThresholdPolicy::OptimalGenie
                                               : cwcs::ThresholdPolicy::SuboptimalPast;
        required = cwcs::required_ebn0_analytic(table, kind, target, lo_db, hi_db);
    } else {
        required = cwcs::required_ebn0(cfg, target, lo_db, hi_db);
    }
    std::ostringstream buf;
    buf << "method,epsilon,target_ber,required_ebn0_db\n"
        << o.policy << ',' << fmt(o.epsilon) << ',' << fmt(target) << ',' << fmt(required)
        << '\n';
    write_text(o.out, buf.str());
    if (!o.out.empty()) {
        std::cout << o.policy << " eps=" << fmt(o.epsilon) << ": " << fmt(required) << " dB\n";
    }
    return 0;
}

int cmd_frames(const CLI::App* cmd, CommonOpts& o, double gamma_lo, double gamma_hi,
               long long frames, int frame_bits, int training_bits, bool perfect) {
    apply_config_file(cmd, o);
    cwcs::ExperimentConfig cfg = build_config(o);
    cfg.gamma_range = {gamma_lo, gamma_hi};
    cfg.trials = frames;
    cfg.frame_bits = frame_bits;
    cfg.training_bits = training_bits;
    cfg.perfect_estimation = perfect;
    const cwcs::FramedResult res = cwcs::run_framed_quasi_static(cfg);
    std::ostringstream buf;
    cwcs::emit_csv(res.proposed, buf);
    // append the baseline rows under the same header
    std::ostringstream base;
    cwcs::emit_csv(res.baseline, base);
    const std::string base_str = base.str();
    buf << base_str.substr(base_str.find('\n') + 1);
    write_text(o.out, buf.str());
    return 0;
}

int cmd_estimate(const CLI::App* cmd, CommonOpts& o, int training, const std::string& model) {
    apply_config_file(cmd, o);
    cwcs::WaveformParams params;
    params.beta = o.beta;
    params.f = o.f;
    params.oversampling = o.oversampling;
    const cwcs::ChannelModel channel = resolve_channel(o);
    const auto ebn0_values = parse_ebn0(o.ebn0);
    const double db = ebn0_values.front();

    cwcs::RngStream rng(o.seed);
    cwcs::SymbolSequence seq;
    seq.symbols.resize(static_cast<std::size_t>(training));
    for (auto& s : seq.symbols) s = rng.bipolar();

    std::vector<double> delays;
    for (const auto& tap : channel.taps) delays.push_back(tap.delay);

    cwcs::ChannelEstimate est;
    if (model == "filter") {
        const cwcs::CorrelationTable table = cwcs::build_correlation_table(channel, params);
        const double n0 = cwcs::ebn0_to_n0(db, table.e_p());
        const double sw = cwcs::filtered_noise_sigma(n0, table.e_p());
        const cwcs::FilteredSeries fs = cwcs::symbol_level_output(seq, table, sw, rng);
        est = cwcs::ls_estimate(seq.symbols, fs.y, delays, params,
                                cwcs::TrainingModel::MatchedFilter, table.depth());
    } else if (model == "symbol") {
        std::vector<double> rx = cwcs::bpsk_propagate(cwcs::bpsk_transmit(seq), channel, params);
        const double n0_bit = std::pow(10.0, -db / 10.0);
        for (double& v : rx) v += rng.normal(std::sqrt(0.5 * n0_bit));
        est = cwcs::ls_estimate(seq.symbols, rx, delays, params,
                                cwcs::TrainingModel::SymbolRate);
    } else {
        throw std::runtime_error("model must be symbol or filter");
    }

    std::ostringstream buf;
    buf << "delay,true_gain,estimated_gain\n";
    for (std::size_t l = 0; l < channel.paths(); ++l) {
        buf << fmt(channel.taps[l].delay) << ',' << fmt(channel.taps[l].gain) << ','
            << fmt(est.taps[l].gain) << '\n';
    }
    write_text(o.out, buf.str());
    std::cerr << "residual norm: " << fmt(est.residual) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chaotic-waveform communication simulator"};
    app.require_subcommand(1);

    CommonOpts sweep_opts, analytic_opts, map_opts, table_opts, frame_opts, est_opts;

    CLI::App* sweep = app.add_subcommand("ber-sweep", "Monte-Carlo BER over an Eb/N0 grid");
    add_common(sweep, sweep_opts);

    CLI::App* analytic = app.add_subcommand("analytic", "closed-form BER predictions");
    add_common(analytic, analytic_opts);

    CLI::App* rmap = app.add_subcommand("return-map", "noiseless return-map scatter");
    add_common(rmap, map_opts);
    std::string stage = "prefilter";
    int map_symbols = 2000;
    rmap->add_option("--stage", stage, "prefilter|filtered");
    rmap->add_option("--symbols", map_symbols, "number of symbols");

    CLI::App* table1 = app.add_subcommand("table1", "required Eb/N0 for a target BER");
    add_common(table1, table_opts);
    double target = 1e-3, lo_db = 0.0, hi_db = 16.0;
    bool analytic_mode = false;
    table1->add_option("--target", target, "target BER");
    table1->add_option("--lo", lo_db, "lower search bracket (dB)");
    table1->add_option("--hi", hi_db, "upper search bracket (dB)");
    table1->add_flag("--analytic", analytic_mode, "use the closed forms instead of simulation");

    CLI::App* frames = app.add_subcommand("frames", "quasi-static frames with LS estimation");
    add_common(frames, frame_opts);
    double gamma_lo = 0.3, gamma_hi = 0.9;
    long long n_frames = 200;
    int frame_bits = 4096, training_bits = 256;
    bool perfect = false;
    frames->add_option("--gamma-lo", gamma_lo, "lower gamma bound");
    frames->add_option("--gamma-hi", gamma_hi, "upper gamma bound");
    frames->add_option("--frames", n_frames, "number of frames");
    frames->add_option("--frame-bits", frame_bits, "bits per frame");
    frames->add_option("--training-bits", training_bits, "training bits per frame");
    frames->add_flag("--perfect", perfect, "skip estimation; use the true taps");

    CLI::App* estimate = app.add_subcommand("estimate", "least-squares tap estimation demo");
    add_common(estimate, est_opts);
    int training = 256;
    std::string model = "filter";
    estimate->add_option("--training", training, "training symbols");
    estimate->add_option("--model", model, "symbol|filter regression kernel");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) return cmd_ber_sweep(sweep, sweep_opts);
        if (analytic->parsed()) return cmd_analytic(analytic, analytic_opts);
        if (rmap->parsed()) return cmd_return_map(rmap, map_opts, stage, map_symbols);
        if (table1->parsed()) {
            return cmd_table1(table1, table_opts, target, analytic_mode, lo_db, hi_db);
        }
        if (frames->parsed()) {
            return cmd_frames(frames, frame_opts, gamma_lo, gamma_hi, n_frames, frame_bits,
                              training_bits, perfect);
        }
        if (estimate->parsed()) return cmd_estimate(estimate, est_opts, training, model);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
