#pragma once

// Declarative experiments: channel -> datasets -> trained models -> results
// table, plus architecture sweeps. Every random draw comes from a named
// sub-stream of the root seed, so outputs are a pure function of the config.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "satphase/bounds.hpp"
#include "satphase/error.hpp"
#include "satphase/estimator.hpp"
#include "satphase/io.hpp"
#include "satphase/phasesim.hpp"
#include "satphase/propagation.hpp"

namespace satphase {

enum class ModelKind { lstm, expectation, identity };

inline std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::lstm: return "lstm";
        case ModelKind::expectation: return "expectation";
        case ModelKind::identity: return "identity";
    }
    return "?";
}

inline ModelKind model_kind_from_string(const std::string& s) {
    if (s == "lstm") return ModelKind::lstm;
    if (s == "expectation") return ModelKind::expectation;
    if (s == "identity") return ModelKind::identity;
    throw ConfigError("unknown model kind '" + s + "'");
}

struct ModelSpec {
    ModelKind kind = ModelKind::lstm;
    std::size_t window_len = 0;  // N; unused for identity
    std::size_t z_dim = 0;       // lstm only

    bool operator==(const ModelSpec&) const = default;
};

enum class ChannelMode { full_propagation, surrogate_cache };

struct ChannelConfig {
    ChannelMode mode = ChannelMode::surrogate_cache;
    /// Existing channel CSV to build the cache from (empty: simulate).
    std::string cache_path;
    /// Inline T samples; used instead of simulation when non-empty.
    std::vector<double> cache_samples;
    std::size_t cache_realizations = 100;
    GridConfig grid;
};

struct ExperimentConfig {
    PhaseCase phase_case = PhaseCase::gaussian_noise;
    std::vector<ModelSpec> models;
    /// Add identity and expectation(N) rows for every LSTM spec.
    bool include_baselines = true;
    std::size_t train_pulses = 100'000;
    std::size_t test_pulses = 100'000;
    NoiseParams noise;
    AtmosphereProfile atmosphere;
    SamplingRanges ranges;
    ChannelConfig channel;
    double pulse_rate = 1.0e6;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    TrainConfig train;
    std::size_t eval_stride = 1;
    double signal_amplitude_sq = 10.0;

    std::size_t max_window() const {
        std::size_t n = 1;
        for (const auto& m : models) n = std::max(n, m.kind == ModelKind::identity ? std::size_t{1} : m.window_len);
        return n;
    }

    void validate() const {
        if (models.empty()) throw ConfigError("ExperimentConfig: at least one model spec is required");
        for (const auto& m : models) {
            if (m.kind != ModelKind::identity && m.window_len < 1) throw ConfigError("ExperimentConfig: N must be >= 1");
            if (m.kind == ModelKind::lstm && m.z_dim < 1) throw ConfigError("ExperimentConfig: z_dim must be >= 1");
        }
        if (train_pulses < 10 * max_window() || test_pulses < 10 * max_window()) {
            throw ConfigError("ExperimentConfig: dataset sizes must be >= 10 * max(N)");
        }
        if (!(pulse_rate > 0.0)) throw ConfigError("ExperimentConfig: pulse_rate must be > 0");
        if (eval_stride < 1) throw ConfigError("ExperimentConfig: eval_stride must be >= 1");
        noise.validate();
        atmosphere.validate();
        ranges.validate();
        train.validate();
    }

    /// Applies the paper-scale dataset sizes (about 1e6 train / 1e6 test pulses).
    void use_paper_scale() {
        train_pulses = 1'000'000;
        test_pulses = 1'000'000;
    }
    void use_desk_scale() {
        train_pulses = 100'000;
        test_pulses = 100'000;
    }
};

struct ResultRow {
    std::string model_id;
    ModelKind kind = ModelKind::identity;
    std::size_t window_len = 0;
    std::size_t z_dim = 0;
    std::uint64_t scale = 0;
    double est_error_variance = 0.0;  // rad^2, reported as SNU
    double mean_bias = 0.0;
    double train_time_s = 0.0;
    double eval_time_s = 0.0;
};

struct ResultsTable {
    std::vector<ResultRow> rows;
    std::size_t first_evaluated_pulse = 0;
    std::size_t evaluated_pulses = 0;

    const ResultRow* find(ModelKind kind, std::size_t n = 0, std::size_t z = 0) const {
        for (const auto& r : rows) {
            if (r.kind == kind && (kind == ModelKind::identity || r.window_len == n) &&
                (kind != ModelKind::lstm || r.z_dim == z)) {
                return &r;
            }
        }
        return nullptr;
    }
};

// ---------------------------------------------------------------- config I/O

namespace detail {

template <class T>
void read_opt(const json& j, const char* key, T& field, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        field = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where + ": field '" + key + "' has the wrong type (" + e.what() + ")");
    }
}

inline void read_normal(const json& j, const char* key, NormalSpec& spec, const std::string& where) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    read_opt(v, "mean", spec.mean, where + "." + key);
    read_opt(v, "variance", spec.variance, where + "." + key);
}

inline void read_range(const json& j, const char* key, Range& r, const std::string& where) {
    if (!j.contains(key)) return;
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2) throw ParseError(where + ": field '" + key + "' must be [low, high]");
    r.low = v[0].get<double>();
    r.high = v[1].get<double>();
}

}  // namespace detail

inline ExperimentConfig experiment_config_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("config: expected a JSON object");
    ExperimentConfig c;
    if (j.contains("scale")) {
        const auto s = j.at("scale").get<std::string>();
        if (s == "paper") {
            c.use_paper_scale();
        } else if (s != "desk") {
            throw ParseError("config: field 'scale' must be \"desk\" or \"paper\"");
        }
    }
    int case_label = static_cast<int>(c.phase_case);
    detail::read_opt(j, "case", case_label, "config");
    if (case_label != 1 && case_label != 2) throw ConfigError("config: case must be 1 or 2");
    c.phase_case = static_cast<PhaseCase>(case_label);
    detail::read_opt(j, "include_baselines", c.include_baselines, "config");
    detail::read_opt(j, "train_pulses", c.train_pulses, "config");
    detail::read_opt(j, "test_pulses", c.test_pulses, "config");
    detail::read_opt(j, "pulse_rate", c.pulse_rate, "config");
    detail::read_opt(j, "seed", c.seed, "config");
    detail::read_opt(j, "output_dir", c.output_dir, "config");
    detail::read_opt(j, "eval_stride", c.eval_stride, "config");
    detail::read_opt(j, "signal_amplitude_sq", c.signal_amplitude_sq, "config");

    if (j.contains("models")) {
        for (const auto& m : j.at("models")) {
            ModelSpec spec;
            spec.kind = model_kind_from_string(detail::require<std::string>(m, "kind", "config.models"));
            if (spec.kind != ModelKind::identity) spec.window_len = detail::require<std::size_t>(m, "N", "config.models");
            if (spec.kind == ModelKind::lstm) spec.z_dim = detail::require<std::size_t>(m, "z_dim", "config.models");
            c.models.push_back(spec);
        }
    }
    if (j.contains("train")) c.train = train_config_from_json(j.at("train"), c.train);

    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        const std::string w = "config.noise";
        detail::read_opt(n, "mod_variance", c.noise.mod_variance, w);
        c.noise.ref_intensity = 20.0 * c.noise.mod_variance;
        detail::read_opt(n, "ref_intensity", c.noise.ref_intensity, w);
        detail::read_opt(n, "det_efficiency", c.noise.det_efficiency, w);
        detail::read_opt(n, "electronic_noise", c.noise.electronic_noise, w);
        detail::read_opt(n, "channel_noise", c.noise.channel_noise, w);
        detail::read_opt(n, "drift_variance", c.noise.drift_variance, w);
        detail::read_normal(n, "gamma", c.noise.gamma, w);
        detail::read_normal(n, "signal_phase", c.noise.signal_phase, w);
        detail::read_opt(n, "case2_offset_variance", c.noise.case2_offset_variance, w);
    }
    if (j.contains("atmosphere")) {
        const auto& a = j.at("atmosphere");
        const std::string w = "config.atmosphere";
        detail::read_opt(a, "cn2_ground", c.atmosphere.cn2_ground, w);
        detail::read_opt(a, "v_ground", c.atmosphere.v_ground, w);
        detail::read_opt(a, "receiver_altitude", c.atmosphere.receiver_altitude, w);
        detail::read_opt(a, "satellite_altitude", c.atmosphere.satellite_altitude, w);
        detail::read_opt(a, "zenith_angle", c.atmosphere.zenith_angle, w);
        detail::read_opt(a, "wavelength", c.atmosphere.wavelength, w);
        detail::read_opt(a, "outer_scale", c.atmosphere.outer_scale, w);
        detail::read_opt(a, "inner_scale", c.atmosphere.inner_scale, w);
    }
    if (j.contains("ranges")) {
        detail::read_range(j.at("ranges"), "v_ground", c.ranges.v_ground, "config.ranges");
        detail::read_range(j.at("ranges"), "cn2_ground", c.ranges.cn2_ground, "config.ranges");
    }
    if (j.contains("channel")) {
        const auto& ch = j.at("channel");
        const std::string w = "config.channel";
        std::string mode = "surrogate-cache";
        detail::read_opt(ch, "mode", mode, w);
        if (mode == "full-propagation") {
            c.channel.mode = ChannelMode::full_propagation;
        } else if (mode == "surrogate-cache") {
            c.channel.mode = ChannelMode::surrogate_cache;
        } else {
            throw ConfigError(w + ": mode must be full-propagation or surrogate-cache");
        }
        detail::read_opt(ch, "cache_path", c.channel.cache_path, w);
        detail::read_opt(ch, "cache_samples", c.channel.cache_samples, w);
        detail::read_opt(ch, "cache_realizations", c.channel.cache_realizations, w);
        if (ch.contains("grid")) {
            const auto& g = ch.at("grid");
            const std::string wg = w + ".grid";
            detail::read_opt(g, "size", c.channel.grid.size, wg);
            detail::read_opt(g, "pitch", c.channel.grid.pitch, wg);
            detail::read_opt(g, "n_layers", c.channel.grid.n_layers, wg);
            detail::read_opt(g, "beam_waist", c.channel.grid.beam_waist, wg);
            detail::read_opt(g, "aperture_radius", c.channel.grid.aperture_radius, wg);
            detail::read_opt(g, "subharmonic_levels", c.channel.grid.subharmonic_levels, wg);
        }
    }
    return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config " + path);
    return experiment_config_from_json(detail::parse_json(is, "config " + path));
}

// ------------------------------------------------------------ orchestration

/// Transmissivity cache for surrogate mode: inline samples, a channel CSV, or
/// fresh full-propagation runs on the "channel" stream.
inline TransmissivityCache build_transmissivity_cache(const ExperimentConfig& cfg,
                                                      std::vector<ChannelRecord>* simulated = nullptr) {
    if (!cfg.channel.cache_samples.empty()) return TransmissivityCache{cfg.channel.cache_samples};
    if (!cfg.channel.cache_path.empty()) {
        std::ifstream is(cfg.channel.cache_path);
        if (!is) throw ConfigError("cannot read channel cache " + cfg.channel.cache_path);
        const auto records = read_channel_csv(is, cfg.atmosphere);
        return cache_from_records(records);
    }
    auto records =
        simulate_channels(cfg.seed, cfg.channel.cache_realizations, cfg.atmosphere, cfg.ranges, cfg.channel.grid);
    auto cache = cache_from_records(records);
    if (simulated) *simulated = std::move(records);
    return cache;
}

inline std::unique_ptr<ChannelSource> make_channel_source(const ExperimentConfig& cfg,
                                                          std::vector<ChannelRecord>* simulated = nullptr) {
    if (cfg.channel.mode == ChannelMode::full_propagation) {
        return std::make_unique<PropagatedChannel>(cfg.atmosphere, cfg.ranges, cfg.channel.grid);
    }
    return std::make_unique<SurrogateChannel>(build_transmissivity_cache(cfg, simulated), cfg.atmosphere, cfg.ranges);
}

struct Datasets {
    PhaseSequence train;
    PhaseSequence test;
};

inline Datasets gen_datasets(const ExperimentConfig& cfg, ChannelSource& channels) {
    return {generate_dataset(cfg.seed, "dataset-train", cfg.train_pulses, cfg.noise, channels, cfg.pulse_rate,
                             cfg.phase_case),
            generate_dataset(cfg.seed, "dataset-test", cfg.test_pulses, cfg.noise, channels, cfg.pulse_rate,
                             cfg.phase_case)};
}

/// Explicit specs followed by any missing identity/expectation baselines.
inline std::vector<ModelSpec> expanded_models(const ExperimentConfig& cfg) {
    std::vector<ModelSpec> specs = cfg.models;
    if (!cfg.include_baselines) return specs;
    auto add = [&specs](ModelSpec s) {
        if (std::find(specs.begin(), specs.end(), s) == specs.end()) specs.push_back(s);
    };
    bool any_lstm = false;
    for (const auto& m : cfg.models) {
        if (m.kind != ModelKind::lstm) continue;
        any_lstm = true;
        add({ModelKind::expectation, m.window_len, 0});
    }
    if (any_lstm) add({ModelKind::identity, 0, 0});
    return specs;
}

inline std::string model_id(const ModelSpec& s) {
    switch (s.kind) {
        case ModelKind::lstm: return "lstm-N" + std::to_string(s.window_len) + "-z" + std::to_string(s.z_dim);
        case ModelKind::expectation: return "expectation-N" + std::to_string(s.window_len);
        case ModelKind::identity: return "identity";
    }
    return "?";
}

struct TrainedModel {
    ModelSpec spec;
    ModelCheckpoint checkpoint;
};

/// Trains, evaluates and tabulates every model on shared train/test sets.
/// Evaluation starts at pulse max(N)-1 so every row sees the same pulses.
inline ResultsTable run_experiment(const ExperimentConfig& cfg, const Datasets& data,
                                   std::vector<TrainedModel>* trained = nullptr) {
    cfg.validate();
    using clock = std::chrono::steady_clock;
    const auto specs = expanded_models(cfg);
    std::size_t max_n = 1;
    for (const auto& s : specs) max_n = std::max(max_n, s.kind == ModelKind::identity ? std::size_t{1} : s.window_len);
    const EvalPlan plan{max_n - 1, cfg.eval_stride};
    const auto truth = truths(data.test, plan);

    ResultsTable table;
    table.first_evaluated_pulse = plan.first;
    table.evaluated_pulses = truth.size();
    std::uint64_t lstm_index = 0;
    for (const auto& spec : specs) {
        ResultRow row;
        row.model_id = model_id(spec);
        row.kind = spec.kind;
        row.window_len = spec.kind == ModelKind::identity ? 0 : spec.window_len;
        row.z_dim = spec.z_dim;
        try {
            EstimatorKind estimator = IdentityEstimator{};
            if (spec.kind == ModelKind::lstm) {
                TrainConfig tc = cfg.train;
                tc.window_len = spec.window_len;
                tc.z_dim = spec.z_dim;
                tc.seed = derive_seed(cfg.seed, "init-model", lstm_index++);
                const auto t0 = clock::now();
                auto result = train(data.train, tc);
                row.train_time_s = std::chrono::duration<double>(clock::now() - t0).count();
                row.scale = scale(spec.window_len, spec.z_dim);
                if (trained) {
                    trained->push_back({spec, ModelCheckpoint{result.params, spec.window_len, tc.seed, tc,
                                                              result.history}});
                }
                estimator = LstmEstimator{std::move(result.params), spec.window_len};
            } else if (spec.kind == ModelKind::expectation) {
                estimator = ExpectationEstimator{spec.window_len};
            }
            const auto t1 = clock::now();
            const auto est = estimate(estimator, data.test, plan);
            row.eval_time_s = std::chrono::duration<double>(clock::now() - t1).count();
            row.est_error_variance = estimation_error_variance(est, truth);
            row.mean_bias = mean_bias(est, truth);
        } catch (const TrainingDivergence& e) {
            throw TrainingDivergence("model " + row.model_id + ": " + e.what(), e.history());
        } catch (const NumericalError& e) {
            throw NumericalError("model " + row.model_id + ": " + e.what());
        } catch (const ConfigError& e) {
            throw ConfigError("model " + row.model_id + ": " + e.what());
        }
        table.rows.push_back(row);
    }
    return table;
}

inline ResultsTable run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    auto channels = make_channel_source(cfg);
    const auto data = gen_datasets(cfg, *channels);
    return run_experiment(cfg, data);
}

// ---------------------------------------------------------------- reporting

/// Deterministic results CSV (no wall-clock columns).
inline void write_results_csv(std::ostream& os, const ResultsTable& t) {
    os << "model_id,kind,N,z_dim,scale,est_error_variance_snu,mean_bias_rad\n";
    for (const auto& r : t.rows) {
        std::string line = r.model_id + ',' + to_string(r.kind) + ',' + std::to_string(r.window_len) + ',' +
                           std::to_string(r.z_dim) + ',' + std::to_string(r.scale) + ',';
        detail::append_double(line, r.est_error_variance);
        line += ',';
        detail::append_double(line, r.mean_bias);
        os << line << '\n';
    }
}

inline void write_timings_csv(std::ostream& os, const ResultsTable& t) {
    os << "model_id,train_time_s,eval_time_s\n";
    for (const auto& r : t.rows) os << r.model_id << ',' << r.train_time_s << ',' << r.eval_time_s << '\n';
}

inline ResultsTable read_results_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "model_id,kind,N,z_dim,scale,est_error_variance_snu,mean_bias_rad") {
        throw ParseError("results line 1: unexpected header");
    }
    static const char* fields[] = {"model_id", "kind", "N", "z_dim", "scale", "est_error_variance_snu",
                                   "mean_bias_rad"};
    ResultsTable t;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 7) {
            throw ParseError("results line " + std::to_string(line_no) + ": missing field '" + fields[cells.size()] +
                             "'");
        }
        ResultRow r;
        r.model_id = cells[0];
        r.kind = model_kind_from_string(cells[1]);
        r.window_len = detail::parse_uint(cells[2], line_no, fields[2]);
        r.z_dim = detail::parse_uint(cells[3], line_no, fields[3]);
        r.scale = detail::parse_uint(cells[4], line_no, fields[4]);
        r.est_error_variance = detail::parse_double(cells[5], line_no, fields[5]);
        r.mean_bias = detail::parse_double(cells[6], line_no, fields[6]);
        t.rows.push_back(r);
    }
    return t;
}

/// Markdown table in the layout of an architecture-vs-accuracy study.
inline std::string format_report(const ResultsTable& t, double signal_amplitude_sq) {
    std::ostringstream os;
    os << "| # | model | N | z_dim | S | Est. Error Variance | QCRB(N) | mean bias |\n";
    os << "|---|---|---|---|---|---|---|---|\n";
    std::size_t i = 0;
    for (const auto& r : t.rows) {
        os << "| " << i++ << " | " << r.model_id << " | " << (r.kind == ModelKind::identity ? "-" : std::to_string(r.window_len))
           << " | " << (r.kind == ModelKind::lstm ? std::to_string(r.z_dim) : "-") << " | "
           << (r.kind == ModelKind::lstm ? std::to_string(r.scale) : "-") << " | " << std::fixed << std::setprecision(4)
           << r.est_error_variance << " SNU | ";
        if (r.kind == ModelKind::identity) {
            os << "-";
        } else {
            os << std::setprecision(5) << qcrb(r.window_len, signal_amplitude_sq);
        }
        os << " | " << std::setprecision(5) << r.mean_bias << " |\n";
        os.unsetf(std::ios::floatfield);
    }
    if (t.evaluated_pulses > 0) {
        os << "\nEvaluated " << t.evaluated_pulses << " pulses starting at pulse " << t.first_evaluated_pulse
           << " (the first max(N)-1 pulses are dropped).\n";
    }
    return os.str();
}

// -------------------------------------------------------------------- sweep

struct SweepRow {
    std::string series;  // "lstm", "expectation", "qcrb"
    std::size_t window_len = 0;
    std::size_t z_dim = 0;
    std::uint64_t scale = 0;
    double value = 0.0;
};

/// LSTM error variance over the (N, z) grid, the expectation baseline per N,
/// and the QCRB per N, on one shared pair of datasets.
inline std::vector<SweepRow> sweep(const ExperimentConfig& base, std::span<const std::size_t> n_values,
                                   std::span<const std::size_t> z_values, const Datasets& data) {
    if (n_values.empty() || z_values.empty()) throw ConfigError("sweep: empty N or z grid");
    ExperimentConfig cfg = base;
    cfg.models.clear();
    cfg.include_baselines = false;
    for (std::size_t n : n_values) {
        for (std::size_t z : z_values) cfg.models.push_back({ModelKind::lstm, n, z});
    }
    for (std::size_t n : n_values) cfg.models.push_back({ModelKind::expectation, n, 0});
    const auto table = run_experiment(cfg, data);

    std::vector<SweepRow> out;
    for (const auto& r : table.rows) {
        out.push_back({to_string(r.kind), r.window_len, r.z_dim, r.scale, r.est_error_variance});
    }
    for (const auto& [n, v] : qcrb_curve(n_values, cfg.signal_amplitude_sq)) out.push_back({"qcrb", n, 0, 0, v});
    return out;
}

inline std::vector<SweepRow> sweep(const ExperimentConfig& cfg, std::span<const std::size_t> n_values,
                                   std::span<const std::size_t> z_values) {
    auto channels = make_channel_source(cfg);
    return sweep(cfg, n_values, z_values, gen_datasets(cfg, *channels));
}

inline void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
    os << "series,N,z_dim,scale,est_error_variance_snu\n";
    for (const auto& r : rows) {
        std::string line = r.series + ',' + std::to_string(r.window_len) + ',' + std::to_string(r.z_dim) + ',' +
                           std::to_string(r.scale) + ',';
        detail::append_double(line, r.value);
        os << line << '\n';
    }
}

/// gnuplot script for N versus estimation error variance, one curve per series/z.
inline std::string sweep_plot_script(const std::string& csv_name, std::span<const std::size_t> z_values) {
    std::ostringstream os;
    os << "set datafile separator ','\n"
       << "set logscale y\n"
       << "set xlabel 'N (reference measurements)'\n"
       << "set ylabel 'Var(estimate - dphi_S) [SNU]'\n"
       << "set key outside\n"
       << "plot \\\n";
    for (std::size_t z : z_values) {
        os << "  '" << csv_name << "' using (strcol(1) eq 'lstm' && $3 == " << z
           << " ? $2 : 1/0):5 with linespoints title 'LSTM z=" << z << "', \\\n";
    }
    os << "  '" << csv_name << "' using (strcol(1) eq 'expectation' ? $2 : 1/0):5 with points pt 3 title 'expectation', \\\n"
       << "  '" << csv_name << "' using (strcol(1) eq 'qcrb' ? $2 : 1/0):5 with lines dt 2 title 'QCRB'\n";
    return os.str();
}

/// Sidecar describing how a dataset file was produced.
inline json dataset_sidecar(const ExperimentConfig& cfg, std::string_view split, std::size_t n_pulses) {
    const auto& n = cfg.noise;
    return json{{"format_version", kDatasetVersion},
                {"generator", kGeneratorVersion},
                {"seed", cfg.seed},
                {"split", std::string(split)},
                {"case", static_cast<int>(cfg.phase_case)},
                {"n_pulses", n_pulses},
                {"pulse_rate", cfg.pulse_rate},
                {"channel_mode", cfg.channel.mode == ChannelMode::full_propagation ? "full-propagation"
                                                                                    : "surrogate-cache"},
                {"noise",
                 {{"mod_variance", n.mod_variance},
                  {"ref_intensity", n.ref_intensity},
                  {"det_efficiency", n.det_efficiency},
                  {"electronic_noise", n.electronic_noise},
                  {"channel_noise", n.channel_noise},
                  {"drift_variance", n.drift_variance},
                  {"gamma", {{"mean", n.gamma.mean}, {"variance", n.gamma.variance}}},
                  {"signal_phase", {{"mean", n.signal_phase.mean}, {"variance", n.signal_phase.variance}}},
                  {"case2_offset_variance", n.case2_offset_variance}}}};
}

}  // namespace satphase
