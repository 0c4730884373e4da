// satphase: command-line front end for channel simulation, dataset
// generation, LSTM training/evaluation, sweeps and the QCRB.
//
// Exit codes: 0 success, 2 configuration/parse error, 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "satphase/satphase.hpp"

namespace fs = std::filesystem;
using namespace satphase;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<int> phase_case;
    bool desk_scale = false;
    bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "root seed (u64)");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--case", o.phase_case, "phase-error case")->check(CLI::IsMember({1, 2}));
    auto* desk = cmd->add_flag("--desk-scale", o.desk_scale, "1e5 train / 1e5 test pulses");
    auto* paper = cmd->add_flag("--paper-scale", o.paper_scale, "1e6 train / 1e6 test pulses");
    desk->excludes(paper);
}

ExperimentConfig resolve(const CommonOptions& o) {
    ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_experiment_config(o.config_path);
    if (o.desk_scale) cfg.use_desk_scale();
    if (o.paper_scale) cfg.use_paper_scale();
    if (o.seed) cfg.seed = *o.seed;
    if (o.phase_case) cfg.phase_case = static_cast<PhaseCase>(*o.phase_case);
    if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
    return cfg;
}

fs::path ensure_out(const ExperimentConfig& cfg) {
    fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw ConfigError("cannot write " + p.string());
    return os;
}

std::vector<std::size_t> parse_list(const std::string& s, const char* what) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            const auto v = std::stoull(tok, &pos);
            if (pos != tok.size() || v == 0) throw std::invalid_argument(tok);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ConfigError(std::string(what) + ": '" + tok + "' is not a positive integer");
        }
    }
    if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
    return out;
}

void write_results(const fs::path& dir, const ResultsTable& table, double amp_sq) {
    auto os = open_out(dir / "results.csv");
    write_results_csv(os, table);
    auto ts = open_out(dir / "timings.csv");
    write_timings_csv(ts, table);
    const auto report = format_report(table, amp_sq);
    auto rs = open_out(dir / "report.md");
    rs << report;
    std::cout << report;
}

// ------------------------------------------------------------ subcommands

int cmd_simulate_channel(const ExperimentConfig& cfg, std::size_t count) {
    const auto dir = ensure_out(cfg);
    const auto records = simulate_channels(cfg.seed, count, cfg.atmosphere, cfg.ranges, cfg.channel.grid);
    auto os = open_out(dir / "channels.csv");
    write_channel_csv(os, records);
    const auto cache = cache_from_records(records);
    std::cout << "wrote " << records.size() << " realizations to " << (dir / "channels.csv").string()
              << " (mean T = " << cache.mean() << ")\n";
    return 0;
}

int cmd_gen_dataset(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto dir = ensure_out(cfg);
    auto channels = make_channel_source(cfg);
    const auto data = gen_datasets(cfg, *channels);
    for (const auto& [name, seq] : {std::pair{"train", &data.train}, std::pair{"test", &data.test}}) {
        save_dataset((dir / (std::string(name) + ".csv")).string(), *seq);
        auto js = open_out(dir / (std::string(name) + ".json"));
        js << dataset_sidecar(cfg, name, seq->size()).dump(2) << '\n';
        std::cout << name << ": " << seq->size() << " pulses in " << seq->windows.size() << " windows\n";
    }
    return 0;
}

int cmd_train(ExperimentConfig cfg, const std::string& dataset_path, std::size_t n, std::size_t z) {
    const auto dir = ensure_out(cfg);
    PhaseSequence train_set;
    if (!dataset_path.empty()) {
        train_set = load_dataset(dataset_path);
    } else {
        cfg.validate();
        auto channels = make_channel_source(cfg);
        train_set = generate_dataset(cfg.seed, "dataset-train", cfg.train_pulses, cfg.noise, *channels,
                                     cfg.pulse_rate, cfg.phase_case);
    }
    TrainConfig tc = cfg.train;
    tc.window_len = n;
    tc.z_dim = z;
    tc.seed = derive_seed(cfg.seed, "init-model", 0);
    auto result = train(train_set, tc);
    ModelCheckpoint ckpt{std::move(result.params), n, tc.seed, tc, result.history};
    save_model((dir / "model.json").string(), ckpt);
    std::cout << "trained N=" << n << " z=" << z << " (S=" << scale(n, z) << "), final loss "
              << ckpt.training_history.back() << "\n";
    return 0;
}

int cmd_evaluate(ExperimentConfig cfg, const std::string& model_path, const std::string& dataset_path) {
    const auto dir = ensure_out(cfg);
    if (model_path.empty()) {
        // Full pipeline from the config.
        if (cfg.models.empty()) cfg.models.push_back({ModelKind::lstm, cfg.train.window_len, cfg.train.z_dim});
        const auto table = run_experiment(cfg);
        write_results(dir, table, cfg.signal_amplitude_sq);
        return 0;
    }
    const auto ckpt = load_model(model_path);
    PhaseSequence test_set;
    if (!dataset_path.empty()) {
        test_set = load_dataset(dataset_path);
    } else {
        auto channels = make_channel_source(cfg);
        test_set = generate_dataset(cfg.seed, "dataset-test", cfg.test_pulses, cfg.noise, *channels, cfg.pulse_rate,
                                    cfg.phase_case);
    }
    const std::size_t n = ckpt.window_len;
    const EvalPlan plan{n - 1, cfg.eval_stride};
    const auto truth = truths(test_set, plan);
    ResultsTable table;
    table.first_evaluated_pulse = plan.first;
    table.evaluated_pulses = truth.size();
    const std::pair<ResultRow, EstimatorKind> rows[] = {
        {ResultRow{model_id({ModelKind::lstm, n, ckpt.params.z_dim()}), ModelKind::lstm, n, ckpt.params.z_dim(),
                   scale(n, ckpt.params.z_dim())},
         LstmEstimator{ckpt.params, n}},
        {ResultRow{model_id({ModelKind::expectation, n, 0}), ModelKind::expectation, n}, ExpectationEstimator{n}},
        {ResultRow{"identity", ModelKind::identity}, IdentityEstimator{}},
    };
    for (const auto& [proto, est] : rows) {
        ResultRow row = proto;
        const auto values = estimate(est, test_set, plan);
        row.est_error_variance = estimation_error_variance(values, truth);
        row.mean_bias = mean_bias(values, truth);
        table.rows.push_back(row);
    }
    write_results(dir, table, cfg.signal_amplitude_sq);
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& n_list, const std::string& z_list) {
    const auto n_values = parse_list(n_list, "--n-values");
    const auto z_values = parse_list(z_list, "--z-values");
    const auto dir = ensure_out(cfg);
    ExperimentConfig probe = cfg;
    probe.models = {{ModelKind::expectation, *std::max_element(n_values.begin(), n_values.end()), 0}};
    probe.validate();
    const auto rows = sweep(cfg, n_values, z_values);
    auto os = open_out(dir / "sweep.csv");
    write_sweep_csv(os, rows);
    auto gp = open_out(dir / "sweep.gp");
    gp << sweep_plot_script("sweep.csv", z_values);
    std::cout << "wrote " << rows.size() << " rows to " << (dir / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_qcrb(const ExperimentConfig& cfg, const std::string& n_list, std::optional<double> amp_sq) {
    const auto n_values = parse_list(n_list, "--n-values");
    const double a2 = amp_sq.value_or(cfg.signal_amplitude_sq);
    const auto curve = qcrb_curve(n_values, a2);
    const auto dir = ensure_out(cfg);
    auto os = open_out(dir / "qcrb.csv");
    write_qcrb_csv(os, curve);
    write_qcrb_csv(std::cout, curve);
    return 0;
}

int cmd_report(const ExperimentConfig& cfg, const std::string& results_path) {
    std::ifstream is(results_path);
    if (!is) throw ConfigError("cannot read " + results_path);
    const auto table = read_results_csv(is);
    std::cout << format_report(table, cfg.signal_amplitude_sq);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Satellite CV-QKD phase-error simulation and LSTM phase estimation"};
    app.require_subcommand(1);

    CommonOptions common;

    auto* sim = app.add_subcommand("simulate-channel", "run full-propagation channel realizations");
    std::optional<std::size_t> count;
    sim->add_option("--count", count, "number of realizations");
    add_common(sim, common);

    auto* gen = app.add_subcommand("gen-dataset", "write train/test phase-error datasets");
    add_common(gen, common);

    auto* tr = app.add_subcommand("train", "train one LSTM estimator");
    std::string train_data;
    std::size_t train_n = 40;
    std::size_t train_z = 4;
    tr->add_option("--dataset", train_data, "training dataset CSV (default: generate)");
    tr->add_option("-N,--window", train_n, "reference measurements per estimate")->check(CLI::PositiveNumber);
    tr->add_option("-z,--z-dim", train_z, "hidden width")->check(CLI::PositiveNumber);
    add_common(tr, common);

    auto* ev = app.add_subcommand("evaluate", "evaluate a model (or run the configured experiment)");
    std::string eval_model;
    std::string eval_data;
    ev->add_option("--model", eval_model, "checkpoint JSON");
    ev->add_option("--dataset", eval_data, "test dataset CSV (default: generate)");
    add_common(ev, common);

    auto* sw = app.add_subcommand("sweep", "estimation error over an (N, z) grid");
    std::string sweep_n = "20,40,60,80,100";
    std::string sweep_z = "4";
    sw->add_option("--n-values", sweep_n, "comma-separated N values");
    sw->add_option("--z-values", sweep_z, "comma-separated hidden widths");
    add_common(sw, common);

    auto* qc = app.add_subcommand("qcrb", "quantum Cramer-Rao bound versus N");
    std::string qcrb_n = "20,40,60,80,100";
    std::optional<double> amp_sq;
    qc->add_option("--n-values", qcrb_n, "comma-separated N values");
    qc->add_option("--amplitude-sq", amp_sq, "signal intensity |alpha_S|^2 [SNU]")->check(CLI::PositiveNumber);
    add_common(qc, common);

    auto* rep = app.add_subcommand("report", "format a results CSV as a table");
    std::string results_path;
    rep->add_option("--results", results_path, "results CSV")->required();
    add_common(rep, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        const auto cfg = resolve(common);
        if (*sim) return cmd_simulate_channel(cfg, count.value_or(cfg.channel.cache_realizations));
        if (*gen) return cmd_gen_dataset(cfg);
        if (*tr) return cmd_train(cfg, train_data, train_n, train_z);
        if (*ev) return cmd_evaluate(cfg, eval_model, eval_data);
        if (*sw) return cmd_sweep(cfg, sweep_n, sweep_z);
        if (*qc) return cmd_qcrb(cfg, qcrb_n, amp_sq);
        if (*rep) return cmd_report(cfg, results_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
