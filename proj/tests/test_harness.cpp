#include <limits>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "satphase/harness.hpp"

using namespace satphase;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.seed = 5;
    cfg.train_pulses = 20000;
    cfg.test_pulses = 20000;
    cfg.models = {{ModelKind::lstm, 10, 2}};
    cfg.train.epochs = 2;
    cfg.train.stride = 4;
    cfg.channel.cache_samples = {0.683, 0.684, 0.685};
    return cfg;
}

std::string results_csv(const ResultsTable& t) {
    std::ostringstream os;
    write_results_csv(os, t);
    return os.str();
}

}  // namespace

TEST(Config, ParsesJson) {
    const auto j = json::parse(R"({
        "case": 2, "seed": 99, "scale": "paper",
        "models": [{"kind": "lstm", "N": 40, "z_dim": 4}, {"kind": "identity"}],
        "noise": {"mod_variance": 5, "gamma": {"mean": 0.9, "variance": 0.001}},
        "atmosphere": {"zenith_angle": 0.2},
        "ranges": {"v_ground": [3, 4]},
        "channel": {"mode": "full-propagation", "grid": {"size": 256}},
        "train": {"epochs": 3, "learning_rate": 0.002}
    })");
    const auto c = experiment_config_from_json(j);
    EXPECT_EQ(c.phase_case, PhaseCase::window_offset);
    EXPECT_EQ(c.seed, 99u);
    EXPECT_EQ(c.train_pulses, 1000000u);
    ASSERT_EQ(c.models.size(), 2u);
    EXPECT_EQ(c.models[0], (ModelSpec{ModelKind::lstm, 40, 4}));
    EXPECT_EQ(c.noise.ref_intensity, 100.0);
    EXPECT_EQ(c.noise.gamma.mean, 0.9);
    EXPECT_EQ(c.atmosphere.zenith_angle, 0.2);
    EXPECT_EQ(c.ranges.v_ground.low, 3.0);
    EXPECT_EQ(c.channel.mode, ChannelMode::full_propagation);
    EXPECT_EQ(c.channel.grid.size, 256u);
    EXPECT_EQ(c.train.epochs, 3u);
}

TEST(Config, RejectsBadValues) {
    EXPECT_THROW(experiment_config_from_json(json::parse(R"({"case": 3})")), ConfigError);
    EXPECT_THROW(experiment_config_from_json(json::parse(R"({"models": [{"kind": "cnn"}]})")), ConfigError);
    EXPECT_THROW(experiment_config_from_json(json::parse(R"({"models": [{"kind": "lstm", "N": 4}]})")),
                 ParseError);
    EXPECT_THROW(experiment_config_from_json(json::parse(R"({"seed": "abc"})")), ParseError);
    EXPECT_THROW(experiment_config_from_json(json::parse("[1,2]")), ParseError);
    ExperimentConfig c;
    EXPECT_THROW(c.validate(), ConfigError);  // no models
    c.models = {{ModelKind::expectation, 20000, 0}};
    EXPECT_THROW(c.validate(), ConfigError);  // dataset shorter than 10 N
}

TEST(Experiment, BaselinesAreAdded) {
    const auto specs = expanded_models(small_config());
    ASSERT_EQ(specs.size(), 3u);
    EXPECT_EQ(model_id(specs[1]), "expectation-N10");
    EXPECT_EQ(model_id(specs[2]), "identity");
}

TEST(Experiment, IdentityOnlyGivesOneRow) {
    auto cfg = small_config();
    cfg.models = {{ModelKind::identity, 0, 0}};
    const auto t = run_experiment(cfg);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_GT(t.rows[0].est_error_variance, 0.09);
    EXPECT_LT(t.rows[0].est_error_variance, 0.14);
}

TEST(Experiment, DeterministicResults) {
    const auto cfg = small_config();
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    EXPECT_EQ(results_csv(a), results_csv(b));
    ASSERT_EQ(a.rows.size(), 3u);
    EXPECT_EQ(a.first_evaluated_pulse, 9u);
    EXPECT_EQ(a.rows[0].scale, scale(10, 2));
    EXPECT_LT(a.rows[0].est_error_variance, a.rows[2].est_error_variance);
}

TEST(Experiment, FailureNamesModel) {
    auto cfg = small_config();
    cfg.models = {{ModelKind::lstm, 10, 2}};
    cfg.train.learning_rate = -1.0;
    try {
        run_experiment(cfg);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("learning_rate"), std::string::npos) << e.what();
    }
    cfg.train.learning_rate = 1e-3;
    auto channels = make_channel_source(cfg);
    auto data = gen_datasets(cfg, *channels);
    data.train.ref_errors[100] = std::numeric_limits<double>::quiet_NaN();
    try {
        run_experiment(cfg, data);
        FAIL();
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("lstm-N10-z2"), std::string::npos) << e.what();
    }
}

TEST(Results, CsvRoundTripAndReport) {
    const auto t = run_experiment(small_config());
    std::stringstream ss(results_csv(t));
    const auto back = read_results_csv(ss);
    ASSERT_EQ(back.rows.size(), t.rows.size());
    EXPECT_EQ(back.rows[0].est_error_variance, t.rows[0].est_error_variance);
    EXPECT_EQ(back.rows[0].model_id, "lstm-N10-z2");
    const auto report = format_report(back, 10.0);
    EXPECT_NE(report.find("| lstm-N10-z2 |"), std::string::npos);
    std::stringstream bad("model_id,kind,N,z_dim,scale,est_error_variance_snu,mean_bias_rad\nx,lstm,1\n");
    EXPECT_THROW(read_results_csv(bad), ParseError);
}

TEST(Sweep, RowCountAndSeries) {
    auto cfg = small_config();
    cfg.train.epochs = 1;
    const std::vector<std::size_t> ns = {5, 10};
    const std::vector<std::size_t> zs = {1, 2};
    const auto rows = sweep(cfg, ns, zs);
    EXPECT_EQ(rows.size(), ns.size() * zs.size() + 2 * ns.size());
    std::size_t qcrb_rows = 0;
    for (const auto& r : rows) qcrb_rows += r.series == "qcrb";
    EXPECT_EQ(qcrb_rows, 2u);
    std::ostringstream os;
    write_sweep_csv(os, rows);
    EXPECT_EQ(os.str().rfind("series,N,z_dim,scale,est_error_variance_snu\n", 0), 0u);
    EXPECT_NE(sweep_plot_script("sweep.csv", zs).find("plot"), std::string::npos);
}

TEST(Sidecar, RecordsProvenanceOfData) {
    const auto j = dataset_sidecar(small_config(), "train", 20000);
    EXPECT_EQ(j.at("seed"), 5u);
    EXPECT_EQ(j.at("generator"), kGeneratorVersion);
    EXPECT_EQ(j.at("noise").at("drift_variance"), 0.1012);
}
