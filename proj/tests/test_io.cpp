#include <cstring>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "satphase/io.hpp"

using namespace satphase;

namespace {

ModelCheckpoint sample_checkpoint() {
    Rng rng(11);
    ModelCheckpoint m;
    m.params = init_params(3, rng);
    m.params.flat()[0] = 0.1 + 0.2;  // not exactly representable in short decimal
    m.window_len = 7;
    m.seed = 0xDEADBEEFCAFEULL;
    m.train_config.window_len = 7;
    m.train_config.z_dim = 3;
    m.training_history = {0.5, 0.25, 1.0 / 3.0};
    return m;
}

PhaseSequence sample_sequence(PhaseCase c) {
    FixedChannel ch(ChannelRealization{0.6834567, 0.0003, {}});
    return generate_dataset(4, "io", 1000, NoiseParams{}, ch, 1e6, c);
}

void expect_parse_error_mentions(std::istream& is, const std::string& needle) {
    try {
        read_dataset_csv(is);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
    const auto m = sample_checkpoint();
    std::stringstream first;
    save_model(first, m);
    const auto loaded = load_model(first);
    EXPECT_EQ(loaded, m);
    std::stringstream again;
    save_model(again, loaded);
    EXPECT_EQ(first.str(), again.str());
}

TEST(Checkpoint, ContainsNamedWeights) {
    const auto j = to_json(sample_checkpoint());
    for (auto name : LstmParams::names) EXPECT_TRUE(j.at("weights").contains(std::string(name)));
    EXPECT_EQ(j.at("format_version"), kCheckpointVersion);
    EXPECT_EQ(j.at("weights").at("w_hf").size(), 9u);
}

TEST(Checkpoint, MissingFieldNamed) {
    auto j = to_json(sample_checkpoint());
    j.at("weights").erase("b_o");
    try {
        checkpoint_from_json(j);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("b_o"), std::string::npos);
    }
}

TEST(Checkpoint, WrongVersionAndSize) {
    auto j = to_json(sample_checkpoint());
    j["format_version"] = 99;
    EXPECT_THROW(checkpoint_from_json(j), ParseError);
    j = to_json(sample_checkpoint());
    j["weights"]["w_y"] = std::vector<double>{1.0};
    EXPECT_THROW(checkpoint_from_json(j), ParseError);
    std::stringstream garbage("{\"format_version\": 1, ");
    EXPECT_THROW(load_model(garbage), ParseError);
}

TEST(Dataset, RoundTripIsBitExact) {
    for (auto c : {PhaseCase::gaussian_noise, PhaseCase::window_offset}) {
        const auto seq = sample_sequence(c);
        std::stringstream ss;
        write_dataset_csv(ss, seq);
        const auto back = read_dataset_csv(ss);
        EXPECT_EQ(back.phase_case, c);
        ASSERT_EQ(back.size(), seq.size());
        EXPECT_EQ(0, std::memcmp(back.ref_errors.data(), seq.ref_errors.data(), seq.size() * sizeof(double)));
        EXPECT_EQ(back.sig_errors, seq.sig_errors);
        EXPECT_EQ(back.window_index, seq.window_index);
        ASSERT_EQ(back.windows.size(), seq.windows.size());
        EXPECT_EQ(back.windows[1].gamma, seq.windows[1].gamma);
        EXPECT_EQ(back.windows[1].sigma2_error, seq.windows[1].sigma2_error);
        EXPECT_EQ(back.windows[1].n_pulses, seq.windows[1].n_pulses);
        std::stringstream again;
        write_dataset_csv(again, back);
        std::stringstream orig;
        write_dataset_csv(orig, seq);
        EXPECT_EQ(again.str(), orig.str());
    }
}

TEST(Dataset, HeaderIsExact) {
    std::stringstream ss;
    write_dataset_csv(ss, sample_sequence(PhaseCase::gaussian_noise));
    std::string header;
    std::getline(ss, header);
    EXPECT_EQ(header, "pulse_index,window_id,case,transmissivity,gamma,sigma2_error,delta_phi_R,delta_phi_S");
}

TEST(Dataset, TruncatedRowNamesMissingField) {
    std::stringstream ss;
    write_dataset_csv(ss, sample_sequence(PhaseCase::gaussian_noise));
    std::string text = ss.str();
    const auto last_comma = text.rfind(',');
    text.resize(last_comma);  // drop delta_phi_S from the final row
    std::stringstream cut(text);
    expect_parse_error_mentions(cut, "delta_phi_S");
}

TEST(Dataset, MalformedInputs) {
    const std::string header = std::string(kDatasetHeader) + "\n";
    std::stringstream bad_number(header + "0,0,1,0.5,0.8,0.1,abc,0.2\n");
    expect_parse_error_mentions(bad_number, "delta_phi_R");
    std::stringstream out_of_order(header + "1,0,1,0.5,0.8,0.1,0.1,0.2\n");
    expect_parse_error_mentions(out_of_order, "pulse_index");
    std::stringstream mixed(header + "0,0,1,0.5,0.8,0.1,0.1,0.2\n1,0,2,0.5,0.8,0.1,0.1,0.2\n");
    expect_parse_error_mentions(mixed, "mixed");
    std::stringstream bad_header("pulse,window\n");
    expect_parse_error_mentions(bad_header, "header");
    std::stringstream empty("");
    expect_parse_error_mentions(empty, "header");
}
