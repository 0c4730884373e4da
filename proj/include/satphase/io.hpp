#pragma once

// Model checkpoints (JSON) and phase-error datasets (CSV + JSON sidecar).

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "satphase/error.hpp"
#include "satphase/estimator.hpp"
#include "satphase/lstm.hpp"
#include "satphase/phasesim.hpp"

namespace satphase {

using json = nlohmann::json;

inline constexpr int kCheckpointVersion = 1;
inline constexpr int kDatasetVersion = 1;
inline constexpr const char* kGeneratorVersion = "satphase 1.0.0";

namespace detail {

template <class T>
T require(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where + ": field '" + key + "' has the wrong type (" + e.what() + ")");
    }
}

inline json parse_json(std::istream& is, const std::string& where) {
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ParseError(where + ": malformed JSON at byte " + std::to_string(e.byte) + " (" + e.what() + ")");
    }
}

/// Shortest decimal that round-trips (at most 17 significant digits).
inline void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

inline double parse_double(std::string_view s, std::size_t line, const char* field) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ParseError("dataset line " + std::to_string(line) + ": field '" + field + "' is not a number");
    }
    return v;
}

inline std::uint64_t parse_uint(std::string_view s, std::size_t line, const char* field) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ParseError("dataset line " + std::to_string(line) + ": field '" + field + "' is not an integer");
    }
    return v;
}

}  // namespace detail

inline json to_json(const TrainConfig& c) {
    return json{{"window_len", c.window_len},       {"z_dim", c.z_dim},
                {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
                {"epochs", c.epochs},               {"seed", c.seed},
                {"gradient_clip", c.gradient_clip}, {"optimizer", to_string(c.optimizer)},
                {"stride", c.stride},               {"lr_decay", c.lr_decay}};
}

/// Reads a TrainConfig; absent keys keep the values already in `base`.
inline TrainConfig train_config_from_json(const json& j, TrainConfig base = {}) {
    if (!j.is_object()) throw ParseError("train_config: expected an object");
    auto opt = [&](const char* key, auto& field) {
        if (j.contains(key)) field = detail::require<std::decay_t<decltype(field)>>(j, key, "train_config");
    };
    opt("window_len", base.window_len);
    opt("z_dim", base.z_dim);
    opt("learning_rate", base.learning_rate);
    opt("batch_size", base.batch_size);
    opt("epochs", base.epochs);
    opt("seed", base.seed);
    opt("gradient_clip", base.gradient_clip);
    opt("stride", base.stride);
    opt("lr_decay", base.lr_decay);
    if (j.contains("optimizer")) base.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
    return base;
}

struct ModelCheckpoint {
    LstmParams params;
    std::size_t window_len = 1;
    std::uint64_t seed = 0;
    TrainConfig train_config;
    std::vector<double> training_history;

    bool operator==(const ModelCheckpoint& o) const {
        return params == o.params && window_len == o.window_len && seed == o.seed &&
               to_json(train_config) == to_json(o.train_config) && training_history == o.training_history;
    }
};

inline json to_json(const ModelCheckpoint& m) {
    json weights = json::object();
    for (std::string_view name : LstmParams::names) {
        const auto w = m.params.named(name);
        weights[std::string(name)] = std::vector<double>(w.begin(), w.end());
    }
    return json{{"format_version", kCheckpointVersion},
                {"z_dim", m.params.z_dim()},
                {"window_len", m.window_len},
                {"seed", m.seed},
                {"train_config", to_json(m.train_config)},
                {"weights", weights},
                {"training_history", m.training_history}};
}

inline ModelCheckpoint checkpoint_from_json(const json& j) {
    const std::string where = "checkpoint";
    const int version = detail::require<int>(j, "format_version", where);
    if (version != kCheckpointVersion) {
        throw ParseError(where + ": unsupported format_version " + std::to_string(version) + " (expected " +
                         std::to_string(kCheckpointVersion) + ")");
    }
    ModelCheckpoint m;
    const auto z = detail::require<std::size_t>(j, "z_dim", where);
    if (z < 1) throw ParseError(where + ": z_dim must be >= 1");
    m.window_len = detail::require<std::size_t>(j, "window_len", where);
    m.seed = detail::require<std::uint64_t>(j, "seed", where);
    m.train_config = train_config_from_json(detail::require<json>(j, "train_config", where));
    m.training_history = detail::require<std::vector<double>>(j, "training_history", where);
    const json weights = detail::require<json>(j, "weights", where);
    m.params = LstmParams(z);
    for (std::string_view name : LstmParams::names) {
        const auto values = detail::require<std::vector<double>>(weights, std::string(name), where + ".weights");
        auto dst = m.params.named(name);
        if (values.size() != dst.size()) {
            throw ParseError(where + ": weight '" + std::string(name) + "' has " + std::to_string(values.size()) +
                             " entries, expected " + std::to_string(dst.size()));
        }
        std::copy(values.begin(), values.end(), dst.begin());
    }
    return m;
}

inline void save_model(std::ostream& os, const ModelCheckpoint& m) { os << to_json(m).dump(2) << '\n'; }

inline ModelCheckpoint load_model(std::istream& is) {
    return checkpoint_from_json(detail::parse_json(is, "checkpoint"));
}

inline void save_model(const std::string& path, const ModelCheckpoint& m) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path);
    save_model(os, m);
}

inline ModelCheckpoint load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read " + path);
    return load_model(is);
}

inline constexpr const char* kDatasetHeader =
    "pulse_index,window_id,case,transmissivity,gamma,sigma2_error,delta_phi_R,delta_phi_S";

/// One CSV row per pulse. Per-window columns are looked up from seq.windows.
inline void write_dataset_csv(std::ostream& os, const PhaseSequence& seq) {
    seq.validate();
    os << kDatasetHeader << '\n';
    std::size_t w = 0;
    std::string line;
    const int case_label = static_cast<int>(seq.phase_case);
    for (std::size_t t = 0; t < seq.size(); ++t) {
        while (w < seq.windows.size() && seq.windows[w].window_id < seq.window_index[t]) ++w;
        if (w >= seq.windows.size() || seq.windows[w].window_id != seq.window_index[t]) {
            throw ConfigError("write_dataset_csv: pulse " + std::to_string(t) + " has no window metadata");
        }
        const auto& win = seq.windows[w];
        line.clear();
        line += std::to_string(t);
        line += ',';
        line += std::to_string(seq.window_index[t]);
        line += ',';
        line += std::to_string(case_label);
        for (double v : {win.transmissivity, win.gamma, win.sigma2_error, seq.ref_errors[t], seq.sig_errors[t]}) {
            line += ',';
            detail::append_double(line, v);
        }
        line += '\n';
        os << line;
    }
}

inline PhaseSequence read_dataset_csv(std::istream& is) {
    static const char* fields[] = {"pulse_index", "window_id", "case", "transmissivity",
                                   "gamma", "sigma2_error", "delta_phi_R", "delta_phi_S"};
    std::string line;
    if (!std::getline(is, line)) throw ParseError("dataset line 1: missing header");
    if (line != kDatasetHeader) throw ParseError("dataset line 1: unexpected header '" + line + "'");
    PhaseSequence seq;
    std::size_t line_no = 1;
    bool case_set = false;
    std::vector<std::string_view> cells;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        cells.clear();
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cells.size() < 8) {
            throw ParseError("dataset line " + std::to_string(line_no) + ": missing field '" + fields[cells.size()] +
                             "'");
        }
        if (cells.size() > 8) throw ParseError("dataset line " + std::to_string(line_no) + ": too many fields");
        const auto pulse = detail::parse_uint(cells[0], line_no, fields[0]);
        if (pulse != seq.size()) {
            throw ParseError("dataset line " + std::to_string(line_no) + ": pulse_index out of sequence");
        }
        const auto window_id = detail::parse_uint(cells[1], line_no, fields[1]);
        const auto case_label = detail::parse_uint(cells[2], line_no, fields[2]);
        if (case_label != 1 && case_label != 2) {
            throw ParseError("dataset line " + std::to_string(line_no) + ": field 'case' must be 1 or 2");
        }
        if (!case_set) {
            seq.phase_case = static_cast<PhaseCase>(case_label);
            case_set = true;
        } else if (static_cast<PhaseCase>(case_label) != seq.phase_case) {
            throw ParseError("dataset line " + std::to_string(line_no) + ": mixed case labels");
        }
        const double t = detail::parse_double(cells[3], line_no, fields[3]);
        const double gamma = detail::parse_double(cells[4], line_no, fields[4]);
        const double s2 = detail::parse_double(cells[5], line_no, fields[5]);
        const double r = detail::parse_double(cells[6], line_no, fields[6]);
        const double s = detail::parse_double(cells[7], line_no, fields[7]);
        if (!seq.window_index.empty() && window_id < seq.window_index.back()) {
            throw ParseError("dataset line " + std::to_string(line_no) + ": window_id decreases");
        }
        if (seq.windows.empty() || seq.windows.back().window_id != window_id) {
            CoherenceWindow w;
            w.window_id = window_id;
            w.n_pulses = 0;
            w.signal_phase = s;
            w.gamma = gamma;
            w.transmissivity = t;
            w.sigma2_error = s2;
            seq.windows.push_back(w);
        }
        ++seq.windows.back().n_pulses;
        seq.ref_errors.push_back(r);
        seq.sig_errors.push_back(s);
        seq.window_index.push_back(window_id);
    }
    return seq;
}

inline void save_dataset(const std::string& path, const PhaseSequence& seq) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path);
    write_dataset_csv(os, seq);
}

inline PhaseSequence load_dataset(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read " + path);
    return read_dataset_csv(is);
}

}  // namespace satphase
