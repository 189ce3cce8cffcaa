#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcvbw/complexity.hpp"
#include "fcvbw/design.hpp"
#include "fcvbw/ptvir.hpp"
#include "fcvbw/spectrum.hpp"

namespace fcvbw {

static_assert(std::endian::native == std::endian::little,
              "raw f64le signal I/O assumes a little-endian host");

// 17 significant digits round-trip IEEE-754 doubles exactly.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Design artifact. Field names are part of the on-disk contract.

inline nlohmann::json artifact_to_json(const DesignResult& result) {
    nlohmann::json j;
    j["N"] = result.bins.fft_length;
    j["L"] = result.bins.filter_length;
    j["M"] = result.bins.block_length;
    j["delta_N"] = result.bins.transition_width_bins;
    j["bN_low"] = result.bins.b_low;
    j["bN_high"] = result.bins.b_high;
    j["V"] = result.profile.values;
    j["delta_achieved"] = result.delta;
    j["grid_K"] = result.grid_points;
    j["facets_P"] = result.facets;
    return j;
}

inline DesignResult artifact_from_json(const nlohmann::json& j) {
    DesignResult result;
    result.bins.fft_length = j.at("N").get<int>();
    result.bins.filter_length = j.at("L").get<int>();
    result.bins.block_length = j.at("M").get<int>();
    result.bins.transition_width_bins = j.at("delta_N").get<int>();
    result.bins.b_low = j.at("bN_low").get<int>();
    result.bins.b_high = j.at("bN_high").get<int>();
    result.profile.values = j.at("V").get<std::vector<double>>();
    result.delta = j.at("delta_achieved").get<double>();
    result.grid_points = j.at("grid_K").get<int>();
    result.facets = j.at("facets_P").get<int>();
    result.bins.validate();
    if (result.profile.length() != result.bins.profile_length())
        throw ValidationError("artifact: V must hold delta_N - 1 values");
    return result;
}

inline void save_artifact(const std::string& path, const DesignResult& result) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << artifact_to_json(result).dump(2) << '\n';
}

inline DesignResult load_artifact(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    return artifact_from_json(j);
}

inline nlohmann::json verification_to_json(const VerificationReport& report) {
    nlohmann::json j;
    j["delta"] = report.delta;
    nlohmann::json per_b = nlohmann::json::object();
    for (const auto& [b, v] : report.per_b_max) per_b[std::to_string(b)] = v;
    j["per_b_max"] = per_b;
    j["per_n_max"] = report.per_n_max;
    j["pass"] = report.pass;
    j["passband_max"] = report.passband_max;
    j["stopband_max"] = report.stopband_max;
    j["dense_points"] = report.dense_points;
    j["worst"] = {{"b", report.worst_b}, {"n", report.worst_n}, {"omega", report.worst_omega}};
    j["refinement_bound"] = report.refinement_bound;
    j["within_bound"] = report.within_bound;
    return j;
}

inline nlohmann::json complexity_to_json(const ComplexityComparison& cmp) {
    auto report_json = [](const ComplexityReport& r) {
        nlohmann::json j;
        j["R_mf"] = r.fixed_mul_rate;
        j["R_mv"] = r.variable_mul_rate;
        j["R_a"] = r.add_rate;
        j["memory"] = r.memory;
        j["mode"] = r.mode == CountingMode::special_case ? "special-case" : "general";
        if (r.worst_case_b >= 0) j["worst_case_b"] = r.worst_case_b;
        if (r.fell_back_to_general) j["fallback"] = true;
        return j;
    };
    nlohmann::json j;
    j["L"] = cmp.bins.filter_length;
    j["N"] = cmp.bins.fft_length;
    j["M"] = cmp.bins.block_length;
    j["general"] = report_json(cmp.general);
    j["effective"] = report_json(cmp.effective);
    j["tuning"] = {{"R_md", cmp.tuning.update_mul_rate},
                   {"R_ad", cmp.tuning.update_add_rate},
                   {"memory", cmp.tuning.memory}};
    nlohmann::json baselines = nlohmann::json::array();
    for (const auto& b : impl_baselines()) {
        baselines.push_back({{"name", b.name},
                             {"detail", b.detail},
                             {"L", b.filter_length},
                             {"R_mf", b.r_mf},
                             {"R_mv", b.r_mv},
                             {"R_a", b.r_a},
                             {"source", "published baseline, not computed here"}});
    }
    j["impl_baselines"] = baselines;
    nlohmann::json tune = nlohmann::json::array();
    for (const auto& b : tune_baselines()) {
        tune.push_back({{"name", b.name},
                        {"detail", b.detail},
                        {"R_md", b.r_md},
                        {"R_ad", b.r_ad},
                        {"memory", b.memory},
                        {"source", "published baseline, not computed here"}});
    }
    j["tune_baselines"] = tune;
    nlohmann::json savings = nlohmann::json::object();
    for (const auto& s : cmp.savings) {
        savings[s.versus] = {{"R_mf_pct", s.r_mf}, {"R_mv_pct", s.r_mv}, {"R_a_pct", s.r_a}};
    }
    j["savings"] = savings;
    return j;
}

// ---------------------------------------------------------------------------
// Signal streams: CSV (one decimal sample per line) or raw little-endian
// IEEE-754 doubles.

enum class SignalFormat { csv, f64le };

inline SignalFormat parse_signal_format(const std::string& name) {
    if (name == "csv") return SignalFormat::csv;
    if (name == "f64le") return SignalFormat::f64le;
    throw ValidationError("unknown signal format '" + name + "' (expected csv or f64le)");
}

inline void write_signal(const std::string& path, std::span<const double> samples,
                         SignalFormat format) {
    if (format == SignalFormat::csv) {
        std::ofstream out(path);
        if (!out) throw Error("cannot write " + path);
        for (double v : samples) out << format_double(v) << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(samples.data()),
              static_cast<std::streamsize>(samples.size() * sizeof(double)));
}

inline std::vector<double> read_signal(const std::string& path, SignalFormat format) {
    std::vector<double> samples;
    if (format == SignalFormat::csv) {
        std::ifstream in(path);
        if (!in) throw Error("cannot read " + path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            // strtod (unlike std::stod) yields subnormals instead of
            // throwing out_of_range.
            const char* begin = line.c_str();
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin)
                throw ValidationError(path + ":" + std::to_string(line_no) + ": not a number");
            while (*end == ' ' || *end == '\r') ++end;
            if (*end != '\0')
                throw ValidationError(path + ":" + std::to_string(line_no) + ": trailing junk");
            samples.push_back(v);
        }
        return samples;
    }
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw Error("cannot read " + path);
    const auto bytes = static_cast<std::size_t>(in.tellg());
    if (bytes % sizeof(double) != 0)
        throw ValidationError(path + ": size is not a multiple of 8 bytes");
    samples.resize(bytes / sizeof(double));
    in.seekg(0);
    in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(bytes));
    return samples;
}

// ---------------------------------------------------------------------------
// Bandwidth switch schedule: CSV lines "block_index,b_N", strictly
// increasing block indices, applied at block boundaries.

struct SwitchEvent {
    std::int64_t block = 0;
    int b = 0;
};

inline std::vector<SwitchEvent> read_schedule_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::vector<SwitchEvent> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": expected 'block_index,b_N' (line: " + line + ")");
        try {
            SwitchEvent ev;
            ev.block = std::stoll(line.substr(0, comma));
            ev.b = std::stoi(line.substr(comma + 1));
            if (ev.block < 0) throw ValidationError("negative block index");
            if (!events.empty() && ev.block <= events.back().block)
                throw ValidationError("block indices must be strictly increasing");
            events.push_back(ev);
        } catch (const ValidationError& e) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what() +
                                  " (line: " + line + ")");
        } catch (const std::exception&) {
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": malformed entry (line: " + line + ")");
        }
    }
    return events;
}

// One row per phase n, N columns, 17 significant digits.
inline void write_ptvir_csv(std::ostream& out, const PtvirSet& set) {
    for (int n = 0; n < set.block_length; ++n) {
        auto row = set.row(n);
        for (int q = 0; q < set.fft_length; ++q) {
            if (q) out << ',';
            out << format_double(row[q]);
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Requirement files: 'key = value' lines, '#' comments. Angles may use a
// 'pi' suffix (0.25pi).

struct SpecFile {
    FilterSpec spec;
    DesignOptions options;
};

namespace detail {
inline double parse_angle(std::string text) {
    auto strip = [](std::string& s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
    };
    strip(text);
    double scale = 1.0;
    if (text.size() >= 2 && text.substr(text.size() - 2) == "pi") {
        scale = kPi;
        text = text.substr(0, text.size() - 2);
        strip(text);
        if (text.empty()) return scale;
    }
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size()) throw ValidationError("malformed number '" + text + "'");
    return v * scale;
}
}  // namespace detail

inline SpecFile parse_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    SpecFile out;
    bool have[6] = {false, false, false, false, false, false};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
            if (blank) continue;
            throw ValidationError(path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t\r") + 1);
        try {
            if (key == "transition_width") {
                out.spec.transition_width = detail::parse_angle(value);
                have[0] = true;
            } else if (key == "ripple_pass") {
                out.spec.ripple_pass = detail::parse_angle(value);
                have[1] = true;
            } else if (key == "ripple_stop") {
                out.spec.ripple_stop = detail::parse_angle(value);
                have[2] = true;
            } else if (key == "max_error") {
                out.spec.max_error = detail::parse_angle(value);
                have[3] = true;
            } else if (key == "b_low") {
                out.spec.band_center_low = detail::parse_angle(value);
                have[4] = true;
            } else if (key == "b_high") {
                out.spec.band_center_high = detail::parse_angle(value);
                have[5] = true;
            } else if (key == "N") {
                out.options.fft_length_override = static_cast<int>(detail::parse_angle(value));
            } else if (key == "L") {
                out.options.filter_length_override = static_cast<int>(detail::parse_angle(value));
            } else if (key == "grid_K") {
                out.options.grid_points = static_cast<int>(detail::parse_angle(value));
            } else if (key == "facets_P") {
                out.options.facets = static_cast<int>(detail::parse_angle(value));
            } else {
                throw ValidationError("unknown key '" + key + "'");
            }
        } catch (const ValidationError& e) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    for (bool h : have) {
        if (!h)
            throw ValidationError(path +
                                  ": missing one of transition_width, ripple_pass, ripple_stop, "
                                  "max_error, b_low, b_high");
    }
    return out;
}

}  // namespace fcvbw
