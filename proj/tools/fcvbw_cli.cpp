// Command-line front end: design, run, analyze, report, oracle-check.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fcvbw/fcvbw.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNoConverge = 3;

struct ScheduleEntry {
    std::int64_t block;
    int b;
    std::size_t line;
};

std::vector<ScheduleEntry> load_schedule(const std::string& path, const fcvbw::BinSpec& bins) {
    auto events = fcvbw::read_schedule_csv(path);
    std::vector<ScheduleEntry> out;
    out.reserve(events.size());
    std::size_t line = 0;
    for (const auto& ev : events) {
        ++line;
        if (!bins.contains_b(ev.b)) {
            throw fcvbw::ValidationError(
                path + ": schedule entry " + std::to_string(line) + " (" +
                std::to_string(ev.block) + "," + std::to_string(ev.b) +
                ") requests b_N outside the design range [" + std::to_string(bins.b_low) + ", " +
                std::to_string(bins.b_high) + "]");
        }
        out.push_back({ev.block, ev.b, line});
    }
    return out;
}

int cmd_design(const std::string& spec_path, const std::string& artifact_path,
               const std::string& report_path, int dense_k) {
    fcvbw::SpecFile file = fcvbw::parse_spec_file(spec_path);
    fcvbw::DesignResult result = fcvbw::design(file.spec, file.options);
    if (dense_k <= 0) dense_k = 4 * file.options.grid_points;
    fcvbw::VerificationReport report = fcvbw::verify(result, dense_k, file.spec.max_error);
    result.verification = report.delta;

    fcvbw::save_artifact(artifact_path, result);
    {
        std::ofstream out(report_path);
        if (!out) throw fcvbw::Error("cannot write " + report_path);
        out << fcvbw::verification_to_json(report).dump(2) << '\n';
    }
    std::cout << "design: L = " << result.bins.filter_length << ", N = " << result.bins.fft_length
              << ", M = " << result.bins.block_length << ", delta_N = "
              << result.bins.transition_width_bins << ", b_N in [" << result.bins.b_low << ", "
              << result.bins.b_high << "]\n"
              << "delta achieved (grid K = " << result.grid_points
              << "): " << fcvbw::format_double(result.delta) << "\n"
              << "dense recheck (K = " << dense_k << "): " << fcvbw::format_double(report.delta)
              << (report.pass ? "  [pass]" : "  [fail]") << "\n"
              << "orders evaluated: " << result.iterations
              << ", exchange rounds: " << result.exchange_rounds << "\n"
              << "artifact: " << artifact_path << "\nreport:   " << report_path << "\n";
    return result.delta <= file.spec.max_error ? 0 : 1;
}

int cmd_run(const std::string& artifact_path, const std::string& input_path,
            const std::string& output_path, const std::string& format_name,
            const std::string& schedule_path, int initial_b) {
    fcvbw::DesignResult result = fcvbw::load_artifact(artifact_path);
    const fcvbw::SignalFormat format = fcvbw::parse_signal_format(format_name);
    std::vector<double> input = fcvbw::read_signal(input_path, format);

    std::vector<ScheduleEntry> schedule;
    if (!schedule_path.empty()) schedule = load_schedule(schedule_path, result.bins);
    const int b0 = initial_b >= 0 ? initial_b : result.bins.b_low;

    auto engine = fcvbw::new_engine(result, b0);
    const int m = result.bins.block_length;
    const std::int64_t total_blocks =
        static_cast<std::int64_t>((input.size() + m - 1) / static_cast<std::size_t>(m));
    for (const auto& ev : schedule) {
        if (ev.block >= total_blocks)
            throw fcvbw::ValidationError(schedule_path + ":" + std::to_string(ev.line) +
                                         ": block index " + std::to_string(ev.block) +
                                         " beyond the input stream (" +
                                         std::to_string(total_blocks) + " blocks)");
    }

    std::vector<double> output;
    output.reserve(input.size());
    std::size_t pos = 0;
    std::int64_t block = 0;
    std::size_t next_event = 0;
    while (pos < input.size()) {
        while (next_event < schedule.size() && schedule[next_event].block == block) {
            engine.set_bandwidth(schedule[next_event].b);
            ++next_event;
        }
        const std::size_t take = std::min<std::size_t>(input.size() - pos, static_cast<std::size_t>(m));
        std::span<const double> chunk(input.data() + pos, take);
        std::vector<double> y = take == static_cast<std::size_t>(m)
                                    ? engine.process_block(chunk)
                                    : (engine.feed(chunk), engine.flush());
        output.insert(output.end(), y.begin(), y.end());
        pos += take;
        ++block;
    }
    fcvbw::write_signal(output_path, output, format);
    std::cout << "run: " << input.size() << " samples, " << block << " blocks, b0 = " << b0
              << ", switches applied = " << next_event << "\n";
    return 0;
}

int cmd_analyze(const std::string& artifact_path, int grid_k, const std::string& b_arg,
                const std::string& prefix, bool per_phase) {
    fcvbw::DesignResult result = fcvbw::load_artifact(artifact_path);
    const fcvbw::BinSpec& bins = result.bins;
    fcvbw::FrequencyGrid grid = fcvbw::FrequencyGrid::build(bins, grid_k);
    const fcvbw::ShiftRule rule = fcvbw::calibrated_shift_rule(bins);

    std::vector<int> b_list;
    if (b_arg == "all") {
        for (int b = bins.b_low; b <= bins.b_high; ++b) b_list.push_back(b);
    } else {
        b_list.push_back(std::stoi(b_arg));
        if (!bins.contains_b(b_list[0]))
            throw fcvbw::ValidationError("analyze: b_N outside the design range");
    }

    {
        std::ofstream out(prefix + "_profile.csv");
        out << "r,V\n";
        for (int r = 0; r < result.profile.length(); ++r)
            out << r << ',' << fcvbw::format_double(result.profile.values[r]) << '\n';
    }

    std::ofstream resp(prefix + "_response.csv");
    resp << "b_N,omega_over_pi,region,abs_Hn_max,abs_Hn_min,abs_En_max\n";
    std::ofstream phases;
    if (per_phase) {
        phases.open(prefix + "_phases.csv");
        phases << "b_N,n,omega_over_pi,abs_Hn,abs_En\n";
    }

    const int m = bins.block_length;
    std::vector<std::complex<double>> phasors(static_cast<std::size_t>(bins.fft_length));
    for (int b : b_list) {
        auto coeffs = fcvbw::assemble_dft_coefficients(bins, result.profile, b);
        fcvbw::PtvirSet rows = fcvbw::ptvir_from_base(fcvbw::base_response_idft(coeffs), m, rule, b);
        {
            std::ofstream pt(prefix + "_ptvir_" + std::to_string(b) + ".csv");
            fcvbw::write_ptvir_csv(pt, rows);
        }
        const auto region = grid.region(b);
        const double b_omega = bins.omega_of_bin(b);
        for (std::size_t gi = 0; gi < grid.omega.size(); ++gi) {
            const double omega = grid.omega[gi];
            fcvbw::fill_phasors(omega, phasors);
            const bool masked = region[gi] != 2;
            const std::complex<double> desired =
                masked ? fcvbw::desired_response(omega, b_omega, bins.delta(), bins.filter_length, m)
                       : std::complex<double>{};
            double h_max = 0.0, h_min = std::numeric_limits<double>::infinity(), e_max = 0.0;
            for (int n = 0; n < m; ++n) {
                const std::complex<double> hn =
                    fcvbw::response_from_row(rows.row(n), phasors, phasors[n]);
                h_max = std::max(h_max, std::abs(hn));
                h_min = std::min(h_min, std::abs(hn));
                if (masked) e_max = std::max(e_max, std::abs(hn - desired));
                if (per_phase) {
                    phases << b << ',' << n << ',' << fcvbw::format_double(omega / fcvbw::kPi) << ','
                           << fcvbw::format_double(std::abs(hn)) << ',';
                    if (masked) phases << fcvbw::format_double(std::abs(hn - desired));
                    phases << '\n';
                }
            }
            const char* region_name = region[gi] == 0 ? "pass" : region[gi] == 1 ? "stop" : "transition";
            resp << b << ',' << fcvbw::format_double(omega / fcvbw::kPi) << ',' << region_name << ','
                 << fcvbw::format_double(h_max) << ',' << fcvbw::format_double(h_min) << ',';
            if (masked) resp << fcvbw::format_double(e_max);
            resp << '\n';
        }
    }
    std::cout << "analyze: wrote " << prefix << "_response.csv, " << prefix << "_profile.csv and "
              << b_list.size() << " PTVIR table(s)\n";
    return 0;
}

int cmd_report(const std::string& artifact_path, const std::string& json_path,
               const std::string& markdown_path) {
    fcvbw::DesignResult result = fcvbw::load_artifact(artifact_path);
    fcvbw::ComplexityComparison cmp = fcvbw::compare_complexity(result.bins);
    const std::string markdown = fcvbw::render_complexity_markdown(cmp);
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw fcvbw::Error("cannot write " + json_path);
        out << fcvbw::complexity_to_json(cmp).dump(2) << '\n';
    }
    if (!markdown_path.empty()) {
        std::ofstream out(markdown_path);
        if (!out) throw fcvbw::Error("cannot write " + markdown_path);
        out << markdown;
    } else {
        std::cout << markdown;
    }
    return 0;
}

int cmd_oracle_check(const std::string& artifact_path, std::int64_t samples, std::uint64_t seed) {
    fcvbw::DesignResult result = fcvbw::load_artifact(artifact_path);
    const fcvbw::BinSpec& bins = result.bins;
    const int m = bins.block_length;
    const fcvbw::ShiftRule rule = fcvbw::calibrated_shift_rule(bins);
    std::cout << "oracle-check: seed = " << seed << ", samples = " << samples << "\n";

    double worst = 0.0;
    auto check_single_b = [&](int b) {
        fcvbw::SeededRng rng(seed + static_cast<std::uint64_t>(b));
        std::vector<double> x(static_cast<std::size_t>(samples));
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        auto coeffs = fcvbw::assemble_dft_coefficients(bins, result.profile, b);

        auto engine = fcvbw::new_engine(result, b);
        std::vector<double> y_engine = engine.feed(x);
        auto tail = engine.flush();
        y_engine.insert(y_engine.end(), tail.begin(), tail.end());

        std::vector<double> y_naive = fcvbw::naive_block_filter(coeffs, x, m);

        fcvbw::NaiveBlockFilter probe_target(coeffs, m);
        fcvbw::PtvirSet measured = fcvbw::measure_ptvir(probe_target, rule, b);
        std::vector<double> y_lptv = fcvbw::lptv_convolution(measured, x, rule.window_offset);

        double dev_en = 0.0, dev_el = 0.0;
        for (std::size_t i = 0; i < y_engine.size(); ++i) {
            dev_en = std::max(dev_en, std::abs(y_engine[i] - y_naive[i]));
            dev_el = std::max(dev_el, std::abs(y_engine[i] - y_lptv[i]));
        }
        std::cout << "  b_N = " << b << ": engine-vs-naive " << fcvbw::format_double(dev_en)
                  << ", engine-vs-lptv " << fcvbw::format_double(dev_el) << "\n";
        worst = std::max({worst, dev_en, dev_el});
    };
    check_single_b(bins.b_low);
    if (bins.b_high != bins.b_low) check_single_b(bins.b_high);

    {
        // Mid-stream switching run: rotate through the range every 8 blocks.
        fcvbw::SeededRng rng(seed ^ 0x5151ULL);
        std::vector<double> x(static_cast<std::size_t>(samples));
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        auto engine = fcvbw::new_engine(result, bins.b_low);
        fcvbw::NaiveBlockFilter naive(
            fcvbw::assemble_dft_coefficients(bins, result.profile, bins.b_low), m);
        std::vector<double> y_engine, y_naive;
        std::vector<double> block(static_cast<std::size_t>(m), 0.0);
        std::int64_t blocks = static_cast<std::int64_t>(x.size()) / m;
        for (std::int64_t i = 0; i < blocks; ++i) {
            if (i % 8 == 0) {
                int b = bins.b_low + static_cast<int>((i / 8) % (bins.b_high - bins.b_low + 1));
                engine.set_bandwidth(b);
                naive.set_table(fcvbw::assemble_dft_coefficients(bins, result.profile, b));
            }
            std::span<const double> chunk(x.data() + i * m, static_cast<std::size_t>(m));
            auto ye = engine.process_block(chunk);
            auto yn = naive.process_block(chunk);
            y_engine.insert(y_engine.end(), ye.begin(), ye.end());
            y_naive.insert(y_naive.end(), yn.begin(), yn.end());
        }
        double dev = 0.0;
        for (std::size_t i = 0; i < y_engine.size(); ++i)
            dev = std::max(dev, std::abs(y_engine[i] - y_naive[i]));
        std::cout << "  switching: engine-vs-naive " << fcvbw::format_double(dev) << "\n";
        worst = std::max(worst, dev);
    }
    std::cout << "max deviation: " << fcvbw::format_double(worst)
              << (worst <= 1e-9 ? "  [pass]" : "  [fail]") << "\n";
    return worst <= 1e-9 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variable-bandwidth lowpass FIR filters: frequency-domain design, streaming "
                 "overlap-save execution, and periodically-time-varying analysis"};
    app.require_subcommand(1);

    std::string spec_path, artifact_path = "design.json", report_path = "verify.json";
    int dense_k = 0;
    auto* design = app.add_subcommand("design", "design a filter from a requirements file");
    design->add_option("--spec", spec_path, "requirements file (key = value)")->required();
    design->add_option("--artifact", artifact_path, "output design artifact JSON");
    design->add_option("--verify-report", report_path, "output verification report JSON");
    design->add_option("--dense-k", dense_k, "dense verification grid size (default: 4x grid_K)");

    std::string run_artifact, input_path, output_path, format_name = "csv", schedule_path;
    int initial_b = -1;
    auto* run = app.add_subcommand("run", "stream a signal through a designed filter");
    run->add_option("--artifact", run_artifact, "design artifact JSON")->required();
    run->add_option("--input", input_path, "input signal file")->required();
    run->add_option("--output", output_path, "output signal file")->required();
    run->add_option("--format", format_name, "signal format: csv or f64le");
    run->add_option("--schedule", schedule_path, "bandwidth switch schedule CSV (block_index,b_N)");
    run->add_option("--b", initial_b, "initial b_N (default: bN_low)");

    std::string an_artifact, b_arg = "all", prefix = "analysis";
    int an_grid = 1000;
    bool per_phase = false;
    auto* analyze = app.add_subcommand("analyze", "emit frequency responses, errors and PTVIR tables");
    analyze->add_option("--artifact", an_artifact, "design artifact JSON")->required();
    analyze->add_option("--grid", an_grid, "grid points K");
    analyze->add_option("--b", b_arg, "band center: 'all' or a single b_N");
    analyze->add_option("--out-prefix", prefix, "output file prefix");
    analyze->add_flag("--per-phase", per_phase, "also emit the per-phase long-format CSV");

    std::string rep_artifact, rep_json, rep_markdown;
    auto* report = app.add_subcommand("report", "complexity rates and comparison tables");
    report->add_option("--artifact", rep_artifact, "design artifact JSON")->required();
    report->add_option("--json", rep_json, "write JSON report here");
    report->add_option("--markdown", rep_markdown, "write markdown table here (default: stdout)");

    std::string oc_artifact;
    std::int64_t oc_samples = 20000;
    std::uint64_t oc_seed = 1;
    auto* oracle = app.add_subcommand("oracle-check",
                                      "three-way agreement: engine vs naive block filter vs LPTV");
    oracle->add_option("--artifact", oc_artifact, "design artifact JSON")->required();
    oracle->add_option("--samples", oc_samples, "random samples per check");
    oracle->add_option("--seed", oc_seed, "PRNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (design->parsed()) return cmd_design(spec_path, artifact_path, report_path, dense_k);
        if (run->parsed())
            return cmd_run(run_artifact, input_path, output_path, format_name, schedule_path,
                           initial_b);
        if (analyze->parsed()) return cmd_analyze(an_artifact, an_grid, b_arg, prefix, per_phase);
        if (report->parsed()) return cmd_report(rep_artifact, rep_json, rep_markdown);
        if (oracle->parsed()) return cmd_oracle_check(oc_artifact, oc_samples, oc_seed);
    } catch (const fcvbw::NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConverge;
    } catch (const fcvbw::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
