// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fcvbw/fcvbw.hpp"

using namespace fcvbw;

namespace {

struct CheckFailure {
    std::string what;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw CheckFailure{what};
}

template <class T>
std::string str(const T& v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

FilterSpec narrowband_spec() {
    return {0.25 * kPi, 0.001, 0.001, 0.001, 0.75 * kPi, 0.8594 * kPi};
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    require(a.size() == b.size(), "stream length mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

// Shared across criteria; computed once.
struct Fixture {
    DesignResult result;
    VerificationReport dense;  // K = 4000
    ShiftRule rule;
};

Fixture& fixture() {
    static Fixture fx = [] {
        Fixture f;
        f.result = design(narrowband_spec());
        f.dense = verify(f.result, 4000, narrowband_spec().max_error);
        f.rule = calibrated_shift_rule(f.result.bins);
        return f;
    }();
    return fx;
}

void criterion_1() {
    const Fixture& fx = fixture();
    const BinSpec& bins = fx.result.bins;
    require(bins.filter_length == 33, "L = " + str(bins.filter_length) + ", want 33");
    require(bins.fft_length == 128, "N = " + str(bins.fft_length) + ", want 128");
    require(bins.block_length == 96, "M = " + str(bins.block_length) + ", want 96");
    require(bins.transition_width_bins == 16, "delta_N = " + str(bins.transition_width_bins));
    require(bins.b_low == 48 && bins.b_high == 55,
            "b_N range [" + str(bins.b_low) + ", " + str(bins.b_high) + "], want [48, 55]");
    require(fx.result.profile.length() == 15, "L_V = " + str(fx.result.profile.length()));
    require(fx.result.delta >= 0.0 && fx.result.delta <= 1.0e-3,
            "achieved delta = " + str(fx.result.delta) + " outside [0, 1e-3]");
    require(fx.dense.delta <= 1.001e-3,
            "dense (K=4000) recheck = " + str(fx.dense.delta) + " > 1.001e-3");
    std::printf("      delta = %.6e on K=1000, %.6e on K=4000\n", fx.result.delta,
                fx.dense.delta);
}

void criterion_2() {
    const double raw = -4.0 * kPi * std::log10(10.0 * 0.001 * 0.001) / (3.0 * 0.25 * kPi);
    require(std::abs(raw - 26.0 - 2.0 / 3.0) < 1e-9, "raw order estimate " + str(raw));
    require(estimate_order(0.001, 0.001, 0.25 * kPi) == 28, "order estimate != 28");
    const double nhat = 0.9 * 29 * std::log2(29.0);
    require(std::abs(nhat - 126.8) < 0.05, "raw N estimate " + str(nhat));
    require(estimate_fft_length(29) == 128, "N estimate != 128");
}

void criterion_3() {
    const Fixture& fx = fixture();
    require(fx.dense.stopband_max <= 1.0e-3,
            "dense stopband max = " + str(fx.dense.stopband_max) + " > 1e-3 (-60 dB)");
    std::printf("      stopband max over all (n, b) = %.6e (%.1f dB)\n", fx.dense.stopband_max,
                20.0 * std::log10(fx.dense.stopband_max));
}

void criterion_4() {
    const BinSpec& bins = fixture().result.bins;
    ComplexityReport general = general_rates(bins);
    require(general.variable_mul_rate == 30.0 / 96.0, "R_mv != 0.3125");
    require(general.fixed_mul_rate == 7.375, "general R_mf != 7.375");
    require(general.add_rate == 2248.0 / 96.0, "general R_a != 2248/96");
    require(general.memory == 15, "memory != 15");

    ComplexityReport special = special_case_rates(bins);
    require(!special.fell_back_to_general, "special-case counting did not apply");
    require(special.fixed_mul_rate >= 5.95 && special.fixed_mul_rate <= 6.05,
            "special R_mf = " + str(special.fixed_mul_rate));
    require(special.add_rate >= 22.0 && special.add_rate <= 22.1,
            "special R_a = " + str(special.add_rate));

    ComplexityComparison cmp = compare_complexity(bins);
    const auto& farrow = cmp.savings.at(0);
    require(std::abs(farrow.r_mf - 91.9) <= 0.1, "R_mf saving " + str(farrow.r_mf));
    require(std::abs(farrow.r_mv - 92.2) <= 0.1, "R_mv saving " + str(farrow.r_mv));
    require(std::abs(farrow.r_a - 84.8) <= 0.1, "R_a saving " + str(farrow.r_a));
    std::printf("      R_mf %.4f / R_mv %.4f / R_a %.4f, savings %.1f%% %.1f%% %.1f%%\n",
                special.fixed_mul_rate, special.variable_mul_rate, special.add_rate, farrow.r_mf,
                farrow.r_mv, farrow.r_a);
}

void criterion_5() {
    const Fixture& fx = fixture();
    const BinSpec& bins = fx.result.bins;
    const int m = bins.block_length;
    const std::size_t samples = 100032;  // >= 1e5, whole blocks
    double worst = 0.0;

    for (int b = bins.b_low; b <= bins.b_high; ++b) {
        SeededRng rng(0xac5000 + static_cast<std::uint64_t>(b));
        std::vector<double> x(samples);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        auto coeffs = assemble_dft_coefficients(bins, fx.result.profile, b);

        auto engine = new_engine(fx.result, b);
        std::vector<double> y_engine = engine.feed(x);

        std::vector<double> y_naive = naive_block_filter(coeffs, x, m);

        NaiveBlockFilter probe(coeffs, m);
        PtvirSet measured = measure_ptvir(probe, fx.rule, b);
        std::vector<double> y_lptv = lptv_convolution(measured, x, fx.rule.window_offset);

        worst = std::max(worst, max_abs_diff(y_engine, y_naive));
        worst = std::max(worst, max_abs_diff(y_engine, y_lptv));
    }

    // Mid-stream switching across the whole range, all three routes.
    {
        SeededRng rng(0xac5133);
        std::vector<double> x(samples);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        const std::size_t blocks = samples / static_cast<std::size_t>(m);
        auto b_of_block = [&](std::size_t i) {
            return bins.b_low + static_cast<int>((i / 8) % (bins.b_high - bins.b_low + 1));
        };

        auto engine = new_engine(fx.result, bins.b_low);
        NaiveBlockFilter naive(assemble_dft_coefficients(bins, fx.result.profile, bins.b_low), m);
        std::vector<PtvirSet> measured;
        for (int b = bins.b_low; b <= bins.b_high; ++b) {
            NaiveBlockFilter probe(assemble_dft_coefficients(bins, fx.result.profile, b), m);
            measured.push_back(measure_ptvir(probe, fx.rule, b));
        }

        std::vector<double> y_engine, y_naive, y_lptv;
        y_engine.reserve(samples);
        y_naive.reserve(samples);
        y_lptv.reserve(samples);
        for (std::size_t i = 0; i < blocks; ++i) {
            const int b = b_of_block(i);
            engine.set_bandwidth(b);
            naive.set_table(assemble_dft_coefficients(bins, fx.result.profile, b));
            std::span<const double> chunk(x.data() + i * m, static_cast<std::size_t>(m));
            auto ye = engine.process_block(chunk);
            auto yn = naive.process_block(chunk);
            y_engine.insert(y_engine.end(), ye.begin(), ye.end());
            y_naive.insert(y_naive.end(), yn.begin(), yn.end());

            const PtvirSet& set = measured[b - bins.b_low];
            for (std::size_t t = i * m; t < (i + 1) * m; ++t) {
                const int phase = static_cast<int>(t % static_cast<std::size_t>(m));
                auto row = set.row(phase);
                CompensatedSum acc;
                for (int q = 0; q < bins.fft_length; ++q) {
                    const std::int64_t xi =
                        static_cast<std::int64_t>(t) - (q + phase + fx.rule.window_offset);
                    if (xi >= 0 && xi < static_cast<std::int64_t>(x.size()))
                        acc.add(row[q] * x[static_cast<std::size_t>(xi)]);
                }
                y_lptv.push_back(acc.value());
            }
        }
        worst = std::max(worst, max_abs_diff(y_engine, y_naive));
        worst = std::max(worst, max_abs_diff(y_engine, y_lptv));
    }
    require(worst <= 1e-9, "three-way max deviation = " + str(worst));
    std::printf("      three-way max deviation = %.3e over %zu samples x 9 runs\n", worst,
                samples);
}

void criterion_6() {
    const BinSpec& bins = fixture().result.bins;
    const int n = bins.fft_length;
    const int l = bins.filter_length;
    Radix2Fft<double> fft(static_cast<std::size_t>(n));
    SeededRng rng(0xac6000);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> h(static_cast<std::size_t>(l));
        for (auto& v : h) v = rng.uniform(-1.0, 1.0);
        std::vector<double> padded(static_cast<std::size_t>(n), 0.0);
        std::copy(h.begin(), h.end(), padded.begin());
        std::vector<std::complex<double>> table(static_cast<std::size_t>(n));
        fft.forward(std::span<const double>(padded), std::span<std::complex<double>>(table));
        OlsEngine<> engine(DftCoefficients{table, -1}, bins.block_length);
        std::vector<double> x(static_cast<std::size_t>(bins.block_length) * 50 + 17);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        auto y = engine.feed(x);
        auto tail = engine.flush();
        y.insert(y.end(), tail.begin(), tail.end());
        worst = std::max(worst, max_abs_diff(y, direct_fir_convolution(h, x)));
    }
    require(worst <= 1e-9, "classical OLS vs direct convolution deviation = " + str(worst));
    std::printf("      20 random length-%d filters, max deviation = %.3e\n", l, worst);
}

void criterion_7() {
    const Fixture& fx = fixture();
    const BinSpec& bins = fx.result.bins;
    double worst_meas = 0.0, worst_routes = 0.0;
    SeededRng rng(0xac7000);
    for (int b = bins.b_low; b <= bins.b_high; ++b) {
        TransitionProfile profile = fx.result.profile;
        if (b % 2) {  // alternate designed and random profiles
            for (auto& v : profile.values) v = rng.uniform(0.0, 1.0);
        }
        auto coeffs = assemble_dft_coefficients(bins, profile, b);
        NaiveBlockFilter probe(coeffs, bins.block_length);
        PtvirSet measured = measure_ptvir(probe, fx.rule, b);
        PtvirSet analytic =
            ptvir_from_base(base_response_idft(coeffs), bins.block_length, fx.rule, b);
        for (std::size_t i = 0; i < measured.d.size(); ++i)
            worst_meas = std::max(worst_meas, std::abs(measured.d[i] - analytic.d[i]));

        auto idft = base_response_idft(coeffs);
        auto cosine = base_response_cosine(bins, profile, b);
        for (int q = 0; q < bins.fft_length; ++q)
            worst_routes = std::max(worst_routes, std::abs(idft[q] - cosine[q]));
    }
    require(worst_meas <= 1e-12, "measured vs analytic deviation = " + str(worst_meas));
    require(worst_routes <= 1e-12, "IDFT vs cosine route deviation = " + str(worst_routes));
    std::printf("      measured-vs-analytic %.3e, IDFT-vs-cosine %.3e\n", worst_meas,
                worst_routes);
}

void criterion_8() {
    const Fixture& fx = fixture();
    auto engine = new_engine(fx.result, 48);
    std::vector<double> block(static_cast<std::size_t>(fx.result.bins.block_length), 0.5);
    engine.process_block(block);

    OpCounters before = op_counters();
    engine.set_bandwidth(55);
    engine.set_bandwidth(48);
    require(op_counters() == before, "set_bandwidth performed floating-point work");

    op_counters().reset();
    engine.process_block(block);
    require(op_counters().variable_mul == 30,
            "variable multiplications per block = " + str(op_counters().variable_mul) +
                ", want 2 L_V = 30");
    std::printf("      retune flops = 0, variable muls per block = 30\n");
}

void criterion_9() {
    FilterSpec spec;
    spec.transition_width = 0.25 * kPi;
    spec.ripple_pass = spec.ripple_stop = 0.001;
    spec.max_error = 0.5;  // experiment: no numeric target is asserted
    spec.band_center_low = 8 * 2.0 * kPi / 128.0;    // pi/8
    spec.band_center_high = 55 * 2.0 * kPi / 128.0;  // entire admissible range
    DesignOptions opt;
    opt.fft_length_override = 128;
    opt.filter_length_override = 33;
    DesignResult full = design(spec, opt);
    require(full.bins.b_low == 8 && full.bins.b_high == 55,
            "full-band range [" + str(full.bins.b_low) + ", " + str(full.bins.b_high) + "]");
    require(full.delta > 0.0 && std::isfinite(full.delta), "no achieved delta reported");
    VerificationReport report = verify(full, 4000, spec.max_error);
    require(report.within_bound, "dense recheck exceeded the facet refinement bound");
    std::printf("      full-band b_N in [8, 55]: delta = %.6e (dense %.6e), rounds = %d\n",
                full.delta, report.delta, full.exchange_rounds);
}

void criterion_10() {
    // Reduced instance: N = 32, L = 29, M = 4, one bandwidth, 16 facets.
    FilterSpec spec{kPi / 4.0, 0.05, 0.05, 0.2, 8 * 2.0 * kPi / 32.0, 8 * 2.0 * kPi / 32.0};
    BinSpec bins = validate_and_discretize(spec, 32, 29);
    ShiftRule rule = calibrated_shift_rule(bins);
    DesignProblem problem{bins, FrequencyGrid::build(bins, 64), 16, 0.025, 60, 4};
    SolveOutcome exchange = solve_minimax(problem, rule);

    std::vector<Triple> all;
    const auto region = problem.grid.region(bins.b_low);
    for (int n = 0; n < bins.block_length; ++n)
        for (std::size_t gi = 0; gi < problem.grid.omega.size(); ++gi)
            if (region[gi] != 2) all.push_back({n, bins.b_low, static_cast<int>(gi)});
    require(all.size() <= 200, "reduced instance has " + str(all.size()) + " constraints");
    ConstraintSystem dense = build_constraints(problem, rule, all);

    const int lv = bins.profile_length();
    std::vector<LpRow> rows;
    for (int r = 0; r < lv; ++r) {
        LpRow up;
        up.a.assign(static_cast<std::size_t>(lv), 0.0);
        up.a[r] = 1.0;
        up.gamma = 0.0;
        up.beta = 16.0;
        rows.push_back(up);
        up.a[r] = -1.0;
        rows.push_back(up);
    }
    for (std::size_t t = 0; t < dense.size(); ++t) {
        for (int p = 0; p < problem.facets; ++p) {
            const double cth = std::cos(2.0 * kPi * p / problem.facets);
            const double sth = std::sin(2.0 * kPi * p / problem.facets);
            LpRow row;
            row.a.resize(static_cast<std::size_t>(lv));
            for (int r = 0; r < lv; ++r) {
                const auto& ar = dense.a[t * static_cast<std::size_t>(lv) + r];
                row.a[r] = cth * ar.real() - sth * ar.imag();
            }
            row.gamma = 1.0;
            row.beta = -(cth * dense.c[t].real() - sth * dense.c[t].imag());
            rows.push_back(std::move(row));
        }
    }
    LpSolution full = ChebyshevLpSolver(lv).solve(rows);
    const double diff = std::abs(exchange.lp_delta - full.delta);
    require(diff <= 1e-8, "exchange vs dense LP delta differ by " + str(diff));
    std::printf("      %zu constraints: exchange %.12e vs dense %.12e (diff %.2e)\n", all.size(),
                exchange.lp_delta, full.delta, diff);
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void()> body;
    };
    const std::vector<Criterion> criteria = {
        {"AC1  design loop reproduces the narrowband example (L=33, N=128, M=96, delta <= 1e-3)",
         criterion_1},
        {"AC2  order and FFT-length estimators match exactly", criterion_2},
        {"AC3  every response's stopband stays at or below 1e-3 (-60 dB) on the dense grid",
         criterion_3},
        {"AC4  complexity rates and savings reproduce the published table", criterion_4},
        {"AC5  engine == naive block filter == LPTV convolution within 1e-9, with switches",
         criterion_5},
        {"AC6  classical overlap-save equals direct convolution for 20 short filters",
         criterion_6},
        {"AC7  measured PTVIR equals analytic; IDFT and cosine routes agree to 1e-12",
         criterion_7},
        {"AC8  retuning costs zero arithmetic; variable muls per block = 2 L_V = 30",
         criterion_8},
        {"AC9  full-band experiment (b_N in [8, 55] at N=128) converges with a verified report",
         criterion_9},
        {"AC10 exchange solver matches the dense full-constraint LP within 1e-8", criterion_10},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body();
            const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::printf("PASS  %s  (%.1fs)\n", c.name, s);
        } catch (const CheckFailure& f) {
            std::printf("FAIL  %s\n      %s\n", c.name, f.what.c_str());
            ++failures;
        } catch (const std::exception& e) {
            std::printf("FAIL  %s\n      unexpected error: %s\n", c.name, e.what());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
