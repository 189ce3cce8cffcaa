#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fcvbw/complexity.hpp"
#include "fcvbw/engine.hpp"
#include "fcvbw/ops.hpp"
#include "fcvbw/spectrum.hpp"

using namespace fcvbw;

namespace {
BinSpec narrowband_bins() {
    FilterSpec spec{0.25 * kPi, 0.001, 0.001, 0.001, 0.75 * kPi, 0.8594 * kPi};
    return validate_and_discretize(spec, 128, 33);
}
}  // namespace

TEST_CASE("general rates for the narrowband example") {
    ComplexityReport r = general_rates(narrowband_bins());
    CHECK(r.variable_mul_rate == 30.0 / 96.0);  // 0.3125
    CHECK(r.fixed_mul_rate == 708.0 / 96.0);    // 7.375
    CHECK(r.add_rate == 2248.0 / 96.0);         // 23.4167
    CHECK(r.memory == 15);
    CHECK(r.mode == CountingMode::general);
}

TEST_CASE("general rates decompose into transform and coefficient stages") {
    const int n = 128, l = 33;
    const double m = n - l + 1;
    ComplexityReport r = general_rates(l, n, 15);
    const double c_mf_fft = 0.5 * n * std::log2(double(n)) - 1.5 * n + 2.0;
    const double c_a_fft = 1.5 * n * std::log2(double(n)) - 2.5 * n + 4.0;
    CHECK(std::abs(r.fixed_mul_rate - (2.0 * c_mf_fft + 1.5 * n) / m) < 1e-12);
    CHECK(std::abs(r.add_rate - (2.0 * c_a_fft + 1.5 * n) / m) < 1e-12);
    CHECK(std::abs(r.variable_mul_rate - 2.0 * 15 / m) < 1e-15);
}

TEST_CASE("special-case rates for (L-1)/N = 1/4") {
    ComplexityReport r = special_case_rates(narrowband_bins());
    CHECK(r.mode == CountingMode::special_case);
    CHECK_FALSE(r.fell_back_to_general);
    CHECK(r.worst_case_b == 55);
    // c = 2: even bins free, odd bins 2/2; nonzero bins are k = 0..62 at the
    // worst-case b, of which 31 are odd.
    CHECK(r.fixed_mul_rate == (2.0 * 258.0 + 62.0) / 96.0);
    CHECK(r.add_rate == (2.0 * 1028.0 + 62.0) / 96.0);
    CHECK(r.fixed_mul_rate > 5.95);
    CHECK(r.fixed_mul_rate < 6.05);
    CHECK(r.add_rate >= 22.0);
    CHECK(r.add_rate <= 22.1);
    CHECK(r.variable_mul_rate == 30.0 / 96.0);
}

TEST_CASE("special-case rates at c = 1 make every exponent free") {
    // L - 1 = N/2: all phase factors are +-1 or +-j.
    BinSpec bins;
    bins.fft_length = 64;
    bins.filter_length = 33;
    bins.block_length = 32;
    bins.transition_width_bins = 8;
    bins.b_low = 10;
    bins.b_high = 12;
    bins.validate();
    ComplexityReport r = special_case_rates(bins);
    CHECK_FALSE(r.fell_back_to_general);
    const double c_mf_fft = 0.5 * 64 * 6 - 1.5 * 64 + 2.0;  // 98
    CHECK(r.fixed_mul_rate == 2.0 * c_mf_fft / 32.0);       // no exponent work at all
}

TEST_CASE("shrinking the bandwidth range cannot raise the special-case rates") {
    BinSpec full = narrowband_bins();
    BinSpec narrow = full;
    narrow.b_low = narrow.b_high = 48;
    ComplexityReport wide_r = special_case_rates(full);
    ComplexityReport narrow_r = special_case_rates(narrow);
    CHECK(narrow_r.fixed_mul_rate <= wide_r.fixed_mul_rate);
    CHECK(narrow_r.add_rate <= wide_r.add_rate);
    CHECK(narrow_r.variable_mul_rate == wide_r.variable_mul_rate);
}

TEST_CASE("special-case never exceeds general counting") {
    for (int b_high : {48, 51, 55}) {
        BinSpec bins = narrowband_bins();
        bins.b_high = b_high;
        ComplexityReport s = special_case_rates(bins);
        ComplexityReport g = general_rates(bins);
        CHECK(s.fixed_mul_rate <= g.fixed_mul_rate);
        CHECK(s.variable_mul_rate <= g.variable_mul_rate);
        CHECK(s.add_rate <= g.add_rate);
        CHECK(s.memory <= g.memory);
    }
}

TEST_CASE("ratios not of the form 1/(2c) fall back to general counting") {
    BinSpec bins;
    bins.fft_length = 128;
    bins.filter_length = 34;  // (L-1)/N = 33/128
    bins.block_length = 95;
    bins.transition_width_bins = 16;
    bins.b_low = 48;
    bins.b_high = 55;
    bins.validate();
    ComplexityReport r = special_case_rates(bins);
    CHECK(r.fell_back_to_general);
    ComplexityReport g = general_rates(bins);
    CHECK(r.fixed_mul_rate == g.fixed_mul_rate);
    CHECK(r.add_rate == g.add_rate);
}

TEST_CASE("tuning complexity is memory only") {
    DesignComplexity t = design_complexity(narrowband_bins());
    CHECK(t.update_mul_rate == 0.0);
    CHECK(t.update_add_rate == 0.0);
    CHECK(t.memory == 15);

    BinSpec tiny;
    tiny.fft_length = 32;
    tiny.filter_length = 9;
    tiny.block_length = 24;
    tiny.transition_width_bins = 2;
    tiny.b_low = 1;
    tiny.b_high = 1;
    tiny.validate();
    CHECK(design_complexity(tiny).memory == 1);
}

TEST_CASE("model rate R_mv matches the instrumented engine count") {
    BinSpec bins = narrowband_bins();
    TransitionProfile profile{std::vector<double>(15, 0.5)};
    OlsEngine<> engine(bins, profile, 50);
    std::vector<double> block(static_cast<std::size_t>(bins.block_length), 1.0);
    engine.process_block(block);
    op_counters().reset();
    engine.process_block(block);
    const double per_block = general_rates(bins).variable_mul_rate * bins.block_length;
    CHECK(static_cast<double>(op_counters().variable_mul) == per_block);
}

TEST_CASE("savings against the published baselines") {
    ComplexityComparison cmp = compare_complexity(narrowband_bins());
    REQUIRE(cmp.savings.size() == 2);
    const auto& farrow = cmp.savings[0];
    CHECK(std::abs(farrow.r_mf - 91.9) <= 0.1);
    CHECK(std::abs(farrow.r_mv - 92.2) <= 0.1);
    CHECK(std::abs(farrow.r_a - 84.8) <= 0.1);
    const auto& td_fd = cmp.savings[1];
    CHECK(td_fd.r_mf < 0.0);  // we spend more fixed multiplications here
    CHECK(td_fd.r_mv > 80.0);

    CHECK(saving_percent(1.0, 1.0) == 0.0);
    CHECK(saving_percent(6.0, 5.2) < 0.0);
}

TEST_CASE("markdown report carries the headline figures") {
    ComplexityComparison cmp = compare_complexity(narrowband_bins());
    std::string md = render_complexity_markdown(cmp);
    CHECK(md.find("0.3125") != std::string::npos);
    CHECK(md.find("| this design") != std::string::npos);
    CHECK(md.find("published baseline, not computed here") != std::string::npos);
    CHECK(md.find("| 0 | 0 | 15 |") != std::string::npos);
}
