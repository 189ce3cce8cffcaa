#pragma once

#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "fcvbw/spectrum.hpp"

namespace fcvbw {

enum class CountingMode { general, special_case };

// Per-output-sample arithmetic rates of the streaming implementation.
struct ComplexityReport {
    double fixed_mul_rate = 0.0;     // R_mf
    double variable_mul_rate = 0.0;  // R_mv
    double add_rate = 0.0;           // R_a
    long memory = 0;                 // stored coefficients (L_V)
    CountingMode mode = CountingMode::general;
    int worst_case_b = -1;
    bool fell_back_to_general = false;
};

// Cost of retuning the bandwidth: nothing but the stored profile.
struct DesignComplexity {
    double update_mul_rate = 0.0;  // R_md
    double update_add_rate = 0.0;  // R_ad
    long memory = 0;               // L_V
};

namespace detail {
// Split-radix counts for one real-signal FFT or IFFT of length N = 2^Q.
inline double fft_fixed_muls(int n) {
    return 0.5 * n * std::log2(double(n)) - 1.5 * n + 2.0;
}
inline double fft_adds(int n) { return 1.5 * n * std::log2(double(n)) - 2.5 * n + 4.0; }
}  // namespace detail

// Worst-case (b-independent) rates: every nonzero bin pays the full 3/3
// complex product by the exponent.
inline ComplexityReport general_rates(int filter_length, int fft_length, int profile_length) {
    const int n = fft_length;
    const double m = n - filter_length + 1;
    ComplexityReport report;
    report.fixed_mul_rate = (n * std::log2(double(n)) - 1.5 * n + 4.0) / m;
    report.variable_mul_rate = 2.0 * profile_length / m;
    report.add_rate = (3.0 * n * std::log2(double(n)) - 3.5 * n + 8.0) / m;
    report.memory = profile_length;
    report.mode = CountingMode::general;
    return report;
}

inline ComplexityReport general_rates(const BinSpec& bins) {
    return general_rates(bins.filter_length, bins.fft_length, bins.profile_length());
}

// When (L-1)/N = 1/(2c) the exponents e^{-j pi k (L-1)/N} repeat with period
// c over k: multiples of c are trivial (+-1, +-j), k = c/2 (mod c) costs a
// 2/2 product, everything else the full 3/3; zero-valued bins cost nothing.
// Reports the costliest b in the declared range.
inline ComplexityReport special_case_rates(const BinSpec& bins) {
    const int n = bins.fft_length;
    const int order = bins.filter_length - 1;
    if (order <= 0 || (n % (2 * order)) != 0) {
        ComplexityReport fallback = general_rates(bins);
        fallback.fell_back_to_general = true;
        return fallback;
    }
    const int c = n / (2 * order);
    if (c < 1 || c > n / 4) {
        ComplexityReport fallback = general_rates(bins);
        fallback.fell_back_to_general = true;
        return fallback;
    }
    const double m = bins.block_length;
    ComplexityReport report;
    report.variable_mul_rate = 2.0 * bins.profile_length() / m;
    report.memory = bins.profile_length();
    report.mode = CountingMode::special_case;
    for (int b = bins.b_low; b <= bins.b_high; ++b) {
        const int k2 = transition_bins(bins, b).k2;
        long cost = 0;
        for (int k = 0; k <= k2; ++k) {  // bins above k2 are zero-valued
            if (k % c == 0)
                continue;
            else if (c >= 2 && k % c == c / 2)
                cost += 2;
            else
                cost += 3;
        }
        const double r_mf = (2.0 * detail::fft_fixed_muls(n) + cost) / m;
        const double r_a = (2.0 * detail::fft_adds(n) + cost) / m;
        // ties resolve toward the widest bandwidth
        if (r_mf >= report.fixed_mul_rate) {
            report.fixed_mul_rate = r_mf;
            report.add_rate = r_a;
            report.worst_case_b = b;
        }
    }
    return report;
}

inline DesignComplexity design_complexity(const BinSpec& bins) {
    return {0.0, 0.0, bins.profile_length()};
}

// Published baseline figures used for the comparison tables. These are
// literature constants, never computed here.
struct ImplBaseline {
    const char* name;
    const char* detail;
    int filter_length;
    int fft_length;     // 0: not applicable
    int block_length;   // 0: not applicable
    int farrow_order;   // 0: not applicable
    double r_mf;
    double r_mv;
    double r_a;
};

struct TuneBaseline {
    const char* name;
    const char* detail;
    int filter_length;
    int fft_length;
    int block_length;
    double r_md;
    double r_ad;
    long memory;
};

inline const std::vector<ImplBaseline>& impl_baselines() {
    static const std::vector<ImplBaseline> rows = {
        {"baseline-td-farrow", "time-domain design, Farrow-structure implementation",
         29, 0, 0, 4, 75.0, 4.0, 145.0},
        {"baseline-td-fd", "time-domain design, frequency-domain implementation",
         29, 128, 100, 0, 5.2, 1.9, 23.8},
    };
    return rows;
}

inline const std::vector<TuneBaseline>& tune_baselines() {
    static const std::vector<TuneBaseline> rows = {
        {"baseline-td-farrow", "time-domain design, Farrow-structure implementation",
         29, 0, 0, 0.0, 1.0, 1},
        {"baseline-td-fd-a", "time-domain design, frequency-domain implementation (variant a)",
         29, 128, 100, 5.2, 5.1, 640},
        {"baseline-td-fd-b", "time-domain design, frequency-domain implementation (variant b)",
         29, 128, 100, 7.7, 15.4, 75},
    };
    return rows;
}

// Positive: we are cheaper; negative savings are preserved as printed.
inline double saving_percent(double ours, double theirs) { return (1.0 - ours / theirs) * 100.0; }

struct ComplexityComparison {
    BinSpec bins;
    ComplexityReport general;
    ComplexityReport effective;  // special-case when applicable
    DesignComplexity tuning;

    struct SavingsRow {
        std::string versus;
        double r_mf = 0.0;
        double r_mv = 0.0;
        double r_a = 0.0;
    };
    std::vector<SavingsRow> savings;
};

inline ComplexityComparison compare_complexity(const BinSpec& bins) {
    ComplexityComparison cmp;
    cmp.bins = bins;
    cmp.general = general_rates(bins);
    cmp.effective = special_case_rates(bins);
    cmp.tuning = design_complexity(bins);
    for (const auto& base : impl_baselines()) {
        cmp.savings.push_back({base.name,
                               saving_percent(cmp.effective.fixed_mul_rate, base.r_mf),
                               saving_percent(cmp.effective.variable_mul_rate, base.r_mv),
                               saving_percent(cmp.effective.add_rate, base.r_a)});
    }
    return cmp;
}

inline std::string render_complexity_markdown(const ComplexityComparison& cmp) {
    std::ostringstream os;
    os << std::fixed;
    const BinSpec& bins = cmp.bins;
    os << "## Implementation complexity (per output sample)\n\n";
    os << "| design/impl | L | N | M | R_mf | R_mv | R_a |\n";
    os << "|---|---|---|---|---|---|---|\n";
    for (const auto& base : impl_baselines()) {
        os << "| " << base.name << " (published baseline, not computed here) | "
           << base.filter_length << " | " << (base.fft_length ? std::to_string(base.fft_length) : "-")
           << " | " << (base.block_length ? std::to_string(base.block_length) : "-") << " | "
           << std::setprecision(1) << base.r_mf << " | " << base.r_mv << " | " << base.r_a
           << " |\n";
    }
    os << std::setprecision(4);
    os << "| this design (" << (cmp.effective.mode == CountingMode::special_case
                                    ? "special-case exponents"
                                    : "general exponents")
       << ") | " << bins.filter_length << " | " << bins.fft_length << " | " << bins.block_length
       << " | " << cmp.effective.fixed_mul_rate << " | " << cmp.effective.variable_mul_rate
       << " | " << cmp.effective.add_rate << " |\n";
    if (cmp.effective.fell_back_to_general)
        os << "\n(L-1)/N is not of the form 1/(2c); rates fall back to general counting.\n";
    else if (cmp.effective.mode == CountingMode::special_case)
        os << "\nWorst-case bandwidth bin for the special-case count: b_N = "
           << cmp.effective.worst_case_b << ".\n";
    os << "\n## Savings\n\n| versus | R_mf | R_mv | R_a |\n|---|---|---|---|\n";
    os << std::setprecision(1);
    for (const auto& row : cmp.savings) {
        os << "| " << row.versus << " | " << row.r_mf << "% | " << row.r_mv << "% | " << row.r_a
           << "% |\n";
    }
    os << "\n## Retuning complexity\n\n";
    os << "| design/impl | R_md | R_ad | memory |\n|---|---|---|---|\n";
    for (const auto& base : tune_baselines()) {
        os << "| " << base.name << " (published baseline, not computed here) | " << base.r_md
           << " | " << base.r_ad << " | " << base.memory << " |\n";
    }
    os << "| this design | 0 | 0 | " << cmp.tuning.memory << " |\n";
    return os.str();
}

}  // namespace fcvbw
