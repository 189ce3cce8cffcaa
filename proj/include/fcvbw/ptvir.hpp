#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fcvbw/spectrum.hpp"

namespace fcvbw {

// Anything that consumes length-M input blocks and emits length-M output
// blocks under the shared priming convention (history starts as zeros, the
// first output sample corresponds to input time 0).
template <class P>
concept BlockProcessor = requires(P p, std::span<const double> block) {
    { p.block_length() } -> std::convertible_to<int>;
    { p.fft_length() } -> std::convertible_to<int>;
    { p.process_block(block) } -> std::convertible_to<std::vector<double>>;
    p.reset();
};

// The M time-invariant impulse responses d_n(q) of the M-periodic system,
// stored row-major. Row M-1 is the length-N IDFT of H(k, b); the other rows
// are circular shifts of it as fixed by the calibrated shift rule.
struct PtvirSet {
    int block_length = 0;  // M
    int fft_length = 0;    // N
    int source_b = -1;
    std::vector<double> d;  // block_length x fft_length

    std::span<const double> row(int n) const {
        return {d.data() + static_cast<std::size_t>(n) * fft_length,
                static_cast<std::size_t>(fft_length)};
    }
    std::span<double> row(int n) {
        return {d.data() + static_cast<std::size_t>(n) * fft_length,
                static_cast<std::size_t>(fft_length)};
    }
};

// Empirically verified convention relating the stored rows to the aligned
// block-processor output and to each other:
//   aligned response at output phase n occupies lags [n + window_offset,
//   n + window_offset + N - 1] and equals d_n read in order;
//   d_n(q) = d_{M-1}((q + step * (n - (M-1))) mod N).
struct ShiftRule {
    int window_offset = 0;  // measured; -(M-1) for the overlap-save engine
    int step = 1;           // measured; +1 for the overlap-save engine

    int shift_of_row(int n, int block_length) const { return step * (n - (block_length - 1)); }
};

inline ShiftRule default_shift_rule(int block_length) { return {1 - block_length, 1}; }

namespace detail {

inline int floor_mod(std::int64_t a, int m) {
    int r = static_cast<int>(a % m);
    return r < 0 ? r + m : r;
}

inline std::vector<std::complex<double>> unit_roots(int n) {
    std::vector<std::complex<double>> roots(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        double ang = 2.0 * kPi * m / n;
        roots[m] = {std::cos(ang), std::sin(ang)};
    }
    return roots;
}

// Output of `processor` for a unit impulse at absolute time p, recorded for
// `total` samples from time 0.
template <BlockProcessor P>
std::vector<double> impulse_probe(P& processor, int p, int total) {
    processor.reset();
    const int m = processor.block_length();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(total + m));
    std::vector<double> block(static_cast<std::size_t>(m), 0.0);
    for (int start = 0; start < total; start += m) {
        for (int i = 0; i < m; ++i) block[i] = (start + i == p) ? 1.0 : 0.0;
        auto y = processor.process_block(block);
        out.insert(out.end(), y.begin(), y.end());
    }
    out.resize(static_cast<std::size_t>(total));
    return out;
}

}  // namespace detail

// d_{M-1}(q) = (1/N) sum_k H(k) e^{j 2 pi q k / N}. Direct summation with
// exact integer angle reduction; the imaginary residue is checked and
// discarded.
inline std::vector<double> base_response_idft(const DftCoefficients& coeffs) {
    const int n = coeffs.size();
    const auto roots = detail::unit_roots(n);
    std::vector<double> base(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
        std::complex<double> acc{0.0, 0.0};
        for (int k = 0; k < n; ++k) {
            acc += coeffs.table[k] * roots[detail::floor_mod(std::int64_t(q) * k, n)];
        }
        if (std::abs(acc.imag()) > 1e-12 * n)
            throw ValidationError("base_response_idft: table is not conjugate-symmetric");
        base[q] = acc.real() / n;
    }
    return base;
}

// Closed cosine form of the same response; no complex arithmetic. Used as a
// cross-check of the IDFT route.
inline std::vector<double> base_response_cosine(const BinSpec& bins,
                                                const TransitionProfile& profile, int b) {
    if (profile.length() != bins.profile_length())
        throw ValidationError("base_response_cosine: profile length must be delta_N - 1");
    const auto [k1, k2] = transition_bins(bins, b);
    const int n = bins.fft_length;
    const std::int64_t centered = bins.filter_length - 1;  // angles use 2q - (L-1)
    std::vector<double> base(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
        const std::int64_t qq = 2 * std::int64_t(q) - centered;
        auto cos_term = [&](int k) {
            int folded = detail::floor_mod(std::int64_t(k) * qq, 2 * n);
            return std::cos(kPi * folded / n);
        };
        double acc = 1.0;
        for (int k = 1; k < k1; ++k) acc += 2.0 * cos_term(k);
        for (int k = k1; k <= k2; ++k) acc += 2.0 * profile.values[k - k1] * cos_term(k);
        base[q] = acc / n;
    }
    return base;
}

// Builds all M rows from the base row by index permutation only.
inline PtvirSet ptvir_from_base(std::span<const double> base, int block_length,
                                const ShiftRule& rule, int source_b = -1) {
    const int n = static_cast<int>(base.size());
    PtvirSet set;
    set.block_length = block_length;
    set.fft_length = n;
    set.source_b = source_b;
    set.d.resize(static_cast<std::size_t>(block_length) * n);
    for (int row = 0; row < block_length; ++row) {
        const int shift = rule.shift_of_row(row, block_length);
        double* out = set.d.data() + static_cast<std::size_t>(row) * n;
        for (int q = 0; q < n; ++q) out[q] = base[detail::floor_mod(q + shift, n)];
    }
    return set;
}

// Impulse-probes every input phase p = 0..M-1, records N+2M output samples
// per probe, and reassembles the time-invariant response observed at each
// output phase. Every recorded sample is either consumed by some (n, q) cell
// or verified to be (numerically) zero, so a wrong window offset cannot pass
// silently. A superposition probe guards against nonlinear processors.
template <BlockProcessor P>
PtvirSet measure_ptvir(P& processor, const ShiftRule& rule, int source_b = -1) {
    const int m = processor.block_length();
    const int n = processor.fft_length();
    const int total = n + 2 * m;
    std::vector<std::vector<double>> probes(static_cast<std::size_t>(m));
    for (int p = 0; p < m; ++p) probes[p] = detail::impulse_probe(processor, p, total);

    PtvirSet set;
    set.block_length = m;
    set.fft_length = n;
    set.source_b = source_b;
    set.d.assign(static_cast<std::size_t>(m) * n, 0.0);
    for (int row = 0; row < m; ++row) {
        for (int q = 0; q < n; ++q) {
            const int tau = q + row + rule.window_offset;
            const int p = detail::floor_mod(row - tau, m);
            const int t = p + tau;
            set.d[static_cast<std::size_t>(row) * n + q] = probes[p][t];
        }
    }
    // Unconsumed (probe, time) cells must carry no energy.
    for (int p = 0; p < m; ++p) {
        for (int t = 0; t < total; ++t) {
            const int row = t % m;
            const int q = (t - p) - row - rule.window_offset;
            if (q < 0 || q >= n) {
                if (std::abs(probes[p][t]) > 1e-12)
                    throw Error("measure_ptvir: energy outside the calibrated support window");
            }
        }
    }

    // Linearity: the response to 2*delta(p0) + delta(p1) must equal the
    // matching combination of the unit probes.
    {
        const int p0 = 0, p1 = m / 2;
        processor.reset();
        std::vector<double> block(static_cast<std::size_t>(m), 0.0);
        std::vector<double> combined;
        for (int start = 0; start < total; start += m) {
            for (int i = 0; i < m; ++i) {
                int t = start + i;
                block[i] = (t == p0 ? 2.0 : 0.0) + (t == p1 ? 1.0 : 0.0);
            }
            auto y = processor.process_block(block);
            combined.insert(combined.end(), y.begin(), y.end());
        }
        for (int t = 0; t < total; ++t) {
            if (std::abs(combined[t] - 2.0 * probes[p0][t] - probes[p1][t]) > 1e-12)
                throw Error("measure_ptvir: superposition check failed (nonlinear processor)");
        }
    }
    processor.reset();
    return set;
}

// Locates the support windows of the measured responses, fits the circular
// relation between rows, and verifies the fit exactly. The processor must be
// configured with `coeffs`, and the corresponding base response should have
// full length-N support (any generic profile does); degenerate tables fall
// back to the default rule if and only if it reproduces the measurements.
template <BlockProcessor P>
ShiftRule calibrate_shift_convention(P& processor, const DftCoefficients& coeffs) {
    const int m = processor.block_length();
    const int n = processor.fft_length();
    const int total = n + 2 * m;
    std::vector<std::vector<double>> probes(static_cast<std::size_t>(m));
    for (int p = 0; p < m; ++p) probes[p] = detail::impulse_probe(processor, p, total);

    // First observed lag per output phase; block outputs untouched by the
    // impulse are exact zeros, so support edges are sharp.
    int window_offset = 0;
    bool window_known = false;
    for (int row = 0; row < m; ++row) {
        int first = std::numeric_limits<int>::max();
        int last = std::numeric_limits<int>::min();
        for (int p = 0; p < m; ++p) {
            for (int t = row; t < total; t += m) {
                if (probes[p][t] != 0.0) {
                    first = std::min(first, t - p);
                    last = std::max(last, t - p);
                }
            }
        }
        if (first > last) continue;  // phase never excited; impossible for linear OLS
        if (last - first + 1 > n)
            throw Error("calibrate_shift_convention: support wider than N samples");
        if (last - first + 1 == n) {
            const int w0 = first - row;
            if (window_known && w0 != window_offset)
                throw Error("calibrate_shift_convention: inconsistent support windows");
            window_offset = w0;
            window_known = true;
        }
    }
    if (!window_known) window_offset = default_shift_rule(m).window_offset;

    ShiftRule rule{window_offset, 1};
    PtvirSet measured = measure_ptvir(processor, rule, coeffs.source_b);
    const std::vector<double> base = base_response_idft(coeffs);

    // Per-row best circular shift against the base row.
    std::vector<int> sigma(static_cast<std::size_t>(m));
    for (int row = 0; row < m; ++row) {
        auto meas = measured.row(row);
        double best_dev = std::numeric_limits<double>::infinity();
        int best_s = 0;
        for (int s = 0; s < n; ++s) {
            double dev = 0.0;
            for (int q = 0; q < n && dev < best_dev; ++q)
                dev = std::max(dev, std::abs(meas[q] - base[detail::floor_mod(q + s, n)]));
            if (dev < best_dev) {
                best_dev = dev;
                best_s = s;
            }
        }
        if (best_dev > 1e-12)
            throw Error("calibrate_shift_convention: no circular shift reproduces row " +
                        std::to_string(row));
        sigma[row] = best_s;
    }
    for (int step : {1, -1}) {
        bool ok = true;
        for (int row = 0; row < m && ok; ++row)
            ok = sigma[row] == detail::floor_mod(step * (row - (m - 1)), n);
        if (ok) {
            rule.step = step;
            return rule;
        }
    }
    throw Error("calibrate_shift_convention: shifts do not follow an affine rule");
}

// ---------------------------------------------------------------------------
// Frequency grid and response evaluation.

struct FrequencyGrid {
    std::vector<double> omega;  // sorted over [0, pi]; all band edges present
    int base_points = 0;        // uniform point count K
    BinSpec bins;
    // region_by_b[b - b_low][i]: 0 passband, 1 stopband, 2 excluded.
    std::vector<std::vector<std::int8_t>> region_by_b;

    std::span<const std::int8_t> region(int b) const { return region_by_b[b - bins.b_low]; }
    std::size_t size() const { return omega.size(); }

    static FrequencyGrid build(const BinSpec& bins, int base_points) {
        if (base_points < 2 * bins.fft_length)
            throw ValidationError("FrequencyGrid: need K >= 2N grid points");
        FrequencyGrid grid;
        grid.bins = bins;
        grid.base_points = base_points;
        grid.omega.reserve(static_cast<std::size_t>(base_points) +
                           2 * (bins.b_high - bins.b_low + 1));
        for (int i = 0; i < base_points; ++i)
            grid.omega.push_back(kPi * i / (base_points - 1));
        const int half = bins.transition_width_bins / 2;
        for (int b = bins.b_low; b <= bins.b_high; ++b) {
            for (int edge : {b - half, b + half}) {
                double w = bins.omega_of_bin(edge);
                auto it = std::lower_bound(grid.omega.begin(), grid.omega.end(), w);
                if (it == grid.omega.end() || *it != w) grid.omega.insert(it, w);
            }
        }
        grid.region_by_b.resize(static_cast<std::size_t>(bins.b_high - bins.b_low + 1));
        for (int b = bins.b_low; b <= bins.b_high; ++b) {
            double pass_edge = bins.omega_of_bin(b - half);
            double stop_edge = bins.omega_of_bin(b + half);
            auto& region = grid.region_by_b[b - bins.b_low];
            region.resize(grid.omega.size());
            for (std::size_t i = 0; i < grid.omega.size(); ++i) {
                if (grid.omega[i] <= pass_edge)
                    region[i] = 0;
                else if (grid.omega[i] >= stop_edge)
                    region[i] = 1;
                else
                    region[i] = 2;
            }
        }
        return grid;
    }
};

// e^{-j omega q} for q = 0..N-1. One shared routine so that every response
// evaluation sums in the same order with the same phasors.
inline void fill_phasors(double omega, std::span<std::complex<double>> out) {
    for (std::size_t q = 0; q < out.size(); ++q) {
        double ang = -omega * static_cast<double>(q);
        out[q] = {std::cos(ang), std::sin(ang)};
    }
}

inline std::complex<double> response_from_row(std::span<const double> row,
                                              std::span<const std::complex<double>> phasors,
                                              std::complex<double> prefactor) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t q = 0; q < row.size(); ++q) acc += row[q] * phasors[q];
    return prefactor * acc;
}

// H_n(e^{j omega}) = e^{-j omega n} sum_q d_n(q) e^{-j omega q}. Direct
// O(N) summation, deliberately independent of the engine's FFT path.
inline std::complex<double> response_Hn(const PtvirSet& set, int n, double omega) {
    if (n < 0 || n >= set.block_length) throw ValidationError("response_Hn: phase out of range");
    if (omega < 0.0 || omega > kPi) throw ValidationError("response_Hn: omega outside [0, pi]");
    std::vector<std::complex<double>> phasors(static_cast<std::size_t>(set.fft_length));
    fill_phasors(omega, phasors);
    return response_from_row(set.row(n), phasors, phasors[n]);
}

// Ideal response the overall system approximates: the filter's own linear
// phase plus the M-1 samples of block delay in the passband, zero in the
// stopband. Calls inside the open transition band are a caller bug.
inline std::complex<double> desired_response(double omega, double band_center, double delta,
                                             int filter_length, int block_length) {
    // Edge comparisons carry an absolute slack far below any bin width so
    // that a band edge computed as bin * (2 pi / N) and one computed as
    // b * 2 pi / N -+ delta / 2 classify identically.
    constexpr double kEdgeSlack = 1e-12;
    if (omega <= band_center - delta / 2.0 + kEdgeSlack) {
        double group_delay = (filter_length - 1) / 2.0 + (block_length - 1);
        double ang = -omega * group_delay;
        return {std::cos(ang), std::sin(ang)};
    }
    if (omega >= band_center + delta / 2.0 - kEdgeSlack) return {0.0, 0.0};
    throw ValidationError("desired_response: omega lies inside the transition band");
}

struct ErrorMatrix {
    std::vector<int> point_index;   // masked indices into grid.omega
    std::vector<double> abs_error;  // row-major: block_length x point_index.size()
    double max_abs = 0.0;
    int worst_n = -1;
    double worst_omega = 0.0;

    double at(int n, std::size_t j) const { return abs_error[n * point_index.size() + j]; }
};

// |E_n(omega)| = |H_n - H_d| over the masked grid for one band center.
inline ErrorMatrix error_on_grid(const PtvirSet& set, const FrequencyGrid& grid, int b) {
    const BinSpec& bins = grid.bins;
    if (set.fft_length != bins.fft_length || set.block_length != bins.block_length)
        throw ValidationError("error_on_grid: set and grid disagree on (N, M)");
    auto region = grid.region(b);
    ErrorMatrix out;
    for (std::size_t i = 0; i < grid.omega.size(); ++i)
        if (region[i] != 2) out.point_index.push_back(static_cast<int>(i));
    const int m = set.block_length;
    out.abs_error.resize(static_cast<std::size_t>(m) * out.point_index.size());
    std::vector<std::complex<double>> phasors(static_cast<std::size_t>(set.fft_length));
    const double b_omega = bins.omega_of_bin(b);
    for (std::size_t j = 0; j < out.point_index.size(); ++j) {
        const double omega = grid.omega[static_cast<std::size_t>(out.point_index[j])];
        fill_phasors(omega, phasors);
        const std::complex<double> desired =
            desired_response(omega, b_omega, bins.delta(), bins.filter_length, m);
        for (int n = 0; n < m; ++n) {
            const std::complex<double> hn = response_from_row(set.row(n), phasors, phasors[n]);
            const double err = std::abs(hn - desired);
            out.abs_error[static_cast<std::size_t>(n) * out.point_index.size() + j] = err;
            if (err > out.max_abs) {
                out.max_abs = err;
                out.worst_n = n;
                out.worst_omega = omega;
            }
        }
    }
    return out;
}

}  // namespace fcvbw
