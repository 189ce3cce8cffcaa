#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "fcvbw/errors.hpp"

namespace fcvbw {

inline constexpr double kPi = std::numbers::pi;

// Requirements that do not land on the bin grid are rejected, but a spec
// entered as a short decimal (e.g. 0.8594*pi for bin 55 of 128) must still
// be accepted, so "on the grid" means within this fraction of a bin.
inline constexpr double kBinSnapTol = 1e-2;

// Continuous-frequency requirements. All angles are normalized angular
// frequencies (omega*T) in (0, pi); ripples and the error bound are linear.
struct FilterSpec {
    double transition_width = 0.0;   // delta
    double ripple_pass = 0.0;        // delta_p
    double ripple_stop = 0.0;        // delta_s
    double max_error = 0.0;          // delta_E
    double band_center_low = 0.0;    // b_l
    double band_center_high = 0.0;   // b_u

    void validate() const {
        if (!(transition_width > 0.0 && transition_width < kPi))
            throw ValidationError("FilterSpec: transition width must lie in (0, pi)");
        for (double d : {ripple_pass, ripple_stop, max_error}) {
            if (!(d > 0.0 && d < 1.0))
                throw ValidationError("FilterSpec: ripples and max error must lie in (0, 1)");
        }
        const double half = transition_width / 2.0;
        if (!(half <= band_center_low && band_center_low <= band_center_high &&
              band_center_high <= kPi - half))
            throw ValidationError(
                "FilterSpec: band centers must satisfy delta/2 <= b_l <= b_u <= pi - delta/2");
    }
};

// Exact bin-domain discretization of a FilterSpec for one (N, L).
struct BinSpec {
    int fft_length = 0;            // N = 2^Q
    int filter_length = 0;         // L
    int block_length = 0;          // M = N - L + 1
    int transition_width_bins = 0; // delta_N, even
    int b_low = 0;                 // b_{N,l}
    int b_high = 0;                // b_{N,u}

    int profile_length() const { return transition_width_bins - 1; }  // L_V
    double delta() const { return transition_width_bins * 2.0 * kPi / fft_length; }
    double omega_of_bin(int b) const { return b * 2.0 * kPi / fft_length; }
    bool contains_b(int b) const { return b >= b_low && b <= b_high; }

    void validate() const {
        if (fft_length < 8 || !std::has_single_bit(static_cast<unsigned>(fft_length)))
            throw ValidationError("BinSpec: N must be 2^Q with Q >= 3");
        if (filter_length < 1 || filter_length > fft_length)
            throw ValidationError("BinSpec: L must satisfy 1 <= L <= N");
        if (block_length != fft_length - filter_length + 1)
            throw ValidationError("BinSpec: M must equal N - L + 1");
        if (transition_width_bins < 2 || transition_width_bins % 2 != 0)
            throw ValidationError("BinSpec: delta_N must be a positive even integer");
        const int half = transition_width_bins / 2;
        if (!(half <= b_low && b_low <= b_high && b_high <= fft_length / 2 - half - 1))
            throw ValidationError(
                "BinSpec: need delta_N/2 <= b_low <= b_high <= N/2 - delta_N/2 - 1");
    }
};

// The shared transition-band samples V(r); the only stored coefficients of a
// design and the only free variables of the optimization.
struct TransitionProfile {
    std::vector<double> values;

    int length() const { return static_cast<int>(values.size()); }
};

// Length-N conjugate-symmetric coefficient table H(k).
struct DftCoefficients {
    std::vector<std::complex<double>> table;
    int source_b = -1;

    int size() const { return static_cast<int>(table.size()); }
};

struct TransitionBand {
    int k1 = 0;
    int k2 = 0;
};

// Nearest spec that lands exactly on the 2*pi/N grid; reported alongside
// off-grid rejections.
inline FilterSpec nearest_grid_spec(const FilterSpec& spec, int fft_length) {
    const double to_bins = fft_length / (2.0 * kPi);
    int dn = 2 * std::max<int>(1, static_cast<int>(std::lround(spec.transition_width * to_bins / 2.0)));
    dn = std::min(dn, 2 * (fft_length / 4 - 1));  // keep an admissible b range
    const int lo = dn / 2;
    const int hi = std::max(lo, fft_length / 2 - dn / 2 - 1);
    auto clamp_bin = [&](double w) {
        return std::clamp(static_cast<int>(std::lround(w * to_bins)), lo, hi);
    };
    int bl = clamp_bin(spec.band_center_low);
    int bu = std::max(bl, clamp_bin(spec.band_center_high));
    FilterSpec out = spec;
    out.transition_width = dn * 2.0 * kPi / fft_length;
    out.band_center_low = bl * 2.0 * kPi / fft_length;
    out.band_center_high = bu * 2.0 * kPi / fft_length;
    return out;
}

namespace detail {
inline int snap_to_bin(double raw, const char* what, const FilterSpec& spec, int fft_length) {
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) > kBinSnapTol) {
        FilterSpec near = nearest_grid_spec(spec, fft_length);
        std::ostringstream msg;
        msg << "off-grid spec: " << what << " = " << raw << " bins is not integral at N = "
            << fft_length << "; nearest grid spec: transition_width = " << near.transition_width
            << ", b_low = " << near.band_center_low << ", b_high = " << near.band_center_high;
        throw OffGridError(msg.str());
    }
    return static_cast<int>(rounded);
}
}  // namespace detail

inline BinSpec validate_and_discretize(const FilterSpec& spec, int fft_length, int filter_length) {
    spec.validate();
    if (fft_length < 8 || !std::has_single_bit(static_cast<unsigned>(fft_length)))
        throw ValidationError("discretize: N must be 2^Q with Q >= 3");
    if (filter_length > fft_length)
        throw ValidationError("discretize: L must not exceed N");
    const double to_bins = fft_length / (2.0 * kPi);
    BinSpec bins;
    bins.fft_length = fft_length;
    bins.filter_length = filter_length;
    bins.block_length = fft_length - filter_length + 1;
    bins.transition_width_bins =
        detail::snap_to_bin(spec.transition_width * to_bins, "delta_N", spec, fft_length);
    bins.b_low = detail::snap_to_bin(spec.band_center_low * to_bins, "b_N,l", spec, fft_length);
    bins.b_high = detail::snap_to_bin(spec.band_center_high * to_bins, "b_N,u", spec, fft_length);
    if (bins.transition_width_bins % 2 != 0) {
        std::ostringstream msg;
        msg << "off-grid spec: delta_N = " << bins.transition_width_bins
            << " must be even at N = " << fft_length;
        throw OffGridError(msg.str());
    }
    bins.validate();
    return bins;
}

// First and last transition-band sample indices for band center b.
inline TransitionBand transition_bins(const BinSpec& bins, int b) {
    if (!bins.contains_b(b)) throw ValidationError("transition_bins: b out of declared range");
    const int half = bins.transition_width_bins / 2;
    return {b - half + 1, b + half - 1};
}

// Magnitude samples H_R(k): ones on the passband, V on both transition
// images, zeros elsewhere. Pure value placement; instantiating with an
// op-counting scalar must report zero arithmetic.
template <class Real>
std::vector<Real> magnitude_samples(const BinSpec& bins, std::span<const Real> profile, int b) {
    if (static_cast<int>(profile.size()) != bins.profile_length())
        throw ValidationError("magnitude_samples: profile length must be delta_N - 1");
    const auto [k1, k2] = transition_bins(bins, b);
    const int n = bins.fft_length;
    std::vector<Real> mag(static_cast<std::size_t>(n), Real(0));
    mag[0] = Real(1);
    for (int k = 1; k < k1; ++k) {
        mag[k] = Real(1);
        mag[n - k] = Real(1);
    }
    for (int r = 0; r <= k2 - k1; ++r) {
        mag[k1 + r] = profile[r];
        mag[n - (k1 + r)] = profile[r];
    }
    return mag;
}

inline std::vector<double> magnitude_samples(const BinSpec& bins, const TransitionProfile& profile,
                                             int b) {
    return magnitude_samples<double>(bins, std::span<const double>(profile.values), b);
}

enum class BinRegion { passband, transition, stopband };

inline BinRegion bin_region(const BinSpec& bins, int b, int k) {
    const auto [k1, k2] = transition_bins(bins, b);
    const int folded = std::min(k, bins.fft_length - k);
    if (folded < k1) return BinRegion::passband;
    if (folded <= k2) return BinRegion::transition;
    return BinRegion::stopband;
}

// Fixed linear-phase factors e^{-j*pi*k*(L-1)/N}. Angles are reduced with
// exact integer arithmetic and the upper half mirrors the lower conjugate,
// so a symmetric magnitude input yields an exactly conjugate-symmetric table
// whenever L - 1 is even.
inline std::vector<std::complex<double>> phase_table(int fft_length, int filter_length) {
    const int n = fft_length;
    const std::int64_t order = filter_length - 1;
    std::vector<std::complex<double>> table(static_cast<std::size_t>(n));
    for (int k = 0; k <= n / 2; ++k) {
        std::int64_t folded = (static_cast<std::int64_t>(k) * order) % (2 * n);
        double ang = -kPi * static_cast<double>(folded) / n;
        table[k] = {std::cos(ang), std::sin(ang)};
    }
    for (int k = n / 2 + 1; k < n; ++k) table[k] = std::conj(table[n - k]);
    return table;
}

inline DftCoefficients assemble_dft_coefficients(std::span<const double> magnitude,
                                                 int filter_length, int source_b = -1) {
    const int n = static_cast<int>(magnitude.size());
    if (n < 2 || !std::has_single_bit(static_cast<unsigned>(n)))
        throw ValidationError("assemble: magnitude length must be a power of two");
    for (int k = 1; k < n; ++k) {
        if (std::abs(magnitude[n - k] - magnitude[k]) > 1e-13)
            throw ValidationError("assemble: magnitude samples must have even symmetry");
    }
    const auto phase = phase_table(n, filter_length);
    DftCoefficients out;
    out.source_b = source_b;
    out.table.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out.table[k] = magnitude[k] * phase[k];
    return out;
}

inline DftCoefficients assemble_dft_coefficients(const BinSpec& bins,
                                                 const TransitionProfile& profile, int b) {
    auto mag = magnitude_samples(bins, profile, b);
    return assemble_dft_coefficients(mag, bins.filter_length, b);
}

// H(k, b) = F(k) + sum_r V(r) * G_r(k) for every profile: F carries the
// passband ones with their phase, G_r the phase factor on the two conjugate
// transition bins k1 + r and N - k1 - r.
struct AffineDecomposition {
    std::vector<std::complex<double>> fixed;                // F
    std::vector<std::vector<std::complex<double>>> basis;   // G_r, r = 0..L_V-1
};

inline AffineDecomposition affine_decomposition(const BinSpec& bins, int b) {
    const auto [k1, k2] = transition_bins(bins, b);
    const int n = bins.fft_length;
    TransitionProfile zeros{std::vector<double>(static_cast<std::size_t>(bins.profile_length()))};
    AffineDecomposition out;
    out.fixed = assemble_dft_coefficients(bins, zeros, b).table;
    const auto phase = phase_table(n, bins.filter_length);
    out.basis.resize(static_cast<std::size_t>(bins.profile_length()));
    for (int r = 0; r < bins.profile_length(); ++r) {
        auto& g = out.basis[r];
        g.assign(static_cast<std::size_t>(n), {0.0, 0.0});
        g[k1 + r] = phase[k1 + r];
        g[n - (k1 + r)] = phase[n - (k1 + r)];
    }
    return out;
}

inline double max_conjugate_asymmetry(std::span<const std::complex<double>> table) {
    const int n = static_cast<int>(table.size());
    double worst = std::abs(table[0].imag());
    for (int k = 1; k < n; ++k) worst = std::max(worst, std::abs(table[n - k] - std::conj(table[k])));
    return worst;
}

}  // namespace fcvbw
