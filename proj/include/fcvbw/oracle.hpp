#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "fcvbw/ptvir.hpp"
#include "fcvbw/spectrum.hpp"

namespace fcvbw {

// Neumaier-compensated accumulator. The oracles accumulate with it so their
// own rounding stays far below the 1e-9 comparison budget.
class CompensatedSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Ground-truth block filter: same segmentation, priming and discard rules as
// the streaming engine, but every DFT/IDFT is the O(N^2) defining sum. No
// FFT, no symmetry shortcuts, no shared code with the engine's transform.
class NaiveBlockFilter {
  public:
    NaiveBlockFilter(DftCoefficients coeffs, int block_length)
        : coeffs_(std::move(coeffs)),
          block_(block_length),
          roots_(detail::unit_roots(coeffs_.size())) {
        const int n = coeffs_.size();
        if (block_length < 1 || block_length > n)
            throw ValidationError("NaiveBlockFilter: need 1 <= M <= N");
        ring_.assign(static_cast<std::size_t>(n - block_), 0.0);
    }

    int block_length() const { return block_; }
    int fft_length() const { return coeffs_.size(); }
    int source_b() const { return coeffs_.source_b; }

    void reset() { std::fill(ring_.begin(), ring_.end(), 0.0); }

    // Retuning the oracle means handing it a freshly assembled table; it
    // recomputes everything per block anyway.
    void set_table(DftCoefficients coeffs) {
        if (coeffs.size() != fft_length())
            throw ValidationError("NaiveBlockFilter: table length changed");
        coeffs_ = std::move(coeffs);
    }

    std::vector<double> process_block(std::span<const double> input) {
        const int n = fft_length();
        const int m = block_;
        if (static_cast<int>(input.size()) != m)
            throw ValidationError("NaiveBlockFilter: block must contain exactly M samples");
        std::vector<double> segment(static_cast<std::size_t>(n));
        std::copy(ring_.begin(), ring_.end(), segment.begin());
        std::copy(input.begin(), input.end(), segment.begin() + (n - m));

        std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            CompensatedSum re, im;
            for (int t = 0; t < n; ++t) {
                // forward kernel e^{-j 2 pi t k / N}
                const auto w = std::conj(roots_[detail::floor_mod(std::int64_t(t) * k, n)]);
                re.add(segment[t] * w.real());
                im.add(segment[t] * w.imag());
            }
            spectrum[k] = std::complex<double>(re.value(), im.value()) * coeffs_.table[k];
        }

        std::vector<double> out(static_cast<std::size_t>(m));
        for (int q = n - m; q < n; ++q) {
            CompensatedSum re;
            for (int k = 0; k < n; ++k) {
                const auto w = roots_[detail::floor_mod(std::int64_t(q) * k, n)];
                re.add(spectrum[k].real() * w.real() - spectrum[k].imag() * w.imag());
            }
            out[q - (n - m)] = re.value() / n;
        }
        std::copy(segment.end() - (n - m), segment.end(), ring_.begin());
        return out;
    }

  private:
    DftCoefficients coeffs_;
    int block_;
    std::vector<std::complex<double>> roots_;
    std::vector<double> ring_;
};

// Whole-stream convenience wrapper: pads the final partial block with zeros
// and returns exactly stream.size() samples.
inline std::vector<double> naive_block_filter(const DftCoefficients& coeffs,
                                              std::span<const double> stream, int block_length) {
    NaiveBlockFilter oracle(coeffs, block_length);
    std::vector<double> out;
    out.reserve(stream.size());
    std::vector<double> block(static_cast<std::size_t>(block_length), 0.0);
    for (std::size_t start = 0; start < stream.size(); start += block_length) {
        for (int i = 0; i < block_length; ++i) {
            std::size_t t = start + i;
            block[i] = t < stream.size() ? stream[t] : 0.0;
        }
        auto y = oracle.process_block(block);
        out.insert(out.end(), y.begin(), y.end());
    }
    out.resize(stream.size());
    return out;
}

// y(t) = sum_q h(q) x(t-q) with zero-extended input; schoolbook form.
inline std::vector<double> direct_fir_convolution(std::span<const double> taps,
                                                  std::span<const double> stream) {
    std::vector<double> out(stream.size());
    for (std::size_t t = 0; t < stream.size(); ++t) {
        CompensatedSum acc;
        for (std::size_t q = 0; q < taps.size() && q <= t; ++q)
            acc.add(taps[q] * stream[t - q]);
        out[t] = acc.value();
    }
    return out;
}

// Direct time-varying convolution through the measured responses: output
// time t uses the response of phase t mod M placed at the lags the shift
// rule assigns it (which reach up to M-1 samples ahead of t).
inline std::vector<double> lptv_convolution(const PtvirSet& set, std::span<const double> stream,
                                            int window_offset) {
    const int n = set.fft_length;
    const int m = set.block_length;
    std::vector<double> out(stream.size());
    for (std::size_t t = 0; t < stream.size(); ++t) {
        const int phase = static_cast<int>(t % static_cast<std::size_t>(m));
        auto row = set.row(phase);
        CompensatedSum acc;
        for (int q = 0; q < n; ++q) {
            const std::int64_t x_index =
                static_cast<std::int64_t>(t) - (q + phase + window_offset);
            if (x_index < 0 || x_index >= static_cast<std::int64_t>(stream.size())) continue;
            acc.add(row[q] * stream[static_cast<std::size_t>(x_index)]);
        }
        out[t] = acc.value();
    }
    return out;
}

inline std::vector<double> lptv_convolution(const PtvirSet& set, std::span<const double> stream) {
    return lptv_convolution(set, stream, default_shift_rule(set.block_length).window_offset);
}

}  // namespace fcvbw
