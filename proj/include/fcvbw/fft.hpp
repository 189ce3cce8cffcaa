#pragma once

#include <bit>
#include <complex>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "fcvbw/errors.hpp"
#include "fcvbw/ops.hpp"

namespace fcvbw {

// Transform convention used throughout: forward is the plain e^{-j2*pi*nk/N}
// kernel with no scaling, inverse carries the 1/N factor. Providers must
// round-trip to 1e-12 and be linear; the engine asserts the round-trip once
// at construction.
template <class T, class Real = double>
concept TransformProvider = requires(T t, std::span<const Real> x,
                                     std::span<const std::complex<Real>> s,
                                     std::span<std::complex<Real>> spec,
                                     std::span<Real> out) {
    { t.size() } -> std::convertible_to<std::size_t>;
    t.forward(x, spec);
    t.inverse(s, out);
};

// Iterative radix-2 decimation-in-time FFT with precomputed twiddles.
// N is a power of two by construction everywhere in this library.
template <std::floating_point Real = double>
class Radix2Fft {
  public:
    explicit Radix2Fft(std::size_t n) : n_(n) {
        if (n < 2 || !std::has_single_bit(n)) {
            throw ValidationError("fft: size must be a power of two >= 2");
        }
        log2n_ = static_cast<unsigned>(std::countr_zero(n));
        bitrev_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (unsigned b = 0; b < log2n_; ++b) r |= ((i >> b) & 1u) << (log2n_ - 1 - b);
            bitrev_[i] = r;
        }
        twiddle_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            Real ang = -Real(2) * std::numbers::pi_v<Real> * Real(k) / Real(n);
            twiddle_[k] = {std::cos(ang), std::sin(ang)};
        }
    }

    std::size_t size() const { return n_; }

    void forward(std::span<const Real> x, std::span<std::complex<Real>> spectrum) const {
        check_spans(x.size(), spectrum.size());
        for (std::size_t i = 0; i < n_; ++i) spectrum[bitrev_[i]] = {x[i], Real(0)};
        run(spectrum);
    }

    void forward(std::span<const std::complex<Real>> x,
                 std::span<std::complex<Real>> spectrum) const {
        check_spans(x.size(), spectrum.size());
        for (std::size_t i = 0; i < n_; ++i) spectrum[bitrev_[i]] = x[i];
        run(spectrum);
    }

    // inverse(X) = conj(forward(conj(X))) / N; only the real part is
    // returned, callers check residues where they matter.
    void inverse(std::span<const std::complex<Real>> spectrum, std::span<Real> out) const {
        check_spans(out.size(), spectrum.size());
        scratch_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) scratch_[bitrev_[i]] = std::conj(spectrum[i]);
        run(std::span<std::complex<Real>>(scratch_));
        const Real scale = Real(1) / Real(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = scratch_[i].real() * scale;
        op_counters().transform += n_;
    }

    void inverse(std::span<const std::complex<Real>> spectrum,
                 std::span<std::complex<Real>> out) const {
        check_spans(out.size(), spectrum.size());
        for (std::size_t i = 0; i < n_; ++i) out[bitrev_[i]] = std::conj(spectrum[i]);
        run(out);
        const Real scale = Real(1) / Real(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = std::conj(out[i]) * scale;
        op_counters().transform += 2 * n_;
    }

  private:
    void check_spans(std::size_t a, std::size_t b) const {
        if (a != n_ || b != n_) throw ValidationError("fft: span length mismatch");
    }

    void run(std::span<std::complex<Real>> a) const {
        for (std::size_t len = 2, half = 1; len <= n_; len <<= 1, half <<= 1) {
            std::size_t step = n_ / len;
            for (std::size_t blk = 0; blk < n_; blk += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    std::complex<Real> w = twiddle_[j * step];
                    std::complex<Real> t = w * a[blk + j + half];
                    a[blk + j + half] = a[blk + j] - t;
                    a[blk + j] += t;
                }
            }
        }
        op_counters().transform += 10 * (n_ / 2) * log2n_;  // 1 cmul + 2 cadd per butterfly
    }

    std::size_t n_;
    unsigned log2n_ = 0;
    std::vector<std::size_t> bitrev_;
    std::vector<std::complex<Real>> twiddle_;
    mutable std::vector<std::complex<Real>> scratch_;
};

static_assert(TransformProvider<Radix2Fft<double>>);

}  // namespace fcvbw
