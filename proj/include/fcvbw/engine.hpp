#pragma once

#include <complex>
#include <span>
#include <vector>

#include "fcvbw/fft.hpp"
#include "fcvbw/ops.hpp"
#include "fcvbw/spectrum.hpp"

namespace fcvbw {

enum class PadMode { zero };

// Streaming overlap-save fast-convolution engine.
//
// In structured mode the spectral multiply is the two-stage form the design
// produces: a variable real scaling by V(r) on the transition bins (exactly
// 2*L_V general multiplications per block, instrumented), then the fixed
// linear-phase factor on every nonzero bin. Retuning the bandwidth moves the
// two transition indices and touches no floating-point data.
//
// Raw mode multiplies by an arbitrary coefficient table; it is the classical
// OLS filter used by equivalence tests and generic callers.
//
// Priming convention shared with the oracles: history starts as zeros and
// output sample i corresponds to input time i.
template <class Provider = Radix2Fft<double>>
class OlsEngine {
  public:
    OlsEngine(const BinSpec& bins, TransitionProfile profile, int initial_b)
        : n_(bins.fft_length),
          m_(bins.block_length),
          structured_(true),
          bins_(bins),
          profile_(std::move(profile)),
          phase_(phase_table(bins.fft_length, bins.filter_length)),
          provider_(static_cast<std::size_t>(bins.fft_length)) {
        bins_.validate();
        if (profile_.length() != bins_.profile_length())
            throw ValidationError("engine: profile length must be delta_N - 1");
        set_bandwidth(initial_b);
        init_buffers();
        check_provider();
    }

    OlsEngine(DftCoefficients coeffs, int block_length)
        : n_(coeffs.size()),
          m_(block_length),
          structured_(false),
          raw_table_(std::move(coeffs)),
          provider_(static_cast<std::size_t>(n_)) {
        if (m_ < 1 || m_ > n_) throw ValidationError("engine: need 1 <= M <= N");
        init_buffers();
        check_provider();
    }

    int block_length() const { return m_; }
    int fft_length() const { return n_; }
    int current_b() const { return b_; }
    std::int64_t blocks_processed() const { return blocks_; }

    void reset() {
        std::fill(ring_.begin(), ring_.end(), 0.0);
        pending_.clear();
        blocks_ = 0;
    }

    // Index updates only; takes effect at the next block boundary.
    void set_bandwidth(int b) {
        if (!structured_) throw ValidationError("engine: raw-table engine has no bandwidth");
        if (!bins_.contains_b(b))
            throw ValidationError("engine: bandwidth " + std::to_string(b) +
                                  " outside design range [" + std::to_string(bins_.b_low) + ", " +
                                  std::to_string(bins_.b_high) + "]");
        const int half = bins_.transition_width_bins / 2;
        b_ = b;
        k1_ = b - half + 1;
        k2_ = b + half - 1;
    }

    std::vector<double> process_block(std::span<const double> input) {
        if (static_cast<int>(input.size()) != m_)
            throw ValidationError("engine: block must contain exactly M samples");
        if (!pending_.empty())
            throw ValidationError("engine: pending partial input; feed() or flush() it first");
        return run_block(input);
    }

    // Accepts arbitrary-length input, emitting output for each completed
    // block.
    std::vector<double> feed(std::span<const double> samples) {
        std::vector<double> out;
        pending_.insert(pending_.end(), samples.begin(), samples.end());
        std::size_t consumed = 0;
        while (pending_.size() - consumed >= static_cast<std::size_t>(m_)) {
            auto y = run_block({pending_.data() + consumed, static_cast<std::size_t>(m_)});
            out.insert(out.end(), y.begin(), y.end());
            consumed += static_cast<std::size_t>(m_);
        }
        pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(consumed));
        return out;
    }

    // Zero-pads the pending partial block and returns only the samples that
    // correspond to real input times. A second flush returns nothing.
    std::vector<double> flush(PadMode = PadMode::zero) {
        if (pending_.empty()) return {};
        const std::size_t real = pending_.size();
        pending_.resize(static_cast<std::size_t>(m_), 0.0);
        auto y = run_block(pending_);
        pending_.clear();
        y.resize(real);
        return y;
    }

  private:
    void init_buffers() {
        ring_.assign(static_cast<std::size_t>(n_ - m_), 0.0);
        segment_.resize(static_cast<std::size_t>(n_));
        spectrum_.resize(static_cast<std::size_t>(n_));
        filtered_.resize(static_cast<std::size_t>(n_));
        time_out_.resize(static_cast<std::size_t>(n_));
    }

    void check_provider() {
        SeededRng rng(0x7ab1e5eedULL);
        std::vector<double> x(static_cast<std::size_t>(n_));
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        provider_.forward(std::span<const double>(x), std::span<std::complex<double>>(spectrum_));
        provider_.inverse(std::span<const std::complex<double>>(spectrum_),
                          std::span<double>(time_out_));
        for (int i = 0; i < n_; ++i) {
            if (std::abs(time_out_[i] - x[i]) > 1e-12)
                throw ValidationError("engine: transform provider failed the round-trip check");
        }
    }

    std::vector<double> run_block(std::span<const double> input) {
        auto& ops = op_counters();
        const int overlap = n_ - m_;
        std::copy(ring_.begin(), ring_.end(), segment_.begin());
        std::copy(input.begin(), input.end(), segment_.begin() + overlap);

        provider_.forward(std::span<const double>(segment_),
                          std::span<std::complex<double>>(spectrum_));
        if (structured_) {
            for (int k = 0; k <= n_ / 2; ++k) {
                std::complex<double> value = spectrum_[k];
                if (k >= k1_ && k <= k2_) {
                    const double v = profile_.values[k - k1_];
                    value = {value.real() * v, value.imag() * v};
                    ops.variable_mul += 2;
                } else if (k > k2_) {  // canonical stopband reaches N/2
                    filtered_[k] = {0.0, 0.0};
                    continue;
                }
                filtered_[k] = value * phase_[k];
                ops.fixed_mul += 4;
                ops.adds += 2;
            }
            for (int k = 1; k < n_ / 2; ++k) filtered_[n_ - k] = std::conj(filtered_[k]);
        } else {
            for (int k = 0; k < n_; ++k) filtered_[k] = spectrum_[k] * raw_table_.table[k];
        }
        provider_.inverse(std::span<const std::complex<double>>(filtered_),
                          std::span<double>(time_out_));

        std::copy(segment_.end() - overlap, segment_.end(), ring_.begin());
        ++blocks_;
        return {time_out_.begin() + overlap, time_out_.end()};
    }

    int n_;
    int m_;
    bool structured_;
    BinSpec bins_{};
    TransitionProfile profile_{};
    std::vector<std::complex<double>> phase_;
    DftCoefficients raw_table_{};
    int b_ = -1;
    int k1_ = 0;
    int k2_ = -1;
    Provider provider_;
    std::vector<double> ring_;
    std::vector<double> pending_;
    std::int64_t blocks_ = 0;
    std::vector<double> segment_;
    std::vector<std::complex<double>> spectrum_;
    std::vector<std::complex<double>> filtered_;
    std::vector<double> time_out_;
};

}  // namespace fcvbw
