#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace fcvbw {

// Thread-local tallies of the floating-point work done by the streaming
// engine and its transform provider. Retuning the bandwidth must leave
// every channel untouched; the variable channel must advance by exactly
// 2*L_V per processed block.
struct OpCounters {
    std::uint64_t variable_mul = 0;  // general (data-dependent) real multiplications
    std::uint64_t fixed_mul = 0;     // multiplications by precomputed constants
    std::uint64_t adds = 0;
    std::uint64_t transform = 0;     // lumped FFT/IFFT flops

    std::uint64_t total() const { return variable_mul + fixed_mul + adds + transform; }
    void reset() { *this = OpCounters{}; }

    friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

inline OpCounters& op_counters() {
    thread_local OpCounters counters;
    return counters;
}

// Scalar wrapper that counts every arithmetic operation performed on it.
// Placement-only routines are instantiated with this type in tests to prove
// they do no floating-point arithmetic at all.
class CountedReal {
  public:
    CountedReal() = default;
    CountedReal(double v) : v_(v) {}  // NOLINT: implicit by design

    double value() const { return v_; }

    static std::uint64_t& ops() {
        thread_local std::uint64_t n = 0;
        return n;
    }

    friend CountedReal operator+(CountedReal a, CountedReal b) { ++ops(); return {a.v_ + b.v_}; }
    friend CountedReal operator-(CountedReal a, CountedReal b) { ++ops(); return {a.v_ - b.v_}; }
    friend CountedReal operator*(CountedReal a, CountedReal b) { ++ops(); return {a.v_ * b.v_}; }
    friend CountedReal operator/(CountedReal a, CountedReal b) { ++ops(); return {a.v_ / b.v_}; }
    CountedReal operator-() const { return {-v_}; }
    friend bool operator==(CountedReal a, CountedReal b) { return a.v_ == b.v_; }
    friend bool operator<(CountedReal a, CountedReal b) { return a.v_ < b.v_; }

  private:
    double v_ = 0.0;
};

// xorshift64* with an explicit double mapping. std:: distributions are
// implementation-defined, so seeded test data would not be byte-identical
// across toolchains.
class SeededRng {

  public:
    explicit SeededRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1DULL;
    }

    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

  private:
    std::uint64_t state_;
};

inline unsigned thread_limit() {
    if (const char* env = std::getenv("FCVBW_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Static partition of [0, n) across worker threads. Each index is handled by
// exactly one worker and workers write disjoint slots, so results do not
// depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned workers = thread_limit();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace fcvbw
