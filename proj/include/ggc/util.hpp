#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ggc {

/// Thrown on violated preconditions (bad arguments, unsupported requests).
struct InvalidArgument : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a resource guard trips (dimension caps, emission caps).
struct ResourceLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::size_t hash_combine(std::size_t seed, std::size_t v)
{
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

/// Global worker-count knob for certification sweeps. 0 = hardware default.
int thread_count();
void set_thread_count(int n);

/// Chunked parallel map over [0, n). Results are merged in index order, so the
/// outcome does not depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& chunk_fn);

/// Exact rational arithmetic for the refocusing phase ledger.
class Fraction {
public:
    Fraction() = default;
    Fraction(long long n) : num_(n), den_(1) {}
    Fraction(long long n, long long d);

    Fraction operator+(const Fraction& o) const;
    Fraction operator-(const Fraction& o) const;
    Fraction operator*(const Fraction& o) const;
    Fraction operator-() const { return Fraction(-num_, den_); }
    bool operator==(const Fraction& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool is_zero() const { return num_ == 0; }

    long long num() const { return num_; }
    long long den() const { return den_; }
    double to_double() const { return double(num_) / double(den_); }
    std::string str() const;

private:
    void reduce();
    long long num_ = 0;
    long long den_ = 1;
};

/// Reflected Gray code: bit index that changes between step i and i+1 of a
/// 2^bits cycle (the last step returns to the all-zero pattern).
inline int gray_flip_bit(std::uint64_t i, int bits)
{
    std::uint64_t next = (i + 1) & ((1ULL << bits) - 1);
    std::uint64_t diff = (i ^ (i >> 1)) ^ (next ^ (next >> 1));
    int b = 0;
    while (!(diff & 1)) {
        diff >>= 1;
        ++b;
    }
    return b;
}

} // namespace ggc
