#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace oddreg {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;

using Vec3 = std::array<i64, 3>;

/// 3x3 integer matrix, row-major.
struct Mat3 {
    std::array<i64, 9> m{};

    i64& operator()(int r, int c) { return m[3 * r + c]; }
    i64 operator()(int r, int c) const { return m[3 * r + c]; }
    bool operator==(const Mat3&) const = default;

    static Mat3 identity() {
        Mat3 a;
        a(0, 0) = a(1, 1) = a(2, 2) = 1;
        return a;
    }
    static Mat3 diag(i64 a, i64 b, i64 c) {
        Mat3 d;
        d(0, 0) = a;
        d(1, 1) = b;
        d(2, 2) = c;
        return d;
    }

    Vec3 apply(const Vec3& v) const {
        Vec3 w{};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) w[r] += (*this)(r, c) * v[c];
        return w;
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 p;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                i64 s = 0;
                for (int k = 0; k < 3; ++k) s += (*this)(r, k) * o(k, c);
                p(r, c) = s;
            }
        return p;
    }
    Mat3 transposed() const {
        Mat3 t;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) t(r, c) = (*this)(c, r);
        return t;
    }
    i64 det() const {
        const Mat3& a = *this;
        return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
               a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
               a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    }
    i64 trace() const { return m[0] + m[4] + m[8]; }
};

/// Process-wide cap on worker threads for the parallel phases; settable from
/// the CLI thread flag. Outputs stay byte-identical for any value because all
/// parallel loops write to preallocated per-index slots.
inline std::atomic<unsigned>& worker_threads() {
    static std::atomic<unsigned> n{8};
    return n;
}

/// Runs fn(i) for i in [0,n), splitting across up to `threads` workers.
/// Results must be written to preallocated per-index slots so the outcome
/// is independent of the worker count.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    unsigned nw = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(nw);
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < nw; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

}  // namespace oddreg
