#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "qf/errors.hpp"

namespace qf {

namespace detail {

// Fixed xorshift64 pivot sequence: selection is randomized (expected O(n))
// yet fully reproducible, and immune to adversarial orderings.
struct PivotRng {
    std::uint64_t s;
    std::uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
};

}  // namespace detail

// k-th smallest element (0-based) of a[0..n).  Three-way-partition
// quickselect: the array is permuted so that on return a[k] holds the answer,
// everything left of k is <= a[k] and everything right is >= a[k].  Ties
// collapse into the middle band, so heavily duplicated inputs stay linear.
inline double select_kth(double* a, std::size_t n, std::size_t k) {
    if (n == 0) throw domain_error("select_kth: empty range");
    if (k >= n) throw domain_error("select_kth: rank out of range");
    detail::PivotRng rng{0x9E3779B97F4A7C15ull ^ (0xD1B54A32D192ED03ull * (n + 1))};
    std::size_t lo = 0, hi = n;
    while (hi - lo > 1) {
        const double pivot = a[lo + rng.next() % (hi - lo)];
        /* three-way partition of [lo, hi) around pivot */
        std::size_t lt = lo, i = lo, gt = hi;
        while (i < gt) {
            if (a[i] < pivot)
                std::swap(a[i++], a[lt++]);
            else if (a[i] > pivot)
                std::swap(a[i], a[--gt]);
            else
                ++i;
        }
        if (k < lt)
            hi = lt;
        else if (k >= gt)
            lo = gt;
        else
            return pivot;  // k falls in the equal band
    }
    return a[k];
}

inline double select_kth(std::vector<double>& a, std::size_t k) {
    return select_kth(a.data(), a.size(), k);
}

// Several order statistics of one array in a single pass.  ks must be
// strictly increasing 0-based ranks; each select runs on the tail segment the
// previous one left behind, so the total cost stays near one full select.
inline void select_many(double* a, std::size_t n, const std::size_t* ks, double* out,
                        std::size_t m) {
    std::size_t base = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (i > 0 && ks[i] <= ks[i - 1])
            throw domain_error("select_many: ranks must be strictly increasing");
        if (ks[i] >= n) throw domain_error("select_many: rank out of range");
        out[i] = select_kth(a + base, n - base, ks[i] - base);
        base = ks[i];
    }
}

}  // namespace qf
