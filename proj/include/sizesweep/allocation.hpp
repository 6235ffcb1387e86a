#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace sizesweep {

// Largest-remainder apportionment of `total` units across buckets in
// proportion to `quotas` (non-negative, not all zero). Floors every quota's
// share, then hands remaining units to the largest fractional remainders;
// remainder ties break toward the lower bucket index. The 1e-9 slack guards
// shares that are integral in exact arithmetic (e.g. 0.2 * 600) from binary
// representation drift.
inline std::vector<uint64_t> largest_remainder(uint64_t total,
                                               const std::vector<double>& quotas) {
    if (quotas.empty()) throw std::invalid_argument("largest_remainder: no buckets");
    double quota_sum = 0.0;
    for (double q : quotas) {
        if (q < 0.0 || !std::isfinite(q))
            throw std::invalid_argument("largest_remainder: bad quota");
        quota_sum += q;
    }
    if (quota_sum <= 0.0) throw std::invalid_argument("largest_remainder: zero quota sum");

    const size_t k = quotas.size();
    std::vector<uint64_t> out(k);
    std::vector<double> frac(k);
    uint64_t assigned = 0;
    for (size_t i = 0; i < k; ++i) {
        double share = double(total) * (quotas[i] / quota_sum);
        double base = std::floor(share + 1e-9);
        out[i] = uint64_t(base);
        frac[i] = share - base;
        assigned += out[i];
    }
    if (assigned > total) throw std::logic_error("largest_remainder: overflow");
    uint64_t left = total - assigned;
    std::vector<size_t> order(k);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return frac[a] > frac[b]; });
    for (size_t i = 0; left > 0; i = (i + 1) % k) {
        ++out[order[i]];
        --left;
    }
    return out;
}

}  // namespace sizesweep
