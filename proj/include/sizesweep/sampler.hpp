#pragma once

// Stratified sampling and splitting.
//
// draw_sample pulls n documents at an exact class mix: floor(n * prop_pos)
// positives (a 1e-9 slack absorbs binary drift in n * prop_pos), the rest
// negatives, each class drawn uniformly without replacement. split_sample
// cuts a sample 60/20/20, sizing splits and per-split positive counts by
// largest-remainder allocation so every split mirrors the sample's class mix
// as closely as integers allow.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sizesweep/allocation.hpp"
#include "sizesweep/corpus.hpp"
#include "sizesweep/rng.hpp"

namespace sizesweep {

inline constexpr double kSplitRatios[3] = {0.6, 0.2, 0.2};

struct Sample {
    std::vector<size_t> indices;  // positions in the source corpus; positives first
    uint64_t n_pos = 0;
    uint64_t n_neg = 0;
};

inline Sample draw_sample(const Corpus& corpus, uint64_t n, double prop_pos, uint64_t seed) {
    if (n == 0) throw std::invalid_argument("draw_sample: n must be >= 1");
    if (prop_pos < 0.0 || prop_pos > 1.0)
        throw std::invalid_argument("draw_sample: prop_pos outside [0,1]");
    if (n > corpus.size())
        throw std::runtime_error("draw_sample: corpus has " + std::to_string(corpus.size()) +
                                 " documents, need " + std::to_string(n));

    const auto n_pos = uint64_t(std::floor(double(n) * prop_pos + 1e-9));
    const uint64_t n_neg = n - n_pos;

    std::vector<size_t> pos_pool, neg_pool;
    for (size_t i = 0; i < corpus.size(); ++i)
        (corpus[i].label ? pos_pool : neg_pool).push_back(i);
    if (n_pos > pos_pool.size())
        throw std::runtime_error("draw_sample: need " + std::to_string(n_pos) +
                                 " positive documents, corpus has " +
                                 std::to_string(pos_pool.size()));
    if (n_neg > neg_pool.size())
        throw std::runtime_error("draw_sample: need " + std::to_string(n_neg) +
                                 " negative documents, corpus has " +
                                 std::to_string(neg_pool.size()));

    Rng rng(seed);
    rng.shuffle(pos_pool);
    rng.shuffle(neg_pool);

    Sample s;
    s.n_pos = n_pos;
    s.n_neg = n_neg;
    s.indices.assign(pos_pool.begin(), pos_pool.begin() + ptrdiff_t(n_pos));
    s.indices.insert(s.indices.end(), neg_pool.begin(), neg_pool.begin() + ptrdiff_t(n_neg));
    return s;
}

struct SplitSet {
    std::vector<size_t> train;  // corpus indices, ascending
    std::vector<size_t> val;
    std::vector<size_t> test;

    const std::vector<size_t>& part(int k) const { return k == 0 ? train : k == 1 ? val : test; }
};

inline SplitSet split_sample(const Corpus& corpus, const Sample& sample, uint64_t seed) {
    if (sample.indices.empty()) throw std::invalid_argument("split_sample: empty sample");
    if (sample.n_pos + sample.n_neg != sample.indices.size())
        throw std::invalid_argument("split_sample: class counts disagree with sample size");
    for (size_t i = 0; i < sample.indices.size(); ++i) {
        if (sample.indices[i] >= corpus.size())
            throw std::invalid_argument("split_sample: sample index out of range");
        if (corpus[sample.indices[i]].label != (i < sample.n_pos ? 1 : 0))
            throw std::invalid_argument("split_sample: sample labels out of order");
    }
    const uint64_t n = sample.indices.size();
    const std::vector<double> ratios(std::begin(kSplitRatios), std::end(kSplitRatios));

    auto sizes = largest_remainder(n, ratios);
    // Positives are apportioned against realized split sizes, not the raw
    // ratios: each split's positive count then sits within one unit of
    // size * (sample positive share), so its mix is off by less than
    // 1/|split|.
    auto pos_counts = largest_remainder(
        sample.n_pos, {double(sizes[0]), double(sizes[1]), double(sizes[2])});

    // Largest-remainder runs for n and for n_pos are independent, so in rare
    // integer corners a split could be promised more positives than seats;
    // shift the surplus to the split with the most room (lowest index wins
    // ties) before deriving negative counts.
    for (int k = 0; k < 3; ++k) {
        while (pos_counts[k] > sizes[k]) {
            int roomiest = -1;
            uint64_t best_room = 0;
            for (int j = 0; j < 3; ++j) {
                uint64_t room = sizes[j] - std::min(sizes[j], pos_counts[j]);
                if (room > best_room) {
                    best_room = room;
                    roomiest = j;
                }
            }
            if (roomiest < 0) throw std::logic_error("split_sample: no room for positives");
            --pos_counts[k];
            ++pos_counts[roomiest];
        }
    }

    std::vector<size_t> pos_members(sample.indices.begin(),
                                    sample.indices.begin() + ptrdiff_t(sample.n_pos));
    std::vector<size_t> neg_members(sample.indices.begin() + ptrdiff_t(sample.n_pos),
                                    sample.indices.end());
    Rng rng(seed);
    rng.shuffle(pos_members);
    rng.shuffle(neg_members);

    SplitSet out;
    size_t pos_at = 0, neg_at = 0;
    for (int k = 0; k < 3; ++k) {
        std::vector<size_t>& dest = k == 0 ? out.train : k == 1 ? out.val : out.test;
        const uint64_t take_pos = pos_counts[k];
        const uint64_t take_neg = sizes[k] - take_pos;
        dest.insert(dest.end(), pos_members.begin() + ptrdiff_t(pos_at),
                    pos_members.begin() + ptrdiff_t(pos_at + take_pos));
        dest.insert(dest.end(), neg_members.begin() + ptrdiff_t(neg_at),
                    neg_members.begin() + ptrdiff_t(neg_at + take_neg));
        pos_at += take_pos;
        neg_at += take_neg;
        std::sort(dest.begin(), dest.end());
    }
    return out;
}

enum class SplitHealth { ok, degenerate };

// A split set is degenerate when any split lacks one of the two classes
// entirely (including empty splits).
inline SplitHealth check_degenerate(const Corpus& corpus, const SplitSet& splits) {
    for (int k = 0; k < 3; ++k) {
        uint64_t pos = 0, neg = 0;
        for (size_t i : splits.part(k)) (corpus[i].label ? pos : neg)++;
        if (pos == 0 || neg == 0) return SplitHealth::degenerate;
    }
    return SplitHealth::ok;
}

}  // namespace sizesweep
