#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sizesweep/rng.hpp"

namespace sizesweep {

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    uint64_t support = 0;
};

struct MetricsReport {
    ClassMetrics cls[2];
    double f1_weighted = 0.0;
};

namespace detail {
inline double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }
}

// Per-class precision/recall/F1 plus support-weighted F1 for binary labels.
// All 0/0 cases are defined as 0.
inline MetricsReport classification_metrics(const std::vector<int>& y_true,
                                            const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("classification_metrics: length mismatch");
    if (y_true.empty())
        throw std::invalid_argument("classification_metrics: empty input");
    uint64_t tp[2] = {0, 0}, fp[2] = {0, 0}, fn[2] = {0, 0}, support[2] = {0, 0};
    for (size_t i = 0; i < y_true.size(); ++i) {
        int t = y_true[i], p = y_pred[i];
        if (t != 0 && t != 1) throw std::invalid_argument("classification_metrics: label not in {0,1}");
        if (p != 0 && p != 1) throw std::invalid_argument("classification_metrics: prediction not in {0,1}");
        ++support[t];
        if (p == t) {
            ++tp[t];
        } else {
            ++fn[t];
            ++fp[p];
        }
    }
    MetricsReport r;
    for (int c = 0; c < 2; ++c) {
        ClassMetrics& m = r.cls[c];
        m.support = support[c];
        m.precision = detail::safe_ratio(double(tp[c]), double(tp[c] + fp[c]));
        m.recall = detail::safe_ratio(double(tp[c]), double(tp[c] + fn[c]));
        m.f1 = detail::safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    }
    r.f1_weighted = detail::safe_ratio(
        double(support[0]) * r.cls[0].f1 + double(support[1]) * r.cls[1].f1,
        double(support[0] + support[1]));
    return r;
}

inline double weighted_f1(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    return classification_metrics(y_true, y_pred).f1_weighted;
}

// Rank-based ROC AUC equal to the Mann-Whitney U statistic scaled to [0,1];
// tied scores count one half. Raw scores go in unchanged, so values below 0.5
// are possible and meaningful. Throws if only one class is present.
inline double auc_roc(const std::vector<int>& y_true, const std::vector<double>& scores) {
    if (y_true.size() != scores.size())
        throw std::invalid_argument("auc_roc: length mismatch");
    const size_t n = y_true.size();
    uint64_t pos = 0, neg = 0;
    for (int t : y_true) {
        if (t != 0 && t != 1) throw std::invalid_argument("auc_roc: label not in {0,1}");
        t ? ++pos : ++neg;
    }
    for (double s : scores)
        if (std::isnan(s)) throw std::invalid_argument("auc_roc: NaN score");
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("auc_roc: AUC undefined with a single class");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    // 2*U accumulated exactly in integers: within a tie group every positive
    // receives (rank sum below group) + half the group's internal span.
    uint64_t u2 = 0;
    size_t i = 0;
    uint64_t negatives_below = 0;
    while (i < n) {
        size_t j = i;
        uint64_t group_pos = 0, group_neg = 0;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            y_true[order[j]] ? ++group_pos : ++group_neg;
            ++j;
        }
        u2 += group_pos * (2 * negatives_below + group_neg);
        negatives_below += group_neg;
        i = j;
    }
    const uint64_t d2 = 2 * pos * neg;
    // Computing the smaller tail keeps auc(y,s) + auc(y,-s) == 1 exact in
    // floating point.
    if (u2 * 2 <= d2) return double(u2) / double(d2);
    return 1.0 - double(d2 - u2) / double(d2);
}

struct BootstrapCi {
    double lo = 0.0;
    double hi = 0.0;
};

// Percentile bootstrap CI for weighted F1. Resamples (y_true, y_pred) pairs
// jointly, B times, then takes nearest-rank percentiles at level/2 tails.
inline BootstrapCi bootstrap_f1_ci(const std::vector<int>& y_true,
                                   const std::vector<int>& y_pred,
                                   uint32_t replicates,
                                   double level,
                                   uint64_t seed) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("bootstrap_f1_ci: length mismatch");
    if (y_true.empty())
        throw std::invalid_argument("bootstrap_f1_ci: empty input");
    if (replicates == 0)
        throw std::invalid_argument("bootstrap_f1_ci: zero replicates");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("bootstrap_f1_ci: level outside (0,1)");
    const size_t n = y_true.size();
    Rng rng(seed);
    std::vector<int> rt(n), rp(n);
    std::vector<double> stats(replicates);
    for (uint32_t b = 0; b < replicates; ++b) {
        for (size_t i = 0; i < n; ++i) {
            size_t k = size_t(rng.below(n));
            rt[i] = y_true[k];
            rp[i] = y_pred[k];
        }
        stats[b] = weighted_f1(rt, rp);
    }
    std::sort(stats.begin(), stats.end());
    const double tail = (1.0 - level) / 2.0;
    auto nearest_rank = [&](double q) {
        // The 1e-9 slack keeps ranks that are integers in exact arithmetic
        // (e.g. 0.025 * 1000) from drifting up a slot in binary.
        double r = std::ceil(q * double(replicates) - 1e-9);
        if (r < 1.0) r = 1.0;
        if (r > double(replicates)) r = double(replicates);
        return stats[size_t(r) - 1];
    };
    return {nearest_rank(tail), nearest_rank(1.0 - tail)};
}

}  // namespace sizesweep
