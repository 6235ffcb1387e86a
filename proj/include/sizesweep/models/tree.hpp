#pragma once

// CART decision tree (Gini impurity, threshold splits on sparse features)
// and a bagged random forest over the same tree builder.
//
// Determinism: features are visited in ascending index order, candidate
// thresholds in ascending value order, and only a strictly better Gini
// improvement replaces the incumbent, so ties resolve to the lowest feature
// index and threshold. The plain tree consumes no randomness at all; forest
// randomness (bootstrap and per-node feature subsets) comes from per-tree
// seeds derived from the forest seed, independent of build order.

#include <algorithm>
#include <cmath>

#include "sizesweep/models/common.hpp"
#include "sizesweep/rng.hpp"

namespace sizesweep {

struct TreeNode {
    int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    uint32_t left = 0;
    uint32_t right = 0;
    double prob = 0.0;  // leaf: weighted positive fraction
};

namespace detail {

inline double sparse_value_at(const SparseVector& x, uint32_t feature) {
    auto it = std::lower_bound(x.indices.begin(), x.indices.end(), feature);
    if (it == x.indices.end() || *it != feature) return 0.0;
    return x.values[size_t(it - x.indices.begin())];
}

inline double tree_walk(const std::vector<TreeNode>& nodes, const SparseVector& x) {
    uint32_t at = 0;
    while (nodes[at].feature >= 0) {
        double v = sparse_value_at(x, uint32_t(nodes[at].feature));
        at = v <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
    }
    return nodes[at].prob;
}

// Weighted rows (row index, multiplicity) so bootstrap resamples reuse the
// same machinery.
struct WeightedRow {
    uint32_t row;
    uint32_t weight;
};

class TreeBuilder {
public:
    TreeBuilder(const std::vector<SparseVector>& rows, const std::vector<int>& labels,
                size_t dim, uint32_t min_split, uint32_t max_depth, bool subsample_features,
                Rng* rng)
        : rows_(rows),
          labels_(labels),
          dim_(dim),
          min_split_(min_split),
          max_depth_(max_depth),
          subsample_features_(subsample_features),
          rng_(rng),
          node_weight_(rows.size(), 0),
          feature_mask_(subsample_features ? dim : 0, 0),
          buckets_(dim) {}

    std::vector<TreeNode> build(std::vector<WeightedRow> members) {
        nodes_.clear();
        grow(std::move(members), 0);
        return std::move(nodes_);
    }

private:
    struct Candidate {
        bool found = false;
        uint32_t feature = 0;
        double threshold = 0.0;
        double cost = 0.0;
    };

    uint32_t grow(std::vector<WeightedRow> members, uint32_t depth) {
        double w_pos = 0.0, w_total = 0.0;
        for (const auto& m : members) {
            w_total += m.weight;
            if (labels_[m.row]) w_pos += m.weight;
        }
        const uint32_t index = uint32_t(nodes_.size());
        nodes_.push_back({});
        nodes_[index].prob = w_total > 0.0 ? w_pos / w_total : 0.0;

        const bool pure = w_pos == 0.0 || w_pos == w_total;
        const bool too_small = w_total < double(min_split_);
        const bool too_deep = max_depth_ > 0 && depth >= max_depth_;
        if (pure || too_small || too_deep) return index;

        Candidate best = find_split(members, w_pos, w_total);
        if (!best.found) return index;

        std::vector<WeightedRow> left, right;
        for (const auto& m : members)
            (sparse_value_at(rows_[m.row], best.feature) <= best.threshold ? left : right)
                .push_back(m);
        if (left.empty() || right.empty()) return index;  // numeric corner: keep as leaf

        members.clear();
        members.shrink_to_fit();
        nodes_[index].feature = int32_t(best.feature);
        nodes_[index].threshold = best.threshold;
        const uint32_t l = grow(std::move(left), depth + 1);
        nodes_[index].left = l;
        const uint32_t r = grow(std::move(right), depth + 1);
        nodes_[index].right = r;
        return index;
    }

    // Bucket the node's nonzero entries per feature, then sweep candidate
    // thresholds per touched feature. Cost scales with the node's nonzeros.
    Candidate find_split(const std::vector<WeightedRow>& members, double w_pos, double w_total) {
        const bool subset = subsample_features_;
        std::vector<uint32_t> chosen;
        if (subset) {
            chosen = pick_features();
            for (uint32_t j : chosen) feature_mask_[j] = 1;
        }

        touched_.clear();
        for (const auto& m : members) {
            node_weight_[m.row] = m.weight;
            const SparseVector& x = rows_[m.row];
            for (size_t k = 0; k < x.indices.size(); ++k) {
                const uint32_t j = x.indices[k];
                if (subset && !feature_mask_[j]) continue;
                if (buckets_[j].empty()) touched_.push_back(j);
                buckets_[j].push_back({x.values[k], m.row});
            }
        }
        std::sort(touched_.begin(), touched_.end());

        Candidate best;
        const double parent_cost = pair_cost(w_pos, w_total - w_pos);
        for (uint32_t j : touched_) {
            auto& present = buckets_[j];
            double nz_pos = 0.0, nz_total = 0.0;
            for (const auto& [value, row] : present) {
                nz_total += node_weight_[row];
                if (labels_[row]) nz_pos += node_weight_[row];
            }
            std::sort(present.begin(), present.end());

            // Zeros sit before the smallest stored value because tf-idf
            // features are non-negative.
            const double zero_total = w_total - nz_total;
            const double zero_pos = w_pos - nz_pos;
            double left_pos = zero_pos, left_total = zero_total;
            double prev_value = 0.0;
            bool have_left = zero_total > 0.0;
            size_t at = 0;
            while (at < present.size()) {
                const double value = present[at].first;
                if (have_left) {
                    const double threshold = 0.5 * (prev_value + value);
                    const double right_pos = w_pos - left_pos;
                    const double right_total = w_total - left_total;
                    const double cost = pair_cost(left_pos, left_total - left_pos) +
                                        pair_cost(right_pos, right_total - right_pos);
                    if (cost < parent_cost - 1e-12 && (!best.found || cost < best.cost)) {
                        best = {true, j, threshold, cost};
                    }
                }
                while (at < present.size() && present[at].first == value) {
                    const uint32_t weight = node_weight_[present[at].second];
                    left_total += weight;
                    if (labels_[present[at].second]) left_pos += weight;
                    ++at;
                }
                prev_value = value;
                have_left = true;
            }
            present.clear();
        }

        for (const auto& m : members) node_weight_[m.row] = 0;
        if (subset)
            for (uint32_t j : chosen) feature_mask_[j] = 0;
        return best;
    }

    // Weighted Gini cost contribution of one child: |child| * gini(child).
    static double pair_cost(double pos, double neg) {
        const double total = pos + neg;
        if (total <= 0.0) return 0.0;
        return total - (pos * pos + neg * neg) / total;
    }

    std::vector<uint32_t> pick_features() {
        std::vector<uint32_t> features;
        uint64_t k = uint64_t(std::floor(std::sqrt(double(dim_))));
        if (k < 1) k = 1;
        if (k > dim_) k = uint64_t(dim_);
        // Floyd's sampling: k distinct indices out of dim_.
        for (uint64_t i = dim_ - k; i < dim_; ++i) {
            uint64_t j = rng_->below(i + 1);
            if (std::find(features.begin(), features.end(), uint32_t(j)) != features.end())
                features.push_back(uint32_t(i));
            else
                features.push_back(uint32_t(j));
        }
        return features;
    }

    const std::vector<SparseVector>& rows_;
    const std::vector<int>& labels_;
    size_t dim_;
    uint32_t min_split_;
    uint32_t max_depth_;
    bool subsample_features_;
    Rng* rng_;
    std::vector<uint32_t> node_weight_;
    std::vector<uint8_t> feature_mask_;
    std::vector<std::vector<std::pair<double, uint32_t>>> buckets_;
    std::vector<uint32_t> touched_;
    std::vector<TreeNode> nodes_;
};

}  // namespace detail

class DecisionTreeModel : public Model {
public:
    explicit DecisionTreeModel(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}
    Family family() const override { return Family::dt; }
    double threshold() const override { return 0.5; }
    double score(const SparseVector& x) const override { return detail::tree_walk(nodes_, x); }
    const std::vector<TreeNode>& nodes() const { return nodes_; }

private:
    std::vector<TreeNode> nodes_;
};

class RandomForestModel : public Model {
public:
    explicit RandomForestModel(std::vector<std::vector<TreeNode>> trees)
        : trees_(std::move(trees)) {}
    Family family() const override { return Family::rf; }
    double threshold() const override { return 0.5; }

    double score(const SparseVector& x) const override {
        double acc = 0.0;
        for (const auto& tree : trees_) acc += detail::tree_walk(tree, x);
        return acc / double(trees_.size());
    }

    size_t tree_count() const { return trees_.size(); }

private:
    std::vector<std::vector<TreeNode>> trees_;
};

inline std::unique_ptr<DecisionTreeModel> train_dt(const Hyperparams& hp,
                                                   const std::vector<SparseVector>& rows,
                                                   const std::vector<int>& labels, size_t dim) {
    detail::check_training_input(rows, labels);
    if (hp.dt_min_split < 2) throw std::invalid_argument("train: dt_min_split must be >= 2");
    detail::TreeBuilder builder(rows, labels, dim, hp.dt_min_split, hp.dt_max_depth, false,
                                nullptr);
    std::vector<detail::WeightedRow> all(rows.size());
    for (uint32_t r = 0; r < rows.size(); ++r) all[r] = {r, 1};
    return std::make_unique<DecisionTreeModel>(builder.build(std::move(all)));
}

inline std::unique_ptr<RandomForestModel> train_rf(const Hyperparams& hp,
                                                   const std::vector<SparseVector>& rows,
                                                   const std::vector<int>& labels, size_t dim,
                                                   uint64_t seed) {
    detail::check_training_input(rows, labels);
    if (hp.rf_trees == 0) throw std::invalid_argument("train: rf_trees must be >= 1");
    if (hp.dt_min_split < 2) throw std::invalid_argument("train: dt_min_split must be >= 2");

    const uint32_t n = uint32_t(rows.size());
    std::vector<std::vector<TreeNode>> trees;
    trees.reserve(hp.rf_trees);
    std::vector<uint32_t> draw_counts(n);
    for (uint32_t t = 0; t < hp.rf_trees; ++t) {
        Rng tree_rng(stable_hash({seed, t}));
        detail::TreeBuilder builder(rows, labels, dim, hp.dt_min_split, hp.dt_max_depth,
                                    hp.rf_feature_subsample, &tree_rng);
        std::vector<detail::WeightedRow> members;
        if (hp.rf_bootstrap) {
            std::fill(draw_counts.begin(), draw_counts.end(), 0u);
            for (uint32_t i = 0; i < n; ++i) ++draw_counts[tree_rng.below(n)];
            for (uint32_t r = 0; r < n; ++r)
                if (draw_counts[r]) members.push_back({r, draw_counts[r]});
        } else {
            members.resize(n);
            for (uint32_t r = 0; r < n; ++r) members[r] = {r, 1};
        }
        trees.push_back(builder.build(std::move(members)));
    }
    return std::make_unique<RandomForestModel>(std::move(trees));
}

}  // namespace sizesweep
