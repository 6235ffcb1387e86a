#pragma once

// k-nearest-neighbour voting by cosine similarity. Rows are L2-normalized
// upstream, so similarity is a plain dot product; the zero vector is
// similarity 0 to everything. Similarity ties prefer the lower training
// index, which keeps scoring deterministic.

#include <algorithm>

#include "sizesweep/models/common.hpp"

namespace sizesweep {

class KnnModel : public Model {
public:
    KnnModel(std::vector<SparseVector> rows, std::vector<int> labels, uint32_t k)
        : rows_(std::move(rows)), labels_(std::move(labels)), k_(k) {}

    Family family() const override { return Family::knn; }
    double threshold() const override { return 0.5; }

    double score(const SparseVector& x) const override {
        std::vector<std::pair<double, uint32_t>> sims(rows_.size());
        for (size_t i = 0; i < rows_.size(); ++i) sims[i] = {dot(x, rows_[i]), uint32_t(i)};
        const size_t k = std::min<size_t>(k_, sims.size());
        std::partial_sort(sims.begin(), sims.begin() + ptrdiff_t(k), sims.end(),
                          [](const auto& a, const auto& b) {
                              if (a.first != b.first) return a.first > b.first;
                              return a.second < b.second;
                          });
        uint32_t votes = 0;
        for (size_t i = 0; i < k; ++i) votes += uint32_t(labels_[sims[i].second]);
        return double(votes) / double(k);
    }

private:
    std::vector<SparseVector> rows_;
    std::vector<int> labels_;
    uint32_t k_;
};

inline std::unique_ptr<KnnModel> train_knn(const Hyperparams& hp,
                                           const std::vector<SparseVector>& rows,
                                           const std::vector<int>& labels) {
    detail::check_training_input(rows, labels);
    if (hp.knn_k == 0) throw std::invalid_argument("train: knn_k must be >= 1");
    return std::make_unique<KnnModel>(rows, labels, hp.knn_k);
}

}  // namespace sizesweep
