#pragma once

#include "sizesweep/models/common.hpp"
#include "sizesweep/models/knn.hpp"
#include "sizesweep/models/linear.hpp"
#include "sizesweep/models/naive_bayes.hpp"
#include "sizesweep/models/svm.hpp"
#include "sizesweep/models/tree.hpp"

namespace sizesweep {

// Trains one family on prepared feature rows. The seed only matters to the
// stochastic families (RF bootstrap/feature draws, SGD shuffles); the rest
// are deterministic functions of the data.
inline std::unique_ptr<Model> train_model(Family family, const Hyperparams& hp,
                                          const std::vector<SparseVector>& rows,
                                          const std::vector<int>& labels, size_t dim,
                                          uint64_t seed) {
    switch (family) {
        case Family::lr: return train_lr(hp, rows, labels, dim);
        case Family::nb: return train_nb(hp, rows, labels, dim);
        case Family::dt: return train_dt(hp, rows, labels, dim);
        case Family::rf: return train_rf(hp, rows, labels, dim, seed);
        case Family::knn: return train_knn(hp, rows, labels);
        case Family::lsvc: return train_lsvc(hp, rows, labels, dim);
        case Family::svc: return train_svc(hp, rows, labels, dim);
        case Family::sgd: return train_sgd(hp, rows, labels, dim, seed);
    }
    throw std::logic_error("train_model: unhandled family");
}

}  // namespace sizesweep
