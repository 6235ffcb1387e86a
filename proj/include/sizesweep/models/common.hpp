#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "sizesweep/sparse.hpp"

namespace sizesweep {

enum class Family { lr, nb, dt, rf, knn, lsvc, svc, sgd };

inline constexpr std::array<Family, 8> kAllFamilies = {
    Family::lr, Family::nb, Family::dt, Family::rf,
    Family::knn, Family::lsvc, Family::svc, Family::sgd};

inline const char* family_name(Family f) {
    switch (f) {
        case Family::lr: return "LR";
        case Family::nb: return "NB";
        case Family::dt: return "DT";
        case Family::rf: return "RF";
        case Family::knn: return "KNN";
        case Family::lsvc: return "LSVC";
        case Family::svc: return "SVC";
        case Family::sgd: return "SGD";
    }
    return "?";
}

inline Family family_from_name(const std::string& name) {
    for (Family f : kAllFamilies)
        if (name == family_name(f)) return f;
    throw std::invalid_argument("unknown model family: '" + name + "'");
}

// Naive Bayes consumes raw term counts; every other family consumes
// L2-normalized tf-idf rows.
inline bool consumes_raw_counts(Family f) { return f == Family::nb; }

struct Hyperparams {
    double lr_lambda = 1e-4;
    uint32_t lr_epochs = 200;

    double nb_alpha = 1.0;

    uint32_t dt_min_split = 2;
    uint32_t dt_max_depth = 0;  // 0 = unbounded

    uint32_t rf_trees = 100;
    bool rf_bootstrap = true;
    bool rf_feature_subsample = true;  // floor(sqrt(d)) features per split

    uint32_t knn_k = 5;

    double lsvc_c = 1.0;  // hinge weight; ridge term is 1/(c * n)
    uint32_t lsvc_epochs = 200;

    double svc_c = 1.0;
    double svc_gamma = 0.0;  // 0 = 1/d
    double svc_tol = 1e-3;

    double sgd_lambda = 1e-4;
    uint32_t sgd_epochs = 50;
};

// A trained binary classifier. score() is a class-1 probability for LR, NB,
// DT, RF, and KNN (threshold 0.5) and a signed margin for LSVC, SVC, and SGD
// (threshold 0). predict() is 1 only on a strict threshold crossing, so a
// score landing exactly on the threshold goes to class 0.
class Model {
public:
    virtual ~Model() = default;
    virtual Family family() const = 0;
    virtual double score(const SparseVector& x) const = 0;
    virtual double threshold() const = 0;

    int predict(const SparseVector& x) const { return score(x) > threshold() ? 1 : 0; }

    std::vector<double> score_all(const std::vector<SparseVector>& rows) const {
        std::vector<double> out(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) out[i] = score(rows[i]);
        return out;
    }

    std::vector<int> predict_all(const std::vector<SparseVector>& rows) const {
        std::vector<int> out(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) out[i] = predict(rows[i]);
        return out;
    }
};

namespace detail {

inline void check_training_input(const std::vector<SparseVector>& rows,
                                 const std::vector<int>& labels) {
    if (rows.empty()) throw std::invalid_argument("train: empty training set");
    if (rows.size() != labels.size())
        throw std::invalid_argument("train: rows and labels disagree");
    for (int y : labels)
        if (y != 0 && y != 1) throw std::invalid_argument("train: label not in {0,1}");
}

}  // namespace detail

}  // namespace sizesweep
