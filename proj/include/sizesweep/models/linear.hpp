#pragma once

// Linear families: logistic regression (full-batch gradient descent),
// linear SVC (full-batch subgradient descent on the hinge), and SGD
// (single-sample hinge updates over shuffled epochs).

#include <cmath>

#include "sizesweep/models/common.hpp"
#include "sizesweep/rng.hpp"

namespace sizesweep {

namespace detail {

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace detail

class LinearModel : public Model {
public:
    LinearModel(Family family, std::vector<double> w, double b, bool probabilistic)
        : family_(family), w_(std::move(w)), b_(b), probabilistic_(probabilistic) {}

    Family family() const override { return family_; }
    double threshold() const override { return probabilistic_ ? 0.5 : 0.0; }

    double score(const SparseVector& x) const override {
        double z = dot(w_, x) + b_;
        return probabilistic_ ? detail::sigmoid(z) : z;
    }

    const std::vector<double>& weights() const { return w_; }
    double bias() const { return b_; }

private:
    Family family_;
    std::vector<double> w_;
    double b_;
    bool probabilistic_;
};

// Mean L2-regularized logistic loss; the bias is unregularized. Exposed as a
// free function so optimization can be checked against finite differences.
inline double lr_loss(const std::vector<double>& w, double b,
                      const std::vector<SparseVector>& rows, const std::vector<int>& labels,
                      double lambda) {
    double loss = 0.0;
    for (size_t i = 0; i < rows.size(); ++i) {
        double z = dot(w, rows[i]) + b;
        // -log p(y_i | x_i) written to stay finite for large |z|
        double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        loss += labels[i] ? softplus - z : softplus;
    }
    loss /= double(rows.size());
    double ridge = 0.0;
    for (double v : w) ridge += v * v;
    return loss + 0.5 * lambda * ridge;
}

inline void lr_gradient(const std::vector<double>& w, double b,
                        const std::vector<SparseVector>& rows, const std::vector<int>& labels,
                        double lambda, std::vector<double>& grad_w, double& grad_b) {
    grad_w.assign(w.size(), 0.0);
    grad_b = 0.0;
    const double inv_n = 1.0 / double(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        double residual = detail::sigmoid(dot(w, rows[i]) + b) - double(labels[i]);
        add_scaled(grad_w, rows[i], residual * inv_n);
        grad_b += residual * inv_n;
    }
    for (size_t j = 0; j < w.size(); ++j) grad_w[j] += lambda * w[j];
}

// Full-batch descent from zero with step 0.5 / (1 + lambda * t). The loss is
// 0.5+lambda smooth on unit-norm rows, so this step keeps it non-increasing.
inline std::unique_ptr<LinearModel> train_lr(const Hyperparams& hp,
                                             const std::vector<SparseVector>& rows,
                                             const std::vector<int>& labels, size_t dim) {
    detail::check_training_input(rows, labels);
    std::vector<double> w(dim, 0.0), grad_w;
    double b = 0.0, grad_b = 0.0;
    for (uint32_t t = 0; t < hp.lr_epochs; ++t) {
        lr_gradient(w, b, rows, labels, hp.lr_lambda, grad_w, grad_b);
        const double step = 0.5 / (1.0 + hp.lr_lambda * double(t));
        for (size_t j = 0; j < w.size(); ++j) w[j] -= step * grad_w[j];
        b -= step * grad_b;
    }
    return std::make_unique<LinearModel>(Family::lr, std::move(w), b, true);
}

// Deterministic full-batch subgradient descent on
//   (1/n) sum hinge(y f(x)) + 0.5 * lambda * |w|^2,  lambda = 1 / (c * n),
// with step 0.5 / sqrt(t + 1). Rows at margin exactly 1 contribute no
// subgradient, which keeps training on flipped labels an exact mirror.
inline std::unique_ptr<LinearModel> train_lsvc(const Hyperparams& hp,
                                               const std::vector<SparseVector>& rows,
                                               const std::vector<int>& labels, size_t dim) {
    detail::check_training_input(rows, labels);
    if (hp.lsvc_c <= 0.0) throw std::invalid_argument("train: lsvc_c must be positive");
    const double lambda = 1.0 / (hp.lsvc_c * double(rows.size()));
    const double inv_n = 1.0 / double(rows.size());
    std::vector<double> w(dim, 0.0), grad_w(dim);
    double b = 0.0;
    for (uint32_t t = 0; t < hp.lsvc_epochs; ++t) {
        for (size_t j = 0; j < dim; ++j) grad_w[j] = lambda * w[j];
        double grad_b = 0.0;
        for (size_t i = 0; i < rows.size(); ++i) {
            const double sign = labels[i] ? 1.0 : -1.0;
            if (sign * (dot(w, rows[i]) + b) < 1.0) {
                add_scaled(grad_w, rows[i], -sign * inv_n);
                grad_b -= sign * inv_n;
            }
        }
        const double step = 0.5 / std::sqrt(double(t) + 1.0);
        for (size_t j = 0; j < dim; ++j) w[j] -= step * grad_w[j];
        b -= step * grad_b;
    }
    return std::make_unique<LinearModel>(Family::lsvc, std::move(w), b, false);
}

// Single-sample hinge updates, one shuffled pass per epoch, with step
// 1 / (1 + lambda * t) over the global update counter t. The permutation
// depends only on the seed, never the labels.
inline std::unique_ptr<LinearModel> train_sgd(const Hyperparams& hp,
                                              const std::vector<SparseVector>& rows,
                                              const std::vector<int>& labels, size_t dim,
                                              uint64_t seed) {
    detail::check_training_input(rows, labels);
    std::vector<double> w(dim, 0.0);
    double b = 0.0;
    Rng rng(seed);
    std::vector<size_t> perm(rows.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    uint64_t t = 0;
    for (uint32_t epoch = 0; epoch < hp.sgd_epochs; ++epoch) {
        rng.shuffle(perm);
        for (size_t i : perm) {
            const double step = 1.0 / (1.0 + hp.sgd_lambda * double(t));
            ++t;
            const double sign = labels[i] ? 1.0 : -1.0;
            const bool violated = sign * (dot(w, rows[i]) + b) < 1.0;
            const double shrink = 1.0 - step * hp.sgd_lambda;
            for (double& v : w) v *= shrink;
            if (violated) {
                add_scaled(w, rows[i], step * sign);
                b += step * sign;
            }
        }
    }
    return std::make_unique<LinearModel>(Family::sgd, std::move(w), b, false);
}

}  // namespace sizesweep
