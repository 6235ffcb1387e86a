#pragma once

// RBF-kernel SVC trained with sequential minimal optimization.
//
// The working-pair loop alternates full sweeps with sweeps over non-bound
// multipliers until no multiplier changes, in index order with a
// deterministic second-choice heuristic (largest |E1 - E2|, lowest index on
// ties), so training is reproducible. A pair is skipped when the kernel
// curvature vanishes (duplicate points under RBF). Sweeps are capped at
// 10 * n as a safety valve; tolerance applies to the KKT conditions.

#include <algorithm>
#include <cmath>

#include "sizesweep/models/common.hpp"

namespace sizesweep {

class SvcModel : public Model {
public:
    SvcModel(std::vector<SparseVector> support, std::vector<double> coeff, double bias,
             double gamma)
        : support_(std::move(support)), coeff_(std::move(coeff)), bias_(bias), gamma_(gamma) {}

    Family family() const override { return Family::svc; }
    double threshold() const override { return 0.0; }

    double score(const SparseVector& x) const override {
        double acc = bias_;
        const double xx = squared_norm(x);
        for (size_t i = 0; i < support_.size(); ++i) {
            double d2 = xx + squared_norm(support_[i]) - 2.0 * dot(x, support_[i]);
            acc += coeff_[i] * std::exp(-gamma_ * (d2 < 0.0 ? 0.0 : d2));
        }
        return acc;
    }

    size_t support_count() const { return support_.size(); }
    double gamma() const { return gamma_; }

private:
    std::vector<SparseVector> support_;
    std::vector<double> coeff_;  // alpha_i * y_i
    double bias_;
    double gamma_;
};

namespace detail {

class SmoSolver {
public:
    SmoSolver(const std::vector<SparseVector>& rows, const std::vector<int>& labels,
              double c, double gamma, double tol)
        : rows_(rows), c_(c), gamma_(gamma), tol_(tol), n_(rows.size()) {
        y_.resize(n_);
        for (size_t i = 0; i < n_; ++i) y_[i] = labels[i] ? 1.0 : -1.0;
        gram_.assign(n_ * n_, 0.0);
        std::vector<double> sqn(n_);
        for (size_t i = 0; i < n_; ++i) sqn[i] = squared_norm(rows[i]);
        for (size_t i = 0; i < n_; ++i) {
            gram_[i * n_ + i] = 1.0;
            for (size_t j = i + 1; j < n_; ++j) {
                double d2 = sqn[i] + sqn[j] - 2.0 * dot(rows[i], rows[j]);
                double k = std::exp(-gamma_ * (d2 < 0.0 ? 0.0 : d2));
                gram_[i * n_ + j] = k;
                gram_[j * n_ + i] = k;
            }
        }
        alpha_.assign(n_, 0.0);
        f_.assign(n_, 0.0);
        b_ = 0.0;
    }

    void solve() {
        const uint64_t max_sweeps = 10 * uint64_t(n_);
        bool examine_all = true;
        uint64_t sweeps = 0;
        while (sweeps < max_sweeps) {
            ++sweeps;
            size_t changed = 0;
            for (size_t i = 0; i < n_; ++i) {
                if (!examine_all && !non_bound(i)) continue;
                changed += examine(i);
            }
            if (examine_all) {
                if (changed == 0) break;
                examine_all = false;
            } else if (changed == 0) {
                examine_all = true;
            }
        }
    }

    const std::vector<double>& alphas() const { return alpha_; }
    double bias() const { return b_; }

    double decision(size_t i) const { return f_[i] + b_; }

private:
    bool non_bound(size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < c_; }

    double error(size_t i) const { return f_[i] + b_ - y_[i]; }

    bool examine(size_t i2) {
        const double e2 = error(i2);
        const double r2 = e2 * y_[i2];
        const bool violated = (r2 < -tol_ && alpha_[i2] < c_) || (r2 > tol_ && alpha_[i2] > 0.0);
        if (!violated) return false;

        // Second choice: largest |E1 - E2| among non-bound multipliers.
        size_t best = n_;
        double best_gap = -1.0;
        for (size_t i = 0; i < n_; ++i) {
            if (i == i2 || !non_bound(i)) continue;
            double gap = std::abs(error(i) - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n_ && take_step(best, i2)) return true;
        for (size_t i = 0; i < n_; ++i)
            if (i != i2 && non_bound(i) && take_step(i, i2)) return true;
        for (size_t i = 0; i < n_; ++i)
            if (i != i2 && !non_bound(i) && take_step(i, i2)) return true;
        return false;
    }

    bool take_step(size_t i1, size_t i2) {
        const double a1_old = alpha_[i1], a2_old = alpha_[i2];
        const double y1 = y_[i1], y2 = y_[i2];
        const double e1 = error(i1), e2 = error(i2);
        const double s = y1 * y2;

        double lo, hi;
        if (s < 0.0) {
            lo = std::max(0.0, a2_old - a1_old);
            hi = std::min(c_, c_ + a2_old - a1_old);
        } else {
            lo = std::max(0.0, a1_old + a2_old - c_);
            hi = std::min(c_, a1_old + a2_old);
        }
        if (lo >= hi) return false;

        const double k11 = gram_[i1 * n_ + i1];
        const double k12 = gram_[i1 * n_ + i2];
        const double k22 = gram_[i2 * n_ + i2];
        const double eta = k11 + k22 - 2.0 * k12;
        if (eta <= 0.0) return false;  // duplicate points under RBF

        double a2 = a2_old + y2 * (e1 - e2) / eta;
        a2 = std::clamp(a2, lo, hi);
        const double kEps = 1e-7;
        if (std::abs(a2 - a2_old) < kEps * (a2 + a2_old + kEps)) return false;
        const double a1 = a1_old + s * (a2_old - a2);

        const double d1 = y1 * (a1 - a1_old);
        const double d2 = y2 * (a2 - a2_old);
        const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
        double b_new;
        if (a1 > 0.0 && a1 < c_) b_new = b1;
        else if (a2 > 0.0 && a2 < c_) b_new = b2;
        else b_new = 0.5 * (b1 + b2);

        for (size_t i = 0; i < n_; ++i)
            f_[i] += d1 * gram_[i1 * n_ + i] + d2 * gram_[i2 * n_ + i];
        alpha_[i1] = a1;
        alpha_[i2] = a2;
        b_ = b_new;
        return true;
    }

    const std::vector<SparseVector>& rows_;
    double c_, gamma_, tol_;
    size_t n_;
    std::vector<double> y_, gram_, alpha_, f_;
    double b_;
};

}  // namespace detail

inline std::unique_ptr<SvcModel> train_svc(const Hyperparams& hp,
                                           const std::vector<SparseVector>& rows,
                                           const std::vector<int>& labels, size_t dim) {
    detail::check_training_input(rows, labels);
    if (hp.svc_c <= 0.0) throw std::invalid_argument("train: svc_c must be positive");
    if (hp.svc_tol <= 0.0) throw std::invalid_argument("train: svc_tol must be positive");
    const double gamma = hp.svc_gamma > 0.0 ? hp.svc_gamma : (dim > 0 ? 1.0 / double(dim) : 1.0);

    detail::SmoSolver solver(rows, labels, hp.svc_c, gamma, hp.svc_tol);
    solver.solve();

    std::vector<SparseVector> support;
    std::vector<double> coeff;
    const auto& alpha = solver.alphas();
    for (size_t i = 0; i < rows.size(); ++i) {
        if (alpha[i] <= 0.0) continue;
        support.push_back(rows[i]);
        coeff.push_back(alpha[i] * (labels[i] ? 1.0 : -1.0));
    }
    return std::make_unique<SvcModel>(std::move(support), std::move(coeff), solver.bias(), gamma);
}

}  // namespace sizesweep
