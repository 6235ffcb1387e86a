#pragma once

// Multinomial naive Bayes over raw term counts with additive smoothing.

#include <cmath>

#include "sizesweep/models/common.hpp"

namespace sizesweep {

class NaiveBayesModel : public Model {
public:
    NaiveBayesModel(std::vector<double> log_theta_neg, std::vector<double> log_theta_pos,
                    double log_prior_neg, double log_prior_pos, int only_class)
        : log_theta_neg_(std::move(log_theta_neg)),
          log_theta_pos_(std::move(log_theta_pos)),
          log_prior_neg_(log_prior_neg),
          log_prior_pos_(log_prior_pos),
          only_class_(only_class) {}

    Family family() const override { return Family::nb; }
    double threshold() const override { return 0.5; }

    // P(class 1 | x); with a single training class the prior is degenerate
    // and the score is that class outright.
    double score(const SparseVector& x) const override {
        if (only_class_ >= 0) return double(only_class_);
        double z_neg = log_prior_neg_ + dot(log_theta_neg_, x);
        double z_pos = log_prior_pos_ + dot(log_theta_pos_, x);
        // logistic of the log-odds, computed overflow-safe
        double diff = z_neg - z_pos;
        if (diff > 0.0) {
            double e = std::exp(-diff);
            return e / (1.0 + e);
        }
        return 1.0 / (1.0 + std::exp(diff));
    }

    // Normalized posterior pair (class 0, class 1).
    std::pair<double, double> posterior(const SparseVector& x) const {
        double p1 = score(x);
        return {1.0 - p1, p1};
    }

private:
    std::vector<double> log_theta_neg_, log_theta_pos_;
    double log_prior_neg_, log_prior_pos_;
    int only_class_;  // -1 when both classes were seen in training
};

inline std::unique_ptr<NaiveBayesModel> train_nb(const Hyperparams& hp,
                                                 const std::vector<SparseVector>& rows,
                                                 const std::vector<int>& labels, size_t dim) {
    detail::check_training_input(rows, labels);
    if (hp.nb_alpha <= 0.0) throw std::invalid_argument("train: nb_alpha must be positive");

    std::vector<double> counts_neg(dim, 0.0), counts_pos(dim, 0.0);
    double total_neg = 0.0, total_pos = 0.0;
    uint64_t docs_neg = 0, docs_pos = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        auto& counts = labels[i] ? counts_pos : counts_neg;
        (labels[i] ? docs_pos : docs_neg)++;
        for (size_t k = 0; k < rows[i].indices.size(); ++k) {
            counts[rows[i].indices[k]] += rows[i].values[k];
            (labels[i] ? total_pos : total_neg) += rows[i].values[k];
        }
    }

    int only_class = -1;
    if (docs_neg == 0) only_class = 1;
    if (docs_pos == 0) only_class = 0;

    std::vector<double> log_theta_neg(dim), log_theta_pos(dim);
    const double denom_neg = total_neg + hp.nb_alpha * double(dim);
    const double denom_pos = total_pos + hp.nb_alpha * double(dim);
    for (size_t j = 0; j < dim; ++j) {
        log_theta_neg[j] = std::log((counts_neg[j] + hp.nb_alpha) / denom_neg);
        log_theta_pos[j] = std::log((counts_pos[j] + hp.nb_alpha) / denom_pos);
    }
    const double n = double(rows.size());
    const double log_prior_neg = docs_neg ? std::log(double(docs_neg) / n) : 0.0;
    const double log_prior_pos = docs_pos ? std::log(double(docs_pos) / n) : 0.0;
    return std::make_unique<NaiveBayesModel>(std::move(log_theta_neg), std::move(log_theta_pos),
                                             log_prior_neg, log_prior_pos, only_class);
}

}  // namespace sizesweep
