#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace sizesweep {

// Sorted sparse vector: indices strictly increasing, one value per index.
// An empty vector is the zero vector (legal; produced by all-OOV documents).
struct SparseVector {
    std::vector<uint32_t> indices;
    std::vector<double> values;

    size_t nnz() const { return indices.size(); }
    bool is_zero() const { return indices.empty(); }

    void push(uint32_t index, double value) {
        indices.push_back(index);
        values.push_back(value);
    }
};

inline double dot(const SparseVector& a, const SparseVector& b) {
    double acc = 0.0;
    size_t i = 0, j = 0;
    while (i < a.indices.size() && j < b.indices.size()) {
        if (a.indices[i] == b.indices[j]) {
            acc += a.values[i] * b.values[j];
            ++i;
            ++j;
        } else if (a.indices[i] < b.indices[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return acc;
}

inline double dot(const std::vector<double>& dense, const SparseVector& s) {
    double acc = 0.0;
    for (size_t i = 0; i < s.indices.size(); ++i) acc += dense[s.indices[i]] * s.values[i];
    return acc;
}

inline double squared_norm(const SparseVector& a) {
    double acc = 0.0;
    for (double v : a.values) acc += v * v;
    return acc;
}

inline double l2_norm(const SparseVector& a) { return std::sqrt(squared_norm(a)); }

inline void add_scaled(std::vector<double>& dense, const SparseVector& s, double scale) {
    for (size_t i = 0; i < s.indices.size(); ++i) dense[s.indices[i]] += scale * s.values[i];
}

inline double squared_distance(const SparseVector& a, const SparseVector& b) {
    double d = squared_norm(a) + squared_norm(b) - 2.0 * dot(a, b);
    return d < 0.0 ? 0.0 : d;
}

}  // namespace sizesweep
