#pragma once

// Text normalization and TF-IDF featurization.
//
// normalize() lowercases, strips <...> markup, maps punctuation to spaces,
// splits on whitespace, removes stopwords (embedded 127-word English list),
// applies a small suffix-stripping stemmer, and drops empty tokens. Stopword
// and number filters run again after stemming so the pipeline is idempotent:
// normalizing the joined output of normalize() reproduces it exactly.
//
// The stemmer applies the first matching rule repeatedly until none applies
// (a fixed point), which keeps chained suffixes like "walkings" stable:
//   -ies -> -y   (token length > 4)
//   -es  -> ""   (length > 3)
//   -s   -> ""   (length > 3, not -ss)
//   -ing -> ""   (length > 5)
//   -ed  -> ""   (length > 4)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sizesweep/sparse.hpp"

namespace sizesweep {

struct NormalizeOptions {
    bool stem = true;
    bool drop_numbers = false;
};

inline const std::vector<std::string>& stopword_list() {
    static const std::vector<std::string> words = {
        "a", "about", "above", "after", "again", "against", "all", "am", "an", "and",
        "any", "are", "as", "at", "be", "because", "been", "before", "being", "below",
        "between", "both", "but", "by", "can", "did", "do", "does", "doing", "don",
        "down", "during", "each", "few", "for", "from", "further", "had", "has", "have",
        "having", "he", "her", "here", "hers", "herself", "him", "himself", "his", "how",
        "i", "if", "in", "into", "is", "it", "its", "itself", "just", "me",
        "more", "most", "my", "myself", "no", "nor", "not", "now", "of", "off",
        "on", "once", "only", "or", "other", "our", "ours", "ourselves", "out", "over",
        "own", "s", "same", "she", "should", "so", "some", "such", "t", "than",
        "that", "the", "their", "theirs", "them", "themselves", "then", "there", "these", "they",
        "this", "those", "through", "to", "too", "under", "until", "up", "very", "was",
        "we", "were", "what", "when", "where", "which", "while", "who", "whom", "why",
        "will", "with", "you", "your", "yours", "yourself", "yourselves"};
    return words;
}

namespace detail {

inline const std::unordered_set<std::string>& stopword_set() {
    static const std::unordered_set<std::string> set(stopword_list().begin(),
                                                     stopword_list().end());
    return set;
}

inline bool all_digits(const std::string& tok) {
    if (tok.empty()) return false;
    return std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline bool ends_with(const std::string& s, const char* suffix, size_t len) {
    return s.size() >= len && s.compare(s.size() - len, len, suffix) == 0;
}

// One rule application; returns false at the fixed point.
inline bool stem_step(std::string& t) {
    const size_t n = t.size();
    if (n > 4 && ends_with(t, "ies", 3)) {
        t.replace(n - 3, 3, "y");
        return true;
    }
    if (n > 3 && ends_with(t, "es", 2)) {
        t.erase(n - 2);
        return true;
    }
    if (n > 3 && ends_with(t, "s", 1) && !ends_with(t, "ss", 2)) {
        t.erase(n - 1);
        return true;
    }
    if (n > 5 && ends_with(t, "ing", 3)) {
        t.erase(n - 3);
        return true;
    }
    if (n > 4 && ends_with(t, "ed", 2)) {
        t.erase(n - 2);
        return true;
    }
    return false;
}

}  // namespace detail

inline std::string stem_token(std::string token) {
    while (detail::stem_step(token)) {
    }
    return token;
}

inline std::vector<std::string> normalize(const std::string& text,
                                          const NormalizeOptions& opt = {}) {
    std::string clean;
    clean.reserve(text.size());
    // Markup runs <...> become spaces; an unmatched '<' falls through to the
    // punctuation mapping below.
    for (size_t i = 0; i < text.size();) {
        if (text[i] == '<') {
            size_t close = text.find('>', i + 1);
            if (close != std::string::npos) {
                clean += ' ';
                i = close + 1;
                continue;
            }
        }
        unsigned char c = (unsigned char)text[i];
        if (c >= 'A' && c <= 'Z') {
            clean += char(c - 'A' + 'a');
        } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80) {
            // Bytes >= 0x80 (multibyte UTF-8) are kept as word characters.
            clean += char(c);
        } else {
            clean += ' ';
        }
        ++i;
    }

    const auto& stop = detail::stopword_set();
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos < clean.size()) {
        while (pos < clean.size() && clean[pos] == ' ') ++pos;
        size_t end = pos;
        while (end < clean.size() && clean[end] != ' ') ++end;
        if (end > pos) {
            std::string tok = clean.substr(pos, end - pos);
            bool keep = !stop.count(tok) && !(opt.drop_numbers && detail::all_digits(tok));
            if (keep && opt.stem) {
                tok = stem_token(tok);
                keep = !tok.empty() && !stop.count(tok) &&
                       !(opt.drop_numbers && detail::all_digits(tok));
            }
            if (keep) out.push_back(std::move(tok));
        }
        pos = end;
    }
    return out;
}

// Vocabulary and smoothed inverse document frequencies fitted on a training
// slice only; vectorizing unseen text never extends the vocabulary.
struct FeatureSpace {
    std::unordered_map<std::string, uint32_t> vocab;
    std::vector<std::string> index_to_token;  // first-appearance order
    std::vector<double> idf;
    uint64_t document_count = 0;
    uint32_t min_df = 1;
    NormalizeOptions options;

    size_t dim() const { return index_to_token.size(); }
};

inline FeatureSpace fit_feature_space(const std::vector<std::string>& texts,
                                      uint32_t min_df = 1,
                                      const NormalizeOptions& opt = {}) {
    if (texts.empty()) throw std::invalid_argument("fit_feature_space: no documents");
    if (min_df == 0) throw std::invalid_argument("fit_feature_space: min_df must be >= 1");
    std::unordered_map<std::string, uint32_t> df;
    std::vector<std::string> appearance;
    std::unordered_set<std::string> seen_doc;
    for (const auto& text : texts) {
        seen_doc.clear();
        for (auto& tok : normalize(text, opt)) {
            if (!seen_doc.insert(tok).second) continue;
            auto [it, fresh] = df.emplace(tok, 0u);
            if (fresh) appearance.push_back(tok);
            ++it->second;
        }
    }
    FeatureSpace fs;
    fs.document_count = texts.size();
    fs.min_df = min_df;
    fs.options = opt;
    const double n_docs = double(texts.size());
    for (auto& tok : appearance) {
        uint32_t count = df[tok];
        if (count < min_df) continue;
        uint32_t index = uint32_t(fs.index_to_token.size());
        fs.vocab.emplace(tok, index);
        fs.index_to_token.push_back(tok);
        fs.idf.push_back(std::log((1.0 + n_docs) / (1.0 + double(count))) + 1.0);
    }
    return fs;
}

namespace detail {

inline SparseVector gather_counts(const FeatureSpace& fs, const std::string& text) {
    std::unordered_map<uint32_t, double> counts;
    for (auto& tok : normalize(text, fs.options)) {
        auto it = fs.vocab.find(tok);
        if (it != fs.vocab.end()) counts[it->second] += 1.0;
    }
    std::vector<uint32_t> order;
    order.reserve(counts.size());
    for (auto& [index, _] : counts) order.push_back(index);
    std::sort(order.begin(), order.end());
    SparseVector v;
    for (uint32_t index : order) v.push(index, counts[index]);
    return v;
}

}  // namespace detail

// Raw in-vocabulary term counts; no idf weighting, no normalization.
inline SparseVector count_vector(const FeatureSpace& fs, const std::string& text) {
    return detail::gather_counts(fs, text);
}

// L2-normalized tf-idf. A document with no in-vocabulary tokens yields the
// zero vector (SparseVector::is_zero() reports it); callers decide whether
// that warrants a warning.
inline SparseVector tfidf_vector(const FeatureSpace& fs, const std::string& text) {
    SparseVector v = detail::gather_counts(fs, text);
    for (size_t i = 0; i < v.values.size(); ++i) v.values[i] *= fs.idf[v.indices[i]];
    double norm = l2_norm(v);
    if (norm > 0.0)
        for (double& value : v.values) value /= norm;
    return v;
}

}  // namespace sizesweep
