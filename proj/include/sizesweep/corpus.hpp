#pragma once

// Corpus loading, validation, group capping, and synthetic generation.
//
// On disk a corpus is JSONL (one object per line with id, group_id, label,
// text) or CSV (header with those columns in any order; extras ignored).
// Loaders validate as they go and fail with the offending line number.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "sizesweep/allocation.hpp"
#include "sizesweep/csv.hpp"
#include "sizesweep/rng.hpp"

namespace sizesweep {

struct Document {
    std::string id;
    std::string group_id;
    int label = 0;  // 0 or 1
    std::string text;

    bool operator==(const Document&) const = default;
};

using Corpus = std::vector<Document>;

enum class CorpusFormat { jsonl, csv };

struct ClassCounts {
    uint64_t neg = 0;
    uint64_t pos = 0;
};

inline ClassCounts class_counts(const Corpus& corpus) {
    ClassCounts c;
    for (const auto& d : corpus) d.label ? ++c.pos : ++c.neg;
    return c;
}

namespace detail {

inline void validate_document(const Document& d,
                              std::unordered_set<std::string>& ids,
                              const std::string& where) {
    if (d.id.empty()) throw std::runtime_error(where + ": empty id");
    if (d.label != 0 && d.label != 1)
        throw std::runtime_error(where + ": label must be 0 or 1, got " + std::to_string(d.label));
    if (d.text.empty()) throw std::runtime_error(where + ": empty text");
    if (!ids.insert(d.id).second)
        throw std::runtime_error(where + ": duplicate id '" + d.id + "'");
}

inline std::string json_string_field(const nlohmann::json& obj, const char* key,
                                     const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw std::runtime_error(where + ": missing field '" + key + "'");
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<int64_t>());
    throw std::runtime_error(where + ": field '" + std::string(key) + "' must be a string");
}

inline int json_label_field(const nlohmann::json& obj, const std::string& where) {
    auto it = obj.find("label");
    if (it == obj.end()) throw std::runtime_error(where + ": missing field 'label'");
    if (it->is_number_integer()) return int(it->get<int64_t>());
    throw std::runtime_error(where + ": field 'label' must be an integer");
}

inline int parse_label(const std::string& raw, const std::string& where) {
    if (raw == "0") return 0;
    if (raw == "1") return 1;
    throw std::runtime_error(where + ": label must be 0 or 1, got '" + raw + "'");
}

}  // namespace detail

inline Corpus load_corpus(const std::string& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);

    Corpus corpus;
    std::unordered_set<std::string> ids;

    if (format == CorpusFormat::jsonl) {
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const std::string where = path + ":" + std::to_string(line_no);
            nlohmann::json obj;
            try {
                obj = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw std::runtime_error(where + ": invalid JSON (" + e.what() + ")");
            }
            if (!obj.is_object()) throw std::runtime_error(where + ": expected a JSON object");
            Document d;
            d.id = detail::json_string_field(obj, "id", where);
            d.group_id = detail::json_string_field(obj, "group_id", where);
            d.label = detail::json_label_field(obj, where);
            auto text_it = obj.find("text");
            if (text_it == obj.end() || !text_it->is_string())
                throw std::runtime_error(where + ": missing or non-string field 'text'");
            d.text = text_it->get<std::string>();
            detail::validate_document(d, ids, where);
            corpus.push_back(std::move(d));
        }
    } else {
        std::vector<std::string> fields;
        size_t line_no = 1;
        size_t record_line = line_no;
        if (!csv_read_record(in, fields, line_no))
            throw std::runtime_error(path + ": empty CSV file");
        std::unordered_map<std::string, size_t> columns;
        for (size_t i = 0; i < fields.size(); ++i) columns[fields[i]] = i;
        for (const char* required : {"id", "group_id", "label", "text"})
            if (!columns.count(required))
                throw std::runtime_error(path + ": CSV header missing column '" +
                                         std::string(required) + "'");
        const size_t header_width = fields.size();
        while (true) {
            record_line = line_no;
            if (!csv_read_record(in, fields, line_no)) break;
            if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
            const std::string where = path + ":" + std::to_string(record_line);
            if (fields.size() != header_width)
                throw std::runtime_error(where + ": expected " + std::to_string(header_width) +
                                         " fields, got " + std::to_string(fields.size()));
            Document d;
            d.id = fields[columns["id"]];
            d.group_id = fields[columns["group_id"]];
            d.label = detail::parse_label(fields[columns["label"]], where);
            d.text = fields[columns["text"]];
            detail::validate_document(d, ids, where);
            corpus.push_back(std::move(d));
        }
    }
    return corpus;
}

inline CorpusFormat corpus_format_from_path(const std::string& path) {
    auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".jsonl" || ext == ".ndjson") return CorpusFormat::jsonl;
    if (ext == ".csv") return CorpusFormat::csv;
    throw std::runtime_error("cannot infer corpus format from extension: " + path);
}

inline Corpus load_corpus(const std::string& path) {
    return load_corpus(path, corpus_format_from_path(path));
}

inline void save_corpus(const Corpus& corpus, const std::string& path, CorpusFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    if (format == CorpusFormat::jsonl) {
        for (const auto& d : corpus) {
            nlohmann::json obj = {
                {"id", d.id}, {"group_id", d.group_id}, {"label", d.label}, {"text", d.text}};
            out << obj.dump() << '\n';
        }
    } else {
        out << "id,group_id,label,text\n";
        for (const auto& d : corpus)
            out << csv_join({d.id, d.group_id, std::to_string(d.label), d.text}) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
    save_corpus(corpus, path, corpus_format_from_path(path));
}

// Keeps at most `max_per_group` documents per group, preserving corpus order
// (the first k of each group win). Applying it twice changes nothing.
inline Corpus cap_group_documents(const Corpus& corpus, uint64_t max_per_group = 50) {
    if (max_per_group == 0)
        throw std::invalid_argument("cap_group_documents: cap must be >= 1");
    std::unordered_map<std::string, uint64_t> taken;
    Corpus out;
    out.reserve(corpus.size());
    for (const auto& d : corpus)
        if (taken[d.group_id]++ < max_per_group) out.push_back(d);
    return out;
}

struct SyntheticSpec {
    uint64_t n_docs = 1000;
    double prop_pos = 0.5;
    uint32_t vocab_size = 2000;
    double doc_len_mean = 80.0;
    double separability = 0.5;  // 0 = indistinguishable classes
    uint64_t seed = 1;
};

// The two class-conditional unigram distributions behind generate_synthetic:
// a shared power-law base, tilted up/down on alternating words by
// exp(+-separability/2). Their divergence grows monotonically with the
// separability knob and vanishes at zero.
inline std::pair<std::vector<double>, std::vector<double>> synthetic_class_distributions(
    const SyntheticSpec& spec) {
    if (spec.vocab_size < 2)
        throw std::invalid_argument("generate_synthetic: vocab_size must be >= 2");
    if (spec.separability < 0.0)
        throw std::invalid_argument("generate_synthetic: separability must be >= 0");
    std::vector<double> neg(spec.vocab_size), pos(spec.vocab_size);
    double neg_sum = 0.0, pos_sum = 0.0;
    for (uint32_t j = 0; j < spec.vocab_size; ++j) {
        double base = 1.0 / double(j + 3);
        double tilt = (j % 2 == 0) ? 1.0 : -1.0;
        neg[j] = base * std::exp(-0.5 * spec.separability * tilt);
        pos[j] = base * std::exp(0.5 * spec.separability * tilt);
        neg_sum += neg[j];
        pos_sum += pos[j];
    }
    for (uint32_t j = 0; j < spec.vocab_size; ++j) {
        neg[j] /= neg_sum;
        pos[j] /= pos_sum;
    }
    return {neg, pos};
}

inline Corpus generate_synthetic(const SyntheticSpec& spec) {
    if (spec.n_docs == 0) throw std::invalid_argument("generate_synthetic: n_docs must be >= 1");
    if (spec.prop_pos < 0.0 || spec.prop_pos > 1.0)
        throw std::invalid_argument("generate_synthetic: prop_pos outside [0,1]");
    if (spec.doc_len_mean <= 0.0 || spec.doc_len_mean > 500.0)
        throw std::invalid_argument("generate_synthetic: doc_len_mean outside (0,500]");

    auto [neg_dist, pos_dist] = synthetic_class_distributions(spec);
    std::vector<double> neg_cdf(neg_dist.size()), pos_cdf(pos_dist.size());
    double acc = 0.0;
    for (size_t j = 0; j < neg_dist.size(); ++j) neg_cdf[j] = (acc += neg_dist[j]);
    acc = 0.0;
    for (size_t j = 0; j < pos_dist.size(); ++j) pos_cdf[j] = (acc += pos_dist[j]);

    auto counts = largest_remainder(spec.n_docs, {1.0 - spec.prop_pos, spec.prop_pos});
    const uint64_t n_pos = counts[1];

    int id_width = 1;
    for (uint64_t v = spec.n_docs; v >= 10; v /= 10) ++id_width;
    int token_width = 1;
    for (uint32_t v = spec.vocab_size - 1; v >= 10; v /= 10) ++token_width;

    Rng rng(spec.seed);
    Corpus corpus;
    corpus.reserve(spec.n_docs);
    for (uint64_t i = 0; i < spec.n_docs; ++i) {
        // Bresenham-style interleave: exactly n_pos positives, spread evenly.
        int label = int((i + 1) * n_pos / spec.n_docs - i * n_pos / spec.n_docs);
        const auto& cdf = label ? pos_cdf : neg_cdf;
        int len = rng.poisson(spec.doc_len_mean);
        if (len < 1) len = 1;
        std::string text;
        text.reserve(size_t(len) * (token_width + 2));
        for (int t = 0; t < len; ++t) {
            double u = rng.uniform01();
            auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
            auto j = uint32_t(it == cdf.end() ? cdf.size() - 1 : size_t(it - cdf.begin()));
            if (t) text += ' ';
            text += 'w';
            std::string digits = std::to_string(j);
            text.append(size_t(token_width) - digits.size(), '0');
            text += digits;
        }
        std::string suffix = std::to_string(i);
        std::string id_digits(size_t(id_width) - suffix.size(), '0');
        id_digits += suffix;
        corpus.push_back({"d" + id_digits, "g" + id_digits, label, std::move(text)});
    }
    return corpus;
}

}  // namespace sizesweep
