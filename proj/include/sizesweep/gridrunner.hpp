#pragma once

// Deterministic execution of the (family x size x proportion) grid plus
// lossless CSV persistence of per-cell results.
//
// Seed plan: every random decision hashes six 64-bit words with stable_hash:
//   { master_seed, purpose, family_key, n, round(prop_pos * 10000), replicate }
// where purpose is 1 = sample draw, 2 = split, 3 = training (this one is the
// recorded cell seed), 4 = bootstrap resampling. The sample draw and split use
// family_key = 2^64-1 so one drawn sample is shared by every family in a
// (n, proportion, replicate) column and classifier comparisons stay paired;
// training and bootstrap use the family's position in canonical order.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "sizesweep/corpus.hpp"
#include "sizesweep/csv.hpp"
#include "sizesweep/metrics.hpp"
#include "sizesweep/models.hpp"
#include "sizesweep/rng.hpp"
#include "sizesweep/sampler.hpp"
#include "sizesweep/textpipe.hpp"

namespace sizesweep {

struct GridConfig {
    std::vector<uint32_t> sizes = {5000, 4000, 3000, 2000, 1000, 800, 600, 500, 400, 200};
    std::vector<double> proportions = {0.99, 0.95, 0.9, 0.8, 0.7, 0.6, 0.5};
    std::vector<Family> families{kAllFamilies.begin(), kAllFamilies.end()};
    uint32_t replicates = 1;
    uint64_t master_seed = 1;
    NormalizeOptions pipeline;
    uint32_t min_df = 1;
    Hyperparams hyperparams;
    uint32_t bootstrap_b = 1000;
    double ci_level = 0.95;
};

struct CellResult {
    Family family = Family::lr;
    uint32_t n = 0;
    double prop_pos = 0.0;
    uint32_t replicate = 0;
    uint64_t seed = 0;
    std::string status;  // "OK", "DEGENERATE", or "FAILED:<reason>"
    std::optional<double> f1_weighted, ci_lo, ci_hi, auc;
    uint64_t n_train = 0;
    uint64_t n_test = 0;
    uint64_t ms = 0;
};

// Everything but the wall-clock field, which legitimately varies across runs.
inline bool same_outcome(const CellResult& a, const CellResult& b) {
    return a.family == b.family && a.n == b.n && a.prop_pos == b.prop_pos &&
           a.replicate == b.replicate && a.seed == b.seed && a.status == b.status &&
           a.f1_weighted == b.f1_weighted && a.ci_lo == b.ci_lo && a.ci_hi == b.ci_hi &&
           a.auc == b.auc && a.n_train == b.n_train && a.n_test == b.n_test;
}

inline bool same_outcome(const std::vector<CellResult>& a, const std::vector<CellResult>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!same_outcome(a[i], b[i])) return false;
    return true;
}

namespace detail {

inline constexpr uint64_t kSeedPurposeSample = 1;
inline constexpr uint64_t kSeedPurposeSplit = 2;
inline constexpr uint64_t kSeedPurposeTrain = 3;
inline constexpr uint64_t kSeedPurposeBootstrap = 4;
inline constexpr uint64_t kSeedNoFamily = ~uint64_t{0};

inline uint64_t family_seed_key(Family f) {
    for (size_t i = 0; i < kAllFamilies.size(); ++i)
        if (kAllFamilies[i] == f) return i;
    return kSeedNoFamily;
}

inline uint64_t grid_seed(uint64_t master_seed, uint64_t purpose, uint64_t family_key,
                          uint64_t n, double prop_pos, uint64_t replicate) {
    return stable_hash(
        {master_seed, purpose, family_key, n, uint64_t(std::llround(prop_pos * 10000.0)),
         replicate});
}

inline size_t canonical_family_rank(Family f) { return size_t(family_seed_key(f)); }

inline bool canonical_cell_order(const CellResult& a, const CellResult& b) {
    const size_t fa = canonical_family_rank(a.family), fb = canonical_family_rank(b.family);
    if (fa != fb) return fa < fb;
    if (a.n != b.n) return a.n > b.n;
    if (a.prop_pos != b.prop_pos) return a.prop_pos > b.prop_pos;
    return a.replicate < b.replicate;
}

inline bool sorted_ranges_intersect(const std::vector<size_t>& a, const std::vector<size_t>& b) {
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        a[i] < b[j] ? ++i : ++j;
    }
    return false;
}

// One (n, proportion, replicate) column: a single drawn sample and fitted
// feature space evaluated by every requested family. Writes into out[0 ..
// families-1].
inline void run_column(const Corpus& corpus, const GridConfig& cfg, uint32_t n, double prop,
                       uint32_t replicate, CellResult* out) {
    const size_t fam_count = cfg.families.size();
    for (size_t k = 0; k < fam_count; ++k) {
        out[k].family = cfg.families[k];
        out[k].n = n;
        out[k].prop_pos = prop;
        out[k].replicate = replicate;
        out[k].seed = grid_seed(cfg.master_seed, kSeedPurposeTrain,
                                family_seed_key(cfg.families[k]), n, prop, replicate);
    }
    auto fail_all = [&](const std::string& status) {
        for (size_t k = 0; k < fam_count; ++k) out[k].status = status;
    };

    Sample sample;
    SplitSet splits;
    try {
        sample = draw_sample(corpus, n, prop,
                             grid_seed(cfg.master_seed, kSeedPurposeSample, kSeedNoFamily, n,
                                       prop, replicate));
        splits = split_sample(corpus, sample,
                              grid_seed(cfg.master_seed, kSeedPurposeSplit, kSeedNoFamily, n,
                                        prop, replicate));
    } catch (const std::exception&) {
        fail_all("FAILED:insufficient-data");
        return;
    }
    if (sorted_ranges_intersect(splits.train, splits.test) ||
        sorted_ranges_intersect(splits.train, splits.val) ||
        sorted_ranges_intersect(splits.val, splits.test)) {
        fail_all("FAILED:leakage-detected");
        return;
    }

    const std::string base_status =
        check_degenerate(corpus, splits) == SplitHealth::ok ? "OK" : "DEGENERATE";
    for (size_t k = 0; k < fam_count; ++k) {
        out[k].status = base_status;
        out[k].n_train = splits.train.size();
        out[k].n_test = splits.test.size();
    }

    std::vector<int> y_train, y_test;
    for (size_t i : splits.train) y_train.push_back(corpus[i].label);
    for (size_t i : splits.test) y_test.push_back(corpus[i].label);
    auto both_classes = [](const std::vector<int>& y) {
        bool pos = false, neg = false;
        for (int v : y) (v ? pos : neg) = true;
        return pos && neg;
    };
    // A cell is only scoreable with two-class training data and a two-class
    // test split; degenerate cells missing either keep empty metric fields.
    if (!both_classes(y_train) || !both_classes(y_test)) return;

    FeatureSpace fs;
    std::vector<SparseVector> tfidf_train, tfidf_test, counts_train, counts_test;
    try {
        std::vector<std::string> train_texts;
        train_texts.reserve(splits.train.size());
        for (size_t i : splits.train) train_texts.push_back(corpus[i].text);
        fs = fit_feature_space(train_texts, cfg.min_df, cfg.pipeline);

        bool want_counts = false, want_tfidf = false;
        for (Family f : cfg.families) (consumes_raw_counts(f) ? want_counts : want_tfidf) = true;
        auto vectorize = [&](const std::vector<size_t>& ids, auto fn,
                             std::vector<SparseVector>& dst) {
            dst.reserve(ids.size());
            for (size_t i : ids) dst.push_back(fn(fs, corpus[i].text));
        };
        if (want_tfidf) {
            vectorize(splits.train, [](const auto& s, const auto& t) { return tfidf_vector(s, t); },
                      tfidf_train);
            vectorize(splits.test, [](const auto& s, const auto& t) { return tfidf_vector(s, t); },
                      tfidf_test);
        }
        if (want_counts) {
            vectorize(splits.train, [](const auto& s, const auto& t) { return count_vector(s, t); },
                      counts_train);
            vectorize(splits.test, [](const auto& s, const auto& t) { return count_vector(s, t); },
                      counts_test);
        }
    } catch (const std::exception& e) {
        fail_all(std::string("FAILED:pipeline:") + e.what());
        return;
    }

    for (size_t k = 0; k < fam_count; ++k) {
        const Family f = cfg.families[k];
        const auto& x_train = consumes_raw_counts(f) ? counts_train : tfidf_train;
        const auto& x_test = consumes_raw_counts(f) ? counts_test : tfidf_test;
        const auto started = std::chrono::steady_clock::now();
        try {
            auto model = train_model(f, cfg.hyperparams, x_train, y_train, fs.dim(), out[k].seed);
            const auto scores = model->score_all(x_test);
            const auto preds = model->predict_all(x_test);
            out[k].f1_weighted = weighted_f1(y_test, preds);
            const auto ci = bootstrap_f1_ci(
                y_test, preds, cfg.bootstrap_b, cfg.ci_level,
                grid_seed(cfg.master_seed, kSeedPurposeBootstrap, family_seed_key(f), n, prop,
                          replicate));
            out[k].ci_lo = ci.lo;
            out[k].ci_hi = ci.hi;
            out[k].auc = auc_roc(y_test, scores);
        } catch (const std::exception& e) {
            out[k].status = std::string("FAILED:") + e.what();
            out[k].f1_weighted = out[k].ci_lo = out[k].ci_hi = out[k].auc = std::nullopt;
        }
        out[k].ms = uint64_t(std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - started)
                                 .count());
    }
}

}  // namespace detail

inline void validate_grid_config(const GridConfig& cfg) {
    auto reject = [](const std::string& what) {
        throw std::invalid_argument("grid config: " + what);
    };
    if (cfg.sizes.empty()) reject("sizes is empty");
    for (uint32_t n : cfg.sizes)
        if (n == 0) reject("sizes must be positive");
    if (cfg.proportions.empty()) reject("proportions is empty");
    for (double p : cfg.proportions)
        if (!(p > 0.0 && p < 1.0)) reject("proportions must lie strictly inside (0,1)");
    if (cfg.families.empty()) reject("families is empty");
    if (cfg.replicates == 0) reject("replicates must be >= 1");
    if (cfg.min_df == 0) reject("min_df must be >= 1");
    if (cfg.bootstrap_b == 0) reject("bootstrap_b must be >= 1");
    if (!(cfg.ci_level > 0.0 && cfg.ci_level < 1.0)) reject("ci_level must lie inside (0,1)");
    auto no_dupes = [&](auto values, const char* what) {
        std::sort(values.begin(), values.end());
        if (std::adjacent_find(values.begin(), values.end()) != values.end())
            reject(std::string(what) + " contains duplicates");
    };
    no_dupes(cfg.sizes, "sizes");
    no_dupes(cfg.proportions, "proportions");
    no_dupes(cfg.families, "families");
}

// Runs every (family, n, proportion, replicate) cell. Columns are independent
// jobs handed to a small worker pool; seeds are position-independent, so the
// worker count never changes anything but wall-clock fields.
inline std::vector<CellResult> run_grid(const Corpus& corpus, const GridConfig& cfg,
                                        unsigned workers = 1) {
    validate_grid_config(cfg);
    struct Column {
        uint32_t n;
        double prop;
        uint32_t replicate;
    };
    std::vector<Column> columns;
    for (uint32_t n : cfg.sizes)
        for (double p : cfg.proportions)
            for (uint32_t r = 0; r < cfg.replicates; ++r) columns.push_back({n, p, r});

    const size_t fam_count = cfg.families.size();
    std::vector<CellResult> results(columns.size() * fam_count);
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t c = next.fetch_add(1); c < columns.size(); c = next.fetch_add(1))
            detail::run_column(corpus, cfg, columns[c].n, columns[c].prop, columns[c].replicate,
                               results.data() + c * fam_count);
    };
    if (workers <= 1 || columns.size() <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        const unsigned count = unsigned(std::min<size_t>(workers, columns.size()));
        pool.reserve(count);
        for (unsigned w = 0; w < count; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    std::sort(results.begin(), results.end(), detail::canonical_cell_order);
    return results;
}

namespace detail {

inline std::string format_double(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, end);
}

inline std::string format_metric(const std::optional<double>& x) {
    return x ? format_double(*x) : std::string();
}

}  // namespace detail

inline constexpr const char* kResultsHeader =
    "family,n,prop_pos,replicate,seed,status,f1_weighted,ci_lo,ci_hi,auc,n_train,n_test,ms";

inline void persist_results(const std::vector<CellResult>& results, std::ostream& os) {
    os << kResultsHeader << "\n";
    for (const auto& r : results) {
        os << csv_join({family_name(r.family), std::to_string(r.n),
                        detail::format_double(r.prop_pos), std::to_string(r.replicate),
                        std::to_string(r.seed), r.status, detail::format_metric(r.f1_weighted),
                        detail::format_metric(r.ci_lo), detail::format_metric(r.ci_hi),
                        detail::format_metric(r.auc), std::to_string(r.n_train),
                        std::to_string(r.n_test), std::to_string(r.ms)})
           << "\n";
    }
}

inline void persist_results(const std::vector<CellResult>& results, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write results file: " + path);
    persist_results(results, os);
    if (!os.good()) throw std::runtime_error("short write to results file: " + path);
}

inline std::vector<CellResult> load_results(std::istream& is, const std::string& origin) {
    std::vector<std::string> fields;
    uint64_t line_no = 0;
    if (!csv_read_record(is, fields, line_no))
        throw std::runtime_error(origin + ": empty results file");

    const std::vector<std::string> required = {
        "family", "n", "prop_pos", "replicate", "seed", "status", "f1_weighted",
        "ci_lo", "ci_hi", "auc", "n_train", "n_test", "ms"};
    std::unordered_map<std::string, size_t> col;
    for (size_t i = 0; i < fields.size(); ++i) col.emplace(fields[i], i);
    for (const auto& name : required)
        if (!col.count(name))
            throw std::runtime_error(origin + ": results csv is missing column '" + name + "'");
    const size_t width = fields.size();

    auto where = [&] { return origin + ":" + std::to_string(line_no); };
    auto parse_u64 = [&](const std::string& s, const char* what) -> uint64_t {
        try {
            size_t used = 0;
            uint64_t v = std::stoull(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error(where() + ": bad " + what + " value '" + s + "'");
        }
    };
    auto parse_f64 = [&](const std::string& s, const char* what) -> double {
        try {
            size_t used = 0;
            double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error(where() + ": bad " + what + " value '" + s + "'");
        }
    };

    std::vector<CellResult> results;
    while (csv_read_record(is, fields, line_no)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != width)
            throw std::runtime_error(where() + ": expected " + std::to_string(width) +
                                     " fields, found " + std::to_string(fields.size()));
        CellResult r;
        try {
            r.family = family_from_name(fields[col.at("family")]);
        } catch (const std::exception&) {
            throw std::runtime_error(where() + ": bad family value '" +
                                     fields[col.at("family")] + "'");
        }
        r.n = uint32_t(parse_u64(fields[col.at("n")], "n"));
        r.prop_pos = parse_f64(fields[col.at("prop_pos")], "prop_pos");
        r.replicate = uint32_t(parse_u64(fields[col.at("replicate")], "replicate"));
        r.seed = parse_u64(fields[col.at("seed")], "seed");
        r.status = fields[col.at("status")];
        if (r.status.empty()) throw std::runtime_error(where() + ": empty status");
        auto metric = [&](const char* name) -> std::optional<double> {
            const std::string& s = fields[col.at(name)];
            if (s.empty()) return std::nullopt;
            return parse_f64(s, name);
        };
        r.f1_weighted = metric("f1_weighted");
        r.ci_lo = metric("ci_lo");
        r.ci_hi = metric("ci_hi");
        r.auc = metric("auc");
        r.n_train = parse_u64(fields[col.at("n_train")], "n_train");
        r.n_test = parse_u64(fields[col.at("n_test")], "n_test");
        r.ms = parse_u64(fields[col.at("ms")], "ms");
        results.push_back(std::move(r));
    }
    return results;
}

inline std::vector<CellResult> load_results(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open results file: " + path);
    return load_results(is, path);
}

namespace detail {

template <typename T>
T json_number(const nlohmann::json& j, const std::string& key) {
    if constexpr (std::is_integral_v<T>) {
        const bool ok = j.is_number_unsigned() ||
                        (j.is_number_integer() && j.get<int64_t>() >= 0);
        if (!ok)
            throw std::invalid_argument("grid config: '" + key +
                                        "' must be a non-negative integer");
    } else if (!j.is_number()) {
        throw std::invalid_argument("grid config: '" + key + "' must be a number");
    }
    return j.get<T>();
}

inline void apply_hyperparam(Hyperparams& hp, const std::string& key, const nlohmann::json& v) {
    auto num = [&](auto& field) { field = json_number<std::decay_t<decltype(field)>>(v, key); };
    auto flag = [&](bool& field) {
        if (!v.is_boolean())
            throw std::invalid_argument("grid config: '" + key + "' must be a boolean");
        field = v.get<bool>();
    };
    if (key == "lr_lambda") num(hp.lr_lambda);
    else if (key == "lr_epochs") num(hp.lr_epochs);
    else if (key == "nb_alpha") num(hp.nb_alpha);
    else if (key == "dt_min_split") num(hp.dt_min_split);
    else if (key == "dt_max_depth") num(hp.dt_max_depth);
    else if (key == "rf_trees") num(hp.rf_trees);
    else if (key == "rf_bootstrap") flag(hp.rf_bootstrap);
    else if (key == "rf_feature_subsample") flag(hp.rf_feature_subsample);
    else if (key == "knn_k") num(hp.knn_k);
    else if (key == "lsvc_c") num(hp.lsvc_c);
    else if (key == "lsvc_epochs") num(hp.lsvc_epochs);
    else if (key == "svc_c") num(hp.svc_c);
    else if (key == "svc_gamma") num(hp.svc_gamma);
    else if (key == "svc_tol") num(hp.svc_tol);
    else if (key == "sgd_lambda") num(hp.sgd_lambda);
    else if (key == "sgd_epochs") num(hp.sgd_epochs);
    else throw std::invalid_argument("grid config: unknown hyperparameter '" + key + "'");
}

}  // namespace detail

// JSON keys mirror the GridConfig fields; unknown keys are rejected so typos
// cannot silently fall back to defaults.
inline GridConfig grid_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("grid config: root must be an object");
    GridConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "sizes") {
            if (!value.is_array()) throw std::invalid_argument("grid config: 'sizes' must be an array");
            cfg.sizes.clear();
            for (const auto& v : value) cfg.sizes.push_back(detail::json_number<uint32_t>(v, key));
        } else if (key == "proportions") {
            if (!value.is_array())
                throw std::invalid_argument("grid config: 'proportions' must be an array");
            cfg.proportions.clear();
            for (const auto& v : value)
                cfg.proportions.push_back(detail::json_number<double>(v, key));
        } else if (key == "families") {
            if (!value.is_array())
                throw std::invalid_argument("grid config: 'families' must be an array");
            cfg.families.clear();
            for (const auto& v : value) {
                if (!v.is_string())
                    throw std::invalid_argument("grid config: family names must be strings");
                cfg.families.push_back(family_from_name(v.get<std::string>()));
            }
        } else if (key == "replicates") {
            cfg.replicates = detail::json_number<uint32_t>(value, key);
        } else if (key == "master_seed") {
            cfg.master_seed = detail::json_number<uint64_t>(value, key);
        } else if (key == "stem") {
            if (!value.is_boolean())
                throw std::invalid_argument("grid config: 'stem' must be a boolean");
            cfg.pipeline.stem = value.get<bool>();
        } else if (key == "drop_numbers") {
            if (!value.is_boolean())
                throw std::invalid_argument("grid config: 'drop_numbers' must be a boolean");
            cfg.pipeline.drop_numbers = value.get<bool>();
        } else if (key == "min_df") {
            cfg.min_df = detail::json_number<uint32_t>(value, key);
        } else if (key == "bootstrap_b") {
            cfg.bootstrap_b = detail::json_number<uint32_t>(value, key);
        } else if (key == "ci_level") {
            cfg.ci_level = detail::json_number<double>(value, key);
        } else if (key == "hyperparams") {
            if (!value.is_object())
                throw std::invalid_argument("grid config: 'hyperparams' must be an object");
            for (const auto& [hkey, hvalue] : value.items())
                detail::apply_hyperparam(cfg.hyperparams, hkey, hvalue);
        } else {
            throw std::invalid_argument("grid config: unknown key '" + key + "'");
        }
    }
    validate_grid_config(cfg);
    return cfg;
}

inline GridConfig load_grid_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return grid_config_from_json(j);
}

}  // namespace sizesweep
