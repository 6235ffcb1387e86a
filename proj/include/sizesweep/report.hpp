#pragma once

// Range summaries per (sample size, class proportion), minimum-sample-size
// recommendations, and deterministic table emission in csv or markdown form.
//
// Summaries aggregate the OK subset of results only. With multiple replicates
// a family's score is its mean across replicates. Metric values stay at full
// precision internally and are rounded to two decimals at emission time only.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sizesweep/gridrunner.hpp"

namespace sizesweep {

struct CellSummary {
    uint32_t n = 0;
    double prop_pos = 0.0;
    bool empty = true;  // no OK cells at this coordinate
    double f1_min = 0.0, f1_max = 0.0;
    Family f1_best = Family::lr;
    bool f1_tie = false;
    double auc_min = 0.0, auc_max = 0.0;
    Family auc_best = Family::lr;
    bool auc_tie = false;

    bool operator==(const CellSummary&) const = default;
};

namespace detail {

struct SummaryKey {
    uint32_t n;
    double prop;
    // table order: size descending, then proportion descending
    bool operator<(const SummaryKey& o) const {
        if (n != o.n) return n > o.n;
        return prop > o.prop;
    }
};

struct FamilyAcc {
    double f1_sum = 0.0, auc_sum = 0.0;
    uint64_t count = 0;
};

using FamilyAccs = std::array<FamilyAcc, kAllFamilies.size()>;

// Ranges plus argmax with canonical-order tie-break; exact full-precision
// equality with a second family sets the tie flag.
inline void fill_ranges(const FamilyAccs& accs, CellSummary& s) {
    bool first = true;
    for (size_t k = 0; k < accs.size(); ++k) {
        if (accs[k].count == 0) continue;
        const double f1 = accs[k].f1_sum / double(accs[k].count);
        const double auc = accs[k].auc_sum / double(accs[k].count);
        if (first) {
            s.f1_min = s.f1_max = f1;
            s.auc_min = s.auc_max = auc;
            s.f1_best = s.auc_best = kAllFamilies[k];
            first = false;
            continue;
        }
        s.f1_min = std::min(s.f1_min, f1);
        s.auc_min = std::min(s.auc_min, auc);
        if (f1 > s.f1_max) {
            s.f1_max = f1;
            s.f1_best = kAllFamilies[k];
        }
        if (auc > s.auc_max) {
            s.auc_max = auc;
            s.auc_best = kAllFamilies[k];
        }
    }
    s.empty = first;
    if (s.empty) return;
    uint32_t f1_at_max = 0, auc_at_max = 0;
    for (size_t k = 0; k < accs.size(); ++k) {
        if (accs[k].count == 0) continue;
        f1_at_max += accs[k].f1_sum / double(accs[k].count) == s.f1_max;
        auc_at_max += accs[k].auc_sum / double(accs[k].count) == s.auc_max;
    }
    s.f1_tie = f1_at_max > 1;
    s.auc_tie = auc_at_max > 1;
}

}  // namespace detail

inline std::vector<CellSummary> summarize_cells(const std::vector<CellResult>& results) {
    std::map<detail::SummaryKey, detail::FamilyAccs> cells;
    for (const auto& r : results) {
        auto& accs = cells[{r.n, r.prop_pos}];  // marks the coordinate as requested
        if (r.status != "OK" || !r.f1_weighted || !r.auc) continue;
        auto& acc = accs[detail::canonical_family_rank(r.family)];
        acc.f1_sum += *r.f1_weighted;
        acc.auc_sum += *r.auc;
        acc.count += 1;
    }
    std::vector<CellSummary> out;
    out.reserve(cells.size());
    for (const auto& [key, accs] : cells) {
        CellSummary s;
        s.n = key.n;
        s.prop_pos = key.prop;
        detail::fill_ranges(accs, s);
        out.push_back(s);
    }
    return out;
}

struct Recommendation {
    uint32_t n = 0;
    Family family = Family::lr;
    double f1 = 0.0;
};

// Smallest n whose best OK family at prop_pos reaches the target. The
// proportion must match a value present in the results exactly.
inline std::optional<Recommendation> recommend_min_n(const std::vector<CellResult>& results,
                                                     double target_f1, double prop_pos) {
    bool prop_seen = false;
    std::map<uint32_t, detail::FamilyAccs> by_n;  // ascending n
    for (const auto& r : results) {
        if (r.prop_pos != prop_pos) continue;
        prop_seen = true;
        if (r.status != "OK" || !r.f1_weighted) continue;
        auto& acc = by_n[r.n][detail::canonical_family_rank(r.family)];
        acc.f1_sum += *r.f1_weighted;
        acc.count += 1;
    }
    if (!prop_seen)
        throw std::invalid_argument("recommend_min_n: no results at the requested proportion");
    for (const auto& [n, accs] : by_n) {
        CellSummary s;
        detail::fill_ranges(accs, s);
        if (!s.empty && s.f1_max >= target_f1)
            return Recommendation{n, s.f1_best, s.f1_max};
    }
    return std::nullopt;
}

enum class TableFormat { csv, markdown };

inline std::string format_metric_2dp(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// The table cell shape: "0.66 - 0.76 [SVC]".
inline std::string format_range_cell(double lo, double hi, Family best) {
    return format_metric_2dp(lo) + " - " + format_metric_2dp(hi) + " [" +
           std::string(family_name(best)) + "]";
}

// "0.9" -> "90/10", "0.5" -> "50/50"
inline std::string proportion_label(double prop_pos) {
    const int pct = int(std::lround(prop_pos * 100.0));
    return std::to_string(pct) + "/" + std::to_string(100 - pct);
}

inline constexpr const char* kSummaryHeader =
    "n,prop_pos,f1_min,f1_max,f1_best,f1_tie,auc_min,auc_max,auc_best,auc_tie";

namespace detail {

inline std::string emit_summary_csv(const std::vector<CellSummary>& summaries) {
    std::string out = std::string(kSummaryHeader) + "\n";
    for (const auto& s : summaries) {
        std::vector<std::string> fields = {std::to_string(s.n), format_double(s.prop_pos)};
        if (s.empty) {
            fields.insert(fields.end(), 8, "");
        } else {
            fields.push_back(format_metric_2dp(s.f1_min));
            fields.push_back(format_metric_2dp(s.f1_max));
            fields.push_back(family_name(s.f1_best));
            fields.push_back(s.f1_tie ? "1" : "0");
            fields.push_back(format_metric_2dp(s.auc_min));
            fields.push_back(format_metric_2dp(s.auc_max));
            fields.push_back(family_name(s.auc_best));
            fields.push_back(s.auc_tie ? "1" : "0");
        }
        out += csv_join(fields) + "\n";
    }
    return out;
}

// Size-by-proportion grid with two-line cells: the AUC range over the F1
// range, each tagged with its best family.
inline std::string emit_summary_markdown(const std::vector<CellSummary>& summaries) {
    std::vector<uint32_t> sizes;
    std::vector<double> props;
    std::map<std::pair<uint32_t, double>, const CellSummary*> by_key;
    for (const auto& s : summaries) {
        if (std::find(sizes.begin(), sizes.end(), s.n) == sizes.end()) sizes.push_back(s.n);
        if (std::find(props.begin(), props.end(), s.prop_pos) == props.end())
            props.push_back(s.prop_pos);
        by_key[{s.n, s.prop_pos}] = &s;
    }
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    std::sort(props.begin(), props.end(), std::greater<>());

    std::ostringstream os;
    os << "| n |";
    for (double p : props) os << " " << proportion_label(p) << " |";
    os << "\n|---|";
    for (size_t i = 0; i < props.size(); ++i) os << "---|";
    os << "\n";
    for (uint32_t n : sizes) {
        os << "| " << n << " |";
        for (double p : props) {
            auto it = by_key.find({n, p});
            if (it == by_key.end() || it->second->empty) {
                os << " - |";
                continue;
            }
            const CellSummary& s = *it->second;
            os << " " << format_range_cell(s.auc_min, s.auc_max, s.auc_best) << "<br>"
               << format_range_cell(s.f1_min, s.f1_max, s.f1_best) << " |";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace detail

inline std::string emit_table(const std::vector<CellSummary>& summaries, TableFormat format) {
    return format == TableFormat::csv ? detail::emit_summary_csv(summaries)
                                      : detail::emit_summary_markdown(summaries);
}

// Reads a csv produced by emit_table back into summaries; two-decimal values
// re-emit identically, making emit -> load -> emit a fixed point.
inline std::vector<CellSummary> load_summaries(std::istream& is, const std::string& origin) {
    std::vector<std::string> fields;
    uint64_t line_no = 0;
    if (!csv_read_record(is, fields, line_no) || csv_join(fields) != kSummaryHeader)
        throw std::runtime_error(origin + ": not a summary csv (bad header)");
    std::vector<CellSummary> out;
    auto where = [&] { return origin + ":" + std::to_string(line_no); };
    while (csv_read_record(is, fields, line_no)) {
        if (fields.size() == 1 && fields[0].empty()) continue;
        if (fields.size() != 10)
            throw std::runtime_error(where() + ": expected 10 fields, found " +
                                     std::to_string(fields.size()));
        CellSummary s;
        try {
            s.n = uint32_t(std::stoul(fields[0]));
            s.prop_pos = std::stod(fields[1]);
            s.empty = fields[2].empty();
            if (!s.empty) {
                s.f1_min = std::stod(fields[2]);
                s.f1_max = std::stod(fields[3]);
                s.f1_best = family_from_name(fields[4]);
                s.f1_tie = fields[5] == "1";
                s.auc_min = std::stod(fields[6]);
                s.auc_max = std::stod(fields[7]);
                s.auc_best = family_from_name(fields[8]);
                s.auc_tie = fields[9] == "1";
            }
        } catch (const std::exception& e) {
            throw std::runtime_error(where() + ": " + e.what());
        }
        out.push_back(s);
    }
    return out;
}

inline std::vector<CellSummary> load_summaries(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open summary file: " + path);
    return load_summaries(is, path);
}

}  // namespace sizesweep
