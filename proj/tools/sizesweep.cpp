// Command line front end: sweep a labelled corpus across sample sizes and
// class proportions, summarize results, recommend minimum sizes, and
// generate synthetic corpora for calibration runs.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "sizesweep/report.hpp"

using namespace sizesweep;

namespace {

nlohmann::json config_to_json(const GridConfig& cfg) {
    nlohmann::json families = nlohmann::json::array();
    for (Family f : cfg.families) families.push_back(family_name(f));
    const Hyperparams& hp = cfg.hyperparams;
    return {
        {"sizes", cfg.sizes},
        {"proportions", cfg.proportions},
        {"families", families},
        {"replicates", cfg.replicates},
        {"master_seed", cfg.master_seed},
        {"stem", cfg.pipeline.stem},
        {"drop_numbers", cfg.pipeline.drop_numbers},
        {"min_df", cfg.min_df},
        {"bootstrap_b", cfg.bootstrap_b},
        {"ci_level", cfg.ci_level},
        {"hyperparams",
         {{"lr_lambda", hp.lr_lambda},
          {"lr_epochs", hp.lr_epochs},
          {"nb_alpha", hp.nb_alpha},
          {"dt_min_split", hp.dt_min_split},
          {"dt_max_depth", hp.dt_max_depth},
          {"rf_trees", hp.rf_trees},
          {"rf_bootstrap", hp.rf_bootstrap},
          {"rf_feature_subsample", hp.rf_feature_subsample},
          {"knn_k", hp.knn_k},
          {"lsvc_c", hp.lsvc_c},
          {"lsvc_epochs", hp.lsvc_epochs},
          {"svc_c", hp.svc_c},
          {"svc_gamma", hp.svc_gamma},
          {"svc_tol", hp.svc_tol},
          {"sgd_lambda", hp.sgd_lambda},
          {"sgd_epochs", hp.sgd_epochs}}},
    };
}

// "90/10" -> 0.9; both sides must be positive
double parse_proportion(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == text.size())
        throw std::runtime_error("proportion must look like 90/10, got '" + text + "'");
    double pos = 0.0, neg = 0.0;
    try {
        size_t used_pos = 0, used_neg = 0;
        pos = std::stod(text.substr(0, slash), &used_pos);
        neg = std::stod(text.substr(slash + 1), &used_neg);
        if (used_pos != slash || used_neg != text.size() - slash - 1)
            throw std::runtime_error("trailing characters");
    } catch (const std::exception&) {
        throw std::runtime_error("proportion must look like 90/10, got '" + text + "'");
    }
    if (pos <= 0.0 || neg <= 0.0)
        throw std::runtime_error("both sides of the proportion must be positive");
    return pos / (pos + neg);
}

void write_text(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

int cmd_run(const std::string& corpus_path, const std::string& config_path,
            const std::string& out_path, unsigned workers, uint64_t cap_group,
            bool no_stem, bool drop_numbers, uint32_t min_df) {
    GridConfig cfg = config_path.empty() ? GridConfig{} : load_grid_config(config_path);
    if (no_stem) cfg.pipeline.stem = false;
    if (drop_numbers) cfg.pipeline.drop_numbers = true;
    if (min_df > 0) cfg.min_df = min_df;
    validate_grid_config(cfg);

    Corpus corpus = load_corpus(corpus_path);
    if (cap_group > 0) corpus = cap_group_documents(corpus, cap_group);
    const auto counts = class_counts(corpus);
    std::fprintf(stderr, "corpus: %zu documents (%llu positive, %llu negative)\n",
                 corpus.size(), (unsigned long long)counts.pos, (unsigned long long)counts.neg);

    auto results = run_grid(corpus, cfg, workers);
    persist_results(results, out_path);

    std::map<std::string, size_t> tally;
    for (const auto& r : results) tally[r.status.substr(0, r.status.find(':'))]++;
    std::string breakdown;
    for (const auto& [status, count] : tally)
        breakdown += (breakdown.empty() ? "" : ", ") + std::to_string(count) + " " + status;
    std::fprintf(stderr, "grid complete: %zu cells (%s) -> %s\n", results.size(),
                 breakdown.c_str(), out_path.c_str());
    return 0;
}

int cmd_report(const std::string& results_path, const std::string& format,
               const std::string& out_path) {
    auto summaries = summarize_cells(load_results(results_path));
    const TableFormat fmt = format == "md" ? TableFormat::markdown : TableFormat::csv;
    write_text(emit_table(summaries, fmt), out_path);
    return 0;
}

int cmd_recommend(const std::string& results_path, double target_f1,
                  const std::string& proportion) {
    const double prop = parse_proportion(proportion);
    auto rec = recommend_min_n(load_results(results_path), target_f1, prop);
    if (!rec) {
        std::printf("no sample size in the results reaches weighted F1 %s at %s\n",
                    format_metric_2dp(target_f1).c_str(), proportion.c_str());
        return 1;
    }
    std::printf("minimum n = %u (best family %s, mean weighted F1 %s)\n", rec->n,
                std::string(family_name(rec->family)).c_str(),
                format_metric_2dp(rec->f1).c_str());
    return 0;
}

int cmd_synth(const SyntheticSpec& spec, const std::string& out_path) {
    Corpus corpus = generate_synthetic(spec);
    save_corpus(corpus, out_path);
    const auto counts = class_counts(corpus);
    std::fprintf(stderr, "wrote %zu documents (%llu positive, %llu negative) -> %s\n",
                 corpus.size(), (unsigned long long)counts.pos, (unsigned long long)counts.neg,
                 out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sample-size sweep for binary text classification"};
    app.require_subcommand(0, 1);

    bool print_stopwords = false, print_defaults = false;
    app.add_flag("--print-stopwords", print_stopwords,
                 "print the embedded stopword list and exit");
    app.add_flag("--print-defaults", print_defaults,
                 "print the default run configuration as json and exit");

    auto* run = app.add_subcommand("run", "sweep the size/proportion grid over a corpus");
    std::string corpus_path, config_path, run_out;
    unsigned workers = 1;
    uint64_t cap_group = 0;
    bool no_stem = false, drop_numbers = false;
    uint32_t min_df = 0;
    run->add_option("--corpus", corpus_path, "corpus file (.jsonl/.ndjson/.csv)")
        ->required();
    run->add_option("--config", config_path, "json run configuration");
    run->add_option("-o,--output", run_out, "results csv to write")->required();
    run->add_option("--workers", workers, "parallel worker threads")
        ->check(CLI::PositiveNumber);
    run->add_option("--cap-group-docs", cap_group,
                    "keep at most this many documents per group before sampling")
        ->check(CLI::PositiveNumber);
    run->add_flag("--no-stem", no_stem, "disable suffix stemming");
    run->add_flag("--drop-numbers", drop_numbers, "drop purely numeric tokens");
    run->add_option("--min-df", min_df, "minimum document frequency for vocabulary")
        ->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "summarize a results csv as a table");
    std::string results_path, format = "csv", report_out;
    report->add_option("--results", results_path, "results csv from a run")->required();
    report->add_option("--format", format, "table format")
        ->check(CLI::IsMember({"md", "csv"}));
    report->add_option("-o,--output", report_out, "output file (stdout when omitted)");

    auto* recommend = app.add_subcommand(
        "recommend", "smallest sample size reaching a target weighted F1");
    std::string rec_results, proportion;
    double target_f1 = 0.0;
    recommend->add_option("--results", rec_results, "results csv from a run")->required();
    recommend->add_option("--target-f1", target_f1, "weighted F1 to reach")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    recommend->add_option("--proportion", proportion, "class proportion as pos/neg, e.g. 90/10")
        ->required();

    auto* synth = app.add_subcommand("synth", "generate a synthetic labelled corpus");
    SyntheticSpec spec;
    std::string synth_out;
    synth->add_option("-o,--output", synth_out, "corpus file to write (.jsonl/.csv)")
        ->required();
    synth->add_option("--docs", spec.n_docs, "number of documents");
    synth->add_option("--prop-pos", spec.prop_pos, "positive class fraction")
        ->check(CLI::Range(0.0, 1.0));
    synth->add_option("--vocab", spec.vocab_size, "vocabulary size");
    synth->add_option("--doc-len", spec.doc_len_mean, "mean document length in tokens");
    synth->add_option("--separability", spec.separability,
                      "divergence between class word distributions (0 = identical)");
    synth->add_option("--seed", spec.seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (print_stopwords) {
            for (const auto& word : stopword_list()) std::cout << word << "\n";
            return 0;
        }
        if (print_defaults) {
            std::cout << config_to_json(GridConfig{}).dump(2) << "\n";
            return 0;
        }
        if (run->parsed())
            return cmd_run(corpus_path, config_path, run_out, workers, cap_group, no_stem,
                           drop_numbers, min_df);
        if (report->parsed()) return cmd_report(results_path, format, report_out);
        if (recommend->parsed()) return cmd_recommend(rec_results, target_f1, proportion);
        if (synth->parsed()) return cmd_synth(spec, synth_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    std::cout << app.help();
    return 0;
}
