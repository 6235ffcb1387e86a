#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "sizesweep/gridrunner.hpp"

using namespace sizesweep;

namespace {

Corpus small_corpus() {
    SyntheticSpec spec;
    spec.n_docs = 900;
    spec.prop_pos = 0.6;
    spec.vocab_size = 250;
    spec.doc_len_mean = 25.0;
    spec.separability = 1.0;
    spec.seed = 99;
    return generate_synthetic(spec);
}

GridConfig small_config() {
    GridConfig cfg;
    cfg.sizes = {400, 200};
    cfg.proportions = {0.9, 0.5};
    cfg.replicates = 2;
    cfg.master_seed = 7;
    cfg.bootstrap_b = 50;
    cfg.hyperparams.rf_trees = 10;
    cfg.hyperparams.lr_epochs = 50;
    cfg.hyperparams.lsvc_epochs = 50;
    cfg.hyperparams.sgd_epochs = 10;
    return cfg;
}

std::string drop_ms_column(const std::string& csv) {
    std::string out;
    std::istringstream is(csv);
    std::string line;
    while (std::getline(is, line)) {
        out.append(line, 0, line.rfind(','));
        out.push_back('\n');
    }
    return out;
}

}  // namespace

TEST_CASE("cell seeds separate purposes and share sampling across families") {
    using namespace sizesweep::detail;
    const uint64_t master = 12;
    std::set<uint64_t> seen;
    for (uint64_t purpose :
         {kSeedPurposeSample, kSeedPurposeSplit, kSeedPurposeTrain, kSeedPurposeBootstrap})
        seen.insert(grid_seed(master, purpose, kSeedNoFamily, 500, 0.9, 0));
    CHECK(seen.size() == 4);

    CHECK(grid_seed(master, kSeedPurposeSample, kSeedNoFamily, 500, 0.9, 0) ==
          grid_seed(master, kSeedPurposeSample, kSeedNoFamily, 500, 0.9, 0));
    CHECK(grid_seed(master, kSeedPurposeTrain, family_seed_key(Family::lr), 500, 0.9, 0) !=
          grid_seed(master, kSeedPurposeTrain, family_seed_key(Family::nb), 500, 0.9, 0));
    CHECK(grid_seed(master, kSeedPurposeTrain, 0, 500, 0.9, 0) !=
          grid_seed(master + 1, kSeedPurposeTrain, 0, 500, 0.9, 0));
    CHECK(grid_seed(master, kSeedPurposeTrain, 0, 500, 0.9, 0) !=
          grid_seed(master, kSeedPurposeTrain, 0, 500, 0.9, 1));
    CHECK(grid_seed(master, kSeedPurposeTrain, 0, 500, 0.9, 0) !=
          grid_seed(master, kSeedPurposeTrain, 0, 500, 0.95, 0));
}

TEST_CASE("grid run covers every requested cell once in canonical order") {
    auto corpus = small_corpus();
    auto cfg = small_config();
    auto results = run_grid(corpus, cfg);
    REQUIRE(results.size() == 8 * 2 * 2 * 2);

    std::set<std::tuple<std::string, uint32_t, double, uint32_t>> keys;
    for (const auto& r : results)
        keys.insert({family_name(r.family), r.n, r.prop_pos, r.replicate});
    CHECK(keys.size() == results.size());

    for (size_t i = 1; i < results.size(); ++i) {
        CHECK(detail::canonical_cell_order(results[i - 1], results[i]));
        CHECK_FALSE(detail::canonical_cell_order(results[i], results[i - 1]));
    }
    // family blocks in canonical order, sizes descending inside each block
    CHECK(results.front().family == Family::lr);
    CHECK(results.back().family == Family::sgd);
    CHECK(results.front().n == 400);

    for (const auto& r : results) {
        INFO(family_name(r.family) << " n=" << r.n << " prop=" << r.prop_pos);
        REQUIRE(r.status == "OK");
        REQUIRE(r.f1_weighted.has_value());
        REQUIRE(r.ci_lo.has_value());
        REQUIRE(r.ci_hi.has_value());
        REQUIRE(r.auc.has_value());
        CHECK(*r.f1_weighted >= 0.0);
        CHECK(*r.f1_weighted <= 1.0);
        CHECK(*r.ci_lo <= *r.ci_hi);
        CHECK(*r.auc >= 0.0);
        CHECK(*r.auc <= 1.0);
        CHECK(r.n_train == uint64_t(r.n * 6 / 10));
        CHECK(r.n_test == uint64_t(r.n * 2 / 10));
        CHECK(r.seed != 0);
    }
}

TEST_CASE("grid results are identical across reruns and worker counts") {
    auto corpus = small_corpus();
    auto cfg = small_config();
    cfg.sizes = {300, 200};
    cfg.replicates = 1;

    auto serial = run_grid(corpus, cfg, 1);
    auto serial_again = run_grid(corpus, cfg, 1);
    auto parallel = run_grid(corpus, cfg, 4);
    CHECK(same_outcome(serial, serial_again));
    CHECK(same_outcome(serial, parallel));

    std::ostringstream a, b;
    persist_results(serial, a);
    persist_results(parallel, b);
    CHECK(drop_ms_column(a.str()) == drop_ms_column(b.str()));
}

TEST_CASE("sampling is shared across families within a column") {
    auto corpus = small_corpus();
    auto cfg = small_config();
    cfg.sizes = {300};
    cfg.proportions = {0.7};
    cfg.replicates = 1;
    cfg.families = {Family::lr, Family::nb};
    auto results = run_grid(corpus, cfg);
    REQUIRE(results.size() == 2);
    // same drawn sample and split, so identical split sizes; training seeds differ
    CHECK(results[0].n_train == results[1].n_train);
    CHECK(results[0].n_test == results[1].n_test);
    CHECK(results[0].seed != results[1].seed);
}

TEST_CASE("extreme imbalance reports degenerate cells without crashes") {
    auto corpus = small_corpus();  // 540 positives, enough for 198
    GridConfig cfg;
    cfg.sizes = {200, 10};
    cfg.proportions = {0.99};
    cfg.bootstrap_b = 50;
    cfg.hyperparams.rf_trees = 5;
    auto results = run_grid(corpus, cfg);
    REQUIRE(results.size() == 16);
    for (const auto& r : results) {
        INFO(family_name(r.family) << " n=" << r.n);
        // 198/2 leaves the validation split without a negative; 9/1 starves
        // the validation and test splits.
        CHECK(r.status == "DEGENERATE");
        if (r.n == 200) {
            // train and test still hold both classes, so the cell is scored
            REQUIRE(r.f1_weighted.has_value());
            REQUIRE(r.auc.has_value());
            CHECK(std::isfinite(*r.f1_weighted));
            CHECK(std::isfinite(*r.ci_lo));
            CHECK(std::isfinite(*r.ci_hi));
            CHECK(std::isfinite(*r.auc));
            CHECK(r.n_train == 120);
            CHECK(r.n_test == 40);
        } else {
            // the single negative lands in train; a one-class test split
            // cannot be scored
            CHECK_FALSE(r.f1_weighted.has_value());
            CHECK_FALSE(r.auc.has_value());
            CHECK(r.n_train == 6);
            CHECK(r.n_test == 2);
        }
    }
}

TEST_CASE("a cell larger than the corpus fails without stopping the run") {
    auto corpus = small_corpus();
    GridConfig cfg;
    cfg.sizes = {5000, 200};
    cfg.proportions = {0.5};
    cfg.families = {Family::nb};
    cfg.bootstrap_b = 50;
    auto results = run_grid(corpus, cfg);
    REQUIRE(results.size() == 2);
    CHECK(results[0].n == 5000);
    CHECK(results[0].status == "FAILED:insufficient-data");
    CHECK_FALSE(results[0].f1_weighted.has_value());
    CHECK(results[1].n == 200);
    CHECK(results[1].status == "OK");
}

TEST_CASE("results csv round-trips losslessly") {
    auto corpus = small_corpus();
    auto cfg = small_config();
    cfg.sizes = {200};
    cfg.replicates = 1;
    auto results = run_grid(corpus, cfg);

    std::ostringstream os;
    persist_results(results, os);
    std::istringstream is(os.str());
    auto loaded = load_results(is, "mem");
    REQUIRE(same_outcome(results, loaded));
    for (size_t i = 0; i < results.size(); ++i) CHECK(results[i].ms == loaded[i].ms);

    std::ostringstream again;
    persist_results(loaded, again);
    CHECK(os.str() == again.str());

    std::istringstream header_only(std::string(kResultsHeader) + "\n");
    CHECK(load_results(header_only, "mem").empty());
}

TEST_CASE("results loader tolerates extra columns and reordered headers") {
    std::string text =
        "provenance,n,family,prop_pos,replicate,seed,status,f1_weighted,ci_lo,ci_hi,auc,"
        "n_train,n_test,ms\n"
        "transcribed,500,DT,0.5,0,0,OK,0.72,0.66,0.78,0.75,300,100,0\n"
        "tiebreak,200,KNN,0.9,0,0,DEGENERATE,,,,,120,40,3\n";
    std::istringstream is(text);
    auto rows = load_results(is, "mem");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].family == Family::dt);
    CHECK(rows[0].n == 500);
    CHECK(rows[0].f1_weighted == 0.72);
    CHECK(rows[1].status == "DEGENERATE");
    CHECK_FALSE(rows[1].auc.has_value());
}

TEST_CASE("results loader names schema problems") {
    auto load_text = [](const std::string& text) {
        std::istringstream is(text);
        return load_results(is, "mem");
    };
    CHECK_THROWS_WITH(load_text("family,n,prop_pos\nLR,5,0.5\n"),
                      Catch::Matchers::ContainsSubstring("missing column 'replicate'"));
    const std::string header(kResultsHeader);
    CHECK_THROWS_WITH(load_text(header + "\nGPT,5,0.5,0,0,OK,,,,,1,1,0\n"),
                      Catch::Matchers::ContainsSubstring("bad family"));
    CHECK_THROWS_WITH(load_text(header + "\nLR,5,0.5,0,0,OK,,,,,1,1\n"),
                      Catch::Matchers::ContainsSubstring("expected 13 fields"));
    CHECK_THROWS_WITH(load_text(header + "\nLR,five,0.5,0,0,OK,,,,,1,1,0\n"),
                      Catch::Matchers::ContainsSubstring("bad n value 'five'"));
    CHECK_THROWS_WITH(load_text(header + "\nLR,5,0.5,0,0,OK,high,,,,1,1,0\n"),
                      Catch::Matchers::ContainsSubstring("bad f1_weighted"));
    CHECK_THROWS_WITH(load_text(header + "\nLR,5,0.5,0,0,,,,,,1,1,0\n"),
                      Catch::Matchers::ContainsSubstring("empty status"));
    CHECK_THROWS_WITH(load_text(""), Catch::Matchers::ContainsSubstring("empty results file"));
}

TEST_CASE("grid config json parsing") {
    SECTION("empty object keeps documented defaults") {
        auto cfg = grid_config_from_json(nlohmann::json::object());
        CHECK(cfg.sizes == std::vector<uint32_t>{5000, 4000, 3000, 2000, 1000, 800, 600, 500,
                                                 400, 200});
        CHECK(cfg.proportions == std::vector<double>{0.99, 0.95, 0.9, 0.8, 0.7, 0.6, 0.5});
        CHECK(cfg.families.size() == 8);
        CHECK(cfg.replicates == 1);
        CHECK(cfg.bootstrap_b == 1000);
        CHECK(cfg.min_df == 1);
        CHECK(cfg.pipeline.stem);
        CHECK_FALSE(cfg.pipeline.drop_numbers);
    }
    SECTION("full override") {
        auto cfg = grid_config_from_json(nlohmann::json::parse(R"({
            "sizes": [600, 300],
            "proportions": [0.8, 0.5],
            "families": ["KNN", "LR"],
            "replicates": 3,
            "master_seed": 99,
            "stem": false,
            "drop_numbers": true,
            "min_df": 2,
            "bootstrap_b": 200,
            "ci_level": 0.9,
            "hyperparams": {"rf_trees": 7, "knn_k": 3, "rf_bootstrap": false, "lr_lambda": 0.01}
        })"));
        CHECK(cfg.sizes == std::vector<uint32_t>{600, 300});
        CHECK(cfg.families == std::vector<Family>{Family::knn, Family::lr});
        CHECK(cfg.replicates == 3);
        CHECK(cfg.master_seed == 99);
        CHECK_FALSE(cfg.pipeline.stem);
        CHECK(cfg.pipeline.drop_numbers);
        CHECK(cfg.min_df == 2);
        CHECK(cfg.bootstrap_b == 200);
        CHECK(cfg.ci_level == 0.9);
        CHECK(cfg.hyperparams.rf_trees == 7);
        CHECK(cfg.hyperparams.knn_k == 3);
        CHECK_FALSE(cfg.hyperparams.rf_bootstrap);
        CHECK(cfg.hyperparams.lr_lambda == 0.01);
    }
    SECTION("unknown keys and bad values are rejected") {
        auto parse = [](const std::string& s) {
            return grid_config_from_json(nlohmann::json::parse(s));
        };
        CHECK_THROWS_WITH(parse(R"({"sises": [100]})"),
                          Catch::Matchers::ContainsSubstring("unknown key 'sises'"));
        CHECK_THROWS_WITH(parse(R"({"hyperparams": {"rf_depth": 3}})"),
                          Catch::Matchers::ContainsSubstring("unknown hyperparameter"));
        CHECK_THROWS_WITH(parse(R"({"families": ["BERT"]})"),
                          Catch::Matchers::ContainsSubstring("unknown model family"));
        CHECK_THROWS_WITH(parse(R"({"proportions": [1.0]})"),
                          Catch::Matchers::ContainsSubstring("strictly inside (0,1)"));
        CHECK_THROWS_WITH(parse(R"({"replicates": 0})"),
                          Catch::Matchers::ContainsSubstring("replicates"));
        CHECK_THROWS_WITH(parse(R"({"sizes": [100, 100]})"),
                          Catch::Matchers::ContainsSubstring("duplicates"));
        CHECK_THROWS_WITH(parse(R"({"replicates": -2})"),
                          Catch::Matchers::ContainsSubstring("non-negative integer"));
        CHECK_THROWS_WITH(parse(R"({"stem": 1})"),
                          Catch::Matchers::ContainsSubstring("'stem' must be a boolean"));
        CHECK_THROWS_WITH(parse(R"([1,2])"),
                          Catch::Matchers::ContainsSubstring("root must be an object"));
        CHECK_THROWS_AS(parse(R"({"sizes": []})"), std::invalid_argument);
    }
}

TEST_CASE("config files load from disk with parse errors reported") {
    const std::string dir = SIZESWEEP_TEST_TMP;
    const std::string good = dir + "/grid_cfg_good.json";
    {
        std::ofstream os(good);
        os << R"({"sizes": [250], "proportions": [0.5], "families": ["NB"], "bootstrap_b": 40})";
    }
    auto cfg = load_grid_config(good);
    CHECK(cfg.sizes == std::vector<uint32_t>{250});
    CHECK(cfg.families == std::vector<Family>{Family::nb});

    const std::string bad = dir + "/grid_cfg_bad.json";
    {
        std::ofstream os(bad);
        os << "{not json";
    }
    CHECK_THROWS_AS(load_grid_config(bad), std::runtime_error);
    CHECK_THROWS_AS(load_grid_config(dir + "/does_not_exist.json"), std::runtime_error);
}

TEST_CASE("results files persist to disk and reload") {
    auto corpus = small_corpus();
    GridConfig cfg;
    cfg.sizes = {200};
    cfg.proportions = {0.5};
    cfg.families = {Family::lr, Family::knn};
    cfg.bootstrap_b = 40;
    auto results = run_grid(corpus, cfg);

    const std::string path = std::string(SIZESWEEP_TEST_TMP) + "/grid_results.csv";
    persist_results(results, path);
    auto loaded = load_results(path);
    CHECK(same_outcome(results, loaded));
    CHECK_THROWS_AS(load_results(std::string(SIZESWEEP_TEST_TMP) + "/missing.csv"),
                    std::runtime_error);
}
