#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "sizesweep/sampler.hpp"

using namespace sizesweep;

namespace {

// Labels laid out evenly; texts are irrelevant to sampling.
Corpus label_corpus(size_t n, double prop_pos) {
    SyntheticSpec spec;
    spec.n_docs = n;
    spec.prop_pos = prop_pos;
    spec.vocab_size = 4;
    spec.doc_len_mean = 1.0;
    spec.seed = 7;
    return generate_synthetic(spec);
}

struct SplitTally {
    uint64_t size, pos, neg;
};

SplitTally tally(const Corpus& corpus, const std::vector<size_t>& part) {
    SplitTally t{part.size(), 0, 0};
    for (size_t i : part) (corpus[i].label ? t.pos : t.neg)++;
    return t;
}

}  // namespace

TEST_CASE("draw hits exact stratified counts") {
    auto corpus = label_corpus(2000, 0.5);
    auto s = draw_sample(corpus, 600, 0.5, 11);
    CHECK(s.n_pos == 300);
    CHECK(s.n_neg == 300);
    REQUIRE(s.indices.size() == 600);

    uint64_t pos_seen = 0;
    std::set<size_t> unique(s.indices.begin(), s.indices.end());
    CHECK(unique.size() == 600);
    for (size_t i : s.indices) pos_seen += uint64_t(corpus[i].label);
    CHECK(pos_seen == 300);
}

TEST_CASE("positive count floors and the remainder goes negative") {
    auto corpus = label_corpus(1200, 0.6);
    auto odd = draw_sample(corpus, 201, 0.5, 3);
    CHECK(odd.n_pos == 100);
    CHECK(odd.n_neg == 101);

    // 500 * 0.7 is 349.99999999999994 in binary; the draw must still see 350.
    auto guard = draw_sample(corpus, 500, 0.7, 3);
    CHECK(guard.n_pos == 350);
    CHECK(guard.n_neg == 150);

    auto all_pos = draw_sample(corpus, 10, 1.0, 3);
    CHECK(all_pos.n_pos == 10);
    CHECK(all_pos.n_neg == 0);
}

TEST_CASE("draw validation errors") {
    auto corpus = label_corpus(100, 0.5);
    CHECK_THROWS_AS(draw_sample(corpus, 0, 0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(draw_sample(corpus, 10, 1.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(draw_sample(corpus, 101, 0.5, 1), std::runtime_error);
    // 90 positives requested but only 50 exist
    CHECK_THROWS_WITH(draw_sample(corpus, 100, 0.9, 1),
                      Catch::Matchers::ContainsSubstring("positive"));
}

TEST_CASE("draw is deterministic in the seed") {
    auto corpus = label_corpus(800, 0.5);
    auto a = draw_sample(corpus, 200, 0.5, 42);
    auto b = draw_sample(corpus, 200, 0.5, 42);
    CHECK(a.indices == b.indices);
    auto c = draw_sample(corpus, 200, 0.5, 43);
    CHECK(a.indices != c.indices);
}

TEST_CASE("every document of a class is reachable across seeds") {
    auto corpus = label_corpus(40, 0.5);
    std::map<size_t, int> seen;
    for (uint64_t seed = 0; seed < 300; ++seed)
        for (size_t i : draw_sample(corpus, 10, 0.5, seed).indices) seen[i]++;
    CHECK(seen.size() == 40);  // nothing is systematically excluded
}

TEST_CASE("balanced 600 splits into 360/120/120 with preserved mix") {
    auto corpus = label_corpus(2000, 0.5);
    auto sample = draw_sample(corpus, 600, 0.5, 5);
    auto splits = split_sample(corpus, sample, 6);

    auto train = tally(corpus, splits.train);
    auto val = tally(corpus, splits.val);
    auto test = tally(corpus, splits.test);
    CHECK(train.size == 360);
    CHECK(train.pos == 180);
    CHECK(train.neg == 180);
    CHECK(val.size == 120);
    CHECK(val.pos == 60);
    CHECK(val.neg == 60);
    CHECK(test.size == 120);
    CHECK(test.pos == 60);
    CHECK(test.neg == 60);
    CHECK(check_degenerate(corpus, splits) == SplitHealth::ok);
}

TEST_CASE("minority of ten spreads 6/2/2 and stays viable") {
    auto corpus = label_corpus(4000, 0.99);
    auto sample = draw_sample(corpus, 1000, 0.99, 8);
    CHECK(sample.n_pos == 990);
    CHECK(sample.n_neg == 10);
    auto splits = split_sample(corpus, sample, 9);
    CHECK(tally(corpus, splits.train).neg == 6);
    CHECK(tally(corpus, splits.val).neg == 2);
    CHECK(tally(corpus, splits.test).neg == 2);
    CHECK(check_degenerate(corpus, splits) == SplitHealth::ok);
}

TEST_CASE("two minority documents cannot cover three splits") {
    auto corpus = label_corpus(4000, 0.99);
    auto sample = draw_sample(corpus, 200, 0.99, 8);
    CHECK(sample.n_pos == 198);
    CHECK(sample.n_neg == 2);
    auto splits = split_sample(corpus, sample, 9);
    CHECK(check_degenerate(corpus, splits) == SplitHealth::degenerate);
}

TEST_CASE("split is deterministic and partitions the sample") {
    auto corpus = label_corpus(1000, 0.7);
    auto sample = draw_sample(corpus, 300, 0.7, 21);
    auto a = split_sample(corpus, sample, 22);
    auto b = split_sample(corpus, sample, 22);
    CHECK(a.train == b.train);
    CHECK(a.val == b.val);
    CHECK(a.test == b.test);

    auto c = split_sample(corpus, sample, 23);
    CHECK((a.train != c.train || a.val != c.val || a.test != c.test));

    std::set<size_t> all(sample.indices.begin(), sample.indices.end());
    std::set<size_t> rebuilt;
    for (int k = 0; k < 3; ++k)
        for (size_t i : a.part(k)) CHECK(rebuilt.insert(i).second);  // disjoint
    CHECK(rebuilt == all);
}

TEST_CASE("split arithmetic stays consistent over a dense sweep") {
    const double props[] = {0.99, 0.95, 0.9, 0.8, 0.7, 0.6, 0.5};
    auto corpus = label_corpus(3000, 0.5);  // plenty of both classes
    for (uint64_t n : {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 13, 17, 25, 50, 99, 101,
                       200, 201, 400, 500, 600, 601, 999, 1000}) {
        for (double p : props) {
            auto want_pos = uint64_t(std::floor(double(n) * p + 1e-9));
            if (want_pos > 1500 || n - want_pos > 1500) continue;
            auto sample = draw_sample(corpus, n, p, n * 31 + uint64_t(p * 100));
            auto splits = split_sample(corpus, sample, n * 17 + 1);

            uint64_t total = 0, total_pos = 0;
            uint64_t sizes[3];
            for (int k = 0; k < 3; ++k) {
                auto t = tally(corpus, splits.part(k));
                sizes[k] = t.size;
                total += t.size;
                total_pos += t.pos;
                REQUIRE(t.pos + t.neg == t.size);
                // each split's mix tracks the sample's within integer rounding
                if (t.size > 0) {
                    double dev = std::abs(double(t.pos) / double(t.size) -
                                          double(sample.n_pos) / double(n));
                    REQUIRE(dev <= 1.0 / double(t.size) + 1e-12);
                }
            }
            REQUIRE(total == n);
            REQUIRE(total_pos == sample.n_pos);
            // 60/20/20 under largest remainder: sizes within one unit of quota
            REQUIRE(std::abs(double(sizes[0]) - 0.6 * double(n)) < 1.0);
            REQUIRE(std::abs(double(sizes[1]) - 0.2 * double(n)) < 1.0);
            REQUIRE(std::abs(double(sizes[2]) - 0.2 * double(n)) < 1.0);
        }
    }
}

TEST_CASE("split input validation") {
    auto corpus = label_corpus(100, 0.5);
    Sample empty;
    CHECK_THROWS_AS(split_sample(corpus, empty, 1), std::invalid_argument);

    auto sample = draw_sample(corpus, 20, 0.5, 1);
    sample.n_pos = 3;  // now inconsistent with indices
    CHECK_THROWS_AS(split_sample(corpus, sample, 1), std::invalid_argument);
}
