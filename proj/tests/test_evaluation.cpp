#include "mlmap/evaluation.hpp"

#include "bleu_oracle.hpp"
#include "mlmap/rng.hpp"
#include "test_fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace mlmap;

namespace {

std::vector<std::string> words(std::initializer_list<const char*> ws) {
    std::vector<std::string> out;
    for (const char* w : ws) out.emplace_back(w);
    return out;
}

}  // namespace

TEST_CASE("corpus_bleu closed cases") {
    SUBCASE("exact matches score one") {
        std::vector<std::vector<std::string>> hyps = {words({"a", "person", "walks"}), words({"someone", "waves"})};
        std::vector<std::vector<std::vector<std::string>>> refs = {
            {words({"a", "person", "walks"}), words({"a", "human", "strolls"})},
            {words({"someone", "waves"})},
        };
        CHECK(corpus_bleu(hyps, refs) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("no shared unigrams scores below 0.01") {
        std::vector<std::vector<std::string>> hyps = {words({"x", "y", "z"})};
        std::vector<std::vector<std::vector<std::string>>> refs = {{words({"a", "person", "walks"})}};
        CHECK(corpus_bleu(hyps, refs) < 0.01);
    }
    SUBCASE("duplicate references never change the score") {
        std::vector<std::vector<std::string>> hyps = {words({"a", "person", "walks", "walks"})};
        std::vector<std::vector<std::vector<std::string>>> refs = {
            {words({"a", "person", "walks", "far"}), words({"someone", "walks"})}};
        double base = corpus_bleu(hyps, refs);
        refs[0].push_back(refs[0][0]);
        refs[0].push_back(refs[0][1]);
        CHECK(corpus_bleu(hyps, refs) == base);
    }
    SUBCASE("bounds") {
        Rng rng(3);
        std::vector<std::string> pool = {"a", "b", "c", "d", "e"};
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<std::vector<std::string>> hyps;
            std::vector<std::vector<std::vector<std::string>>> refs;
            std::size_t items = 1 + rng.below(4);
            for (std::size_t i = 0; i < items; ++i) {
                std::vector<std::string> h;
                for (std::size_t k = 0, n = rng.below(6); k < n; ++k) h.push_back(pool[rng.below(pool.size())]);
                hyps.push_back(h);
                std::vector<std::vector<std::string>> r;
                for (std::size_t j = 0, nr = 1 + rng.below(3); j < nr; ++j) {
                    std::vector<std::string> ref;
                    for (std::size_t k = 0, n = 1 + rng.below(6); k < n; ++k) ref.push_back(pool[rng.below(pool.size())]);
                    r.push_back(ref);
                }
                refs.push_back(r);
            }
            double s = corpus_bleu(hyps, refs);
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
    }
    SUBCASE("errors") {
        std::vector<std::vector<std::string>> empty_hyps;
        std::vector<std::vector<std::vector<std::string>>> empty_refs;
        CHECK_THROWS(corpus_bleu(empty_hyps, empty_refs));
        std::vector<std::vector<std::string>> hyps = {words({"a"})};
        std::vector<std::vector<std::vector<std::string>>> no_refs = {{}};
        CHECK_THROWS(corpus_bleu(hyps, no_refs));
    }
}

TEST_CASE("corpus_bleu agrees with the brute-force oracle") {
    Rng rng(20);
    std::vector<std::string> pool = {"a", "person", "walks", "runs", "waves", "left", "right", "slowly"};
    for (int corpus = 0; corpus < 20; ++corpus) {
        std::size_t items = 1 + rng.below(10);
        std::vector<std::vector<std::string>> hyps;
        std::vector<std::vector<std::vector<std::string>>> refs;
        for (std::size_t i = 0; i < items; ++i) {
            std::vector<std::string> h;
            for (std::size_t k = 0, n = rng.below(9); k < n; ++k) h.push_back(pool[rng.below(pool.size())]);
            hyps.push_back(h);
            std::vector<std::vector<std::string>> r;
            for (std::size_t j = 0, nr = 1 + rng.below(3); j < nr; ++j) {
                std::vector<std::string> ref;
                for (std::size_t k = 0, n = 1 + rng.below(9); k < n; ++k) ref.push_back(pool[rng.below(pool.size())]);
                r.push_back(ref);
            }
            refs.push_back(r);
        }
        double mine = corpus_bleu(hyps, refs);
        double oracle = static_cast<double>(bleu_oracle::score(hyps, refs));
        CHECK(std::abs(mine - oracle) < 1e-9);
    }
}

TEST_CASE("bleu_by_rank shapes and skipping") {
    M2lConfig cfg;
    cfg.joints = 3;
    cfg.encoder_units = {4};
    cfg.decoder_units = {4};
    cfg.embedding_dim = 4;
    cfg.vocab_size = 8;
    cfg.max_motion_len = 5;
    cfg.max_sentence_len = 5;
    Rng rng(2);
    M2lModel model(cfg, rng);

    Vocabulary vocab = build_vocab({{"a", "b", "c", "d"}});
    REQUIRE(vocab.size() == 8);

    std::vector<PreparedMotion> motions(2);
    for (int i = 0; i < 2; ++i) {
        motions[i].id = "m" + std::to_string(i);
        motions[i].offset = 0;
        motions[i].active_len = 3;
        motions[i].frames = Tensor(5, 4);
        for (int t = 0; t < 3; ++t) {
            for (int j = 0; j < 3; ++j) motions[i].frames(t, j) = 0.1 * (i + 1) * (t + 1 + j);
            motions[i].frames(t, 3) = 1.0;
        }
    }
    std::vector<M2lEvalItem> items(2);
    items[0] = {"m0", &motions[0], {{"a", "b"}}};
    items[1] = {"m1", &motions[1], {}};  // no annotations: skipped with warning

    SUBCASE("one score per rank") {
        BleuReport report = bleu_by_rank(model, vocab, items, 3, 1, "train");
        CHECK(report.scores_by_rank.size() == 3);
        for (double s : report.scores_by_rank) {
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
        CHECK(report.smoothing == "add1-on-zero");
    }
    SUBCASE("width one gives a single score") {
        BleuReport report = bleu_by_rank(model, vocab, items, 1, 1, "train");
        CHECK(report.scores_by_rank.size() == 1);
    }
    SUBCASE("csv layout") {
        BleuReport report = bleu_by_rank(model, vocab, items, 2, 1, "test");
        std::string csv = report.to_csv();
        CHECK(csv.find("rank,split,score") == 0);
        CHECK(csv.find("1,test,") != std::string::npos);
        CHECK(csv.find("2,test,") != std::string::npos);
    }
}

TEST_CASE("chained evaluation requires a positive baseline") {
    L2mConfig lcfg;
    lcfg.joints = 3;
    lcfg.encoder_units = {4};
    lcfg.decoder_units = {4};
    lcfg.embedding_dim = 4;
    lcfg.vocab_size = 8;
    lcfg.mixture_components = 2;
    lcfg.max_motion_len = 5;
    lcfg.max_sentence_len = 6;
    M2lConfig mcfg;
    mcfg.joints = 3;
    mcfg.encoder_units = {4};
    mcfg.decoder_units = {4};
    mcfg.embedding_dim = 4;
    mcfg.vocab_size = 8;
    mcfg.max_motion_len = 5;
    mcfg.max_sentence_len = 6;

    Rng rng(4);
    L2mModel l2m(lcfg, rng);
    M2lModel m2l(mcfg, rng);
    Vocabulary vocab = build_vocab({{"a", "b", "c", "d"}});

    // several sentences so at least one random generation has active frames
    std::vector<PreparedText> sentences(6);
    std::vector<ChainedEvalItem> items;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        sentences[i].id = "m" + std::to_string(i);
        sentences[i].tokens = {"a", "b"};
        SentenceRecord enc = encode_sentence(vocab, sentences[i].tokens, lcfg.max_sentence_len);
        sentences[i].indices = enc.indices;
        sentences[i].active_length = enc.active_length;
        items.push_back({sentences[i].id, &sentences[i], {{"a", "b"}}});
    }

    CHECK_THROWS(chained_relative_performance(l2m, m2l, vocab, items, 2, 1, 1, 0.0, 1, "train"));

    ChainedReport report = chained_relative_performance(l2m, m2l, vocab, items, 2, 2, 1, 0.5, 1, "train");
    CHECK(report.relative_by_rank.size() == 2);
    CHECK(report.baseline_bleu == 0.5);
    for (std::size_t r = 0; r < 2; ++r)
        CHECK(report.relative_by_rank[r] == doctest::Approx(report.bleu_by_rank[r] / 0.5));
}
