#include <doctest.h>

#include "splice/bm25.hpp"
#include "splice/error.hpp"
#include "splice/retriever.hpp"
#include "support.hpp"

using namespace splice;

namespace {

Corpus abc_corpus()
{
    return Corpus({Document::make("d1", "a b"), Document::make("d2", "a c"), Document::make("d3", "c c")});
}

void check_against_oracle(const Corpus& corpus, const Bm25Index& index, std::size_t k, std::size_t cap)
{
    std::vector<std::string> ids, texts;
    for (const auto& d : corpus.documents()) {
        ids.push_back(d.id);
        texts.push_back(d.text);
    }
    test::OracleBm25 oracle(ids, texts);
    for (const auto& d : corpus.documents()) {
        auto got = index.query(d, k);
        auto want = oracle.query(d.text, k, cap, &d.id);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(index.doc_id(got[i].doc) == want[i].id);
            CHECK(std::abs(got[i].score - want[i].score) <= 1e-9 * std::abs(want[i].score));
        }
    }
}

} // namespace

TEST_CASE("bm25 build on a hand corpus")
{
    auto index = Bm25Index::build(abc_corpus());
    CHECK(index.n_docs() == 3);
    CHECK(index.avg_doc_len() == 2.0);
    CHECK(index.n_terms() == 3);
    CHECK(index.total_postings() == 5);
    auto c = index.term_id("c");
    REQUIRE(c);
    auto plist = index.postings(*c);
    REQUIRE(plist.size() == 2);
    CHECK(plist[0].doc == 1);
    CHECK(plist[0].tf == 1);
    CHECK(plist[1].doc == 2);
    CHECK(plist[1].tf == 2);
}

TEST_CASE("bm25 query on a hand corpus")
{
    auto index = Bm25Index::build(abc_corpus());
    auto hits = index.query_text("c", 2);
    REQUIRE(hits.size() == 2);
    CHECK(index.doc_id(hits[0].doc) == "d3");
    CHECK(index.doc_id(hits[1].doc) == "d2");
    // idf(c) = ln((3-2+0.5)/(2+0.5)+1) = ln(1.6); equal lengths so norm = k1
    const double idf = std::log(1.6);
    CHECK(hits[0].score == doctest::Approx(idf * 2 * 2.2 / (2 + 1.2)).epsilon(1e-12));
    CHECK(hits[1].score == doctest::Approx(idf * 2.2 / (1 + 1.2)).epsilon(1e-12));

    CHECK(index.query_text("zebra", 5).empty());
}

TEST_CASE("bm25 degenerate inputs")
{
    SUBCASE("single empty document")
    {
        auto index = Bm25Index::build(Corpus({Document::make("e", "")}));
        CHECK(index.doc_len(0) == 0);
        CHECK(index.total_postings() == 0);
        CHECK(index.avg_doc_len() == 0.0);
        CHECK(index.query_text("anything", 3).empty());
    }
    SUBCASE("empty corpus")
    {
        CHECK_THROWS_AS((void)Bm25Index::build(Corpus{}), Error);
    }
    SUBCASE("bad parameters")
    {
        CHECK_THROWS_AS((void)Bm25Index::build(abc_corpus(), {0.0, 0.75, 10}), Error);
        CHECK_THROWS_AS((void)Bm25Index::build(abc_corpus(), {1.2, 1.5, 10}), Error);
    }
    SUBCASE("unknown query document")
    {
        auto index = Bm25Index::build(abc_corpus());
        CHECK_THROWS_AS((void)index.query(Document::make("zz", "a"), 1), Error);
    }
}

TEST_CASE("bm25 posting count equals distinct (term, doc) pairs")
{
    std::mt19937_64 gen(21);
    for (int round = 0; round < 5; ++round) {
        auto corpus = test::random_corpus(gen, 120, 60);
        auto index = Bm25Index::build(corpus);
        std::size_t pairs = 0;
        double total = 0;
        for (const auto& d : corpus.documents()) {
            auto terms = test::oracle_terms(d.text);
            total += static_cast<double>(terms.size());
            pairs += std::set<std::string>(terms.begin(), terms.end()).size();
        }
        CHECK(index.total_postings() == pairs);
        CHECK(index.avg_doc_len() == doctest::Approx(total / 120.0).epsilon(1e-15));
        for (std::size_t t = 0; t < index.n_terms(); ++t) {
            auto plist = index.postings(static_cast<std::uint32_t>(t));
            for (std::size_t i = 1; i < plist.size(); ++i) {
                CHECK(plist[i - 1].doc < plist[i].doc);
            }
        }
    }
}

TEST_CASE("bm25 matches an exhaustive scorer")
{
    std::mt19937_64 gen(99);
    for (std::size_t k : {1, 3, 10}) {
        auto corpus = test::random_corpus(gen, 200, 80);
        auto index = Bm25Index::build(corpus);
        check_against_oracle(corpus, index, k, 1024);
    }
    SUBCASE("short query cap")
    {
        auto corpus = test::random_corpus(gen, 150, 80);
        auto index = Bm25Index::build(corpus, {1.2, 0.75, 5});
        check_against_oracle(corpus, index, 4, 5);
    }
}

TEST_CASE("bm25 query terms are distinct and capped")
{
    auto index = Bm25Index::build(abc_corpus(), {1.2, 0.75, 3});
    auto terms = index.query_terms("c a c b a");
    REQUIRE(terms.size() == 2); // first three tokens: c a c
    CHECK(index.term(terms[0]) == "c");
    CHECK(index.term(terms[1]) == "a");
}

TEST_CASE("bm25 index round-trips through a file")
{
    test::TempDir dir;
    std::mt19937_64 gen(4);
    auto corpus = test::random_corpus(gen, 80, 40);
    auto index = Bm25Index::build(corpus, {0.9, 0.4, 64});
    index.save(dir / "i.bm25");
    auto back = Bm25Index::load(dir / "i.bm25");
    CHECK(back.params().k1 == 0.9);
    CHECK(back.params().query_cap == 64);
    CHECK(back.avg_doc_len() == index.avg_doc_len());
    for (const auto& d : corpus.documents()) {
        CHECK(back.query(d, 5) == index.query(d, 5));
    }
    back.save(dir / "again.bm25");
    CHECK(test::read_file(dir / "i.bm25") == test::read_file(dir / "again.bm25"));

    auto bytes = test::read_file(dir / "i.bm25");
    test::write_file(dir / "cut.bm25", bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS((void)Bm25Index::load(dir / "cut.bm25"), Error);
    test::write_file(dir / "junk.bm25", "NOTBM25!rest");
    CHECK_THROWS_AS((void)Bm25Index::load(dir / "junk.bm25"), Error);
}

TEST_CASE("bm25 retriever excludes self and never repeats")
{
    std::mt19937_64 gen(8);
    auto corpus = test::random_corpus(gen, 60, 30);
    auto index = Bm25Index::build(corpus);
    Bm25Retriever retriever(index, corpus);
    for (std::uint32_t d = 0; d < corpus.size(); ++d) {
        auto hits = retriever.retrieve(d, 8);
        std::set<std::uint32_t> seen;
        for (std::size_t i = 0; i < hits.size(); ++i) {
            CHECK(hits[i].doc != d);
            CHECK(seen.insert(hits[i].doc).second);
            if (i > 0) {
                CHECK(hits[i - 1].score >= hits[i].score);
            }
        }
    }
    CachedRetriever cached(retriever, corpus.size(), 8, 4);
    for (std::uint32_t d = 0; d < corpus.size(); ++d) {
        CHECK(cached.retrieve(d, 8) == retriever.retrieve(d, 8));
        CHECK(cached.retrieve(d, 3) == retriever.retrieve(d, 3));
    }
}
