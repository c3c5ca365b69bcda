#include <doctest.h>

#include <nlohmann/json.hpp>

#include "splice/corpus.hpp"
#include "splice/error.hpp"
#include "splice/tokenize.hpp"
#include "support.hpp"

using namespace splice;

namespace {

std::string record(const std::string& id, const std::string& text)
{
    return nlohmann::json{{"id", id}, {"text", text}}.dump() + "\n";
}

} // namespace

TEST_CASE("utf8 lengths count scalar values")
{
    CHECK(utf8_length("") == 0);
    CHECK(utf8_length("abc") == 3);
    CHECK(utf8_length("h\xc3\xa9llo") == 5);
    CHECK(utf8_length("\xf0\x9f\x98\x80!") == 2);
    CHECK(utf8_valid("h\xc3\xa9llo"));
    CHECK_FALSE(utf8_valid("\xc3"));
    CHECK(utf8_slice("h\xc3\xa9llo", 1, 2) == "\xc3\xa9l");
    CHECK(Document::make("x", "h\xc3\xa9llo").char_len == 5);
}

TEST_CASE("ingest_jsonl keeps file order")
{
    test::TempDir dir;
    test::write_file(dir / "c.jsonl", record("b", "two") + record("a", "one") + "\n" + record("c", "three"));
    auto r = ingest_jsonl(dir / "c.jsonl");
    REQUIRE(r.corpus.size() == 3);
    CHECK(r.corpus[0].id == "b");
    CHECK(r.corpus[1].id == "a");
    CHECK(r.corpus[2].id == "c");
    CHECK(r.corpus.consumed_count() == 0);
    CHECK(r.skipped.dropped_too_long == 0);
}

TEST_CASE("ingest_jsonl drops documents over max_chars")
{
    test::TempDir dir;
    test::write_file(dir / "c.jsonl", record("long", std::string(30001, 'x')) + record("ok", std::string(30000, 'y')));
    auto r = ingest_jsonl(dir / "c.jsonl", 30000);
    REQUIRE(r.corpus.size() == 1);
    CHECK(r.corpus[0].id == "ok");
    CHECK(r.skipped.dropped_too_long == 1);
    for (const auto& d : r.corpus.documents()) {
        CHECK(d.char_len <= 30000);
    }
}

TEST_CASE("ingest_jsonl edge cases")
{
    test::TempDir dir;
    SUBCASE("empty file")
    {
        test::write_file(dir / "e.jsonl", "");
        auto r = ingest_jsonl(dir / "e.jsonl");
        CHECK(r.corpus.empty());
        CHECK(r.skipped.dropped_too_long == 0);
    }
    SUBCASE("malformed line names its number")
    {
        test::write_file(dir / "m.jsonl", record("a", "x") + "{not json\n");
        try {
            (void)ingest_jsonl(dir / "m.jsonl");
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("duplicate id names the id")
    {
        test::write_file(dir / "d.jsonl", record("same", "x") + record("same", "y"));
        try {
            (void)ingest_jsonl(dir / "d.jsonl");
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("same") != std::string::npos);
        }
    }
    SUBCASE("missing file")
    {
        CHECK_THROWS_AS((void)ingest_jsonl(dir / "nope.jsonl"), Error);
    }
    SUBCASE("optional fields")
    {
        test::write_file(dir / "o.jsonl", R"({"id":"a","text":"x","domain":"web","path":"p/a.txt"})" "\n");
        auto r = ingest_jsonl(dir / "o.jsonl");
        CHECK(r.corpus[0].domain == "web");
        CHECK(r.corpus[0].path == "p/a.txt");
    }
}

TEST_CASE("dedup_exact")
{
    SUBCASE("hand example")
    {
        Corpus c({Document::make("d1", "x"), Document::make("d2", "x"), Document::make("d3", "y")});
        auto r = dedup_exact(c);
        REQUIRE(r.corpus.size() == 2);
        CHECK(r.corpus[0].id == "d1");
        CHECK(r.corpus[1].id == "d3");
        CHECK(r.removed == 1);
    }
    SUBCASE("no duplicates is a no-op")
    {
        Corpus c({Document::make("a", "1"), Document::make("b", "2")});
        auto r = dedup_exact(c);
        CHECK(r.removed == 0);
        CHECK(r.corpus.size() == 2);
    }
    SUBCASE("planted duplicates against a pairwise scan")
    {
        std::mt19937_64 gen(7);
        std::vector<Document> docs;
        for (int i = 0; i < 900; ++i) {
            docs.push_back(Document::make("u" + std::to_string(i), "unique " + std::to_string(i)));
        }
        for (int i = 0; i < 100; ++i) {
            auto src = docs[gen() % 900].text;
            docs.push_back(Document::make("p" + std::to_string(i), src));
        }
        std::shuffle(docs.begin(), docs.end(), gen);
        // Pairwise oracle: a doc is a duplicate iff some earlier doc has the same text.
        std::size_t expected = 0;
        std::vector<std::string> kept;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            bool dup = false;
            for (std::size_t j = 0; j < i && !dup; ++j) {
                dup = docs[j].text == docs[i].text;
            }
            if (dup) {
                ++expected;
            } else {
                kept.push_back(docs[i].id);
            }
        }
        auto r = dedup_exact(Corpus(docs));
        CHECK(r.removed == expected);
        REQUIRE(r.corpus.size() == kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i) {
            CHECK(r.corpus[i].id == kept[i]);
        }
        std::set<std::string> texts;
        for (const auto& d : r.corpus.documents()) {
            CHECK(texts.insert(d.text).second);
        }
    }
}

TEST_CASE("token sidecar")
{
    test::TempDir dir;
    std::mt19937_64 gen(3);
    auto corpus = test::random_corpus(gen, 30, 50);
    std::string sidecar;
    std::vector<std::size_t> words;
    for (const auto& d : corpus.documents()) {
        // independent whitespace splitter
        std::istringstream ss(d.text);
        std::size_t n = 0;
        for (std::string w; ss >> w;) {
            ++n;
        }
        words.push_back(n);
        sidecar += nlohmann::json{{"id", d.id}, {"token_len", n}}.dump() + "\n";
    }
    SUBCASE("full cover switches to tokens")
    {
        test::write_file(dir / "s.jsonl", sidecar + R"({"id":"stranger","token_len":4})" "\n");
        CHECK(attach_token_lengths(corpus, dir / "s.jsonl") == 1);
        corpus.set_length_unit(LengthUnit::tokens);
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            CHECK(corpus.length(i) == words[i]);
            CHECK(corpus[i].token_len == words[i]);
        }
    }
    SUBCASE("missing doc blocks token mode and is named")
    {
        auto cut = sidecar.find('\n');
        test::write_file(dir / "s.jsonl", sidecar.substr(cut + 1));
        attach_token_lengths(corpus, dir / "s.jsonl");
        try {
            corpus.set_length_unit(LengthUnit::tokens);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("'d0'") != std::string::npos);
        }
    }
}

TEST_CASE("ingest_repo_tree")
{
    test::TempDir dir;
    SUBCASE("flat directory")
    {
        test::write_file(dir / "b.c", "b");
        test::write_file(dir / "a.c", "a");
        auto r = ingest_repo_tree(dir.path());
        REQUIRE(r.corpus.size() == 2);
        CHECK(r.corpus[0].id == "a.c");
        CHECK(r.corpus[1].id == "b.c");
        CHECK(r.corpus[0].path == "a.c");
    }
    SUBCASE("random nested trees follow a recursive walk")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            test::TempDir t;
            std::mt19937_64 gen(seed);
            std::size_t files = 0;
            test::random_tree(gen, t.path(), 3, files);
            std::vector<std::string> expected;
            test::oracle_dfs(t.path(), t.path(), expected);
            auto r = ingest_repo_tree(t.path());
            REQUIRE(r.corpus.size() == expected.size());
            for (std::size_t i = 0; i < expected.size(); ++i) {
                CHECK(r.corpus[i].id == expected[i]);
            }
        }
    }
    SUBCASE("oversized and invalid files are reported")
    {
        test::write_file(dir / "r" / "big.c", std::string(50, 'x'));
        test::write_file(dir / "r" / "bad.c", "\xff\xfe");
        test::write_file(dir / "r" / "ok.c", "fine");
        auto r = ingest_repo_tree(dir.path(), 40);
        REQUIRE(r.corpus.size() == 1);
        CHECK(r.corpus[0].id == "r/ok.c");
        CHECK(r.skipped.dropped_too_long == 1);
        CHECK(r.skipped.unreadable == 1);
    }
    SUBCASE("large repositories are split into byte-bounded chunks")
    {
        std::vector<std::string> names;
        for (int i = 0; i < 12; ++i) {
            auto name = "big/f" + std::to_string(10 + i) + ".c";
            test::write_file(dir / name, std::string(30, static_cast<char>('a' + i)));
            names.push_back(name);
        }
        test::write_file(dir / "small/x.c", "x");
        const std::uint64_t split = 100;
        auto r = ingest_repo_tree(dir.path(), 1000, split);
        std::map<std::string, std::uint64_t> bytes;
        std::vector<std::string> seen;
        for (const auto& d : r.corpus.documents()) {
            bytes[*d.domain] += d.text.size();
            if (d.id.rfind("big/", 0) == 0) {
                seen.push_back(d.id);
                CHECK(d.domain->rfind("big#", 0) == 0);
            }
        }
        CHECK(seen == names);
        CHECK(bytes.count("small") == 1);
        CHECK(bytes.size() == 1 + 4); // 12 files of 30 bytes, 3 per 100-byte chunk
        for (const auto& [tag, b] : bytes) {
            CHECK(b <= split);
        }
    }
    SUBCASE("missing root")
    {
        CHECK_THROWS_AS((void)ingest_repo_tree(dir / "absent"), Error);
    }
}

TEST_CASE("dfs path ordering is component-wise")
{
    CHECK(dfs_path_less("a/z.c", "a.c"));  // directory "a" sorts before file "a.c"
    CHECK(dfs_path_less("a/b/c", "a/c"));
    CHECK_FALSE(dfs_path_less("b", "a/b"));
}

TEST_CASE("corpus files round-trip")
{
    test::TempDir dir;
    std::mt19937_64 gen(11);
    auto corpus = test::random_corpus(gen, 25, 30);
    corpus.set_token_len(3, 17);
    write_corpus_jsonl(corpus, dir / "c.jsonl");
    auto back = load_corpus(dir / "c.jsonl");
    REQUIRE(back.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CHECK(back[i].id == corpus[i].id);
        CHECK(back[i].text == corpus[i].text);
        CHECK(back[i].domain == corpus[i].domain);
        CHECK(back[i].path == corpus[i].path);
        CHECK(back[i].token_len == corpus[i].token_len);
    }
    write_corpus_jsonl(back, dir / "c2.jsonl");
    CHECK(test::read_file(dir / "c.jsonl") == test::read_file(dir / "c2.jsonl"));
}

TEST_CASE("tokenizer matches the reference splitter")
{
    std::mt19937_64 gen(5);
    for (int i = 0; i < 50; ++i) {
        std::string text;
        for (int j = 0; j < 80; ++j) {
            const char alphabet[] = "abcXYZ019 ,.-_\n\t\xc3\xa9";
            text.push_back(alphabet[gen() % (sizeof(alphabet) - 1)]);
        }
        CHECK(tokenize(text) == test::oracle_terms(text));
    }
}
