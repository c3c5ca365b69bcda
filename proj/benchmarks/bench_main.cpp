#include <benchmark/benchmark.h>

#include <random>

#include "splice/analysis.hpp"
#include "splice/bm25.hpp"
#include "splice/embedding.hpp"
#include "splice/packer.hpp"
#include "splice/retriever.hpp"

using namespace splice;

namespace {

// Zipf-ish synthetic text; word i is drawn with weight 1/(i+1).
Corpus make_corpus(std::size_t n, std::size_t words_per_doc, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::vector<double> w(20000);
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = 1.0 / static_cast<double>(i + 1);
    }
    std::discrete_distribution<std::size_t> word(w.begin(), w.end());
    std::vector<Document> docs;
    docs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        for (std::size_t j = 0; j < words_per_doc; ++j) {
            text += "t" + std::to_string(word(gen)) + ' ';
        }
        docs.push_back(Document::make("b" + std::to_string(i), std::move(text)));
    }
    return Corpus(std::move(docs));
}

void BM_Bm25Build(benchmark::State& state)
{
    auto corpus = make_corpus(static_cast<std::size_t>(state.range(0)), 300, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(Bm25Index::build(corpus));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bm25Build)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Bm25Query(benchmark::State& state)
{
    auto corpus = make_corpus(static_cast<std::size_t>(state.range(0)), 300, 2);
    auto index = Bm25Index::build(corpus);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(index.query(corpus[i++ % corpus.size()], 1));
    }
}
BENCHMARK(BM_Bm25Query)->Arg(1000)->Arg(10000)->Arg(50000);

void BM_SplicePack(benchmark::State& state)
{
    auto corpus = make_corpus(5000, 300, 3);
    auto index = Bm25Index::build(corpus);
    PackingConfig config;
    config.k = static_cast<std::size_t>(state.range(0));
    config.max_len = 32768;
    for (auto _ : state) {
        auto c = corpus;
        Bm25Retriever retriever(index, c);
        benchmark::DoNotOptimize(splice_pack_all(c, retriever, config));
    }
}
BENCHMARK(BM_SplicePack)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_BaselinePack(benchmark::State& state)
{
    auto corpus = make_corpus(5000, 300, 4);
    for (auto _ : state) {
        auto c = corpus;
        benchmark::DoNotOptimize(baseline_pack(c, 32768, 1));
    }
}
BENCHMARK(BM_BaselinePack)->Unit(benchmark::kMillisecond);

EmbeddingIndex make_vectors(std::size_t n, std::size_t dim)
{
    std::mt19937_64 gen(5);
    std::normal_distribution<float> g;
    std::vector<float> v(n * dim);
    for (auto& x : v) {
        x = g(gen);
    }
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back("v" + std::to_string(i));
    }
    return EmbeddingIndex(dim, std::move(v), std::move(ids));
}

void BM_IvfTrain(benchmark::State& state)
{
    auto raw = make_vectors(20000, 64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ivf_train(raw, {static_cast<std::size_t>(state.range(0)), kDefaultTrainSample, 1, 1}));
    }
}
BENCHMARK(BM_IvfTrain)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_IvfQuery(benchmark::State& state)
{
    auto index = ivf_train(make_vectors(20000, 64), {256, kDefaultTrainSample, 1, 1});
    std::uint32_t q = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(index.query(q++ % 20000, 10, static_cast<std::size_t>(state.range(0))));
    }
}
BENCHMARK(BM_IvfQuery)->Arg(1)->Arg(8)->Arg(64);

void BM_Zipf(benchmark::State& state)
{
    std::mt19937_64 gen(6);
    std::vector<std::uint32_t> window(32768);
    for (auto& t : window) {
        t = static_cast<std::uint32_t>(gen() % 5000);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(zipf_coefficient(window));
    }
}
BENCHMARK(BM_Zipf);

} // namespace

BENCHMARK_MAIN();
