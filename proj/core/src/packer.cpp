#include "splice/packer.hpp"

#include <deque>
#include <map>
#include <memory>

#include "splice/log.hpp"

namespace splice {

std::string_view to_string(PackMethod m)
{
    switch (m) {
    case PackMethod::splice: return "splice";
    case PackMethod::baseline: return "baseline";
    case PackMethod::domrnd: return "domrnd";
    case PackMethod::repo: return "repo";
    }
    return "?";
}

std::string_view to_string(Order o)
{
    switch (o) {
    case Order::identity: return "identity";
    case Order::reverse: return "reverse";
    case Order::shuffle: return "shuffle";
    }
    return "?";
}

PackMethod parse_pack_method(std::string_view name)
{
    if (name == "splice") return PackMethod::splice;
    if (name == "baseline") return PackMethod::baseline;
    if (name == "domrnd") return PackMethod::domrnd;
    if (name == "repo") return PackMethod::repo;
    throw Error("unknown packing method '" + std::string(name) + "'");
}

Order parse_order(std::string_view name)
{
    if (name == "identity") return Order::identity;
    if (name == "reverse") return Order::reverse;
    if (name == "shuffle") return Order::shuffle;
    throw Error("unknown order '" + std::string(name) + "'");
}

void PackingConfig::validate() const
{
    if (k < 1) {
        throw Error("k must be at least 1");
    }
    if (max_len < 1) {
        throw Error("maximum example length must be at least 1");
    }
    if (order == Order::shuffle && !seed) {
        throw Error("shuffle ordering requires a seed");
    }
    if (domrnd_char_bound < 1) {
        throw Error("domrnd character bound must be at least 1");
    }
}

nlohmann::ordered_json PackStats::to_json() const
{
    nlohmann::ordered_json j;
    j["examples"] = examples;
    j["consumed_docs"] = consumed_docs;
    j["discarded_len"] = discarded_len;
    j["mean_len"] = mean_len();
    return j;
}

std::vector<Segment> trim(std::span<const DocLength> docs, std::size_t max_len)
{
    std::vector<Segment> out;
    std::size_t used = 0;
    for (const auto& d : docs) {
        if (used + d.len <= max_len) {
            out.push_back({d.id, 0, d.len, false});
            used += d.len;
            continue;
        }
        if (used < max_len) {
            out.push_back({d.id, 0, max_len - used, true});
        }
        break;
    }
    return out;
}

namespace {

std::uint64_t seed_or_zero(const PackingConfig& c) { return c.seed.value_or(0); }

void account(PackStats& stats, const PackedExample& ex, std::size_t consumed_docs, std::size_t consumed_len)
{
    ++stats.examples;
    stats.consumed_docs += consumed_docs;
    stats.total_len += ex.total_len;
    stats.discarded_len += consumed_len - ex.total_len;
}

/// Greedy fill shared by baseline and repo packing. Consumes every document
/// in `docs`; a document that overflows the current example is cut and its
/// tail discarded, and the next example starts with the following document.
void fill_examples(Corpus& corpus, std::span<const std::uint32_t> docs, std::size_t max_len, PackMethod method,
                   std::uint64_t seed, PackResult& result)
{
    std::size_t i = 0;
    while (i < docs.size()) {
        std::vector<DocLength> batch;
        std::size_t batch_len = 0;
        while (i < docs.size()) {
            auto d = docs[i];
            auto len = corpus.length(d);
            batch.push_back({corpus[d].id, len});
            batch_len += len;
            corpus.mark_consumed(d);
            ++i;
            if (batch_len >= max_len) {
                break;
            }
        }
        PackedExample ex;
        ex.segments = trim(batch, max_len);
        for (const auto& s : ex.segments) {
            ex.total_len += s.len;
        }
        ex.root = batch.front().id;
        ex.method = method;
        ex.order = Order::identity;
        ex.seed = seed;
        account(result.stats, ex, batch.size(), batch_len);
        result.examples.push_back(std::move(ex));
    }
}

} // namespace

SpliceTree splice_collect(Corpus& corpus, const Retriever& retriever, std::size_t k, std::size_t max_len,
                          std::uint32_t root)
{
    if (root >= corpus.size()) {
        throw Error("root ordinal " + std::to_string(root) + " out of range");
    }
    if (corpus.consumed(root)) {
        throw Error("root document '" + corpus[root].id + "' is already consumed");
    }
    SpliceTree tree;
    corpus.mark_consumed(root);
    tree.sequence.push_back(root);
    tree.length = corpus.length(root);
    std::deque<std::uint32_t> queue{root};
    while (!queue.empty() && tree.length < max_len) {
        auto d = queue.front();
        queue.pop_front();
        for (const auto& n : retriever.retrieve(d, k)) {
            if (n.doc >= corpus.size() || corpus.consumed(n.doc)) {
                continue;
            }
            tree.sequence.push_back(n.doc);
            tree.edges.emplace_back(d, n.doc);
            tree.length += corpus.length(n.doc);
            queue.push_back(n.doc);
            corpus.mark_consumed(n.doc);
        }
    }
    return tree;
}

PackedExample splice_pack_one(Corpus& corpus, const Retriever& retriever, const PackingConfig& config,
                              std::uint32_t root, PackStats* stats)
{
    config.validate();
    if (config.method != PackMethod::splice) {
        throw Error("splice_pack_one needs method splice");
    }
    auto tree = splice_collect(corpus, retriever, config.k, config.max_len, root);

    std::vector<DocLength> docs;
    docs.reserve(tree.sequence.size());
    for (auto d : tree.sequence) {
        docs.push_back({corpus[d].id, corpus.length(d)});
    }
    PackedExample ex;
    ex.method = PackMethod::splice;
    ex.order = config.order;
    ex.seed = config.order == Order::shuffle ? derive_seed(*config.seed, root) : seed_or_zero(config);
    auto ordered = order_segments(std::move(docs), config.order,
                                  config.order == Order::shuffle ? std::optional(ex.seed) : std::nullopt);
    ex.segments = trim(ordered, config.max_len);
    for (const auto& s : ex.segments) {
        ex.total_len += s.len;
    }
    ex.root = corpus[root].id;
    ex.edges.reserve(tree.edges.size());
    for (auto [p, c] : tree.edges) {
        ex.edges.emplace_back(corpus[p].id, corpus[c].id);
    }
    if (stats != nullptr) {
        account(*stats, ex, tree.sequence.size(), tree.length);
    }
    return ex;
}

PackedExample splice_pack_one(Corpus& corpus, const Retriever& retriever, const PackingConfig& config,
                              std::string_view root_id, PackStats* stats)
{
    return splice_pack_one(corpus, retriever, config, corpus.ordinal(root_id), stats);
}

PackResult splice_pack_all(Corpus& corpus, const Retriever& retriever, const PackingConfig& config)
{
    config.validate();
    std::unique_ptr<CachedRetriever> cache;
    const Retriever* source = &retriever;
    if (config.threads > 1) {
        cache = std::make_unique<CachedRetriever>(retriever, corpus.size(), config.k, config.threads);
        source = cache.get();
    }
    PackResult result;
    for (auto root : permutation(corpus.size(), seed_or_zero(config))) {
        if (corpus.consumed(root)) {
            continue;
        }
        result.examples.push_back(splice_pack_one(corpus, *source, config, root, &result.stats));
    }
    return result;
}

PackResult baseline_pack(Corpus& corpus, std::size_t max_len, std::uint64_t seed)
{
    if (max_len < 1) {
        throw Error("maximum example length must be at least 1");
    }
    PackResult result;
    std::vector<std::uint32_t> order;
    for (auto d : permutation(corpus.size(), seed)) {
        if (!corpus.consumed(d)) {
            order.push_back(d);
        }
    }
    fill_examples(corpus, order, max_len, PackMethod::baseline, seed, result);
    return result;
}

PackResult domrnd_pack(Corpus& corpus, std::uint64_t seed, std::size_t char_bound)
{
    if (char_bound < 1) {
        throw Error("domrnd character bound must be at least 1");
    }
    std::map<std::string, std::vector<std::uint32_t>> domains;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& d = corpus[i];
        if (!d.domain) {
            throw Error("document '" + d.id + "' has no domain tag");
        }
        if (!corpus.consumed(i)) {
            domains[*d.domain].push_back(static_cast<std::uint32_t>(i));
        }
    }
    PackResult result;
    std::uint64_t salt = 0;
    for (auto& [name, docs] : domains) {
        Rng rng(derive_seed(seed, salt++));
        rng.shuffle(std::span<std::uint32_t>(docs));
        std::size_t i = 0;
        while (i < docs.size()) {
            PackedExample ex;
            ex.method = PackMethod::domrnd;
            ex.order = Order::identity;
            ex.seed = seed;
            ex.root = corpus[docs[i]].id;
            std::size_t chars = 0;
            std::size_t n = 0;
            while (i < docs.size()) {
                auto d = docs[i];
                auto c = corpus[d].char_len;
                if (n > 0 && chars + c > char_bound) {
                    break;
                }
                ex.segments.push_back({corpus[d].id, 0, corpus.length(d), false});
                ex.total_len += corpus.length(d);
                chars += c;
                corpus.mark_consumed(d);
                ++n;
                ++i;
            }
            account(result.stats, ex, n, ex.total_len);
            result.examples.push_back(std::move(ex));
        }
    }
    return result;
}

PackResult repo_pack(Corpus& corpus, const RepoGraph& graph, std::size_t max_len)
{
    if (max_len < 1) {
        throw Error("maximum example length must be at least 1");
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (!graph.contains(static_cast<std::uint32_t>(i))) {
            throw Error("document '" + corpus[i].id + "' is not in the repository graph");
        }
    }
    PackResult result;
    for (std::size_t c = 0; c < graph.chunk_count(); ++c) {
        std::vector<std::uint32_t> files;
        for (auto d : graph.chunk(c)) {
            if (!corpus.consumed(d)) {
                files.push_back(d);
            }
        }
        fill_examples(corpus, files, max_len, PackMethod::repo, 0, result);
    }
    return result;
}

} // namespace splice
