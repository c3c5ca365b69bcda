#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "splice/document.hpp"
#include "splice/error.hpp"
#include "splice/repo_graph.hpp"
#include "splice/retriever.hpp"
#include "splice/rng.hpp"

namespace splice {

enum class PackMethod { splice, baseline, domrnd, repo };
enum class Order { identity, reverse, shuffle };

std::string_view to_string(PackMethod m);
std::string_view to_string(Order o);
PackMethod parse_pack_method(std::string_view name);
Order parse_order(std::string_view name);

inline constexpr std::size_t kDefaultMaxLen = 32768;
inline constexpr std::size_t kDefaultDomRndCharBound = 120000;

struct PackingConfig {
    PackMethod method = PackMethod::splice;
    /// Neighbours retrieved per expanded document.
    std::size_t k = 1;
    /// Example budget in corpus length units.
    std::size_t max_len = kDefaultMaxLen;
    Order order = Order::identity;
    std::optional<std::uint64_t> seed;
    std::size_t domrnd_char_bound = kDefaultDomRndCharBound;
    /// Retrieval parallelism; never changes the output.
    unsigned threads = 1;

    void validate() const;
};

struct Segment {
    std::string id;
    std::size_t offset = 0;
    std::size_t len = 0;
    bool truncated = false;

    friend bool operator==(const Segment&, const Segment&) = default;
};

struct PackedExample {
    std::vector<Segment> segments;
    std::size_t total_len = 0;
    std::string root;
    std::vector<std::pair<std::string, std::string>> edges;
    PackMethod method = PackMethod::splice;
    Order order = Order::identity;
    std::uint64_t seed = 0;

    friend bool operator==(const PackedExample&, const PackedExample&) = default;
};

struct PackStats {
    std::size_t examples = 0;
    std::size_t consumed_docs = 0;
    /// Length of consumed documents that did not make it into any segment.
    std::size_t discarded_len = 0;
    std::size_t total_len = 0;

    [[nodiscard]] double mean_len() const
    {
        return examples == 0 ? 0.0 : static_cast<double>(total_len) / static_cast<double>(examples);
    }
    [[nodiscard]] nlohmann::ordered_json to_json() const;
};

struct PackResult {
    std::vector<PackedExample> examples;
    PackStats stats;
};

struct DocLength {
    std::string id;
    std::size_t len;
};

/// Permutes whole documents: identity, reversal, or a seeded Fisher-Yates
/// shuffle. Shuffle without a seed throws Error.
template <typename T>
std::vector<T> order_segments(std::vector<T> items, Order order, std::optional<std::uint64_t> seed)
{
    switch (order) {
    case Order::identity:
        break;
    case Order::reverse:
        std::reverse(items.begin(), items.end());
        break;
    case Order::shuffle: {
        if (!seed) {
            throw Error("shuffle ordering requires a seed");
        }
        Rng rng(*seed);
        rng.shuffle(std::span<T>(items));
        break;
    }
    }
    return items;
}

/// Keeps whole documents while they fit in `max_len`; the first one that
/// does not fit is cut to the remaining budget (when any is left) and the
/// rest are dropped.
std::vector<Segment> trim(std::span<const DocLength> docs, std::size_t max_len);

/// Pre-ORDER result of the breadth-first expansion in SPLiCe.
struct SpliceTree {
    /// C, in the order documents were appended.
    std::vector<std::uint32_t> sequence;
    /// (parent, child) for every appended non-root document.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::size_t length = 0;
};

/// Breadth-first construction from `root`. Expansion continues while the
/// queue is nonempty and the accumulated length is below `max_len`; every
/// retrieved, still-unconsumed neighbour is appended, enqueued and consumed.
/// Throws Error if `root` is already consumed.
SpliceTree splice_collect(Corpus& corpus, const Retriever& retriever, std::size_t k, std::size_t max_len,
                          std::uint32_t root);

/// One SPLiCe example: splice_collect, then ORDER, then TRIM. Documents cut
/// away by TRIM stay consumed. Adds to `stats` when given.
PackedExample splice_pack_one(Corpus& corpus, const Retriever& retriever, const PackingConfig& config,
                              std::uint32_t root, PackStats* stats = nullptr);
PackedExample splice_pack_one(Corpus& corpus, const Retriever& retriever, const PackingConfig& config,
                              std::string_view root_id, PackStats* stats = nullptr);

/// Packs the whole corpus, taking roots from a seeded permutation and
/// skipping consumed documents, until every document is consumed.
PackResult splice_pack_all(Corpus& corpus, const Retriever& retriever, const PackingConfig& config);

/// Example packing: seeded permutation of all documents, greedily filled to
/// `max_len` with TRIM semantics.
PackResult baseline_pack(Corpus& corpus, std::size_t max_len, std::uint64_t seed);

/// Random concatenation within each domain, bounded by `char_bound`
/// characters. Whole documents only; a document longer than the bound forms
/// its own example. Throws Error naming the first document without a domain.
PackResult domrnd_pack(Corpus& corpus, std::uint64_t seed, std::size_t char_bound);

/// Files of each repository chunk in depth-first order, filled to `max_len`
/// with TRIM semantics. Every document must be in `graph`.
PackResult repo_pack(Corpus& corpus, const RepoGraph& graph, std::size_t max_len);

} // namespace splice
