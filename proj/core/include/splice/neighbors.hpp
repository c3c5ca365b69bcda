#pragma once

#include <cstdint>
#include <vector>

namespace splice {

/// One retrieved item. `doc` is an ordinal in the provider's own numbering
/// (corpus ordinals for Retriever implementations, row numbers inside
/// EmbeddingIndex).
struct Neighbor {
    std::uint32_t doc;
    double score;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Ranked by score descending, ties by document id ascending. Never holds the
/// query document or duplicates.
using Neighbors = std::vector<Neighbor>;

} // namespace splice
