#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "splice/document.hpp"
#include "splice/neighbors.hpp"

namespace splice {

/// Repository structure: per chunk (the document's `domain` tag), the files
/// in depth-first directory order. Documents without a path are not part of
/// the graph.
class RepoGraph {
  public:
    struct Position {
        std::uint32_t chunk;
        std::uint32_t index;
    };

    static RepoGraph build(const Corpus& corpus);

    [[nodiscard]] std::size_t chunk_count() const { return chunks_.size(); }
    [[nodiscard]] const std::string& chunk_name(std::size_t c) const { return names_[c]; }
    /// Corpus ordinals of chunk `c`, in DFS order.
    [[nodiscard]] const std::vector<std::uint32_t>& chunk(std::size_t c) const { return chunks_[c]; }
    [[nodiscard]] bool contains(std::uint32_t doc) const { return positions_.count(doc) != 0; }
    [[nodiscard]] Position position(std::uint32_t doc) const;

    /// The next k files after `doc` in its chunk, scored by negative distance.
    /// Throws Error when `doc` has no path or is not registered.
    [[nodiscard]] Neighbors successors(const Corpus& corpus, std::uint32_t doc, std::size_t k) const;

  private:
    std::vector<std::string> names_;
    std::vector<std::vector<std::uint32_t>> chunks_;
    std::unordered_map<std::uint32_t, Position> positions_;
};

} // namespace splice
