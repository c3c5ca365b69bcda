#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "splice/bm25.hpp"
#include "splice/document.hpp"
#include "splice/embedding.hpp"
#include "splice/neighbors.hpp"
#include "splice/repo_graph.hpp"

namespace splice {

/// RETRIEVE(d, k) over corpus ordinals. Implementations are immutable after
/// construction and safe to call from several threads at once.
class Retriever {
  public:
    virtual ~Retriever() = default;
    [[nodiscard]] virtual Neighbors retrieve(std::uint32_t doc, std::size_t k) const = 0;
    [[nodiscard]] virtual std::string_view name() const = 0;
};

class Bm25Retriever final : public Retriever {
  public:
    /// The index must have been built over `corpus` (same ids, same order).
    Bm25Retriever(const Bm25Index& index, const Corpus& corpus);
    [[nodiscard]] Neighbors retrieve(std::uint32_t doc, std::size_t k) const override;
    [[nodiscard]] std::string_view name() const override { return "bm25"; }

  private:
    const Bm25Index& index_;
    const Corpus& corpus_;
};

class EmbeddingRetriever final : public Retriever {
  public:
    /// Every corpus document needs an embedding row and every row a document.
    EmbeddingRetriever(const EmbeddingIndex& index, const Corpus& corpus, std::size_t nprobe);
    [[nodiscard]] Neighbors retrieve(std::uint32_t doc, std::size_t k) const override;
    [[nodiscard]] std::string_view name() const override { return "embed"; }

  private:
    const EmbeddingIndex& index_;
    std::size_t nprobe_;
    std::vector<std::uint32_t> row_of_doc_;
    std::vector<std::uint32_t> doc_of_row_;
};

class RepoRetriever final : public Retriever {
  public:
    RepoRetriever(const RepoGraph& graph, const Corpus& corpus) : graph_(graph), corpus_(corpus) {}
    [[nodiscard]] Neighbors retrieve(std::uint32_t doc, std::size_t k) const override
    {
        return graph_.successors(corpus_, doc, k);
    }
    [[nodiscard]] std::string_view name() const override { return "repo"; }

  private:
    const RepoGraph& graph_;
    const Corpus& corpus_;
};

/// Fixed neighbour table; row d lists d's neighbours best first.
class TableRetriever final : public Retriever {
  public:
    explicit TableRetriever(std::vector<std::vector<std::uint32_t>> table) : table_(std::move(table)) {}
    [[nodiscard]] Neighbors retrieve(std::uint32_t doc, std::size_t k) const override;
    [[nodiscard]] std::string_view name() const override { return "table"; }

  private:
    std::vector<std::vector<std::uint32_t>> table_;
};

/// Precomputed RETRIEVE results for every document, filled in parallel.
/// Retrieval is independent of the consumption mask, so a packer reading
/// this table behaves exactly as one calling the retriever lazily.
class CachedRetriever final : public Retriever {
  public:
    CachedRetriever(const Retriever& inner, std::size_t n_docs, std::size_t k, unsigned threads);
    [[nodiscard]] Neighbors retrieve(std::uint32_t doc, std::size_t k) const override;
    [[nodiscard]] std::string_view name() const override { return inner_.name(); }

  private:
    const Retriever& inner_;
    std::size_t k_;
    std::vector<Neighbors> table_;
};

} // namespace splice
