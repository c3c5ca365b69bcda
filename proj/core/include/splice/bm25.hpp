#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "splice/document.hpp"
#include "splice/neighbors.hpp"

namespace splice {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
    /// Maximum number of leading terms of a document used as its query.
    std::size_t query_cap = 1024;

    static constexpr std::size_t unlimited = std::numeric_limits<std::size_t>::max();
};

struct Posting {
    std::uint32_t doc;
    std::uint32_t tf;
};

/// Okapi BM25 inverted index over a corpus, queried with documents of that
/// corpus.
///
///   score(D) = sum_t idf(t) * tf (k1 + 1) / (tf + k1 (1 - b + b |D| / avgdl))
///   idf(t)   = ln((N - df + 0.5) / (df + 0.5) + 1)
///
/// The sum runs over the distinct terms among the first query_cap terms of
/// the query document. Top-k evaluation uses MaxScore pruning over per-term
/// score upper bounds; final scores are always summed in query-term order so
/// they do not depend on which lists were pruned.
class Bm25Index {
  public:
    Bm25Index() = default;
    Bm25Index(const Bm25Index&) = delete;
    Bm25Index& operator=(const Bm25Index&) = delete;
    Bm25Index(Bm25Index&&) noexcept = default;
    Bm25Index& operator=(Bm25Index&&) noexcept = default;

    /// Throws Error on an empty corpus or invalid parameters.
    static Bm25Index build(const Corpus& corpus, Bm25Params params = {});

    /// Top-k neighbours of an indexed document, excluding itself and
    /// zero-score documents. Throws Error if `doc.id` is not indexed.
    [[nodiscard]] Neighbors query(const Document& doc, std::size_t k) const;

    /// Top-k for arbitrary text, optionally excluding one ordinal.
    [[nodiscard]] Neighbors query_text(std::string_view text, std::size_t k,
                                       std::optional<std::uint32_t> exclude = std::nullopt) const;

    [[nodiscard]] std::size_t n_docs() const { return doc_len_.size(); }
    [[nodiscard]] double avg_doc_len() const { return avg_doc_len_; }
    [[nodiscard]] std::uint32_t doc_len(std::size_t i) const { return doc_len_[i]; }
    [[nodiscard]] const std::string& doc_id(std::size_t i) const { return ids_[i]; }
    [[nodiscard]] std::optional<std::uint32_t> ordinal(std::string_view id) const;
    [[nodiscard]] const Bm25Params& params() const { return params_; }
    [[nodiscard]] std::size_t n_terms() const { return terms_.size(); }
    [[nodiscard]] const std::string& term(std::size_t t) const { return terms_[t]; }
    [[nodiscard]] std::optional<std::uint32_t> term_id(std::string_view term) const;
    [[nodiscard]] std::span<const Posting> postings(std::uint32_t term) const;
    [[nodiscard]] double idf(std::uint32_t term) const { return idf_[term]; }
    [[nodiscard]] std::size_t total_postings() const { return postings_.size(); }

    /// Query terms of a text: distinct index terms among its first query_cap
    /// terms, in first-occurrence order.
    [[nodiscard]] std::vector<std::uint32_t> query_terms(std::string_view text) const;

    void save(const std::filesystem::path& path) const;
    static Bm25Index load(const std::filesystem::path& path);

  private:
    void finalize();
    [[nodiscard]] Neighbors top_k(std::span<const std::uint32_t> terms, std::size_t k,
                                  std::optional<std::uint32_t> exclude) const;
    [[nodiscard]] double contribution(std::uint32_t term, const Posting& p) const
    {
        double tf = p.tf;
        return idf_[term] * (tf * (params_.k1 + 1.0)) / (tf + norm_[p.doc]);
    }

    Bm25Params params_;
    std::vector<std::string> ids_;
    std::vector<std::uint32_t> id_rank_;
    std::unordered_map<std::string_view, std::uint32_t> by_id_;
    std::vector<std::string> terms_;
    std::unordered_map<std::string_view, std::uint32_t> term_ids_;
    std::vector<std::uint64_t> offsets_;
    std::vector<Posting> postings_;
    std::vector<std::uint32_t> doc_len_;
    double avg_doc_len_ = 0.0;
    std::vector<double> norm_;
    std::vector<double> idf_;
    std::vector<double> max_contribution_;
};

} // namespace splice
