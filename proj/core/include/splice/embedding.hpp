#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "splice/neighbors.hpp"

namespace splice {

inline constexpr std::size_t kDefaultNlist = 8192;
inline constexpr std::size_t kDefaultTrainSample = 262144;
inline constexpr int kKmeansIterations = 25;

struct IvfParams {
    std::size_t nlist = kDefaultNlist;
    std::size_t train_sample = kDefaultTrainSample;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

/// Precomputed document embeddings with an optional inverted-file (IVF)
/// partition for approximate maximum-inner-product search. Vectors are used
/// as stored; nothing is normalised.
class EmbeddingIndex {
  public:
    EmbeddingIndex() = default;

    /// Throws Error when sizes disagree, a value is not finite or ids repeat.
    EmbeddingIndex(std::size_t dim, std::vector<float> vectors, std::vector<std::string> ids);

    EmbeddingIndex(const EmbeddingIndex& other);
    EmbeddingIndex& operator=(const EmbeddingIndex& other);
    EmbeddingIndex(EmbeddingIndex&&) noexcept = default;
    EmbeddingIndex& operator=(EmbeddingIndex&&) noexcept = default;

    /// Reads the "SPLCEMB1" embedding format. The result is untrained.
    static EmbeddingIndex load(const std::filesystem::path& path);
    /// Writes vectors and ids in the "SPLCEMB1" format.
    void save(const std::filesystem::path& path) const;

    /// Trained index persistence ("SPLCIVF1": embeddings plus centroids).
    static EmbeddingIndex load_trained(const std::filesystem::path& path);
    void save_trained(const std::filesystem::path& path) const;

    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] std::size_t size() const { return ids_.size(); }
    [[nodiscard]] std::size_t nlist() const { return nlist_; }
    [[nodiscard]] bool trained() const { return nlist_ > 0; }
    [[nodiscard]] std::span<const float> vector(std::size_t row) const
    {
        return {vectors_.data() + row * dim_, dim_};
    }
    [[nodiscard]] std::span<const float> centroid(std::size_t c) const
    {
        return {centroids_.data() + c * dim_, dim_};
    }
    [[nodiscard]] std::span<const float> vectors() const { return vectors_; }
    [[nodiscard]] const std::string& id(std::size_t row) const { return ids_[row]; }
    [[nodiscard]] std::optional<std::uint32_t> row(std::string_view id) const;
    [[nodiscard]] std::uint32_t assignment(std::size_t row) const { return assignment_[row]; }
    [[nodiscard]] std::span<const std::uint32_t> inverted_list(std::size_t c) const;

    /// Top-k rows by inner product with row `query` among the `nprobe` cells
    /// whose centroids score highest, excluding `query`. Ties go to the lower
    /// id. nprobe == nlist is an exhaustive search.
    [[nodiscard]] Neighbors query(std::uint32_t query, std::size_t k, std::size_t nprobe) const;
    /// Same, addressed by id. Throws Error for an unknown id.
    [[nodiscard]] Neighbors query(std::string_view id, std::size_t k, std::size_t nprobe) const;

  private:
    friend EmbeddingIndex ivf_train(EmbeddingIndex index, const IvfParams& params);

    void rebuild_ids();
    void rebuild_lists();
    void assign_all(unsigned threads);

    std::size_t dim_ = 0;
    std::vector<float> vectors_;
    std::vector<std::string> ids_;
    std::vector<std::uint32_t> id_rank_;
    std::unordered_map<std::string_view, std::uint32_t> by_id_;
    std::size_t nlist_ = 0;
    std::vector<float> centroids_;
    std::vector<std::uint32_t> assignment_;
    std::vector<std::uint64_t> list_offsets_;
    std::vector<std::uint32_t> list_rows_;
};

/// Inner product accumulated in double, left to right.
double inner_product(std::span<const float> a, std::span<const float> b);

/// Fits `nlist` centroids with k-means on min(train_sample, size()) vectors
/// drawn by a seeded permutation, then assigns every vector to its
/// highest-inner-product centroid (lowest ordinal on ties). Initial centroids
/// are distinct sampled vectors; each of the 25 iterations assigns by inner
/// product, recomputes means, and re-seeds empty cells from the training
/// points served worst by their current centroid. Throws Error when nlist is
/// zero or exceeds the number of distinct training vectors.
EmbeddingIndex ivf_train(EmbeddingIndex index, const IvfParams& params);

} // namespace splice
