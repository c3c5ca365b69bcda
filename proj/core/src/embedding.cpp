#include "splice/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "binary_io.hpp"
#include "parallel.hpp"
#include "splice/error.hpp"
#include "splice/rng.hpp"

namespace splice {
namespace {

constexpr std::string_view kEmbeddingMagic = "SPLCEMB1";
constexpr std::string_view kIvfMagic = "SPLCIVF1";

struct Best {
    std::uint32_t cell;
    double score;
};

Best best_centroid(std::span<const float> v, std::span<const float> centroids, std::size_t dim)
{
    Best best{0, -std::numeric_limits<double>::infinity()};
    const std::size_t cells = centroids.size() / dim;
    for (std::size_t c = 0; c < cells; ++c) {
        double s = inner_product(v, centroids.subspan(c * dim, dim));
        if (s > best.score) {
            best = {static_cast<std::uint32_t>(c), s};
        }
    }
    return best;
}

std::string_view row_bytes(std::span<const float> v)
{
    return {reinterpret_cast<const char*>(v.data()), v.size_bytes()};
}

void read_embedding_payload(detail::BinaryReader& r, std::size_t& dim, std::vector<float>& vectors,
                            std::vector<std::string>& ids)
{
    dim = r.pod<std::uint32_t>();
    auto count = r.pod<std::uint64_t>();
    if (dim == 0) {
        throw Error("'" + r.path().string() + "': dim must be positive");
    }
    if (count > (std::uint64_t{1} << 40) / dim) {
        throw Error("'" + r.path().string() + "': implausible vector count " + std::to_string(count));
    }
    vectors.resize(count * dim);
    r.bytes(vectors.data(), vectors.size() * sizeof(float));
    ids.clear();
    ids.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        ids.push_back(r.string());
    }
}

void write_embedding_payload(detail::BinaryWriter& w, std::size_t dim, std::span<const float> vectors,
                             std::span<const std::string> ids)
{
    w.pod(static_cast<std::uint32_t>(dim));
    w.pod(static_cast<std::uint64_t>(ids.size()));
    w.bytes(vectors.data(), vectors.size_bytes());
    for (const auto& id : ids) {
        w.string(id);
    }
}

} // namespace

double inner_product(std::span<const float> a, std::span<const float> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return s;
}

EmbeddingIndex::EmbeddingIndex(std::size_t dim, std::vector<float> vectors, std::vector<std::string> ids)
    : dim_(dim), vectors_(std::move(vectors)), ids_(std::move(ids))
{
    if (dim_ == 0) {
        throw Error("embedding dim must be positive");
    }
    if (vectors_.size() != ids_.size() * dim_) {
        throw Error("embedding matrix has " + std::to_string(vectors_.size()) + " values, expected "
                    + std::to_string(ids_.size()) + " x " + std::to_string(dim_));
    }
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
        if (!std::isfinite(vectors_[i])) {
            throw Error("embedding row " + std::to_string(i / dim_) + " ('" + ids_[i / dim_]
                        + "') has a non-finite value");
        }
    }
    rebuild_ids();
}

EmbeddingIndex::EmbeddingIndex(const EmbeddingIndex& other)
    : dim_(other.dim_),
      vectors_(other.vectors_),
      ids_(other.ids_),
      id_rank_(other.id_rank_),
      nlist_(other.nlist_),
      centroids_(other.centroids_),
      assignment_(other.assignment_),
      list_offsets_(other.list_offsets_),
      list_rows_(other.list_rows_)
{
    rebuild_ids();
}

EmbeddingIndex& EmbeddingIndex::operator=(const EmbeddingIndex& other)
{
    if (this != &other) {
        EmbeddingIndex copy(other);
        *this = std::move(copy);
    }
    return *this;
}

void EmbeddingIndex::rebuild_ids()
{
    by_id_.clear();
    by_id_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!by_id_.emplace(ids_[i], static_cast<std::uint32_t>(i)).second) {
            throw Error("duplicate embedding id '" + ids_[i] + "'");
        }
    }
    std::vector<std::uint32_t> order(ids_.size());
    std::iota(order.begin(), order.end(), 0U);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ids_[a] < ids_[b]; });
    id_rank_.assign(ids_.size(), 0);
    for (std::size_t r = 0; r < order.size(); ++r) {
        id_rank_[order[r]] = static_cast<std::uint32_t>(r);
    }
}

std::optional<std::uint32_t> EmbeddingIndex::row(std::string_view id) const
{
    auto it = by_id_.find(id);
    if (it == by_id_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::span<const std::uint32_t> EmbeddingIndex::inverted_list(std::size_t c) const
{
    return {list_rows_.data() + list_offsets_[c], list_rows_.data() + list_offsets_[c + 1]};
}

EmbeddingIndex EmbeddingIndex::load(const std::filesystem::path& path)
{
    detail::BinaryReader r(path);
    r.expect_magic(kEmbeddingMagic);
    std::size_t dim = 0;
    std::vector<float> vectors;
    std::vector<std::string> ids;
    read_embedding_payload(r, dim, vectors, ids);
    if (!r.at_end()) {
        throw Error("'" + path.string() + "' has trailing bytes after the declared rows");
    }
    return EmbeddingIndex(dim, std::move(vectors), std::move(ids));
}

void EmbeddingIndex::save(const std::filesystem::path& path) const
{
    detail::BinaryWriter w(path);
    w.bytes(kEmbeddingMagic.data(), kEmbeddingMagic.size());
    write_embedding_payload(w, dim_, vectors_, ids_);
    w.finish();
}

EmbeddingIndex EmbeddingIndex::load_trained(const std::filesystem::path& path)
{
    detail::BinaryReader r(path);
    r.expect_magic(kIvfMagic);
    std::size_t dim = 0;
    std::vector<float> vectors;
    std::vector<std::string> ids;
    read_embedding_payload(r, dim, vectors, ids);
    EmbeddingIndex index(dim, std::move(vectors), std::move(ids));
    auto nlist = r.pod<std::uint64_t>();
    if (nlist == 0 || nlist > index.size()) {
        throw Error("'" + path.string() + "': invalid nlist " + std::to_string(nlist));
    }
    index.nlist_ = nlist;
    index.centroids_.resize(nlist * dim);
    r.bytes(index.centroids_.data(), index.centroids_.size() * sizeof(float));
    index.assign_all(1);
    return index;
}

void EmbeddingIndex::save_trained(const std::filesystem::path& path) const
{
    if (!trained()) {
        throw Error("embedding index is not trained");
    }
    detail::BinaryWriter w(path);
    w.bytes(kIvfMagic.data(), kIvfMagic.size());
    write_embedding_payload(w, dim_, vectors_, ids_);
    w.pod(static_cast<std::uint64_t>(nlist_));
    w.bytes(centroids_.data(), centroids_.size() * sizeof(float));
    w.finish();
}

void EmbeddingIndex::assign_all(unsigned threads)
{
    assignment_.assign(size(), 0);
    detail::parallel_for(size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            assignment_[i] = best_centroid(vector(i), centroids_, dim_).cell;
        }
    });
    rebuild_lists();
}

void EmbeddingIndex::rebuild_lists()
{
    list_offsets_.assign(nlist_ + 1, 0);
    for (auto c : assignment_) {
        ++list_offsets_[c + 1];
    }
    for (std::size_t c = 0; c < nlist_; ++c) {
        list_offsets_[c + 1] += list_offsets_[c];
    }
    list_rows_.assign(size(), 0);
    std::vector<std::uint64_t> fill(list_offsets_.begin(), list_offsets_.end() - 1);
    for (std::size_t i = 0; i < size(); ++i) {
        list_rows_[fill[assignment_[i]]++] = static_cast<std::uint32_t>(i);
    }
}

Neighbors EmbeddingIndex::query(std::string_view id, std::size_t k, std::size_t nprobe) const
{
    auto r = row(id);
    if (!r) {
        throw Error("unknown embedding id '" + std::string(id) + "'");
    }
    return query(*r, k, nprobe);
}

Neighbors EmbeddingIndex::query(std::uint32_t query, std::size_t k, std::size_t nprobe) const
{
    if (!trained()) {
        throw Error("embedding index must be trained before querying");
    }
    if (nprobe < 1 || nprobe > nlist_) {
        throw Error("nprobe must lie in [1, " + std::to_string(nlist_) + "]");
    }
    if (query >= size()) {
        throw Error("embedding row " + std::to_string(query) + " out of range");
    }
    auto q = vector(query);

    std::vector<Best> cells(nlist_);
    for (std::size_t c = 0; c < nlist_; ++c) {
        cells[c] = {static_cast<std::uint32_t>(c), inner_product(q, centroid(c))};
    }
    auto by_score = [](const Best& a, const Best& b) {
        return a.score > b.score || (a.score == b.score && a.cell < b.cell);
    };
    std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(nprobe), cells.end(),
                      by_score);

    struct Entry {
        double score;
        std::uint32_t rank;
        std::uint32_t row;
    };
    auto better = [](const Entry& a, const Entry& b) {
        return a.score > b.score || (a.score == b.score && a.rank < b.rank);
    };
    std::vector<Entry> heap;
    if (k == 0) {
        return {};
    }
    heap.reserve(k + 1);
    for (std::size_t p = 0; p < nprobe; ++p) {
        for (auto r : inverted_list(cells[p].cell)) {
            if (r == query) {
                continue;
            }
            Entry e{inner_product(q, vector(r)), id_rank_[r], r};
            if (heap.size() < k) {
                heap.push_back(e);
                std::push_heap(heap.begin(), heap.end(), better);
            } else if (better(e, heap.front())) {
                std::pop_heap(heap.begin(), heap.end(), better);
                heap.back() = e;
                std::push_heap(heap.begin(), heap.end(), better);
            }
        }
    }
    std::sort(heap.begin(), heap.end(), better);
    Neighbors out;
    out.reserve(heap.size());
    for (const auto& e : heap) {
        out.push_back({e.row, e.score});
    }
    return out;
}

EmbeddingIndex ivf_train(EmbeddingIndex index, const IvfParams& params)
{
    const std::size_t dim = index.dim_;
    const std::size_t n = index.size();
    if (params.nlist == 0) {
        throw Error("nlist must be positive");
    }
    if (params.train_sample == 0) {
        throw Error("train_sample must be positive");
    }
    auto order = permutation(n, params.seed);
    order.resize(std::min(params.train_sample, n));
    std::sort(order.begin(), order.end());
    const std::size_t n_train = order.size();

    std::vector<float> train(n_train * dim);
    for (std::size_t i = 0; i < n_train; ++i) {
        auto v = index.vector(order[i]);
        std::copy(v.begin(), v.end(), train.begin() + static_cast<std::ptrdiff_t>(i * dim));
    }
    auto train_row = [&](std::size_t i) {
        return std::span<const float>(train.data() + i * dim, dim);
    };

    // Initial centroids: distinct training vectors in seeded order.
    std::vector<float> centroids;
    centroids.reserve(params.nlist * dim);
    {
        std::unordered_set<std::string_view> chosen;
        auto init_order = permutation(n_train, derive_seed(params.seed, 1));
        for (auto i : init_order) {
            if (chosen.size() == params.nlist) {
                break;
            }
            if (chosen.insert(row_bytes(train_row(i))).second) {
                auto v = train_row(i);
                centroids.insert(centroids.end(), v.begin(), v.end());
            }
        }
        if (chosen.size() < params.nlist) {
            throw Error("nlist " + std::to_string(params.nlist) + " exceeds the "
                        + std::to_string(chosen.size()) + " distinct training vectors");
        }
    }

    std::vector<Best> assign(n_train);
    std::vector<double> sums(params.nlist * dim);
    std::vector<std::size_t> counts(params.nlist);
    for (int iter = 0; iter < kKmeansIterations; ++iter) {
        detail::parallel_for(n_train, params.threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                assign[i] = best_centroid(train_row(i), centroids, dim);
            }
        });
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n_train; ++i) {
            auto c = assign[i].cell;
            ++counts[c];
            auto v = train_row(i);
            for (std::size_t j = 0; j < dim; ++j) {
                sums[c * dim + j] += v[j];
            }
        }
        std::vector<std::uint32_t> worst;
        for (std::size_t c = 0; c < params.nlist; ++c) {
            if (counts[c] > 0) {
                for (std::size_t j = 0; j < dim; ++j) {
                    centroids[c * dim + j] =
                        static_cast<float>(sums[c * dim + j] / static_cast<double>(counts[c]));
                }
            }
        }
        bool any_empty = std::find(counts.begin(), counts.end(), 0U) != counts.end();
        if (any_empty) {
            // "farthest" under inner product = lowest score to its own centroid
            worst.resize(n_train);
            std::iota(worst.begin(), worst.end(), 0U);
            std::sort(worst.begin(), worst.end(), [&](auto a, auto b) {
                return assign[a].score < assign[b].score || (assign[a].score == assign[b].score && a < b);
            });
            std::size_t next = 0;
            for (std::size_t c = 0; c < params.nlist; ++c) {
                if (counts[c] == 0 && next < worst.size()) {
                    auto v = train_row(worst[next++]);
                    std::copy(v.begin(), v.end(), centroids.begin() + static_cast<std::ptrdiff_t>(c * dim));
                }
            }
        }
    }

    index.nlist_ = params.nlist;
    index.centroids_ = std::move(centroids);
    index.assign_all(params.threads);
    return index;
}

} // namespace splice
