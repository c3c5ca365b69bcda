#include "splice/retriever.hpp"

#include "parallel.hpp"
#include "splice/error.hpp"

namespace splice {

Bm25Retriever::Bm25Retriever(const Bm25Index& index, const Corpus& corpus) : index_(index), corpus_(corpus)
{
    if (index.n_docs() != corpus.size()) {
        throw Error("BM25 index covers " + std::to_string(index.n_docs()) + " documents but the corpus has "
                    + std::to_string(corpus.size()));
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (index.doc_id(i) != corpus[i].id) {
            throw Error("BM25 index does not match the corpus at document '" + corpus[i].id + "'");
        }
    }
}

Neighbors Bm25Retriever::retrieve(std::uint32_t doc, std::size_t k) const
{
    return index_.query_text(corpus_[doc].text, k, doc);
}

EmbeddingRetriever::EmbeddingRetriever(const EmbeddingIndex& index, const Corpus& corpus, std::size_t nprobe)
    : index_(index), nprobe_(nprobe), row_of_doc_(corpus.size()), doc_of_row_(index.size())
{
    if (!index.trained()) {
        throw Error("embedding index must be trained");
    }
    if (nprobe < 1 || nprobe > index.nlist()) {
        throw Error("nprobe must lie in [1, " + std::to_string(index.nlist()) + "]");
    }
    if (index.size() != corpus.size()) {
        throw Error("embedding index has " + std::to_string(index.size()) + " rows but the corpus has "
                    + std::to_string(corpus.size()) + " documents");
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        auto row = index.row(corpus[i].id);
        if (!row) {
            throw Error("document '" + corpus[i].id + "' has no embedding");
        }
        row_of_doc_[i] = *row;
        doc_of_row_[*row] = static_cast<std::uint32_t>(i);
    }
}

Neighbors EmbeddingRetriever::retrieve(std::uint32_t doc, std::size_t k) const
{
    auto hits = index_.query(row_of_doc_[doc], k, nprobe_);
    for (auto& h : hits) {
        h.doc = doc_of_row_[h.doc];
    }
    return hits;
}

Neighbors TableRetriever::retrieve(std::uint32_t doc, std::size_t k) const
{
    Neighbors out;
    if (doc >= table_.size()) {
        return out;
    }
    const auto& row = table_[doc];
    for (std::size_t i = 0; i < row.size() && out.size() < k; ++i) {
        out.push_back({row[i], -static_cast<double>(i)});
    }
    return out;
}

CachedRetriever::CachedRetriever(const Retriever& inner, std::size_t n_docs, std::size_t k, unsigned threads)
    : inner_(inner), k_(k), table_(n_docs)
{
    detail::parallel_for(n_docs, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t d = begin; d < end; ++d) {
            table_[d] = inner_.retrieve(static_cast<std::uint32_t>(d), k_);
        }
    });
}

Neighbors CachedRetriever::retrieve(std::uint32_t doc, std::size_t k) const
{
    if (k > k_) {
        return inner_.retrieve(doc, k);
    }
    const auto& row = table_[doc];
    return Neighbors(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(std::min(k, row.size())));
}

} // namespace splice
