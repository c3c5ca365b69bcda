#include "splice/repo_graph.hpp"

#include <algorithm>
#include <map>

#include "splice/corpus.hpp"
#include "splice/error.hpp"

namespace splice {

RepoGraph RepoGraph::build(const Corpus& corpus)
{
    std::map<std::string, std::vector<std::uint32_t>> by_chunk;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& d = corpus[i];
        if (!d.path) {
            continue;
        }
        by_chunk[d.domain.value_or("")].push_back(static_cast<std::uint32_t>(i));
    }
    auto path_less = [&](std::uint32_t a, std::uint32_t b) {
        const auto& pa = *corpus[a].path;
        const auto& pb = *corpus[b].path;
        if (dfs_path_less(pa, pb)) return true;
        if (dfs_path_less(pb, pa)) return false;
        return a < b;
    };
    std::vector<std::pair<std::string, std::vector<std::uint32_t>>> chunks;
    for (auto& [name, docs] : by_chunk) {
        std::sort(docs.begin(), docs.end(), path_less);
        chunks.emplace_back(name, std::move(docs));
    }
    // chunks in the order their first file is visited
    std::sort(chunks.begin(), chunks.end(), [&](const auto& a, const auto& b) {
        return path_less(a.second.front(), b.second.front());
    });

    RepoGraph g;
    for (auto& [name, docs] : chunks) {
        auto c = static_cast<std::uint32_t>(g.chunks_.size());
        for (std::size_t i = 0; i < docs.size(); ++i) {
            g.positions_.emplace(docs[i], Position{c, static_cast<std::uint32_t>(i)});
        }
        g.names_.push_back(name);
        g.chunks_.push_back(std::move(docs));
    }
    return g;
}

RepoGraph::Position RepoGraph::position(std::uint32_t doc) const
{
    auto it = positions_.find(doc);
    if (it == positions_.end()) {
        throw Error("document ordinal " + std::to_string(doc) + " is not in the repository graph");
    }
    return it->second;
}

Neighbors RepoGraph::successors(const Corpus& corpus, std::uint32_t doc, std::size_t k) const
{
    if (!corpus[doc].path) {
        throw Error("document '" + corpus[doc].id + "' has no repository path");
    }
    auto it = positions_.find(doc);
    if (it == positions_.end()) {
        throw Error("document '" + corpus[doc].id + "' is not in the repository graph");
    }
    const auto& files = chunks_[it->second.chunk];
    Neighbors out;
    for (std::size_t step = 1; step <= k && it->second.index + step < files.size(); ++step) {
        out.push_back({files[it->second.index + step], -static_cast<double>(step)});
    }
    return out;
}

} // namespace splice
