#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>

#include <nlohmann/json.hpp>

#include "splice/document.hpp"

namespace splice {

inline constexpr std::size_t kDefaultMaxChars = 30000;
inline constexpr std::uint64_t kDefaultRepoSplitBytes = 25ULL << 20;

/// Counters for documents rejected during ingestion.
struct SkipReport {
    std::size_t dropped_too_long = 0;
    std::size_t dropped_duplicate = 0;
    std::size_t unreadable = 0;

    [[nodiscard]] nlohmann::ordered_json to_json() const;
};

struct IngestResult {
    Corpus corpus;
    SkipReport skipped;
};

/// Reads one {"id","text","path"?,"domain"?,"token_len"?} object per line, in
/// file order. Records longer than `max_chars` scalar values are dropped and
/// counted. Throws Error naming the line for malformed JSON and naming the id
/// for duplicates. Blank lines are ignored.
IngestResult ingest_jsonl(const std::filesystem::path& path,
                          std::size_t max_chars = kDefaultMaxChars);

/// Walks a directory tree in depth-first order, entries of each directory
/// visited by name. Every regular file becomes a document whose id and path
/// are the root-relative path. Each first-level directory is a repository;
/// files directly under `root` belong to the repository ".". A repository
/// whose retained files exceed `repo_split_bytes` is cut into consecutive
/// chunks of whole files tagged "<repo>#<n>" in `domain`; otherwise the tag is
/// the repository name.
///
/// Files that are not valid UTF-8 or cannot be read count as unreadable.
/// Files longer than `max_chars`, or larger than `repo_split_bytes` on their
/// own, count as too long.
IngestResult ingest_repo_tree(const std::filesystem::path& root,
                              std::size_t max_chars = kDefaultMaxChars,
                              std::uint64_t repo_split_bytes = kDefaultRepoSplitBytes);

struct DedupResult {
    Corpus corpus;
    std::size_t removed = 0;
};

/// Drops documents whose text byte-equals an earlier document's text.
DedupResult dedup_exact(const Corpus& corpus);

/// Sets token_len from a {"id","token_len"} JSONL sidecar. Returns the number
/// of sidecar records whose id is not in the corpus (each logged as a warning).
std::size_t attach_token_lengths(Corpus& corpus, const std::filesystem::path& sidecar);

/// Writes the corpus in the ingestion JSONL format, token_len included when set.
void write_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path);

/// Reads a corpus previously written by write_corpus_jsonl (no length filter).
Corpus load_corpus(const std::filesystem::path& path,
                   LengthUnit unit = LengthUnit::chars);

/// Component-wise path ordering: the order a depth-first walk visits files
/// when each directory's entries are taken by name.
bool dfs_path_less(std::string_view a, std::string_view b);

} // namespace splice
