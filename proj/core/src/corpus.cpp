#include "splice/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "splice/error.hpp"
#include "splice/log.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace splice {

nlohmann::ordered_json SkipReport::to_json() const
{
    nlohmann::ordered_json j;
    j["dropped_too_long"] = dropped_too_long;
    j["dropped_duplicate"] = dropped_duplicate;
    j["unreadable"] = unreadable;
    return j;
}

namespace {

std::ifstream open_input(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "'");
    }
    return in;
}

std::optional<std::string> optional_string(const json& rec, const char* key, std::size_t line)
{
    auto it = rec.find(key);
    if (it == rec.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_string()) {
        throw Error("line " + std::to_string(line) + ": field '" + key + "' must be a string");
    }
    return it->get<std::string>();
}

std::optional<std::string> read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        return std::nullopt;
    }
    return std::move(ss).str();
}

std::vector<fs::path> sorted_children(const fs::path& dir)
{
    std::vector<fs::path> children;
    for (const auto& entry : fs::directory_iterator(dir)) {
        children.push_back(entry.path());
    }
    std::sort(children.begin(), children.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });
    return children;
}

struct RepoFile {
    std::string rel;
    std::string text;
    std::size_t char_len;
};

void walk(const fs::path& root, const fs::path& dir, std::vector<RepoFile>& out,
          std::size_t max_chars, std::uint64_t split_bytes, SkipReport& report)
{
    for (const auto& child : sorted_children(dir)) {
        std::error_code ec;
        auto status = fs::symlink_status(child, ec);
        if (ec) {
            ++report.unreadable;
            continue;
        }
        if (fs::is_directory(status)) {
            walk(root, child, out, max_chars, split_bytes, report);
            continue;
        }
        if (!fs::is_regular_file(status)) {
            continue;
        }
        auto rel = child.lexically_relative(root).generic_string();
        auto text = read_file(child);
        if (!text || !utf8_valid(*text)) {
            ++report.unreadable;
            log::warn("skipping unreadable file '" + rel + "'");
            continue;
        }
        std::size_t chars = utf8_length(*text);
        if (chars > max_chars || text->size() > split_bytes) {
            ++report.dropped_too_long;
            continue;
        }
        out.push_back(RepoFile{std::move(rel), std::move(*text), chars});
    }
}

std::string repo_of(std::string_view rel)
{
    auto slash = rel.find('/');
    return slash == std::string_view::npos ? std::string(".") : std::string(rel.substr(0, slash));
}

} // namespace

bool dfs_path_less(std::string_view a, std::string_view b)
{
    std::size_t i = 0;
    std::size_t j = 0;
    while (i <= a.size() && j <= b.size()) {
        if (i == a.size() || j == b.size()) {
            return i == a.size() && j != b.size();
        }
        auto ea = a.find('/', i);
        auto eb = b.find('/', j);
        if (ea == std::string_view::npos) ea = a.size();
        if (eb == std::string_view::npos) eb = b.size();
        auto ca = a.substr(i, ea - i);
        auto cb = b.substr(j, eb - j);
        if (ca != cb) {
            return ca < cb;
        }
        i = ea == a.size() ? ea : ea + 1;
        j = eb == b.size() ? eb : eb + 1;
    }
    return false;
}

IngestResult ingest_jsonl(const fs::path& path, std::size_t max_chars)
{
    auto in = open_input(path);
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    SkipReport report;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            throw Error(path.string() + ": line " + std::to_string(lineno) + ": malformed JSON");
        }
        auto id = rec.find("id");
        auto text = rec.find("text");
        if (id == rec.end() || !id->is_string() || text == rec.end() || !text->is_string()) {
            throw Error(path.string() + ": line " + std::to_string(lineno)
                        + ": record needs string fields \"id\" and \"text\"");
        }
        Document doc = Document::make(id->get<std::string>(), text->get<std::string>());
        if (!seen.insert(doc.id).second) {
            throw Error(path.string() + ": duplicate id '" + doc.id + "'");
        }
        if (doc.char_len > max_chars) {
            ++report.dropped_too_long;
            continue;
        }
        doc.path = optional_string(rec, "path", lineno);
        doc.domain = optional_string(rec, "domain", lineno);
        if (auto tl = rec.find("token_len"); tl != rec.end() && !tl->is_null()) {
            if (!tl->is_number_unsigned()) {
                throw Error(path.string() + ": line " + std::to_string(lineno)
                            + ": token_len must be a nonnegative integer");
            }
            doc.token_len = tl->get<std::size_t>();
        }
        docs.push_back(std::move(doc));
    }
    return {Corpus(std::move(docs)), report};
}

IngestResult ingest_repo_tree(const fs::path& root, std::size_t max_chars,
                              std::uint64_t repo_split_bytes)
{
    if (!fs::is_directory(root)) {
        throw Error("repository root '" + root.string() + "' is not a directory");
    }
    SkipReport report;
    std::vector<RepoFile> files;
    walk(root, root, files, max_chars, repo_split_bytes, report);

    // Sibling order by name makes `files` DFS-ordered; group by repository
    // while keeping that order.
    std::map<std::string, std::uint64_t> repo_bytes;
    for (const auto& f : files) {
        repo_bytes[repo_of(f.rel)] += f.text.size();
    }

    std::map<std::string, std::pair<std::size_t, std::uint64_t>> chunk_state;
    std::vector<Document> docs;
    docs.reserve(files.size());
    for (auto& f : files) {
        auto repo = repo_of(f.rel);
        std::string tag = repo;
        if (repo_bytes[repo] > repo_split_bytes) {
            auto& [chunk, used] = chunk_state[repo];
            if (used + f.text.size() > repo_split_bytes) {
                ++chunk;
                used = 0;
            }
            used += f.text.size();
            tag = repo + "#" + std::to_string(chunk);
        }
        Document d;
        d.id = f.rel;
        d.path = f.rel;
        d.domain = std::move(tag);
        d.char_len = f.char_len;
        d.text = std::move(f.text);
        docs.push_back(std::move(d));
    }
    return {Corpus(std::move(docs)), report};
}

DedupResult dedup_exact(const Corpus& corpus)
{
    std::unordered_set<std::string_view> seen;
    seen.reserve(corpus.size());
    std::vector<Document> kept;
    std::size_t removed = 0;
    for (const auto& d : corpus.documents()) {
        if (!seen.insert(d.text).second) {
            ++removed;
            continue;
        }
        kept.push_back(d);
    }
    return {Corpus(std::move(kept), corpus.length_unit()), removed};
}

std::size_t attach_token_lengths(Corpus& corpus, const fs::path& sidecar)
{
    auto in = open_input(sidecar);
    std::string line;
    std::size_t lineno = 0;
    std::size_t unmatched = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object() || !rec.contains("id") || !rec["id"].is_string()
            || !rec.contains("token_len") || !rec["token_len"].is_number_unsigned()) {
            throw Error(sidecar.string() + ": line " + std::to_string(lineno)
                        + ": expected {\"id\": string, \"token_len\": integer}");
        }
        auto id = rec["id"].get<std::string>();
        auto ord = corpus.find(id);
        if (!ord) {
            ++unmatched;
            log::warn("token sidecar id '" + id + "' is not in the corpus");
            continue;
        }
        corpus.set_token_len(*ord, rec["token_len"].get<std::size_t>());
    }
    return unmatched;
}

void write_corpus_jsonl(const Corpus& corpus, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    for (const auto& d : corpus.documents()) {
        nlohmann::ordered_json rec;
        rec["id"] = d.id;
        rec["text"] = d.text;
        if (d.path) rec["path"] = *d.path;
        if (d.domain) rec["domain"] = *d.domain;
        if (d.token_len) rec["token_len"] = *d.token_len;
        out << rec.dump() << '\n';
    }
    if (!out) {
        throw Error("write failed for '" + path.string() + "'");
    }
}

Corpus load_corpus(const fs::path& path, LengthUnit unit)
{
    auto result = ingest_jsonl(path, std::numeric_limits<std::size_t>::max());
    result.corpus.set_length_unit(unit);
    return std::move(result.corpus);
}

} // namespace splice
