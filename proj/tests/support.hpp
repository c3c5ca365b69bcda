#pragma once

// Shared fixtures and independent reference implementations for the tests.
// The oracles here deliberately avoid the library's own helpers (tokenizer,
// rng, sorting conventions) so that agreement means something.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "splice/document.hpp"
#include "splice/packer.hpp"

namespace test {

namespace fs = std::filesystem;

class TempDir {
  public:
    TempDir()
    {
        static std::uint64_t counter = 0;
        std::random_device rd;
        path_ = fs::temp_directory_path()
                / ("splice-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const fs::path& path() const { return path_; }
    [[nodiscard]] fs::path operator/(const std::string& name) const { return path_ / name; }

  private:
    fs::path path_;
};

inline void write_file(const fs::path& p, const std::string& content)
{
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Random lowercase words from a small alphabet so that terms collide often.
inline std::string random_text(std::mt19937_64& gen, std::size_t n_words, std::size_t vocab = 40)
{
    std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
    std::string text;
    for (std::size_t i = 0; i < n_words; ++i) {
        if (i > 0) {
            text += (i % 7 == 0) ? ", " : " ";
        }
        auto w = word(gen);
        text += "w" + std::to_string(w);
        if (w % 5 == 0) {
            text += "X";
        }
    }
    return text;
}

/// Corpus of `n` documents with random texts, domains and ids d0..d(n-1).
inline splice::Corpus random_corpus(std::mt19937_64& gen, std::size_t n, std::size_t max_words,
                                    std::size_t n_domains = 3, std::size_t vocab = 40)
{
    std::uniform_int_distribution<std::size_t> words(0, max_words);
    std::vector<splice::Document> docs;
    for (std::size_t i = 0; i < n; ++i) {
        auto d = splice::Document::make("d" + std::to_string(i), random_text(gen, words(gen), vocab));
        d.domain = "dom" + std::to_string(i % n_domains);
        d.path = d.domain.value() + "/f" + std::to_string(1000 + i) + ".txt";
        docs.push_back(std::move(d));
    }
    return splice::Corpus(std::move(docs));
}

// ------------------------------------------------------------------ oracles

/// Lowercase ASCII letters and digits form terms; everything else separates.
/// Bytes >= 0x80 count as term characters so UTF-8 words stay whole.
inline std::vector<std::string> oracle_terms(const std::string& text)
{
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c) != 0 || c >= 0x80) {
            cur.push_back(static_cast<char>(c >= 0x80 ? c : std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) {
        out.push_back(cur);
    }
    return out;
}

struct OracleHit {
    std::string id;
    double score;
};

/// Scores every document with the Okapi formula, no pruning. Corpus
/// statistics are computed once so that many queries stay cheap.
class OracleBm25 {
  public:
    OracleBm25(std::vector<std::string> ids, const std::vector<std::string>& texts, double k1 = 1.2,
               double b = 0.75)
        : ids_(std::move(ids)), k1_(k1), b_(b), tf_(texts.size()), len_(texts.size())
    {
        double total = 0;
        for (std::size_t i = 0; i < texts.size(); ++i) {
            auto terms = oracle_terms(texts[i]);
            len_[i] = static_cast<double>(terms.size());
            total += len_[i];
            for (const auto& t : terms) {
                tf_[i][t] += 1;
            }
            for (const auto& [t, c] : tf_[i]) {
                df_[t] += 1;
                docs_with_[t].push_back(i);
            }
        }
        avgdl_ = texts.empty() ? 0 : total / static_cast<double>(texts.size());
    }

    [[nodiscard]] std::vector<OracleHit> query(const std::string& text, std::size_t k, std::size_t query_cap,
                                               const std::string* exclude) const
    {
        std::vector<std::string> qterms;
        std::set<std::string> seen;
        auto all = oracle_terms(text);
        for (std::size_t i = 0; i < all.size() && i < query_cap; ++i) {
            if (seen.insert(all[i]).second) {
                qterms.push_back(all[i]);
            }
        }
        // every document sharing a term is scored; the rest score zero
        std::set<std::size_t> candidates;
        for (const auto& t : qterms) {
            if (auto it = docs_with_.find(t); it != docs_with_.end()) {
                candidates.insert(it->second.begin(), it->second.end());
            }
        }
        const double N = static_cast<double>(ids_.size());
        std::vector<OracleHit> hits;
        for (auto i : candidates) {
            if (exclude != nullptr && ids_[i] == *exclude) {
                continue;
            }
            double s = 0;
            for (const auto& t : qterms) {
                auto it = tf_[i].find(t);
                if (it == tf_[i].end()) {
                    continue;
                }
                double df = df_.at(t);
                double idf = std::log((N - df + 0.5) / (df + 0.5) + 1.0);
                double f = it->second;
                s += idf * (f * (k1_ + 1.0)) / (f + k1_ * (1.0 - b_ + b_ * len_[i] / avgdl_));
            }
            if (s > 0) {
                hits.push_back({ids_[i], s});
            }
        }
        std::sort(hits.begin(), hits.end(), [](const OracleHit& x, const OracleHit& y) {
            if (x.score != y.score) {
                return x.score > y.score;
            }
            return x.id < y.id;
        });
        if (hits.size() > k) {
            hits.resize(k);
        }
        return hits;
    }

  private:
    std::vector<std::string> ids_;
    double k1_;
    double b_;
    std::vector<std::map<std::string, double>> tf_;
    std::vector<double> len_;
    std::map<std::string, double> df_;
    std::map<std::string, std::vector<std::size_t>> docs_with_;
    double avgdl_ = 0;
};

inline std::vector<OracleHit> oracle_bm25(const std::vector<std::string>& ids, const std::vector<std::string>& texts,
                                          const std::string& query, std::size_t k, std::size_t query_cap,
                                          const std::string* exclude)
{
    return OracleBm25(ids, texts).query(query, k, query_cap, exclude);
}

/// Reference SPLiCe breadth-first walk over an explicit neighbor table.
struct OracleTree {
    std::vector<std::uint32_t> sequence;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

inline OracleTree oracle_bfs(const std::vector<std::vector<std::uint32_t>>& table,
                             const std::vector<std::size_t>& length, std::vector<bool>& used, std::size_t k,
                             std::size_t L, std::uint32_t root)
{
    OracleTree t;
    std::size_t total = length[root];
    used[root] = true;
    t.sequence.push_back(root);
    std::deque<std::uint32_t> q{root};
    while (!q.empty() && total < L) {
        auto d = q.front();
        q.pop_front();
        std::size_t taken = 0;
        for (auto c : table[d]) {
            if (taken++ == k) {
                break;
            }
            if (used[c]) {
                continue;
            }
            used[c] = true;
            t.sequence.push_back(c);
            t.edges.emplace_back(d, c);
            total += length[c];
            q.push_back(c);
        }
    }
    return t;
}

/// Ordinary least squares slope of y on x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double oracle_zipf(const std::vector<std::uint32_t>& tokens)
{
    std::map<std::uint32_t, double> count;
    for (auto t : tokens) {
        count[t] += 1;
    }
    std::vector<double> f;
    for (const auto& [t, c] : count) {
        f.push_back(c);
    }
    std::sort(f.rbegin(), f.rend());
    std::vector<double> x, y;
    for (std::size_t r = 0; r < f.size(); ++r) {
        x.push_back(std::log(static_cast<double>(r + 1)));
        y.push_back(std::log(f[r]));
    }
    return -ols_slope(x, y);
}

/// Recursive directory walk: children sorted by file name, directories
/// descended in place. Returns root-relative generic paths of regular files.
inline void oracle_dfs(const fs::path& root, const fs::path& dir, std::vector<std::string>& out)
{
    std::vector<fs::path> children;
    for (const auto& e : fs::directory_iterator(dir)) {
        children.push_back(e.path());
    }
    std::sort(children.begin(), children.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    for (const auto& c : children) {
        if (fs::is_directory(c)) {
            oracle_dfs(root, c, out);
        } else if (fs::is_regular_file(c)) {
            out.push_back(c.lexically_relative(root).generic_string());
        }
    }
}

/// Builds a random nested tree of small files under `root`.
inline void random_tree(std::mt19937_64& gen, const fs::path& root, int depth, std::size_t& files)
{
    std::uniform_int_distribution<int> fanout(1, 4);
    int n = fanout(gen);
    for (int i = 0; i < n; ++i) {
        std::string name = std::string(1, static_cast<char>('a' + gen() % 6)) + std::to_string(gen() % 20);
        if (depth > 0 && gen() % 3 == 0) {
            fs::create_directories(root / name);
            random_tree(gen, root / name, depth - 1, files);
        } else if (!fs::exists(root / (name + ".c"))) {
            write_file(root / (name + ".c"), "int " + name + " = " + std::to_string(gen() % 1000) + ";\n");
            ++files;
        }
    }
}

/// Every corpus document appears in exactly one example, as a whole or
/// truncated segment, or is otherwise recorded as consumed.
inline bool each_consumed_once(const splice::Corpus& corpus, const std::vector<splice::PackedExample>& examples,
                               bool allow_trimmed_out)
{
    std::multiset<std::string> seen;
    for (const auto& ex : examples) {
        std::set<std::string> in_example;
        for (const auto& s : ex.segments) {
            if (!in_example.insert(s.id).second) {
                return false;
            }
            seen.insert(s.id);
        }
        if (allow_trimmed_out) {
            if (in_example.insert(ex.root).second) {
                seen.insert(ex.root);
            }
            for (const auto& [p, c] : ex.edges) {
                if (!in_example.count(c)) {
                    in_example.insert(c);
                    seen.insert(c);
                }
            }
        }
    }
    if (seen.size() != corpus.size()) {
        return false;
    }
    for (const auto& d : corpus.documents()) {
        if (seen.count(d.id) != 1) {
            return false;
        }
    }
    return corpus.consumed_count() == corpus.size();
}

} // namespace test
