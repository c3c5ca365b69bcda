#include "splice/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "binary_io.hpp"
#include "splice/error.hpp"
#include "splice/tokenize.hpp"

namespace splice {
namespace {

constexpr std::string_view kMagic = "SPLCBM25";
constexpr std::uint32_t kFormatVersion = 1;

void check_params(const Bm25Params& p)
{
    if (!(p.k1 > 0.0) || !std::isfinite(p.k1)) {
        throw Error("bm25 k1 must be a positive finite number");
    }
    if (!(p.b >= 0.0 && p.b <= 1.0)) {
        throw Error("bm25 b must lie in [0, 1]");
    }
    if (p.query_cap == 0) {
        throw Error("bm25 query_cap must be positive");
    }
}

} // namespace

Bm25Index Bm25Index::build(const Corpus& corpus, Bm25Params params)
{
    check_params(params);
    if (corpus.empty()) {
        throw Error("cannot build a BM25 index over an empty corpus");
    }
    Bm25Index index;
    index.params_ = params;

    const std::size_t n = corpus.size();
    std::unordered_map<std::string, std::uint32_t> term_ids;
    std::vector<std::uint32_t> df;
    struct TermCount {
        std::uint32_t term;
        std::uint32_t tf;
    };
    // flat per-document term counts, doc boundaries in pair_offsets
    std::vector<TermCount> pairs;
    std::vector<std::uint64_t> pair_offsets{0};
    pair_offsets.reserve(n + 1);
    index.doc_len_.resize(n);
    index.ids_.reserve(n);

    std::vector<std::uint32_t> doc_terms;
    for (std::size_t d = 0; d < n; ++d) {
        const auto& doc = corpus[d];
        index.ids_.push_back(doc.id);
        doc_terms.clear();
        for_each_term(doc.text, [&](std::string_view t) {
            auto [it, inserted] = term_ids.try_emplace(std::string(t), static_cast<std::uint32_t>(df.size()));
            if (inserted) {
                df.push_back(0);
            }
            doc_terms.push_back(it->second);
        });
        index.doc_len_[d] = static_cast<std::uint32_t>(doc_terms.size());
        std::sort(doc_terms.begin(), doc_terms.end());
        for (std::size_t i = 0; i < doc_terms.size();) {
            std::size_t j = i;
            while (j < doc_terms.size() && doc_terms[j] == doc_terms[i]) {
                ++j;
            }
            pairs.push_back(TermCount{doc_terms[i], static_cast<std::uint32_t>(j - i)});
            ++df[doc_terms[i]];
            i = j;
        }
        pair_offsets.push_back(pairs.size());
    }

    index.terms_.resize(df.size());
    for (auto& [term, id] : term_ids) {
        index.terms_[id] = term;
    }
    term_ids.clear();

    index.offsets_.assign(df.size() + 1, 0);
    for (std::size_t t = 0; t < df.size(); ++t) {
        index.offsets_[t + 1] = index.offsets_[t] + df[t];
    }
    index.postings_.resize(pairs.size());
    std::vector<std::uint64_t> cursor(index.offsets_.begin(), index.offsets_.end() - 1);
    for (std::size_t d = 0; d < n; ++d) {
        for (auto i = pair_offsets[d]; i < pair_offsets[d + 1]; ++i) {
            const auto& p = pairs[i];
            index.postings_[cursor[p.term]++] = Posting{static_cast<std::uint32_t>(d), p.tf};
        }
    }
    index.finalize();
    return index;
}

void Bm25Index::finalize()
{
    const std::size_t n = doc_len_.size();
    by_id_.clear();
    by_id_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!by_id_.emplace(ids_[i], static_cast<std::uint32_t>(i)).second) {
            throw Error("duplicate document id '" + ids_[i] + "' in BM25 index");
        }
    }
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0U);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ids_[a] < ids_[b]; });
    id_rank_.assign(n, 0);
    for (std::size_t r = 0; r < n; ++r) {
        id_rank_[order[r]] = static_cast<std::uint32_t>(r);
    }

    term_ids_.clear();
    term_ids_.reserve(terms_.size());
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        term_ids_.emplace(terms_[t], static_cast<std::uint32_t>(t));
    }

    std::uint64_t total = 0;
    for (auto len : doc_len_) {
        total += len;
    }
    avg_doc_len_ = n == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n);

    const double k1 = params_.k1;
    const double b = params_.b;
    norm_.resize(n);
    for (std::size_t d = 0; d < n; ++d) {
        double dl = doc_len_[d];
        norm_[d] = avg_doc_len_ > 0.0 ? k1 * (1.0 - b + b * dl / avg_doc_len_) : k1;
    }

    const double docs = static_cast<double>(n);
    idf_.resize(terms_.size());
    max_contribution_.resize(terms_.size());
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        double df = static_cast<double>(offsets_[t + 1] - offsets_[t]);
        idf_[t] = std::log((docs - df + 0.5) / (df + 0.5) + 1.0);
        double best = 0.0;
        for (const auto& p : postings(static_cast<std::uint32_t>(t))) {
            best = std::max(best, contribution(static_cast<std::uint32_t>(t), p));
        }
        max_contribution_[t] = best;
    }
}

std::optional<std::uint32_t> Bm25Index::ordinal(std::string_view id) const
{
    auto it = by_id_.find(id);
    if (it == by_id_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<std::uint32_t> Bm25Index::term_id(std::string_view term) const
{
    auto it = term_ids_.find(term);
    if (it == term_ids_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::span<const Posting> Bm25Index::postings(std::uint32_t term) const
{
    return {postings_.data() + offsets_[term], postings_.data() + offsets_[term + 1]};
}

std::vector<std::uint32_t> Bm25Index::query_terms(std::string_view text) const
{
    std::vector<std::uint32_t> out;
    std::vector<std::uint8_t> seen;
    std::size_t taken = 0;
    const std::size_t cap = params_.query_cap;
    std::string buffer;
    for_each_term(text, [&](std::string_view t) {
        if (taken >= cap) {
            return;
        }
        ++taken;
        auto id = term_id(t);
        if (!id) {
            return;
        }
        if (seen.size() <= *id) {
            seen.resize(std::max<std::size_t>(*id + 1, seen.size() * 2), 0);
        }
        if (seen[*id] == 0) {
            seen[*id] = 1;
            out.push_back(*id);
        }
    });
    return out;
}

Neighbors Bm25Index::query(const Document& doc, std::size_t k) const
{
    auto self = ordinal(doc.id);
    if (!self) {
        throw Error("document '" + doc.id + "' is not in the BM25 index");
    }
    return query_text(doc.text, k, self);
}

Neighbors Bm25Index::query_text(std::string_view text, std::size_t k,
                                std::optional<std::uint32_t> exclude) const
{
    auto terms = query_terms(text);
    return top_k(terms, k, exclude);
}

Neighbors Bm25Index::top_k(std::span<const std::uint32_t> terms, std::size_t k,
                           std::optional<std::uint32_t> exclude) const
{
    if (k == 0 || terms.empty()) {
        return {};
    }

    struct Term {
        std::span<const Posting> list;
        double bound;
        std::uint32_t term;
        std::uint32_t slot;
    };
    std::vector<Term> order;
    order.reserve(terms.size());
    double remaining = 0.0;
    for (std::uint32_t slot = 0; slot < terms.size(); ++slot) {
        auto list = postings(terms[slot]);
        if (!list.empty()) {
            order.push_back({list, max_contribution_[terms[slot]], terms[slot], slot});
            remaining += max_contribution_[terms[slot]];
        }
    }
    // highest-impact terms first; the summation order is fixed, so a score
    // never depends on how much pruning happened
    std::sort(order.begin(), order.end(), [](const Term& a, const Term& b) {
        return a.bound > b.bound || (a.bound == b.bound && a.slot < b.slot);
    });

    thread_local std::vector<double> acc;
    thread_local std::vector<std::uint8_t> seen;
    if (acc.size() < n_docs()) {
        acc.assign(n_docs(), 0.0);
        seen.assign(n_docs(), 0);
    }
    std::vector<std::uint32_t> cand;
    const std::uint32_t skip = exclude ? *exclude : std::numeric_limits<std::uint32_t>::max();

    // Full scores of a few probed leaders: with the partial sums they give a
    // floor on the final k-th score, and they rise long before partials do.
    // A probe sums in the same term order as the accumulator, so it matches
    // the final score exactly.
    std::vector<std::pair<std::uint32_t, double>> probed;
    auto full_score = [&](std::uint32_t d, std::size_t from) {
        double s = acc[d];
        for (std::size_t j = from; j < order.size(); ++j) {
            auto list = order[j].list;
            auto it = std::lower_bound(list.begin(), list.end(), d,
                                       [](const Posting& p, std::uint32_t x) { return p.doc < x; });
            if (it != list.end() && it->doc == d) {
                s += contribution(order[j].term, *it);
            }
        }
        return s;
    };
    std::vector<std::pair<double, std::uint32_t>> scratch;
    std::vector<double> floor_scratch;
    auto kth = [&](std::size_t from) -> double {
        scratch.clear();
        for (auto d : cand) {
            if (d != skip) {
                scratch.emplace_back(acc[d], d);
            }
        }
        if (scratch.size() < k) {
            return -1.0;
        }
        auto nth = scratch.begin() + static_cast<std::ptrdiff_t>(k - 1);
        std::nth_element(scratch.begin(), nth, scratch.end(), std::greater<>());
        double floor = nth->first;
        for (auto it = scratch.begin(); it <= nth; ++it) {
            auto d = it->second;
            if (std::none_of(probed.begin(), probed.end(), [d](const auto& x) { return x.first == d; })) {
                probed.emplace_back(d, full_score(d, from));
            }
        }
        if (probed.size() >= k) {
            floor_scratch.clear();
            for (const auto& x : probed) {
                floor_scratch.push_back(x.second);
            }
            auto fn = floor_scratch.begin() + static_cast<std::ptrdiff_t>(k - 1);
            std::nth_element(floor_scratch.begin(), fn, floor_scratch.end(), std::greater<>());
            floor = std::max(floor, *fn);
        }
        return floor;
    };

    std::size_t t = 0;
    std::size_t since_check = 0;
    double threshold = -1.0;
    // phase 1: any document may still enter the top k
    for (; t < order.size(); ++t) {
        const auto& term = order[t];
        for (const auto& p : term.list) {
            if (!seen[p.doc]) {
                seen[p.doc] = 1;
                cand.push_back(p.doc);
            }
            acc[p.doc] += contribution(term.term, p);
        }
        remaining -= term.bound;
        since_check += term.list.size();
        // checking costs O(candidates); amortize it against postings scanned
        if (t + 1 < order.size() && since_check >= 2 * cand.size()) {
            since_check = 0;
            threshold = kth(t + 1);
            if (threshold > 0 && remaining < threshold * (1 - 1e-9)) {
                ++t;
                break;
            }
        }
    }
    // phase 2: unseen documents cannot reach the threshold; only refine
    // candidates that still can
    auto prune = [&](double cut) {
        std::size_t kept = 0;
        for (auto d : cand) {
            if (d == skip || acc[d] + remaining >= cut) {
                cand[kept++] = d;
            } else {
                acc[d] = 0.0;
                seen[d] = 0;
            }
        }
        cand.resize(kept);
    };
    if (t < order.size()) {
        prune(threshold * (1 - 1e-9));
        if (16 * cand.size() > n_docs()) {
            // dense: a sweep of the mask is cheaper than sorting
            cand.clear();
            for (std::uint32_t d = 0; d < n_docs(); ++d) {
                if (seen[d]) {
                    cand.push_back(d);
                }
            }
        } else {
            std::sort(cand.begin(), cand.end());
        }
        std::size_t at_last_kth = cand.size();
        for (; t < order.size(); ++t) {
            // the bound shrinks with every term; the floor is refreshed
            // only when the candidate set has halved
            if (2 * cand.size() <= at_last_kth) {
                threshold = std::max(threshold, kth(t));
                at_last_kth = cand.size();
            }
            prune(threshold * (1 - 1e-9));
            const auto& term = order[t];
            if (term.list.size() <= cand.size()) {
                for (const auto& p : term.list) {
                    if (seen[p.doc]) {
                        acc[p.doc] += contribution(term.term, p);
                    }
                }
            } else {
                const Posting* it = term.list.data();
                const Posting* end = it + term.list.size();
                for (auto d : cand) {
                    it = std::lower_bound(it, end, d, [](const Posting& p, std::uint32_t x) { return p.doc < x; });
                    if (it == end) {
                        break;
                    }
                    if (it->doc == d) {
                        acc[d] += contribution(term.term, *it);
                    }
                }
            }
            remaining -= term.bound;
        }
    }

    struct Entry {
        double score;
        std::uint32_t rank;
        std::uint32_t doc;
    };
    std::vector<Entry> entries;
    entries.reserve(cand.size());
    for (auto d : cand) {
        if (d != skip && acc[d] > 0.0) {
            entries.push_back({acc[d], id_rank_[d], d});
        }
        acc[d] = 0.0;
        seen[d] = 0;
    }
    auto better = [](const Entry& a, const Entry& b) {
        return a.score > b.score || (a.score == b.score && a.rank < b.rank);
    };
    const std::size_t n = std::min(k, entries.size());
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(n), entries.end(), better);
    Neighbors out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({entries[i].doc, entries[i].score});
    }
    return out;
}

void Bm25Index::save(const std::filesystem::path& path) const
{
    detail::BinaryWriter w(path);
    w.bytes(kMagic.data(), kMagic.size());
    w.pod(kFormatVersion);
    w.pod(params_.k1);
    w.pod(params_.b);
    w.pod(static_cast<std::uint64_t>(params_.query_cap));
    w.pod(static_cast<std::uint64_t>(ids_.size()));
    for (std::size_t d = 0; d < ids_.size(); ++d) {
        w.string(ids_[d]);
        w.pod(doc_len_[d]);
    }
    w.pod(static_cast<std::uint64_t>(terms_.size()));
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        auto list = postings(static_cast<std::uint32_t>(t));
        w.string(terms_[t]);
        w.pod(static_cast<std::uint64_t>(list.size()));
        w.bytes(list.data(), list.size_bytes());
    }
    w.finish();
}

Bm25Index Bm25Index::load(const std::filesystem::path& path)
{
    detail::BinaryReader r(path);
    r.expect_magic(kMagic);
    if (auto v = r.pod<std::uint32_t>(); v != kFormatVersion) {
        throw Error("'" + path.string() + "': unsupported BM25 format version " + std::to_string(v));
    }
    Bm25Index index;
    index.params_.k1 = r.pod<double>();
    index.params_.b = r.pod<double>();
    index.params_.query_cap = static_cast<std::size_t>(r.pod<std::uint64_t>());
    check_params(index.params_);
    auto n = r.pod<std::uint64_t>();
    index.ids_.reserve(n);
    index.doc_len_.reserve(n);
    for (std::uint64_t d = 0; d < n; ++d) {
        index.ids_.push_back(r.string());
        index.doc_len_.push_back(r.pod<std::uint32_t>());
    }
    auto n_terms = r.pod<std::uint64_t>();
    index.terms_.reserve(n_terms);
    index.offsets_.assign(1, 0);
    for (std::uint64_t t = 0; t < n_terms; ++t) {
        index.terms_.push_back(r.string());
        auto len = r.pod<std::uint64_t>();
        auto start = index.postings_.size();
        index.postings_.resize(start + len);
        r.bytes(index.postings_.data() + start, len * sizeof(Posting));
        for (auto i = start; i < index.postings_.size(); ++i) {
            const auto& p = index.postings_[i];
            if (p.doc >= n || (i > start && index.postings_[i - 1].doc >= p.doc) || p.tf == 0) {
                throw Error("'" + path.string() + "': corrupt posting list for term '"
                            + index.terms_.back() + "'");
            }
        }
        index.offsets_.push_back(index.postings_.size());
    }
    index.finalize();
    return index;
}

} // namespace splice
