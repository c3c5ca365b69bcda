#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace splice {

enum class LengthUnit { chars, tokens };

std::string_view to_string(LengthUnit unit);
LengthUnit parse_length_unit(std::string_view name);

/// Number of UTF-8 scalar values in `text` (continuation bytes are not counted).
std::size_t utf8_length(std::string_view text);

/// True when `text` is well-formed UTF-8.
bool utf8_valid(std::string_view text);

/// Substring of `text` covering scalar values [offset, offset + count).
std::string_view utf8_slice(std::string_view text, std::size_t offset, std::size_t count);

struct Document {
    std::string id;
    std::string text;
    std::size_t char_len = 0;
    std::optional<std::size_t> token_len;
    std::optional<std::string> path;
    std::optional<std::string> domain;

    /// Builds a document with char_len computed from `text`.
    static Document make(std::string id, std::string text);
};

/// Ordered document store with the per-document consumption mask used by the
/// packers. Everything except the mask (and token lengths attached after
/// ingestion) is fixed once constructed.
class Corpus {
  public:
    Corpus() = default;

    /// Throws Error on a duplicate id or, for LengthUnit::tokens, on a
    /// document without token_len.
    explicit Corpus(std::vector<Document> documents, LengthUnit unit = LengthUnit::chars);

    Corpus(const Corpus& other);
    Corpus& operator=(const Corpus& other);
    Corpus(Corpus&&) noexcept = default;
    Corpus& operator=(Corpus&&) noexcept = default;

    [[nodiscard]] std::size_t size() const { return docs_.size(); }
    [[nodiscard]] bool empty() const { return docs_.empty(); }
    [[nodiscard]] const Document& operator[](std::size_t i) const { return docs_[i]; }
    [[nodiscard]] std::span<const Document> documents() const { return docs_; }

    [[nodiscard]] std::optional<std::uint32_t> find(std::string_view id) const;
    /// Like find() but throws Error naming the id when it is absent.
    [[nodiscard]] std::uint32_t ordinal(std::string_view id) const;

    [[nodiscard]] LengthUnit length_unit() const { return unit_; }
    /// Switching to tokens requires token_len on every document.
    void set_length_unit(LengthUnit unit);

    /// Length of document i in the corpus length unit.
    [[nodiscard]] std::size_t length(std::size_t i) const;

    void set_token_len(std::size_t i, std::size_t token_len);

    [[nodiscard]] bool consumed(std::size_t i) const { return consumed_[i] != 0; }
    void mark_consumed(std::size_t i) { consumed_[i] = 1; }
    [[nodiscard]] std::size_t consumed_count() const;
    void reset_consumption();

  private:
    void rebuild_index();

    std::vector<Document> docs_;
    std::vector<std::uint8_t> consumed_;
    // keys view into docs_, so copies rebuild the map
    std::unordered_map<std::string_view, std::uint32_t> by_id_;
    LengthUnit unit_ = LengthUnit::chars;
};

} // namespace splice
