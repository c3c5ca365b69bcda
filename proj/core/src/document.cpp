#include "splice/document.hpp"

#include <algorithm>

#include "splice/error.hpp"

namespace splice {

std::string_view to_string(LengthUnit unit)
{
    return unit == LengthUnit::chars ? "chars" : "tokens";
}

LengthUnit parse_length_unit(std::string_view name)
{
    if (name == "chars") return LengthUnit::chars;
    if (name == "tokens") return LengthUnit::tokens;
    throw Error("unknown length unit '" + std::string(name) + "'");
}

std::size_t utf8_length(std::string_view text)
{
    return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0U) != 0x80U;
    }));
}

bool utf8_valid(std::string_view text)
{
    const auto* p = reinterpret_cast<const unsigned char*>(text.data());
    const auto* end = p + text.size();
    while (p < end) {
        unsigned char c = *p;
        std::size_t extra = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++p;
            continue;
        }
        if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (static_cast<std::size_t>(end - p) <= extra) {
            return false;
        }
        for (std::size_t i = 1; i <= extra; ++i) {
            if ((p[i] & 0xC0) != 0x80) {
                return false;
            }
            cp = (cp << 6) | (p[i] & 0x3F);
        }
        // overlong forms, surrogates, out of range
        if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000)
            || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            return false;
        }
        p += extra + 1;
    }
    return true;
}

std::string_view utf8_slice(std::string_view text, std::size_t offset, std::size_t count)
{
    auto advance = [&](std::size_t from, std::size_t scalars) {
        std::size_t pos = from;
        while (scalars > 0 && pos < text.size()) {
            ++pos;
            while (pos < text.size() && (static_cast<unsigned char>(text[pos]) & 0xC0U) == 0x80U) {
                ++pos;
            }
            --scalars;
        }
        return pos;
    };
    std::size_t begin = advance(0, offset);
    std::size_t end = advance(begin, count);
    return text.substr(begin, end - begin);
}

Document Document::make(std::string id, std::string text)
{
    Document d;
    d.id = std::move(id);
    d.text = std::move(text);
    d.char_len = utf8_length(d.text);
    return d;
}

Corpus::Corpus(std::vector<Document> documents, LengthUnit unit)
    : docs_(std::move(documents)), consumed_(docs_.size(), 0)
{
    rebuild_index();
    set_length_unit(unit);
}

Corpus::Corpus(const Corpus& other)
    : docs_(other.docs_), consumed_(other.consumed_), unit_(other.unit_)
{
    rebuild_index();
}

Corpus& Corpus::operator=(const Corpus& other)
{
    if (this != &other) {
        docs_ = other.docs_;
        consumed_ = other.consumed_;
        unit_ = other.unit_;
        rebuild_index();
    }
    return *this;
}

void Corpus::rebuild_index()
{
    by_id_.clear();
    by_id_.reserve(docs_.size());
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        auto [it, inserted] = by_id_.emplace(docs_[i].id, static_cast<std::uint32_t>(i));
        if (!inserted) {
            throw Error("duplicate document id '" + docs_[i].id + "'");
        }
    }
}

std::optional<std::uint32_t> Corpus::find(std::string_view id) const
{
    auto it = by_id_.find(id);
    if (it == by_id_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::uint32_t Corpus::ordinal(std::string_view id) const
{
    if (auto i = find(id)) {
        return *i;
    }
    throw Error("document '" + std::string(id) + "' not in corpus");
}

void Corpus::set_length_unit(LengthUnit unit)
{
    if (unit == LengthUnit::tokens) {
        for (const auto& d : docs_) {
            if (!d.token_len) {
                throw Error("document '" + d.id + "' has no token length");
            }
        }
    }
    unit_ = unit;
}

std::size_t Corpus::length(std::size_t i) const
{
    return unit_ == LengthUnit::chars ? docs_[i].char_len : *docs_[i].token_len;
}

void Corpus::set_token_len(std::size_t i, std::size_t token_len)
{
    if (token_len == 0 && !docs_[i].text.empty()) {
        throw Error("document '" + docs_[i].id + "': token_len must be >= 1 for nonempty text");
    }
    docs_[i].token_len = token_len;
}

std::size_t Corpus::consumed_count() const
{
    return static_cast<std::size_t>(std::count(consumed_.begin(), consumed_.end(), std::uint8_t{1}));
}

void Corpus::reset_consumption() { std::fill(consumed_.begin(), consumed_.end(), std::uint8_t{0}); }

} // namespace splice
