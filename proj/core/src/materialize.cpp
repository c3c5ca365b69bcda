#include "splice/materialize.hpp"

namespace splice {

std::string segment_text(const Corpus& corpus, const Segment& segment)
{
    const auto& doc = corpus[corpus.ordinal(segment.id)];
    if (corpus.length_unit() == LengthUnit::chars) {
        return std::string(utf8_slice(doc.text, segment.offset, segment.len));
    }
    if (!segment.truncated && segment.offset == 0) {
        return doc.text;
    }
    const std::size_t tokens = *doc.token_len;
    const std::size_t begin = tokens == 0 ? 0 : doc.char_len * segment.offset / tokens;
    const std::size_t end = tokens == 0 ? 0 : doc.char_len * (segment.offset + segment.len) / tokens;
    return std::string(utf8_slice(doc.text, begin, end - begin));
}

std::string example_text(const Corpus& corpus, const PackedExample& example)
{
    std::string out;
    for (const auto& s : example.segments) {
        out += segment_text(corpus, s);
    }
    return out;
}

TokenizedExample example_tokens(const Corpus& corpus, const PackedExample& example, Vocabulary& vocab)
{
    TokenizedExample out;
    out.reserve(example.segments.size());
    for (const auto& s : example.segments) {
        std::vector<std::uint32_t> ids;
        if (corpus.length_unit() == LengthUnit::chars) {
            vocab.encode(segment_text(corpus, s), ids);
        } else {
            const auto& doc = corpus[corpus.ordinal(s.id)];
            std::size_t pos = 0;
            const std::size_t end = s.offset + s.len;
            for_each_term(doc.text, [&](std::string_view t) {
                if (pos >= s.offset && pos < end) {
                    ids.push_back(vocab.intern(t));
                }
                ++pos;
            });
        }
        out.push_back(std::move(ids));
    }
    return out;
}

} // namespace splice
