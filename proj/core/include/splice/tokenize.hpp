#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace splice {

/// Lexical tokenizer shared by the BM25 index and the burstiness analysis:
/// ASCII letters are lowercased and terms are maximal runs of ASCII
/// alphanumerics or non-ASCII bytes. Everything else separates terms.
template <typename Fn>
void for_each_term(std::string_view text, Fn&& fn)
{
    std::string term;
    for (char c : text) {
        auto u = static_cast<unsigned char>(c);
        bool word = (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || u >= 0x80;
        if (u >= 'A' && u <= 'Z') {
            u = static_cast<unsigned char>(u - 'A' + 'a');
            word = true;
        }
        if (word) {
            term.push_back(static_cast<char>(u));
        } else if (!term.empty()) {
            fn(std::string_view(term));
            term.clear();
        }
    }
    if (!term.empty()) {
        fn(std::string_view(term));
    }
}

std::vector<std::string> tokenize(std::string_view text);

/// Term to dense id mapping; ids are assigned in first-seen order.
class Vocabulary {
  public:
    std::uint32_t intern(std::string_view term);
    [[nodiscard]] std::size_t size() const { return terms_.size(); }
    [[nodiscard]] const std::string& term(std::uint32_t id) const { return terms_[id]; }

    /// Interns every term of `text` and appends the ids to `out`.
    void encode(std::string_view text, std::vector<std::uint32_t>& out);

  private:
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::vector<std::string> terms_;
};

} // namespace splice
