#include "splice/tokenize.hpp"

namespace splice {

std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> out;
    for_each_term(text, [&](std::string_view t) { out.emplace_back(t); });
    return out;
}

std::uint32_t Vocabulary::intern(std::string_view term)
{
    auto it = ids_.find(std::string(term));
    if (it != ids_.end()) {
        return it->second;
    }
    auto id = static_cast<std::uint32_t>(terms_.size());
    terms_.emplace_back(term);
    ids_.emplace(terms_.back(), id);
    return id;
}

void Vocabulary::encode(std::string_view text, std::vector<std::uint32_t>& out)
{
    for_each_term(text, [&](std::string_view t) { out.push_back(intern(t)); });
}

} // namespace splice
