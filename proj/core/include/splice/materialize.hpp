#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splice/document.hpp"
#include "splice/mixer.hpp"
#include "splice/packer.hpp"
#include "splice/tokenize.hpp"

namespace splice {

/// Text of one segment. In chars mode this is the exact scalar-value range.
/// In tokens mode the corpus has no tokenizer, so a truncated segment keeps
/// the proportional character prefix (rounded down).
std::string segment_text(const Corpus& corpus, const Segment& segment);

/// Concatenated segment texts, no separators.
std::string example_text(const Corpus& corpus, const PackedExample& example);

/// Surrogate token ids of each segment using the lexical tokenizer. In chars
/// mode the segment's character range is tokenized; in tokens mode the
/// segment covers lexical terms [offset, offset + len) of the document.
TokenizedExample example_tokens(const Corpus& corpus, const PackedExample& example, Vocabulary& vocab);

} // namespace splice
