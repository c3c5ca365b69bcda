#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "splice/document.hpp"
#include "splice/packer.hpp"

namespace splice {

nlohmann::ordered_json to_json(const PackedExample& example);
/// Throws Error on a record that does not follow the packed-example layout.
PackedExample packed_example_from_json(const nlohmann::json& j);

/// One packed example per line.
void write_packed_jsonl(std::span<const PackedExample> examples, const std::filesystem::path& path);
std::vector<PackedExample> read_packed_jsonl(const std::filesystem::path& path);

/// {"text": ...} per example; segment texts concatenated without separators.
void write_materialized_jsonl(const Corpus& corpus, std::span<const PackedExample> examples,
                              const std::filesystem::path& path);

/// Pretty-printed JSON followed by a newline.
void write_json(const nlohmann::ordered_json& j, const std::filesystem::path& path);

/// 64-bit FNV-1a, used for content and config fingerprints.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);

} // namespace splice
