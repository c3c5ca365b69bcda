#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splice/rng.hpp"

namespace splice {

inline constexpr std::string_view kKvInstruction =
    "Extract the value corresponding to the specified key in the JSON object below.";

/// Lost-in-the-middle key-value retrieval prompt.
struct KvTask {
    std::string prompt;
    std::string query_key;
    std::string answer;
    std::size_t n_pairs = 0;
    std::size_t answer_position = 0;
    std::uint64_t seed = 0;
    /// Keys in prompt order; values[i] belongs to keys[i].
    std::vector<std::string> keys;
    std::vector<std::string> values;
};

/// Random version-4 UUID (8-4-4-4-12 lowercase hex) drawn from `rng`.
std::string uuid4(Rng& rng);

/// Builds the prompt
///
///   <instruction>
///   (blank line)
///   JSON data:
///   {"k0": "v0",
///    "k1": "v1",
///    ...
///    "kn": "vn"}
///    "kq":
///
/// with 2 * n_pairs distinct seeded UUIDs and the queried pair at
/// `answer_position`. The prompt ends right after the final colon. Throws
/// Error when n_pairs is zero or answer_position >= n_pairs.
KvTask gen_kv_task(std::size_t n_pairs, std::size_t answer_position, std::uint64_t seed);

/// Seed of task `example` at position slot `slot` within a suite.
std::uint64_t kv_task_seed(std::uint64_t suite_seed, std::size_t slot, std::size_t example);

/// `per_position` independent tasks for each position, positions outermost.
std::vector<KvTask> gen_kv_suite(std::size_t n_pairs, std::span<const std::size_t> positions,
                                 std::size_t per_position, std::uint64_t seed);

/// {"prompt","answer","position","n_pairs","seed"}
nlohmann::ordered_json to_json(const KvTask& task);
void write_kv_suite(std::span<const KvTask> tasks, const std::filesystem::path& path);

} // namespace splice
