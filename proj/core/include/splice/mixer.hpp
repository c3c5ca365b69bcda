#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splice/packer.hpp"

namespace splice {

enum class Separator { none, bos_eos };
/// What the mixture weights meter: summed example length or example count.
enum class Meter { length, examples };

std::string_view to_string(Separator s);
Separator parse_separator(std::string_view name);
std::string_view to_string(Meter m);
Meter parse_meter(std::string_view name);

struct MixturePart {
    std::string name;
    double weight = 0.0;
    std::filesystem::path path;
};

struct MixtureSpec {
    std::vector<MixturePart> parts;
    std::uint64_t seed = 0;
    Separator separator = Separator::none;
    std::optional<std::uint32_t> bos_id;
    std::optional<std::uint32_t> eos_id;
    Meter meter = Meter::length;

    /// Throws Error for an empty spec, nonpositive weights, duplicate names,
    /// weights not summing to 1 within 1e-9, or bos_eos without token ids.
    void validate() const;

    /// Parses {"parts":[{"name","weight","path"}],"seed","separator",
    /// "bos_id"?,"eos_id"?,"meter"?}; relative part paths resolve against
    /// `base_dir`.
    static MixtureSpec from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
    static MixtureSpec load(const std::filesystem::path& path);
};

struct NamedStream {
    std::string name;
    std::vector<PackedExample> examples;
};

struct MixResult {
    std::vector<PackedExample> examples;
    /// Index into the spec's parts for each emitted example.
    std::vector<std::uint32_t> source;
    /// Parts in the order they ran out.
    std::vector<std::string> exhausted;
};

/// Deficit scheduler: each step emits the next example of the active stream
/// with the smallest metered total / weight, ties by name. A stream leaves
/// the rotation (with a warning) once it is exhausted; every input example is
/// emitted exactly once.
MixResult mix(const MixtureSpec& spec, std::span<const NamedStream> streams);

/// A training example as token ids, one vector per segment.
using TokenizedExample = std::vector<std::vector<std::uint32_t>>;

struct SeparatedStream {
    std::vector<std::uint32_t> tokens;
    std::size_t bos_count = 0;
    std::size_t eos_count = 0;

    [[nodiscard]] std::size_t separators() const { return bos_count + eos_count; }
};

/// Flattens examples into one token stream. Segments of an example are
/// concatenated directly. With bos_eos each example is wrapped as
/// BOS ... EOS, so consecutive examples are joined by EOS BOS.
SeparatedStream emit_separated(std::span<const TokenizedExample> examples, const MixtureSpec& spec);

} // namespace splice
