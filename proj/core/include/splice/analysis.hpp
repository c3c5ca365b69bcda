#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace splice {

/// Zipf coefficient of a token sequence: the negated OLS slope of
/// ln(frequency) against ln(rank) over all distinct tokens, rank 1 being the
/// most frequent. Lower values mean a burstier window. Throws Error with
/// fewer than two distinct tokens.
double zipf_coefficient(std::span<const std::uint32_t> tokens);

struct ZipfReport {
    std::size_t window_len = 0;
    std::vector<double> per_window;
    /// Index of each reported window in the stream.
    std::vector<std::size_t> window_index;
    double mean = 0.0;
    /// Population standard deviation.
    double std = 0.0;
    std::size_t n_windows = 0;
    std::size_t degenerate = 0;

    [[nodiscard]] nlohmann::ordered_json to_json() const;
};

/// Cuts consecutive non-overlapping windows of `window_len` tokens, scores
/// each with zipf_coefficient (windows with a single distinct token are
/// skipped and counted), and aggregates at most `max_windows` of them chosen
/// by a seeded sample, reported in stream order. Throws Error when no window
/// qualifies.
ZipfReport burstiness_report(std::span<const std::uint32_t> stream, std::size_t window_len,
                             std::size_t max_windows, std::uint64_t seed, unsigned threads = 1);

inline constexpr std::size_t kLossBuckets = 15;
inline constexpr std::size_t kMaxBucketPosition = 32768;

struct LossRecord {
    std::size_t pos;
    double loss;
};

/// Per-token losses grouped by 1-based position p + 1 into buckets
/// [2^i, 2^(i+1)) for i = 0..14; the last bucket also takes 32768.
struct BucketedLosses {
    std::array<double, kLossBuckets> mean{};
    std::array<std::size_t, kLossBuckets> count{};
    std::size_t ignored = 0;

    static constexpr std::size_t lower(std::size_t i) { return std::size_t{1} << i; }
    static constexpr std::size_t upper(std::size_t i) { return std::size_t{1} << (i + 1); }

    [[nodiscard]] nlohmann::ordered_json to_json() const;
};

/// Throws Error naming the record index on a non-finite loss.
BucketedLosses bucket_losses(std::span<const LossRecord> records);

/// Bins [edges[i], edges[i+1]); values outside [edges.front(), edges.back())
/// land in underflow / overflow.
struct LengthHistogram {
    std::vector<std::size_t> edges;
    std::vector<std::size_t> counts;
    std::size_t underflow = 0;
    std::size_t overflow = 0;
    std::size_t total = 0;

    [[nodiscard]] nlohmann::ordered_json to_json() const;
};

/// Throws Error unless `edges` has at least two strictly increasing values.
LengthHistogram length_histogram(std::span<const std::size_t> lengths, std::span<const std::size_t> edges);

} // namespace splice
