#include "splice/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "parallel.hpp"
#include "splice/error.hpp"
#include "splice/rng.hpp"

namespace splice {

double zipf_coefficient(std::span<const std::uint32_t> tokens)
{
    std::vector<std::uint32_t> sorted(tokens.begin(), tokens.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> freq;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) {
            ++j;
        }
        freq.push_back(j - i);
        i = j;
    }
    if (freq.size() < 2) {
        throw Error("zipf coefficient needs at least two distinct tokens");
    }
    std::sort(freq.begin(), freq.end(), std::greater<>());

    const auto n = static_cast<double>(freq.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t r = 0; r < freq.size(); ++r) {
        mean_x += std::log(static_cast<double>(r + 1));
        mean_y += std::log(static_cast<double>(freq[r]));
    }
    mean_x /= n;
    mean_y /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t r = 0; r < freq.size(); ++r) {
        double dx = std::log(static_cast<double>(r + 1)) - mean_x;
        double dy = std::log(static_cast<double>(freq[r])) - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
    }
    // frequencies are sorted descending, so the slope is never positive
    return std::max(0.0, -(sxy / sxx));
}

nlohmann::ordered_json ZipfReport::to_json() const
{
    nlohmann::ordered_json j;
    j["window_len"] = window_len;
    j["n_windows"] = n_windows;
    j["mean"] = mean;
    j["std"] = std;
    j["std_kind"] = "population";
    j["degenerate_windows"] = degenerate;
    j["coefficients"] = per_window;
    return j;
}

ZipfReport burstiness_report(std::span<const std::uint32_t> stream, std::size_t window_len,
                             std::size_t max_windows, std::uint64_t seed, unsigned threads)
{
    if (window_len == 0) {
        throw Error("window length must be positive");
    }
    if (max_windows == 0) {
        throw Error("max_windows must be positive");
    }
    const std::size_t total = stream.size() / window_len;
    if (total == 0) {
        throw Error("stream of " + std::to_string(stream.size()) + " tokens is shorter than one window of "
                    + std::to_string(window_len));
    }
    std::vector<double> coef(total, std::nan(""));
    detail::parallel_for(total, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t w = begin; w < end; ++w) {
            auto window = stream.subspan(w * window_len, window_len);
            auto first = window.front();
            bool varied = std::any_of(window.begin(), window.end(), [&](auto t) { return t != first; });
            if (varied) {
                coef[w] = zipf_coefficient(window);
            }
        }
    });

    ZipfReport report;
    report.window_len = window_len;
    std::vector<std::size_t> valid;
    for (std::size_t w = 0; w < total; ++w) {
        if (std::isnan(coef[w])) {
            ++report.degenerate;
        } else {
            valid.push_back(w);
        }
    }
    if (valid.empty()) {
        throw Error("no window has two distinct tokens");
    }
    if (valid.size() > max_windows) {
        Rng rng(seed);
        rng.shuffle(std::span<std::size_t>(valid));
        valid.resize(max_windows);
        std::sort(valid.begin(), valid.end());
    }
    for (auto w : valid) {
        report.window_index.push_back(w);
        report.per_window.push_back(coef[w]);
    }
    report.n_windows = valid.size();
    const auto n = static_cast<double>(report.n_windows);
    report.mean = std::accumulate(report.per_window.begin(), report.per_window.end(), 0.0) / n;
    double ss = 0.0;
    for (double c : report.per_window) {
        ss += (c - report.mean) * (c - report.mean);
    }
    report.std = std::sqrt(ss / n);
    return report;
}

nlohmann::ordered_json BucketedLosses::to_json() const
{
    nlohmann::ordered_json j;
    auto buckets = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < kLossBuckets; ++i) {
        nlohmann::ordered_json b;
        b["lower"] = lower(i);
        b["upper"] = i + 1 == kLossBuckets ? kMaxBucketPosition : upper(i) - 1;
        b["count"] = count[i];
        b["mean_loss"] = count[i] == 0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(mean[i]);
        buckets.push_back(std::move(b));
    }
    j["position_base"] = 1;
    j["buckets"] = std::move(buckets);
    j["ignored"] = ignored;
    return j;
}

BucketedLosses bucket_losses(std::span<const LossRecord> records)
{
    BucketedLosses out;
    std::array<double, kLossBuckets> sum{};
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (!std::isfinite(rec.loss)) {
            throw Error("loss record " + std::to_string(r) + " is not finite");
        }
        const std::size_t p = rec.pos + 1;
        if (p > kMaxBucketPosition) {
            ++out.ignored;
            continue;
        }
        std::size_t i = std::min<std::size_t>(std::bit_width(p) - 1, kLossBuckets - 1);
        sum[i] += rec.loss;
        ++out.count[i];
    }
    for (std::size_t i = 0; i < kLossBuckets; ++i) {
        out.mean[i] = out.count[i] == 0 ? 0.0 : sum[i] / static_cast<double>(out.count[i]);
    }
    return out;
}

nlohmann::ordered_json LengthHistogram::to_json() const
{
    nlohmann::ordered_json j;
    j["edges"] = edges;
    j["counts"] = counts;
    j["underflow"] = underflow;
    j["overflow"] = overflow;
    j["total"] = total;
    return j;
}

LengthHistogram length_histogram(std::span<const std::size_t> lengths, std::span<const std::size_t> edges)
{
    if (edges.size() < 2) {
        throw Error("a histogram needs at least two bin edges");
    }
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i] <= edges[i - 1]) {
            throw Error("histogram edges must be strictly increasing");
        }
    }
    LengthHistogram h;
    h.edges.assign(edges.begin(), edges.end());
    h.counts.assign(edges.size() - 1, 0);
    for (auto v : lengths) {
        ++h.total;
        if (v < edges.front()) {
            ++h.underflow;
        } else if (v >= edges.back()) {
            ++h.overflow;
        } else {
            auto it = std::upper_bound(edges.begin(), edges.end(), v);
            ++h.counts[static_cast<std::size_t>(it - edges.begin()) - 1];
        }
    }
    return h;
}

} // namespace splice
