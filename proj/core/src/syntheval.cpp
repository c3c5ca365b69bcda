#include "splice/syntheval.hpp"

#include <fstream>
#include <unordered_set>

#include "splice/error.hpp"

namespace splice {

std::string uuid4(Rng& rng)
{
    std::uint64_t hi = rng.next();
    std::uint64_t lo = rng.next();
    hi = (hi & ~0xF000ULL) | 0x4000ULL;                   // version 4
    lo = (lo & ~(0xC0ULL << 56)) | (0x80ULL << 56);       // RFC 4122 variant
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(36);
    auto put = [&](std::uint64_t word, int from_nibble, int count) {
        for (int i = 0; i < count; ++i) {
            int shift = 60 - 4 * (from_nibble + i);
            out.push_back(hex[(word >> shift) & 0xF]);
        }
    };
    put(hi, 0, 8);
    out.push_back('-');
    put(hi, 8, 4);
    out.push_back('-');
    put(hi, 12, 4);
    out.push_back('-');
    put(lo, 0, 4);
    out.push_back('-');
    put(lo, 4, 12);
    return out;
}

KvTask gen_kv_task(std::size_t n_pairs, std::size_t answer_position, std::uint64_t seed)
{
    if (n_pairs == 0) {
        throw Error("a key-value task needs at least one pair");
    }
    if (answer_position >= n_pairs) {
        throw Error("answer position " + std::to_string(answer_position) + " is outside [0, "
                    + std::to_string(n_pairs) + ")");
    }
    KvTask task;
    task.n_pairs = n_pairs;
    task.answer_position = answer_position;
    task.seed = seed;

    Rng rng(seed);
    std::unordered_set<std::string> seen;
    auto fresh = [&] {
        while (true) {
            auto u = uuid4(rng);
            if (seen.insert(u).second) {
                return u;
            }
        }
    };
    task.keys.reserve(n_pairs);
    task.values.reserve(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        task.keys.push_back(fresh());
        task.values.push_back(fresh());
    }
    task.query_key = task.keys[answer_position];
    task.answer = task.values[answer_position];

    std::string& p = task.prompt;
    p.reserve(128 + n_pairs * 82);
    p += kKvInstruction;
    p += "\n\nJSON data:\n{";
    for (std::size_t i = 0; i < n_pairs; ++i) {
        if (i > 0) {
            p += ",\n ";
        }
        p += '"';
        p += task.keys[i];
        p += "\": \"";
        p += task.values[i];
        p += '"';
    }
    p += "}\n \"";
    p += task.query_key;
    p += "\":";
    return task;
}

std::uint64_t kv_task_seed(std::uint64_t suite_seed, std::size_t slot, std::size_t example)
{
    return derive_seed(derive_seed(suite_seed, slot), example);
}

std::vector<KvTask> gen_kv_suite(std::size_t n_pairs, std::span<const std::size_t> positions,
                                 std::size_t per_position, std::uint64_t seed)
{
    for (auto pos : positions) {
        if (pos >= n_pairs) {
            throw Error("answer position " + std::to_string(pos) + " is outside [0, " + std::to_string(n_pairs)
                        + ")");
        }
    }
    std::vector<KvTask> tasks;
    tasks.reserve(positions.size() * per_position);
    for (std::size_t slot = 0; slot < positions.size(); ++slot) {
        for (std::size_t e = 0; e < per_position; ++e) {
            tasks.push_back(gen_kv_task(n_pairs, positions[slot], kv_task_seed(seed, slot, e)));
        }
    }
    return tasks;
}

nlohmann::ordered_json to_json(const KvTask& task)
{
    nlohmann::ordered_json j;
    j["prompt"] = task.prompt;
    j["answer"] = task.answer;
    j["position"] = task.answer_position;
    j["n_pairs"] = task.n_pairs;
    j["seed"] = task.seed;
    return j;
}

void write_kv_suite(std::span<const KvTask> tasks, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    for (const auto& t : tasks) {
        out << to_json(t).dump() << '\n';
    }
    if (!out) {
        throw Error("write failed for '" + path.string() + "'");
    }
}

} // namespace splice
