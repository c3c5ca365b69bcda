#include "splice/io.hpp"

#include <cstdio>
#include <fstream>

#include "splice/error.hpp"
#include "splice/materialize.hpp"

namespace splice {

nlohmann::ordered_json to_json(const PackedExample& example)
{
    nlohmann::ordered_json j;
    auto segments = nlohmann::ordered_json::array();
    for (const auto& s : example.segments) {
        nlohmann::ordered_json seg;
        seg["id"] = s.id;
        seg["offset"] = s.offset;
        seg["len"] = s.len;
        seg["truncated"] = s.truncated;
        segments.push_back(std::move(seg));
    }
    j["segments"] = std::move(segments);
    j["total_len"] = example.total_len;
    j["root"] = example.root;
    auto edges = nlohmann::ordered_json::array();
    for (const auto& [p, c] : example.edges) {
        edges.push_back({p, c});
    }
    j["edges"] = std::move(edges);
    j["method"] = to_string(example.method);
    j["order"] = to_string(example.order);
    j["seed"] = example.seed;
    return j;
}

PackedExample packed_example_from_json(const nlohmann::json& j)
{
    PackedExample ex;
    try {
        for (const auto& seg : j.at("segments")) {
            ex.segments.push_back({seg.at("id").get<std::string>(), seg.at("offset").get<std::size_t>(),
                                   seg.at("len").get<std::size_t>(), seg.at("truncated").get<bool>()});
        }
        ex.total_len = j.at("total_len").get<std::size_t>();
        ex.root = j.at("root").get<std::string>();
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) {
                throw Error("edge must be a [parent, child] pair");
            }
            ex.edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
        }
        ex.method = parse_pack_method(j.at("method").get<std::string>());
        ex.order = parse_order(j.at("order").get<std::string>());
        ex.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed packed example: ") + e.what());
    }
    return ex;
}

namespace {

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    return out;
}

} // namespace

void write_packed_jsonl(std::span<const PackedExample> examples, const std::filesystem::path& path)
{
    auto out = open_output(path);
    for (const auto& ex : examples) {
        out << to_json(ex).dump() << '\n';
    }
    if (!out) {
        throw Error("write failed for '" + path.string() + "'");
    }
}

std::vector<PackedExample> read_packed_jsonl(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "'");
    }
    std::vector<PackedExample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw Error(path.string() + ": line " + std::to_string(lineno) + ": malformed JSON");
        }
        try {
            out.push_back(packed_example_from_json(j));
        } catch (const Error& e) {
            throw Error(path.string() + ": line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

void write_materialized_jsonl(const Corpus& corpus, std::span<const PackedExample> examples,
                              const std::filesystem::path& path)
{
    auto out = open_output(path);
    for (const auto& ex : examples) {
        nlohmann::ordered_json j;
        j["text"] = example_text(corpus, ex);
        out << j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace) << '\n';
    }
    if (!out) {
        throw Error("write failed for '" + path.string() + "'");
    }
}

void write_json(const nlohmann::ordered_json& j, const std::filesystem::path& path)
{
    auto out = open_output(path);
    out << j.dump(2) << '\n';
    if (!out) {
        throw Error("write failed for '" + path.string() + "'");
    }
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed)
{
    std::uint64_t h = seed;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "'");
    }
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        h = fnv1a64(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())), h);
    }
    return h;
}

std::string hex64(std::uint64_t value)
{
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

} // namespace splice
