#include "splice/mixer.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "splice/error.hpp"
#include "splice/log.hpp"

namespace splice {

std::string_view to_string(Separator s) { return s == Separator::none ? "none" : "bos_eos"; }

Separator parse_separator(std::string_view name)
{
    if (name == "none") return Separator::none;
    if (name == "bos_eos") return Separator::bos_eos;
    throw Error("unknown separator '" + std::string(name) + "'");
}

std::string_view to_string(Meter m) { return m == Meter::length ? "length" : "examples"; }

Meter parse_meter(std::string_view name)
{
    if (name == "length") return Meter::length;
    if (name == "examples") return Meter::examples;
    throw Error("unknown meter '" + std::string(name) + "'");
}

void MixtureSpec::validate() const
{
    if (parts.empty()) {
        throw Error("mixture spec has no parts");
    }
    std::set<std::string> names;
    double sum = 0.0;
    for (const auto& p : parts) {
        if (!(p.weight > 0.0) || !std::isfinite(p.weight)) {
            throw Error("mixture part '" + p.name + "' needs a positive weight");
        }
        if (!names.insert(p.name).second) {
            throw Error("mixture part '" + p.name + "' appears twice");
        }
        sum += p.weight;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw Error("mixture weights sum to " + std::to_string(sum) + ", expected 1");
    }
    if (separator == Separator::bos_eos && (!bos_id || !eos_id)) {
        throw Error("bos_eos separator needs bos_id and eos_id");
    }
}

MixtureSpec MixtureSpec::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir)
{
    MixtureSpec spec;
    try {
        for (const auto& part : j.at("parts")) {
            MixturePart p;
            p.name = part.at("name").get<std::string>();
            p.weight = part.at("weight").get<double>();
            if (auto it = part.find("path"); it != part.end()) {
                std::filesystem::path path = it->get<std::string>();
                p.path = path.is_relative() && !base_dir.empty() ? base_dir / path : path;
            }
            spec.parts.push_back(std::move(p));
        }
        spec.seed = j.value("seed", std::uint64_t{0});
        spec.separator = parse_separator(j.value("separator", std::string("none")));
        if (j.contains("bos_id") && !j["bos_id"].is_null()) spec.bos_id = j["bos_id"].get<std::uint32_t>();
        if (j.contains("eos_id") && !j["eos_id"].is_null()) spec.eos_id = j["eos_id"].get<std::uint32_t>();
        spec.meter = parse_meter(j.value("meter", std::string("length")));
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("invalid mixture spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

MixtureSpec MixtureSpec::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open mixture spec '" + path.string() + "'");
    }
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw Error("mixture spec '" + path.string() + "' is not valid JSON");
    }
    return from_json(j, path.parent_path());
}

MixResult mix(const MixtureSpec& spec, std::span<const NamedStream> streams)
{
    spec.validate();
    const std::size_t n = spec.parts.size();
    std::vector<const NamedStream*> inputs(n, nullptr);
    for (std::size_t p = 0; p < n; ++p) {
        for (const auto& s : streams) {
            if (s.name == spec.parts[p].name) {
                inputs[p] = &s;
            }
        }
        if (inputs[p] == nullptr) {
            throw Error("mixture part '" + spec.parts[p].name + "' has no input stream");
        }
    }

    std::vector<std::size_t> next(n, 0);
    std::vector<double> metered(n, 0.0);
    std::vector<bool> active(n, true);
    MixResult result;
    auto retire_empty = [&] {
        for (std::size_t p = 0; p < n; ++p) {
            if (active[p] && next[p] == inputs[p]->examples.size()) {
                active[p] = false;
                result.exhausted.push_back(spec.parts[p].name);
                log::warn("mixture part '" + spec.parts[p].name + "' is exhausted");
            }
        }
    };
    retire_empty();
    while (true) {
        std::optional<std::size_t> pick;
        double best = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            if (!active[p]) {
                continue;
            }
            double deficit = metered[p] / spec.parts[p].weight;
            if (!pick || deficit < best || (deficit == best && spec.parts[p].name < spec.parts[*pick].name)) {
                pick = p;
                best = deficit;
            }
        }
        if (!pick) {
            break;
        }
        const auto& ex = inputs[*pick]->examples[next[*pick]++];
        metered[*pick] += spec.meter == Meter::length ? static_cast<double>(ex.total_len) : 1.0;
        result.examples.push_back(ex);
        result.source.push_back(static_cast<std::uint32_t>(*pick));
        retire_empty();
    }
    return result;
}

SeparatedStream emit_separated(std::span<const TokenizedExample> examples, const MixtureSpec& spec)
{
    if (spec.separator == Separator::bos_eos && (!spec.bos_id || !spec.eos_id)) {
        throw Error("bos_eos separator needs bos_id and eos_id");
    }
    SeparatedStream out;
    const bool wrap = spec.separator == Separator::bos_eos;
    for (const auto& ex : examples) {
        if (wrap) {
            out.tokens.push_back(*spec.bos_id);
            ++out.bos_count;
        }
        for (const auto& seg : ex) {
            out.tokens.insert(out.tokens.end(), seg.begin(), seg.end());
        }
        if (wrap) {
            out.tokens.push_back(*spec.eos_id);
            ++out.eos_count;
        }
    }
    return out;
}

} // namespace splice
