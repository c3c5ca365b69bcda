#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "splice/analysis.hpp"
#include "splice/bm25.hpp"
#include "splice/corpus.hpp"
#include "splice/embedding.hpp"
#include "splice/error.hpp"
#include "splice/io.hpp"
#include "splice/log.hpp"
#include "splice/materialize.hpp"
#include "splice/mixer.hpp"
#include "splice/packer.hpp"
#include "splice/repo_graph.hpp"
#include "splice/retriever.hpp"
#include "splice/syntheval.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace splice::cli {
namespace {

struct Globals {
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

/// Records a command's effective configuration and inputs, then writes one
/// manifest per produced artifact. Paths are stored relative to the
/// artifact's directory and the thread count is left out, so manifests of
/// equivalent runs compare equal.
class Manifest {
  public:
    Manifest(std::string command, const Globals& g) : command_(std::move(command)), seed_(g.seed) {}

    void set(const std::string& key, ojson value) { config_[key] = std::move(value); }
    void path(const std::string& key, const fs::path& p)
    {
        if (!p.empty()) {
            paths_.emplace_back(key, p);
        }
    }
    void input(const std::string& key, const fs::path& p)
    {
        if (!p.empty()) {
            inputs_.emplace_back(key, p);
        }
    }
    void output(const fs::path& p) { outputs_.push_back(p); }

    void write() const
    {
        for (const auto& artifact : outputs_) {
            auto dir = fs::absolute(artifact).parent_path();
            ojson config = config_;
            for (const auto& [key, p] : paths_) {
                config[key] = relative_to(p, dir);
            }
            ojson m;
            m["tool"] = "splice";
            m["version"] = kVersion;
            m["command"] = command_;
            m["seed"] = seed_;
            m["config"] = config;
            m["config_hash"] = hex64(fnv1a64(config.dump()));
            auto inputs = ojson::array();
            for (const auto& [key, p] : inputs_) {
                ojson in;
                in["role"] = key;
                in["path"] = relative_to(p, dir);
                in["fnv1a64"] = fs::is_regular_file(p) ? hex64(fnv1a64_file(p)) : std::string("directory");
                inputs.push_back(std::move(in));
            }
            m["inputs"] = std::move(inputs);
            auto outputs = ojson::array();
            for (const auto& o : outputs_) {
                outputs.push_back(relative_to(o, dir));
            }
            m["outputs"] = std::move(outputs);
            write_json(m, fs::path(artifact.string() + ".manifest.json"));
        }
    }

  private:
    static std::string relative_to(const fs::path& p, const fs::path& dir)
    {
        return fs::absolute(p).lexically_normal().lexically_relative(dir).generic_string();
    }

    std::string command_;
    std::uint64_t seed_;
    ojson config_ = ojson::object();
    std::vector<std::pair<std::string, fs::path>> paths_;
    std::vector<std::pair<std::string, fs::path>> inputs_;
    std::vector<fs::path> outputs_;
};

fs::path sibling(const fs::path& artifact, const std::string& suffix)
{
    return fs::path(artifact.string() + suffix);
}

void require_input(const fs::path& p, const char* what)
{
    if (p.empty()) {
        throw Error(std::string("missing required input ") + what);
    }
    if (!fs::exists(p)) {
        throw Error(std::string(what) + " '" + p.string() + "' does not exist");
    }
}

// ---------------------------------------------------------------- ingest

struct IngestOptions {
    fs::path jsonl;
    fs::path repo;
    fs::path out;
    std::size_t max_chars = kDefaultMaxChars;
    std::uint64_t repo_split_bytes = kDefaultRepoSplitBytes;
    bool dedup = false;
    fs::path token_sidecar;
    std::string length_unit = "chars";
};

void run_ingest(const IngestOptions& o, const Globals& g, std::ostream& out)
{
    if (o.jsonl.empty() == o.repo.empty()) {
        throw Error("ingest needs exactly one of --jsonl or --repo");
    }
    auto unit = parse_length_unit(o.length_unit);
    IngestResult result;
    if (!o.jsonl.empty()) {
        require_input(o.jsonl, "--jsonl");
        result = ingest_jsonl(o.jsonl, o.max_chars);
    } else {
        require_input(o.repo, "--repo");
        result = ingest_repo_tree(o.repo, o.max_chars, o.repo_split_bytes);
    }
    if (o.dedup) {
        auto deduped = dedup_exact(result.corpus);
        result.skipped.dropped_duplicate = deduped.removed;
        result.corpus = std::move(deduped.corpus);
    }
    std::size_t unmatched = 0;
    if (!o.token_sidecar.empty()) {
        require_input(o.token_sidecar, "--token-sidecar");
        unmatched = attach_token_lengths(result.corpus, o.token_sidecar);
    }
    result.corpus.set_length_unit(unit);

    write_corpus_jsonl(result.corpus, o.out);
    auto skip = sibling(o.out, ".skip.json");
    auto report = result.skipped.to_json();
    write_json(report, skip);

    Manifest m("ingest", g);
    m.path("jsonl", o.jsonl);
    m.path("repo", o.repo);
    m.path("token_sidecar", o.token_sidecar);
    m.set("max_chars", o.max_chars);
    m.set("repo_split_bytes", o.repo_split_bytes);
    m.set("dedup", o.dedup);
    m.set("length_unit", o.length_unit);
    m.input("jsonl", o.jsonl);
    m.input("repo", o.repo);
    m.input("token_sidecar", o.token_sidecar);
    m.output(o.out);
    m.output(skip);
    m.write();

    ojson summary;
    summary["documents"] = result.corpus.size();
    summary["skipped"] = report;
    summary["sidecar_unmatched"] = unmatched;
    out << summary.dump() << '\n';
}

// ---------------------------------------------------------------- index

struct IndexOptions {
    fs::path corpus;
    fs::path out;
    std::string retriever = "bm25";
    double k1 = 1.2;
    double b = 0.75;
    std::size_t query_cap = 1024;
    fs::path embeddings;
    std::size_t nlist = kDefaultNlist;
    std::size_t train_sample = kDefaultTrainSample;
};

Bm25Params bm25_params(double k1, double b, std::size_t query_cap)
{
    return {k1, b, query_cap == 0 ? Bm25Params::unlimited : query_cap};
}

Corpus load_corpus_checked(const fs::path& path, LengthUnit unit)
{
    require_input(path, "--corpus");
    return load_corpus(path, unit);
}

void check_embeddings_match(const EmbeddingIndex& index, const Corpus& corpus)
{
    if (index.size() != corpus.size()) {
        throw Error("embedding file has " + std::to_string(index.size()) + " rows but the corpus has "
                    + std::to_string(corpus.size()) + " documents");
    }
    for (const auto& d : corpus.documents()) {
        if (!index.row(d.id)) {
            throw Error("document '" + d.id + "' has no embedding");
        }
    }
}

void run_index(const IndexOptions& o, const Globals& g, std::ostream& out)
{
    auto corpus = load_corpus_checked(o.corpus, LengthUnit::chars);
    if (corpus.empty()) {
        throw Error("empty corpus");
    }
    Manifest m("index", g);
    m.path("corpus", o.corpus);
    m.set("retriever", o.retriever);
    m.input("corpus", o.corpus);
    ojson summary;
    if (o.retriever == "bm25") {
        auto index = Bm25Index::build(corpus, bm25_params(o.k1, o.b, o.query_cap));
        index.save(o.out);
        m.set("bm25_k1", o.k1);
        m.set("bm25_b", o.b);
        m.set("query_cap", o.query_cap);
        summary["n_docs"] = index.n_docs();
        summary["n_terms"] = index.n_terms();
        summary["avg_doc_len"] = index.avg_doc_len();
    } else if (o.retriever == "embed") {
        require_input(o.embeddings, "--embeddings");
        auto raw = EmbeddingIndex::load(o.embeddings);
        check_embeddings_match(raw, corpus);
        auto index = ivf_train(std::move(raw), {o.nlist, o.train_sample, g.seed, g.threads});
        index.save_trained(o.out);
        m.path("embeddings", o.embeddings);
        m.input("embeddings", o.embeddings);
        m.set("nlist", o.nlist);
        m.set("train_sample", o.train_sample);
        summary["n_vectors"] = index.size();
        summary["dim"] = index.dim();
        summary["nlist"] = index.nlist();
    } else {
        throw Error("index supports --retriever bm25 or embed, not '" + o.retriever + "'");
    }
    m.output(o.out);
    m.write();
    out << summary.dump() << '\n';
}

// ---------------------------------------------------------------- pack

struct PackOptions {
    fs::path corpus;
    fs::path index;
    fs::path embeddings;
    fs::path token_sidecar;
    fs::path out;
    fs::path materialize;
    std::string method = "splice";
    std::string retriever = "bm25";
    std::size_t k = 1;
    std::size_t max_len = kDefaultMaxLen;
    std::string order = "identity";
    std::string length_unit = "chars";
    std::size_t char_bound = kDefaultDomRndCharBound;
    double k1 = 1.2;
    double b = 0.75;
    std::size_t query_cap = 1024;
    std::size_t nlist = kDefaultNlist;
    std::size_t nprobe = 1;
    std::size_t train_sample = kDefaultTrainSample;
};

void run_pack(const PackOptions& o, const Globals& g, std::ostream& out)
{
    require_input(o.corpus, "--corpus");
    auto corpus = load_corpus(o.corpus, LengthUnit::chars);
    if (corpus.empty()) {
        throw Error("empty corpus");
    }
    if (!o.token_sidecar.empty()) {
        require_input(o.token_sidecar, "--token-sidecar");
        attach_token_lengths(corpus, o.token_sidecar);
    }
    corpus.set_length_unit(parse_length_unit(o.length_unit));

    PackingConfig config;
    config.method = parse_pack_method(o.method);
    config.k = o.k;
    config.max_len = o.max_len;
    config.order = parse_order(o.order);
    config.seed = g.seed;
    config.domrnd_char_bound = o.char_bound;
    config.threads = g.threads;
    config.validate();

    Manifest m("pack", g);
    m.path("corpus", o.corpus);
    m.input("corpus", o.corpus);
    m.set("method", o.method);
    m.set("max_len", o.max_len);
    m.set("length_unit", o.length_unit);
    m.path("token_sidecar", o.token_sidecar);
    m.input("token_sidecar", o.token_sidecar);

    PackResult result;
    auto started = std::chrono::steady_clock::now();
    switch (config.method) {
    case PackMethod::baseline:
        result = baseline_pack(corpus, config.max_len, g.seed);
        break;
    case PackMethod::domrnd:
        m.set("char_bound", o.char_bound);
        result = domrnd_pack(corpus, g.seed, o.char_bound);
        break;
    case PackMethod::repo: {
        auto graph = RepoGraph::build(corpus);
        result = repo_pack(corpus, graph, config.max_len);
        break;
    }
    case PackMethod::splice: {
        m.set("retriever", o.retriever);
        m.set("k", o.k);
        m.set("order", o.order);
        std::unique_ptr<Retriever> retriever;
        std::optional<Bm25Index> bm25;
        std::optional<EmbeddingIndex> embed;
        std::optional<RepoGraph> graph;
        if (o.retriever == "bm25") {
            if (!o.index.empty()) {
                require_input(o.index, "--index");
                bm25 = Bm25Index::load(o.index);
                m.path("index", o.index);
                m.input("index", o.index);
            } else {
                bm25 = Bm25Index::build(corpus, bm25_params(o.k1, o.b, o.query_cap));
                m.set("bm25_k1", o.k1);
                m.set("bm25_b", o.b);
                m.set("query_cap", o.query_cap);
            }
            retriever = std::make_unique<Bm25Retriever>(*bm25, corpus);
        } else if (o.retriever == "embed") {
            if (!o.index.empty()) {
                require_input(o.index, "--index");
                embed = EmbeddingIndex::load_trained(o.index);
                m.path("index", o.index);
                m.input("index", o.index);
            } else {
                require_input(o.embeddings, "--embeddings");
                auto raw = EmbeddingIndex::load(o.embeddings);
                check_embeddings_match(raw, corpus);
                embed = ivf_train(std::move(raw), {o.nlist, o.train_sample, g.seed, g.threads});
                m.path("embeddings", o.embeddings);
                m.input("embeddings", o.embeddings);
                m.set("nlist", o.nlist);
                m.set("train_sample", o.train_sample);
            }
            m.set("nprobe", o.nprobe);
            retriever = std::make_unique<EmbeddingRetriever>(*embed, corpus, o.nprobe);
        } else if (o.retriever == "repo") {
            graph = RepoGraph::build(corpus);
            retriever = std::make_unique<RepoRetriever>(*graph, corpus);
        } else {
            throw Error("unknown retriever '" + o.retriever + "'");
        }
        result = splice_pack_all(corpus, *retriever, config);
        break;
    }
    }
    auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    log::info("packed " + std::to_string(result.stats.examples) + " examples in " + std::to_string(seconds)
              + " s");

    write_packed_jsonl(result.examples, o.out);
    auto stats_path = sibling(o.out, ".stats.json");
    write_json(result.stats.to_json(), stats_path);
    m.output(o.out);
    m.output(stats_path);
    if (!o.materialize.empty()) {
        write_materialized_jsonl(corpus, result.examples, o.materialize);
        m.path("materialize", o.materialize);
        m.output(o.materialize);
    }
    m.write();
    out << result.stats.to_json().dump() << '\n';
}

// ---------------------------------------------------------------- mix

struct MixOptions {
    fs::path spec;
    fs::path out;
    std::string meter;
};

void run_mix(const MixOptions& o, const Globals& g, std::ostream& out)
{
    require_input(o.spec, "--spec");
    auto spec = MixtureSpec::load(o.spec);
    if (!o.meter.empty()) {
        spec.meter = parse_meter(o.meter);
    }
    Manifest m("mix", g);
    m.path("spec", o.spec);
    m.input("spec", o.spec);
    m.set("meter", std::string(to_string(spec.meter)));
    std::vector<NamedStream> streams;
    for (const auto& part : spec.parts) {
        require_input(part.path, ("part '" + part.name + "'").c_str());
        streams.push_back({part.name, read_packed_jsonl(part.path)});
        m.input("part:" + part.name, part.path);
    }
    auto mixed = mix(spec, streams);
    write_packed_jsonl(mixed.examples, o.out);

    ojson stats;
    stats["examples"] = mixed.examples.size();
    std::vector<std::size_t> per_part(spec.parts.size(), 0);
    std::size_t total = 0;
    for (std::size_t i = 0; i < mixed.examples.size(); ++i) {
        per_part[mixed.source[i]] += mixed.examples[i].total_len;
        total += mixed.examples[i].total_len;
    }
    auto parts = ojson::array();
    for (std::size_t p = 0; p < spec.parts.size(); ++p) {
        ojson pj;
        pj["name"] = spec.parts[p].name;
        pj["weight"] = spec.parts[p].weight;
        pj["emitted_len"] = per_part[p];
        pj["share"] = total == 0 ? 0.0 : static_cast<double>(per_part[p]) / static_cast<double>(total);
        parts.push_back(std::move(pj));
    }
    stats["parts"] = std::move(parts);
    stats["exhausted"] = mixed.exhausted;
    stats["separator"] = to_string(spec.separator);
    // one BOS and one EOS per example in bos_eos mode
    std::size_t seps = spec.separator == Separator::bos_eos ? mixed.examples.size() : 0;
    stats["bos_count"] = seps;
    stats["eos_count"] = seps;
    auto stats_path = sibling(o.out, ".stats.json");
    write_json(stats, stats_path);
    m.output(o.out);
    m.output(stats_path);
    m.write();
    out << stats.dump() << '\n';
}

// ---------------------------------------------------------------- analyze

struct BurstinessOptions {
    fs::path packed;
    fs::path corpus;
    fs::path token_sidecar;
    fs::path out;
    std::string length_unit = "chars";
    std::size_t window_len = 32768;
    std::size_t max_windows = 1000;
};

void run_burstiness(const BurstinessOptions& o, const Globals& g, std::ostream& out)
{
    require_input(o.packed, "--packed");
    auto corpus = load_corpus_checked(o.corpus, LengthUnit::chars);
    if (!o.token_sidecar.empty()) {
        require_input(o.token_sidecar, "--token-sidecar");
        attach_token_lengths(corpus, o.token_sidecar);
    }
    corpus.set_length_unit(parse_length_unit(o.length_unit));
    auto examples = read_packed_jsonl(o.packed);
    Vocabulary vocab;
    std::vector<std::uint32_t> stream;
    for (const auto& ex : examples) {
        for (auto& seg : example_tokens(corpus, ex, vocab)) {
            stream.insert(stream.end(), seg.begin(), seg.end());
        }
    }
    auto report = burstiness_report(stream, o.window_len, o.max_windows, g.seed, g.threads);
    write_json(report.to_json(), o.out);
    Manifest m("analyze burstiness", g);
    m.path("packed", o.packed);
    m.path("corpus", o.corpus);
    m.input("packed", o.packed);
    m.input("corpus", o.corpus);
    m.set("length_unit", o.length_unit);
    m.set("window_len", o.window_len);
    m.set("max_windows", o.max_windows);
    m.output(o.out);
    m.write();
    ojson summary;
    summary["n_windows"] = report.n_windows;
    summary["mean"] = report.mean;
    summary["std"] = report.std;
    out << summary.dump() << '\n';
}

struct LossOptions {
    fs::path losses;
    fs::path out;
};

void run_losses(const LossOptions& o, const Globals& g, std::ostream& out)
{
    require_input(o.losses, "--losses");
    std::ifstream in(o.losses, std::ios::binary);
    std::vector<LossRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("pos") || !j["pos"].is_number_unsigned()
            || !j.contains("loss") || !j["loss"].is_number()) {
            throw Error(o.losses.string() + ": line " + std::to_string(lineno)
                        + ": expected {\"pos\": int >= 0, \"loss\": number}");
        }
        records.push_back({j["pos"].get<std::size_t>(), j["loss"].get<double>()});
    }
    auto buckets = bucket_losses(records);
    write_json(buckets.to_json(), o.out);
    Manifest m("analyze losses", g);
    m.path("losses", o.losses);
    m.input("losses", o.losses);
    m.output(o.out);
    m.write();
    out << buckets.to_json().dump() << '\n';
}

struct LengthOptions {
    fs::path corpus;
    fs::path packed;
    fs::path out;
    std::string length_unit = "chars";
    std::vector<std::size_t> edges{0, 1000, 2000, 4000, 8000, 16000, 32000, 64000, 128000};
};

void run_lengths(const LengthOptions& o, const Globals& g, std::ostream& out)
{
    std::vector<std::size_t> lengths;
    Manifest m("analyze lengths", g);
    if (!o.packed.empty()) {
        require_input(o.packed, "--packed");
        for (const auto& ex : read_packed_jsonl(o.packed)) {
            lengths.push_back(ex.total_len);
        }
        m.path("packed", o.packed);
        m.input("packed", o.packed);
    } else {
        auto corpus = load_corpus_checked(o.corpus, parse_length_unit(o.length_unit));
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            lengths.push_back(corpus.length(i));
        }
        m.path("corpus", o.corpus);
        m.input("corpus", o.corpus);
        m.set("length_unit", o.length_unit);
    }
    auto hist = length_histogram(lengths, o.edges);
    write_json(hist.to_json(), o.out);
    m.set("edges", o.edges);
    m.output(o.out);
    m.write();
    out << hist.to_json().dump() << '\n';
}

// ---------------------------------------------------------------- gen-kv

struct KvOptions {
    std::size_t n_pairs = 300;
    std::vector<std::size_t> positions{0};
    std::size_t per_position = 500;
    fs::path out;
};

void run_gen_kv(const KvOptions& o, const Globals& g, std::ostream& out)
{
    auto tasks = gen_kv_suite(o.n_pairs, o.positions, o.per_position, g.seed);
    write_kv_suite(tasks, o.out);
    Manifest m("gen-kv", g);
    m.set("n_pairs", o.n_pairs);
    m.set("positions", o.positions);
    m.set("examples_per_position", o.per_position);
    m.output(o.out);
    m.write();
    ojson summary;
    summary["tasks"] = tasks.size();
    summary["prompt_chars"] = tasks.empty() ? 0 : tasks.front().prompt.size();
    out << summary.dump() << '\n';
}

// ---------------------------------------------------------------- inspect

struct InspectOptions {
    fs::path corpus;
    fs::path packed;
    fs::path bm25;
    fs::path embeddings;
    fs::path ivf;
};

void run_inspect(const InspectOptions& o, std::ostream& out)
{
    ojson j;
    if (!o.corpus.empty()) {
        auto corpus = load_corpus_checked(o.corpus, LengthUnit::chars);
        std::size_t chars = 0;
        std::size_t with_tokens = 0;
        for (const auto& d : corpus.documents()) {
            chars += d.char_len;
            with_tokens += d.token_len ? 1 : 0;
        }
        j["documents"] = corpus.size();
        j["total_chars"] = chars;
        j["with_token_len"] = with_tokens;
    } else if (!o.packed.empty()) {
        require_input(o.packed, "--packed");
        auto examples = read_packed_jsonl(o.packed);
        std::size_t segs = 0;
        std::size_t total = 0;
        std::size_t truncated = 0;
        for (const auto& ex : examples) {
            segs += ex.segments.size();
            total += ex.total_len;
            for (const auto& s : ex.segments) {
                truncated += s.truncated ? 1 : 0;
            }
        }
        j["examples"] = examples.size();
        j["segments"] = segs;
        j["truncated_segments"] = truncated;
        j["total_len"] = total;
    } else if (!o.bm25.empty()) {
        require_input(o.bm25, "--bm25");
        auto index = Bm25Index::load(o.bm25);
        j["n_docs"] = index.n_docs();
        j["n_terms"] = index.n_terms();
        j["postings"] = index.total_postings();
        j["avg_doc_len"] = index.avg_doc_len();
        j["k1"] = index.params().k1;
        j["b"] = index.params().b;
        j["query_cap"] = index.params().query_cap;
    } else if (!o.embeddings.empty() || !o.ivf.empty()) {
        auto index = o.ivf.empty() ? EmbeddingIndex::load(o.embeddings) : EmbeddingIndex::load_trained(o.ivf);
        j["n_vectors"] = index.size();
        j["dim"] = index.dim();
        j["nlist"] = index.nlist();
    } else {
        throw Error("inspect needs one of --corpus, --packed, --bm25, --embeddings, --ivf");
    }
    out << j.dump(2) << '\n';
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Corpus-to-training-example packing toolkit", "splice"};
    app.set_config("--config", "", "TOML config file; command-line flags take precedence");
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Globals g;
    std::string log_level;
    app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads; outputs do not depend on it")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--log-level", log_level, "error|warn|info|debug (overrides SPLICE_LOG)");

    IngestOptions ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Ingest JSONL or a repository tree into a corpus file");
    ingest_cmd->add_option("--jsonl", ingest.jsonl, "JSONL input with id/text records");
    ingest_cmd->add_option("--repo", ingest.repo, "Directory of repositories");
    ingest_cmd->add_option("--out", ingest.out, "Corpus JSONL output")->required();
    ingest_cmd->add_option("--max-chars", ingest.max_chars)->capture_default_str();
    ingest_cmd->add_option("--repo-split-bytes", ingest.repo_split_bytes)->capture_default_str();
    ingest_cmd->add_flag("--dedup", ingest.dedup, "Drop exact duplicate texts");
    ingest_cmd->add_option("--token-sidecar", ingest.token_sidecar, "JSONL of {id, token_len}");
    ingest_cmd->add_option("--length-unit", ingest.length_unit)
        ->check(CLI::IsMember({"chars", "tokens"}))
        ->capture_default_str();

    IndexOptions index;
    auto* index_cmd = app.add_subcommand("index", "Build a BM25 index or train an IVF embedding index");
    index_cmd->add_option("--corpus", index.corpus)->required();
    index_cmd->add_option("--out", index.out)->required();
    index_cmd->add_option("--retriever", index.retriever)
        ->check(CLI::IsMember({"bm25", "embed"}))
        ->capture_default_str();
    index_cmd->add_option("--bm25-k1", index.k1)->capture_default_str();
    index_cmd->add_option("--bm25-b", index.b)->capture_default_str();
    index_cmd->add_option("--query-cap", index.query_cap, "0 = whole document")->capture_default_str();
    index_cmd->add_option("--embeddings", index.embeddings, "SPLCEMB1 embedding file");
    index_cmd->add_option("--nlist", index.nlist)->capture_default_str();
    index_cmd->add_option("--train-sample", index.train_sample)->capture_default_str();

    PackOptions pack;
    auto* pack_cmd = app.add_subcommand("pack", "Pack a corpus into training examples");
    pack_cmd->add_option("--corpus", pack.corpus)->required();
    pack_cmd->add_option("--out", pack.out)->required();
    pack_cmd->add_option("--index", pack.index, "Prebuilt BM25 or trained IVF index");
    pack_cmd->add_option("--embeddings", pack.embeddings, "Embeddings to train an IVF index on the fly");
    pack_cmd->add_option("--token-sidecar", pack.token_sidecar);
    pack_cmd->add_option("--materialize", pack.materialize, "Also write {\"text\"} per example here");
    pack_cmd->add_option("--method", pack.method)
        ->check(CLI::IsMember({"splice", "baseline", "domrnd", "repo"}))
        ->capture_default_str();
    pack_cmd->add_option("--retriever", pack.retriever)
        ->check(CLI::IsMember({"bm25", "embed", "repo"}))
        ->capture_default_str();
    pack_cmd->add_option("--k", pack.k)->check(CLI::PositiveNumber)->capture_default_str();
    pack_cmd->add_option("-L,--max-len", pack.max_len)->check(CLI::PositiveNumber)->capture_default_str();
    pack_cmd->add_option("--order", pack.order)
        ->check(CLI::IsMember({"identity", "reverse", "shuffle"}))
        ->capture_default_str();
    pack_cmd->add_option("--length-unit", pack.length_unit)
        ->check(CLI::IsMember({"chars", "tokens"}))
        ->capture_default_str();
    pack_cmd->add_option("--char-bound", pack.char_bound)->capture_default_str();
    pack_cmd->add_option("--bm25-k1", pack.k1)->capture_default_str();
    pack_cmd->add_option("--bm25-b", pack.b)->capture_default_str();
    pack_cmd->add_option("--query-cap", pack.query_cap, "0 = whole document")->capture_default_str();
    pack_cmd->add_option("--nlist", pack.nlist)->capture_default_str();
    pack_cmd->add_option("--nprobe", pack.nprobe)->capture_default_str();
    pack_cmd->add_option("--train-sample", pack.train_sample)->capture_default_str();

    MixOptions mixo;
    auto* mix_cmd = app.add_subcommand("mix", "Interleave packed streams by mixture weights");
    mix_cmd->add_option("--spec", mixo.spec, "Mixture spec JSON")->required();
    mix_cmd->add_option("--out", mixo.out)->required();
    mix_cmd->add_option("--meter", mixo.meter, "Override the spec's meter")
        ->check(CLI::IsMember({"length", "examples"}));

    auto* analyze_cmd = app.add_subcommand("analyze", "Corpus and stream statistics");
    analyze_cmd->require_subcommand(1);
    BurstinessOptions burst;
    auto* burst_cmd = analyze_cmd->add_subcommand("burstiness", "Zipf coefficient of stream windows");
    burst_cmd->add_option("--packed", burst.packed)->required();
    burst_cmd->add_option("--corpus", burst.corpus)->required();
    burst_cmd->add_option("--out", burst.out)->required();
    burst_cmd->add_option("--token-sidecar", burst.token_sidecar);
    burst_cmd->add_option("--length-unit", burst.length_unit)
        ->check(CLI::IsMember({"chars", "tokens"}))
        ->capture_default_str();
    burst_cmd->add_option("--window-len", burst.window_len)->check(CLI::PositiveNumber)->capture_default_str();
    burst_cmd->add_option("--max-windows", burst.max_windows)->check(CLI::PositiveNumber)->capture_default_str();
    LossOptions losses;
    auto* loss_cmd = analyze_cmd->add_subcommand("losses", "Bucket per-position losses by powers of two");
    loss_cmd->add_option("--losses", losses.losses, "JSONL of {pos, loss}")->required();
    loss_cmd->add_option("--out", losses.out)->required();
    LengthOptions lengths;
    auto* len_cmd = analyze_cmd->add_subcommand("lengths", "Length histogram of a corpus or packed stream");
    len_cmd->add_option("--corpus", lengths.corpus);
    len_cmd->add_option("--packed", lengths.packed);
    len_cmd->add_option("--out", lengths.out)->required();
    len_cmd->add_option("--length-unit", lengths.length_unit)
        ->check(CLI::IsMember({"chars", "tokens"}))
        ->capture_default_str();
    len_cmd->add_option("--edges", lengths.edges)->delimiter(',')->capture_default_str();

    KvOptions kv;
    auto* kv_cmd = app.add_subcommand("gen-kv", "Generate key-value retrieval prompts");
    kv_cmd->add_option("--n-pairs", kv.n_pairs)->check(CLI::PositiveNumber)->capture_default_str();
    kv_cmd->add_option("--positions", kv.positions)->delimiter(',')->capture_default_str();
    kv_cmd->add_option("--examples-per-position", kv.per_position)->capture_default_str();
    kv_cmd->add_option("--out", kv.out)->required();

    InspectOptions inspect;
    auto* inspect_cmd = app.add_subcommand("inspect", "Summarise a corpus, packed stream or index file");
    inspect_cmd->add_option("--corpus", inspect.corpus);
    inspect_cmd->add_option("--packed", inspect.packed);
    inspect_cmd->add_option("--bm25", inspect.bm25);
    inspect_cmd->add_option("--embeddings", inspect.embeddings);
    inspect_cmd->add_option("--ivf", inspect.ivf);

    for (auto* sub : app.get_subcommands({})) {
        sub->fallthrough();
    }
    for (auto* sub : analyze_cmd->get_subcommands({})) {
        sub->fallthrough();
    }

    std::vector<const char*> argv{"splice"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (!log_level.empty()) {
            log::set_level(log::parse_level(log_level));
        }
        if (*ingest_cmd) {
            run_ingest(ingest, g, out);
        } else if (*index_cmd) {
            run_index(index, g, out);
        } else if (*pack_cmd) {
            run_pack(pack, g, out);
        } else if (*mix_cmd) {
            run_mix(mixo, g, out);
        } else if (*burst_cmd) {
            run_burstiness(burst, g, out);
        } else if (*loss_cmd) {
            run_losses(losses, g, out);
        } else if (*len_cmd) {
            if (lengths.corpus.empty() == lengths.packed.empty()) {
                throw Error("analyze lengths needs exactly one of --corpus or --packed");
            }
            run_lengths(lengths, g, out);
        } else if (*kv_cmd) {
            run_gen_kv(kv, g, out);
        } else if (*inspect_cmd) {
            run_inspect(inspect, out);
        }
    } catch (const std::exception& e) {
        err << "splice: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace splice::cli
