#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "seasoned/graphio.hpp"
#include "seasoned/ingest.hpp"
#include "seasoned/perturb.hpp"
#include "seasoned/rng.hpp"
#include "seasoned/srg.hpp"

namespace seasoned::cli
{
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace
{
struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct Globals
{
    std::uint64_t seed = 0;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    std::string out_dir = "out";
    std::string log_level = "info";
};

std::shared_ptr<spdlog::logger> logger()
{
    static const auto log = [] {
        auto l = spdlog::stderr_color_mt("seasoned");
        l->set_pattern("[%l] %v");
        return l;
    }();
    return log;
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; results are index-addressed.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn)
{
    const auto workers = std::min<std::size_t>(std::max(1u, jobs), n);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (auto i = next++; i < n; i = next++)
                fn(i);
        });
}

std::string file_stem_for(std::string_view id)
{
    std::string out;
    for (const char c : id)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_' ? c : '_');
    return out.empty() ? "_" : out;
}

fs::path ensure_dir(const std::string& dir)
{
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

/// Expands directories (non-recursive, *.json) and keeps files as given, sorted.
std::vector<fs::path> expand_json_inputs(const std::vector<std::string>& inputs)
{
    std::vector<fs::path> out;
    for (const auto& in : inputs)
    {
        const fs::path p(in);
        if (fs::is_directory(p))
        {
            std::vector<fs::path> found;
            for (const auto& entry : fs::directory_iterator(p))
                if (entry.is_regular_file() && entry.path().extension() == ".json")
                    found.push_back(entry.path());
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        }
        else
            out.push_back(p);
    }
    return out;
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError(fmt::format("cannot open {}", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string rpc_endpoint(const std::string& flag)
{
    if (!flag.empty())
        return flag;
    if (const char* env = std::getenv("SEASONED_RPC_URL"); env != nullptr && *env != '\0')
        return env;
    throw UsageError("no RPC endpoint: pass --rpc-url or set SEASONED_RPC_URL");
}

// ---------------------------------------------------------------------------- build

struct BuildOptions
{
    std::vector<std::string> files;
    std::string manifest;
    bool online = false;
    std::string rpc_url;
    bool reverse_edges = false;
    bool dump_ir = false;
};

struct BuildJob
{
    std::string id;
    std::optional<fs::path> path;
    std::optional<std::string> address;
    OptLabel label;
    std::optional<Timestamp> deployed_at;
    std::string source;
};

int cmd_build(const Globals& g, const BuildOptions& o, std::ostream& out)
{
    std::vector<BuildJob> jobs;
    if (!o.manifest.empty())
    {
        DatasetManifest m;
        try
        {
            m = load_manifest(o.manifest);
        }
        catch (const IngestError& e)
        {
            throw UsageError(fmt::format("manifest {}: {}", o.manifest, e.what()));
        }
        for (const auto& e : m.records)
            jobs.push_back({e.id, e.bytecode_path ? std::optional{m.resolve(e)} : std::nullopt,
                e.address, e.label, e.deployed_at, e.source.value_or("")});
    }
    for (const auto& f : o.files)
        jobs.push_back({fs::path(f).stem().string(), fs::path(f), std::nullopt, std::nullopt,
            std::nullopt, "file"});
    if (jobs.empty())
        throw UsageError("nothing to build: the manifest is empty and no bytecode files were given");

    const auto endpoint = o.online ? rpc_endpoint(o.rpc_url) : std::string{};
    const auto dir = ensure_dir(g.out_dir);

    struct Outcome
    {
        bool ok = false;
        std::string error;
        bool invariant = false;
        SrgDiagnostics diag;
    };
    std::vector<Outcome> results(jobs.size());
    parallel_for(jobs.size(), g.jobs, [&](std::size_t i) {
        const auto& job = jobs[i];
        auto& r = results[i];
        try
        {
            Bytes code;
            if (job.path)
                code = read_bytecode_file(*job.path);
            else if (!o.online)
                throw IngestError(IngestErrc::NetworkError,
                    fmt::format("address {} needs --online to fetch", *job.address));
            else
                code = fetch_bytecode(endpoint, parse_address(*job.address));
            if (code.empty())
                throw IngestError(IngestErrc::EmptyCode, "bytecode is empty");

            const auto srg = build_srg(job.id, code, job.label);
            check_invariants(srg);
            const auto stem = file_stem_for(job.id);
            write_file_atomic(dir / (stem + ".json"), to_json(srg, {o.reverse_edges, -1}));
            if (o.dump_ir)
            {
                const auto ins = disassemble(code);
                const auto prog = lift_program(ins);
                std::string rtl;
                for (const auto& b : prog.blocks)
                    for (const auto& s : b.statements)
                        rtl += fmt::format("{:02x}: {}\n", s.pc, format_statement(s));
                write_file_atomic(dir / (stem + ".asm"), format_listing(ins));
                write_file_atomic(dir / (stem + ".rtl"), rtl);
            }
            r.ok = true;
            r.diag = srg.diagnostics;
        }
        catch (const SrgInvariantError& e)
        {
            r.invariant = true;
            r.error = e.what();
        }
        catch (const std::exception& e)
        {
            r.error = e.what();
        }
    });

    std::size_t ok = 0, failed = 0;
    SrgDiagnostics total;
    for (std::size_t i = 0; i < jobs.size(); ++i)
    {
        const auto& r = results[i];
        if (r.invariant)
        {
            logger()->critical("{}: invariant violation: {}", jobs[i].id, r.error);
            return exit_invariant;
        }
        if (r.ok)
        {
            ++ok;
            total.unresolved_jumps += r.diag.unresolved_jumps;
            total.stack_underflows += r.diag.stack_underflows;
        }
        else
        {
            ++failed;
            logger()->warn("{}: {}", jobs[i].id, r.error);
        }
    }
    out << fmt::format("{} ok, {} failed; unresolved_jumps={} stack_underflows={}\n", ok, failed,
        total.unresolved_jumps, total.stack_underflows);
    return ok > 0 ? exit_ok : exit_usage;
}

// ---------------------------------------------------------------------------- stats

struct ClassStats
{
    std::size_t graphs = 0;
    std::size_t nodes = 0;
    std::map<std::string, std::size_t> opcodes;
    std::array<std::size_t, relation_count> relations{};
    double path_sum = 0.0;

    void add(const GraphStats& s)
    {
        ++graphs;
        nodes += s.node_count;
        for (const auto& [op, c] : s.opcode_counts)
            opcodes[op] += c;
        for (std::size_t r = 0; r < relation_count; ++r)
            relations[r] += s.relation_counts[r];
        path_sum += s.avg_path_length;
    }

    std::vector<std::pair<std::string, double>> top_opcodes(std::size_t k) const
    {
        std::vector<std::pair<std::string, double>> v;
        for (const auto& [op, c] : opcodes)
            v.emplace_back(op, static_cast<double>(c) / static_cast<double>(nodes));
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        v.resize(std::min(k, v.size()));
        return v;
    }

    std::vector<std::pair<Relation, double>> relation_ratios() const
    {
        std::size_t total = 0;
        for (const auto c : relations)
            total += c;
        std::vector<std::pair<Relation, double>> v;
        for (std::size_t r = 0; r < relation_count; ++r)
            v.emplace_back(static_cast<Relation>(r),
                total > 0 ? static_cast<double>(relations[r]) / static_cast<double>(total) : 0.0);
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        return v;
    }

    double avg_path_length() const { return graphs > 0 ? path_sum / static_cast<double>(graphs) : 0.0; }
};

std::string capitalized(std::string_view s)
{
    std::string out(s);
    if (!out.empty())
        out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

int cmd_stats(const std::vector<std::string>& inputs, const std::string& format, std::ostream& out)
{
    std::map<std::string, ClassStats> classes;  // "benign", "aec", "unlabeled"
    std::size_t valid = 0;
    for (const auto& path : expand_json_inputs(inputs))
    {
        try
        {
            const auto g = load_srg(path);
            const auto s = graph_stats(g);
            const auto key = !g.label ? "unlabeled" : (*g.label == Label::aec ? "aec" : "benign");
            classes[key].add(s);
            ++valid;
        }
        catch (const std::exception& e)
        {
            logger()->warn("{}: skipped: {}", path.string(), e.what());
        }
    }
    if (valid == 0)
        throw UsageError("no valid graphs");

    // Table layout: benign then AEC, unlabeled last.
    std::vector<std::pair<std::string, const ClassStats*>> columns;
    for (const auto* key : {"benign", "aec", "unlabeled"})
        if (const auto it = classes.find(key); it != classes.end())
            columns.emplace_back(key == std::string_view("aec") ? "AECs" :
                                 key == std::string_view("benign") ? "Benign Contracts" : "Unlabeled",
                &it->second);

    if (format == "json")
    {
        ordered_json j = ordered_json::object();
        for (const auto& [name, st] : columns)
        {
            ordered_json c;
            c["graphs"] = st->graphs;
            c["top_opcodes"] = ordered_json::array();
            for (const auto& [op, r] : st->top_opcodes(5))
                c["top_opcodes"].push_back({{"op", op}, {"ratio", r}});
            c["relations"] = ordered_json::object();
            for (const auto& [rel, r] : st->relation_ratios())
                c["relations"][std::string(to_string(rel))] = r;
            c["avg_path_length"] = st->avg_path_length();
            j[name] = std::move(c);
        }
        out << j.dump(2) << '\n';
        return exit_ok;
    }

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"Feature"};
    for (const auto& [name, st] : columns)
        header.push_back(fmt::format("{} ({})", name, st->graphs));
    rows.push_back(header);
    for (std::size_t k = 0; k < 5; ++k)
    {
        std::vector<std::string> row{k == 0 ? "Top 5 Opcodes" : ""};
        for (const auto& [name, st] : columns)
        {
            const auto top = st->top_opcodes(5);
            row.push_back(k < top.size() ? fmt::format("{} {:.2f}", top[k].first, top[k].second) : "");
        }
        rows.push_back(row);
    }
    for (std::size_t k = 0; k < relation_count; ++k)
    {
        std::vector<std::string> row{k == 0 ? "Relation & Ratio" : ""};
        for (const auto& [name, st] : columns)
        {
            const auto rel = st->relation_ratios()[k];
            row.push_back(fmt::format("{} {:.2f}", capitalized(to_string(rel.first)), rel.second));
        }
        rows.push_back(row);
    }
    std::vector<std::string> path_row{"Avg. Path Length"};
    for (const auto& [name, st] : columns)
        path_row.push_back(fmt::format("{:.2f}", st->avg_path_length()));
    rows.push_back(path_row);

    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c)
            width[c] = std::max(width[c], r[c].size());
    for (const auto& r : rows)
    {
        std::string line;
        for (std::size_t c = 0; c < r.size(); ++c)
            line += fmt::format("{:<{}}", r[c], width[c] + (c + 1 < r.size() ? 2 : 0));
        while (!line.empty() && line.back() == ' ')
            line.pop_back();
        out << line << '\n';
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------- perturb

struct PerturbOptions
{
    std::vector<std::string> inputs;
    std::string attack;
    std::string split;
};

int cmd_perturb(const Globals& g, const PerturbOptions& o, std::ostream& out)
{
    AttackConfig attack;
    try
    {
        attack = parse_attack(o.attack, g.seed);
    }
    catch (const AttackSpecError& e)
    {
        throw UsageError(e.what());
    }
    const auto paths = expand_json_inputs(o.inputs);
    if (paths.empty())
        throw UsageError("no graph files given");
    const auto dir = ensure_dir(g.out_dir);

    if (attack.kind == AttackKind::LFA)
    {
        std::optional<std::set<std::string>> train_ids;
        if (!o.split.empty())
        {
            const auto plan = split_plan_from_json(read_text(o.split));
            train_ids.emplace();
            for (const auto& a : plan.assignments)
                if (!a.partition || *a.partition == Partition::Train)
                    train_ids->insert(a.id);
        }
        std::vector<std::string> ids;
        std::vector<OptLabel> labels;
        for (const auto& p : paths)
        {
            const auto srg = load_srg(p);
            if (train_ids && !train_ids->contains(srg.contract_id))
                continue;
            if (!srg.label)
                throw UsageError(fmt::format("{}: graph '{}' is unlabeled", p.string(), srg.contract_id));
            ids.push_back(srg.contract_id);
            labels.push_back(srg.label);
        }
        std::vector<std::size_t> flipped;
        const auto result = flip_labels(labels, attack.k_pct, attack.seed, &flipped);
        ordered_json j;
        j["attack"] = to_string(attack);
        j["seed"] = attack.seed;
        j["flipped"] = ordered_json::array();
        for (const auto i : flipped)
            j["flipped"].push_back(ids[i]);
        j["labels"] = ordered_json::object();
        for (std::size_t i = 0; i < ids.size(); ++i)
            j["labels"][ids[i]] = static_cast<int>(*result[i]);
        write_file_atomic(dir / "labels.json", j.dump(1) + "\n");
        out << fmt::format("{} of {} training labels flipped\n", flipped.size(), ids.size());
        return exit_ok;
    }

    std::vector<std::string> errors(paths.size());
    parallel_for(paths.size(), g.jobs, [&](std::size_t i) {
        try
        {
            const auto srg = load_srg(paths[i]);
            const auto seed = derive_seed(attack.seed, srg.contract_id);
            ordered_json side;
            side["attack"] = to_string(attack);
            side["seed"] = attack.seed;
            side["graph_seed"] = seed;
            side["contract_id"] = srg.contract_id;
            Srg result;
            if (attack.kind == AttackKind::GIA)
            {
                auto inj = inject_nodes(srg, attack.k_pct, attack.m_edges, seed);
                side["injected_nodes"] = inj.injected;
                result = std::move(inj.graph);
            }
            else
                result = flip_edges(srg, attack.k_pct, seed);
            side["nodes_before"] = srg.nodes.size();
            side["edges_before"] = srg.edges.size();
            side["nodes_after"] = result.nodes.size();
            side["edges_after"] = result.edges.size();
            const auto stem = paths[i].stem().string();
            write_file_atomic(dir / (stem + ".json"), to_json(result));
            write_file_atomic(dir / (stem + ".perturb.json"), side.dump(1) + "\n");
        }
        catch (const std::exception& e)
        {
            errors[i] = e.what();
        }
    });
    std::size_t ok = 0;
    for (std::size_t i = 0; i < paths.size(); ++i)
    {
        if (errors[i].empty())
            ++ok;
        else
            logger()->warn("{}: {}", paths[i].string(), errors[i]);
    }
    out << fmt::format("{} ok, {} failed\n", ok, paths.size() - ok);
    return ok > 0 ? exit_ok : exit_usage;
}

// ---------------------------------------------------------------------------- export-dot

int cmd_export_dot(const std::string& graph, const std::string& highlight, const std::string& injected,
    const std::string& output, std::ostream& out)
{
    Srg g;
    try
    {
        g = load_srg(graph);
    }
    catch (const std::exception& e)
    {
        throw UsageError(fmt::format("{}: {}", graph, e.what()));
    }
    DotOptions opts;
    try
    {
        if (!highlight.empty())
        {
            const auto e = explanation_from_json(read_text(highlight));
            check_against(e, g);
            opts.highlight.emplace(e.factual_edges.begin(), e.factual_edges.end());
        }
        if (!injected.empty())
        {
            const auto side = nlohmann::json::parse(read_text(injected));
            for (const auto& n : side.at("injected_nodes"))
            {
                const auto id = n.get<std::size_t>();
                if (id >= g.nodes.size())
                    throw SchemaError("/injected_nodes", fmt::format("node {} out of range", id));
                opts.injected.insert(static_cast<NodeId>(id));
            }
        }
    }
    catch (const UsageError&)
    {
        throw;
    }
    catch (const std::exception& e)
    {
        throw UsageError(e.what());
    }
    const auto dot = to_dot(g, opts);
    if (output.empty())
        out << dot;
    else
        write_file_atomic(output, dot);
    return exit_ok;
}

// ---------------------------------------------------------------------------- fetch

struct FetchOptions
{
    std::vector<std::string> addresses;
    std::vector<std::string> txs;
    std::string manifest;
    std::string rpc_url;
};

int cmd_fetch(const Globals& g, const FetchOptions& o, std::ostream& out)
{
    const auto endpoint = rpc_endpoint(o.rpc_url);
    struct Item
    {
        std::string id;
        bool is_tx = false;
    };
    std::vector<Item> items;
    DatasetManifest manifest;
    if (!o.manifest.empty())
    {
        try
        {
            manifest = load_manifest(o.manifest);
        }
        catch (const IngestError& e)
        {
            throw UsageError(e.what());
        }
        for (const auto& e : manifest.records)
            if (e.address)
                items.push_back({*e.address, false});
    }
    for (const auto& a : o.addresses)
    {
        if (!is_address(a))
            throw UsageError(fmt::format("invalid address '{}'", a));
        items.push_back({a, false});
    }
    for (const auto& t : o.txs)
        items.push_back({t, true});
    if (items.empty())
        throw UsageError("nothing to fetch");

    const auto dir = ensure_dir(g.out_dir);
    std::vector<std::string> errors(items.size());
    parallel_for(items.size(), g.jobs, [&](std::size_t i) {
        const auto& item = items[i];
        try
        {
            Bytes code;
            if (item.is_tx)
            {
                const auto raw = hex_decode(item.id);
                if (raw.size() != 32)
                    throw IngestError(IngestErrc::ParseError, "transaction hash must be 32 bytes");
                Hash32 h{};
                std::copy(raw.begin(), raw.end(), h.begin());
                const auto tx = fetch_transaction(endpoint, h);
                if (!tx)
                    throw IngestError(IngestErrc::RpcError, "unknown transaction");
                if (!detect_creation(*tx))
                    throw IngestError(IngestErrc::ParseError, "not a contract creation transaction");
                code = tx->input;
            }
            else
                code = fetch_bytecode(endpoint, parse_address(item.id));
            write_file_atomic(dir / (file_stem_for(item.id) + ".hex"), to_hex(code) + "\n");
        }
        catch (const std::exception& e)
        {
            errors[i] = e.what();
        }
    });

    std::size_t ok = 0;
    for (std::size_t i = 0; i < items.size(); ++i)
    {
        if (errors[i].empty())
            ++ok;
        else
            logger()->warn("{}: {}", items[i].id, errors[i]);
    }
    if (!o.manifest.empty())
    {
        // Offline copy: address entries that fetched now point at their hex file.
        DatasetManifest offline;
        offline.base_dir = dir;
        std::map<std::string, bool> fetched;
        for (std::size_t i = 0; i < items.size(); ++i)
            if (!items[i].is_tx)
                fetched[items[i].id] = errors[i].empty();
        for (auto e : manifest.records)
        {
            if (e.address)
            {
                if (!fetched[*e.address])
                    continue;
                e.bytecode_path = file_stem_for(*e.address) + ".hex";
                e.address.reset();
            }
            else
                e.bytecode_path = fs::absolute(manifest.resolve(e)).string();
            offline.records.push_back(std::move(e));
        }
        write_file_atomic(dir / "manifest.jsonl", manifest_to_jsonl(offline));
    }
    out << fmt::format("{} ok, {} failed\n", ok, items.size() - ok);
    return ok > 0 ? exit_ok : exit_usage;
}

// ---------------------------------------------------------------------------- split

int cmd_split(const Globals& g, const std::string& manifest_path, const std::string& strategy, std::ostream& out)
{
    SplitSpec spec;
    DatasetManifest m;
    try
    {
        spec = parse_split_spec(strategy);
        m = load_manifest(manifest_path);
    }
    catch (const std::exception& e)
    {
        throw UsageError(e.what());
    }
    SplitPlan plan;
    try
    {
        plan = make_splits(m, spec, g.seed);
    }
    catch (const SplitError& e)
    {
        throw UsageError(e.what());
    }
    const auto dir = ensure_dir(g.out_dir);
    write_file_atomic(dir / "splits.json", to_json(plan) + "\n");
    out << fmt::format("{} records assigned with {}\n", plan.assignments.size(), to_string(spec));
    return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out)
{
    CLI::App app{"Semantic relation graphs from EVM bytecode", "seasoned"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Seed for every random choice");
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out_dir, "Output directory (created if absent)");
    app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|critical|off");

    BuildOptions build;
    auto* build_cmd = app.add_subcommand("build", "Build SRG JSON files from bytecode");
    build_cmd->add_option("files", build.files, "Bytecode hex files");
    build_cmd->add_option("--manifest", build.manifest, "Dataset manifest (JSON lines)");
    build_cmd->add_flag("--online", build.online, "Fetch address entries over JSON-RPC");
    build_cmd->add_option("--rpc-url", build.rpc_url, "JSON-RPC endpoint (default $SEASONED_RPC_URL)");
    build_cmd->add_flag("--reverse-edges", build.reverse_edges, "Write edges dependency -> dependent");
    build_cmd->add_flag("--dump-ir", build.dump_ir, "Also write .asm and .rtl listings");

    std::vector<std::string> stats_inputs;
    std::string stats_format = "text";
    auto* stats_cmd = app.add_subcommand("stats", "Per-class graph statistics");
    stats_cmd->add_option("graphs", stats_inputs, "SRG JSON files or directories")->required();
    stats_cmd->add_option("--format", stats_format, "text|json")->check(CLI::IsMember({"text", "json"}));

    PerturbOptions perturb;
    auto* perturb_cmd = app.add_subcommand("perturb", "Apply a robustness attack");
    perturb_cmd->add_option("graphs", perturb.inputs, "SRG JSON files or directories")->required();
    perturb_cmd->add_option("--attack", perturb.attack, "gia:K:M | lfa:K | edgeflip:K")->required();
    perturb_cmd->add_option("--split", perturb.split, "Split plan; LFA flips only training labels");

    std::string dot_graph, dot_highlight, dot_injected, dot_output;
    auto* dot_cmd = app.add_subcommand("export-dot", "Graphviz rendering of an SRG");
    dot_cmd->add_option("graph", dot_graph, "SRG JSON file")->required();
    dot_cmd->add_option("--highlight", dot_highlight, "Explanation JSON; factual edges in orange");
    dot_cmd->add_option("--injected", dot_injected, "Perturbation sidecar with injected_nodes");
    dot_cmd->add_option("-o,--output", dot_output, "Write DOT here instead of stdout");

    FetchOptions fetch;
    auto* fetch_cmd = app.add_subcommand("fetch", "Download bytecode over JSON-RPC");
    fetch_cmd->add_option("--address", fetch.addresses, "Contract address (repeatable)");
    fetch_cmd->add_option("--tx", fetch.txs, "Creation transaction hash (repeatable)");
    fetch_cmd->add_option("--manifest", fetch.manifest, "Fetch every address entry of a manifest");
    fetch_cmd->add_option("--rpc-url", fetch.rpc_url, "JSON-RPC endpoint (default $SEASONED_RPC_URL)");

    std::string split_manifest, split_strategy;
    auto* split_cmd = app.add_subcommand("split", "Write a train/val/test or k-fold split plan");
    split_cmd->add_option("--manifest", split_manifest, "Dataset manifest")->required();
    split_cmd->add_option("--strategy", split_strategy, "kfold:K | rand:P | old:P")->required();

    std::vector<std::string> argv_store{"seasoned"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store)
        argv.push_back(a.c_str());

    try
    {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return exit_ok;
    }
    catch (const CLI::ParseError& e)
    {
        logger()->error("{}", e.what());
        return exit_usage;
    }

    const auto level = spdlog::level::from_str(g.log_level);
    logger()->set_level(level);

    try
    {
        if (*build_cmd)
            return cmd_build(g, build, out);
        if (*stats_cmd)
            return cmd_stats(stats_inputs, stats_format, out);
        if (*perturb_cmd)
            return cmd_perturb(g, perturb, out);
        if (*dot_cmd)
            return cmd_export_dot(dot_graph, dot_highlight, dot_injected, dot_output, out);
        if (*fetch_cmd)
            return cmd_fetch(g, fetch, out);
        if (*split_cmd)
            return cmd_split(g, split_manifest, split_strategy, out);
    }
    catch (const UsageError& e)
    {
        logger()->error("{}", e.what());
        return exit_usage;
    }
    catch (const SrgInvariantError& e)
    {
        logger()->critical("invariant violation: {}", e.what());
        return exit_invariant;
    }
    catch (const std::exception& e)
    {
        logger()->error("{}", e.what());
        return exit_usage;
    }
    return exit_usage;
}

}  // namespace seasoned::cli
