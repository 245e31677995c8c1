#include "seasoned/graphio.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "seasoned/rng.hpp"

namespace seasoned
{
using nlohmann::json;
using nlohmann::ordered_json;

const std::vector<std::string>& default_vocab()
{
    static const std::vector<std::string> vocab = [] {
        std::vector<std::string> v;
        for (const auto& o : opcode_table())
            if (!is_stack_manipulation(o.byte))
                v.emplace_back(o.mnemonic);
        v.emplace_back("CONST");
        return v;
    }();
    return vocab;
}

std::string to_json(const Srg& g, const JsonOptions& options)
{
    ordered_json j;
    j["contract_id"] = g.contract_id;
    j["label"] = g.label ? ordered_json(static_cast<int>(*g.label)) : ordered_json(nullptr);
    auto& nodes = j["nodes"] = ordered_json::array();
    for (const auto& n : g.nodes)
        nodes.push_back({{"id", n.id}, {"pc", n.pc}, {"op", n.op}});
    auto& edges = j["edges"] = ordered_json::array();
    for (const auto& e : g.edges)
    {
        const auto [src, dst] = options.reverse_edges ? std::pair{e.dst, e.src} : std::pair{e.src, e.dst};
        edges.push_back({{"src", src}, {"dst", dst}, {"rel", to_string(e.rel)}});
    }
    j["diagnostics"] = {{"unresolved_jumps", g.diagnostics.unresolved_jumps},
        {"stack_underflows", g.diagnostics.stack_underflows}};
    j["vocab_version"] = vocab_version;
    return j.dump(options.indent);
}

namespace
{
const json& field(const json& obj, const std::string& path, const char* key)
{
    if (!obj.is_object())
        throw SchemaError(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end())
        throw SchemaError(path + "/" + key, "missing field");
    return *it;
}

std::uint64_t unsigned_field(const json& obj, const std::string& path, const char* key)
{
    const auto& v = field(obj, path, key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw SchemaError(path + "/" + key, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::string string_field(const json& obj, const std::string& path, const char* key)
{
    const auto& v = field(obj, path, key);
    if (!v.is_string())
        throw SchemaError(path + "/" + key, "expected a string");
    return v.get<std::string>();
}

json parse_or_throw(std::string_view text)
{
    try
    {
        return json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw SchemaError("", fmt::format("malformed JSON: {}", e.what()));
    }
}
}  // namespace

Srg from_json(std::string_view text)
{
    const auto j = parse_or_throw(text);
    Srg g;
    g.contract_id = string_field(j, "", "contract_id");

    const auto& label = field(j, "", "label");
    if (label.is_null())
        g.label = std::nullopt;
    else if (label.is_number_integer() && (label.get<int>() == 0 || label.get<int>() == 1))
        g.label = static_cast<Label>(label.get<int>());
    else
        throw SchemaError("/label", "expected 0, 1 or null");

    const auto& version = field(j, "", "vocab_version");
    if (!version.is_number_integer() || version.get<int>() != vocab_version)
        throw SchemaError("/vocab_version", fmt::format("expected {}", vocab_version));

    const auto& nodes = field(j, "", "nodes");
    if (!nodes.is_array())
        throw SchemaError("/nodes", "expected an array");
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
        const auto path = fmt::format("/nodes/{}", i);
        SemanticNode n;
        const auto id = unsigned_field(nodes[i], path, "id");
        if (id != i)
            throw SchemaError(path + "/id", fmt::format("expected dense id {}", i));
        n.id = static_cast<NodeId>(id);
        n.pc = unsigned_field(nodes[i], path, "pc");
        if (i > 0 && n.pc <= g.nodes.back().pc)
            throw SchemaError(path + "/pc", "node pcs must be unique and ascending");
        n.op = string_field(nodes[i], path, "op");
        g.nodes.push_back(std::move(n));
    }

    const auto& edges = field(j, "", "edges");
    if (!edges.is_array())
        throw SchemaError("/edges", "expected an array");
    for (std::size_t i = 0; i < edges.size(); ++i)
    {
        const auto path = fmt::format("/edges/{}", i);
        TypedEdge e;
        const auto src = unsigned_field(edges[i], path, "src");
        const auto dst = unsigned_field(edges[i], path, "dst");
        if (src >= g.nodes.size())
            throw SchemaError(path + "/src", fmt::format("node {} out of range", src));
        if (dst >= g.nodes.size())
            throw SchemaError(path + "/dst", fmt::format("node {} out of range", dst));
        e.src = static_cast<NodeId>(src);
        e.dst = static_cast<NodeId>(dst);
        const auto rel = relation_from_string(string_field(edges[i], path, "rel"));
        if (!rel)
            throw SchemaError(path + "/rel", "expected control, data or effect");
        e.rel = *rel;
        g.edges.push_back(e);
    }

    const auto& diag = field(j, "", "diagnostics");
    g.diagnostics.unresolved_jumps = unsigned_field(diag, "/diagnostics", "unresolved_jumps");
    g.diagnostics.stack_underflows = unsigned_field(diag, "/diagnostics", "stack_underflows");
    return g;
}

namespace
{
std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error(fmt::format("cannot open {}", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

Srg load_srg(const std::filesystem::path& path)
{
    return from_json(read_text(path));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw std::runtime_error(fmt::format("short write to {}", tmp.string()));
    }
    std::filesystem::rename(tmp, path);
}

Explanation explanation_from_json(std::string_view text)
{
    const auto j = parse_or_throw(text);
    Explanation e;
    e.contract_id = string_field(j, "", "contract_id");
    const auto prob = [&](const char* key) {
        if (!j.contains(key))
            return 0.0;
        if (!j[key].is_number())
            throw SchemaError(std::string("/") + key, "expected a number");
        return j[key].get<double>();
    };
    e.p_g = prob("p_g");
    e.p_s = prob("p_s");
    e.p_r = prob("p_r");
    const auto ids = [&](const char* key, bool required) {
        std::vector<std::size_t> out;
        if (!j.contains(key))
        {
            if (required)
                throw SchemaError(std::string("/") + key, "missing field");
            return out;
        }
        const auto& arr = j[key];
        if (!arr.is_array())
            throw SchemaError(std::string("/") + key, "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i)
        {
            if (!arr[i].is_number_unsigned() && !(arr[i].is_number_integer() && arr[i].get<std::int64_t>() >= 0))
                throw SchemaError(fmt::format("/{}/{}", key, i), "expected an edge id");
            out.push_back(arr[i].get<std::size_t>());
        }
        return out;
    };
    e.factual_edges = ids("factual_edges", true);
    e.counterfactual_edges = ids("counterfactual_edges", false);
    return e;
}

std::string to_json(const Explanation& e)
{
    ordered_json j;
    j["contract_id"] = e.contract_id;
    j["p_g"] = e.p_g;
    j["p_s"] = e.p_s;
    j["p_r"] = e.p_r;
    j["factual_edges"] = e.factual_edges;
    j["counterfactual_edges"] = e.counterfactual_edges;
    return j.dump();
}

void check_against(const Explanation& e, const Srg& g)
{
    if (e.contract_id != g.contract_id)
        throw SchemaError("/contract_id",
            fmt::format("explanation is for '{}', graph is '{}'", e.contract_id, g.contract_id));
    const auto check = [&](const std::vector<std::size_t>& ids, const char* key) {
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (ids[i] >= g.edges.size())
                throw SchemaError(fmt::format("/{}/{}", key, i),
                    fmt::format("edge {} not in a graph of {} edges", ids[i], g.edges.size()));
    };
    check(e.factual_edges, "factual_edges");
    check(e.counterfactual_edges, "counterfactual_edges");
}

namespace
{
std::string dot_escape(std::string_view s)
{
    std::string out;
    for (const char c : s)
    {
        if (c == '"' || c == '\\')
            out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string_view relation_color(Relation r)
{
    switch (r)
    {
    case Relation::Control:
        return "blue";
    case Relation::Data:
        return "gray40";
    case Relation::Effect:
        return "purple";
    }
    return "black";
}
}  // namespace

std::string to_dot(const Srg& g, const DotOptions& options)
{
    std::set<NodeId> highlighted_nodes;
    if (options.highlight)
        for (const auto e : *options.highlight)
            if (e < g.edges.size())
            {
                highlighted_nodes.insert(g.edges[e].src);
                highlighted_nodes.insert(g.edges[e].dst);
            }

    std::string out = fmt::format("digraph \"{}\" {{\n", dot_escape(g.contract_id));
    out += "  node [shape=box, fontname=\"monospace\"];\n";
    for (const auto& n : g.nodes)
    {
        out += fmt::format("  n{} [label=\"0x{:x}:{}\"", n.id, n.pc, dot_escape(n.op));
        const bool hl = highlighted_nodes.contains(n.id);
        if (options.injected.contains(n.id))
            out += fmt::format(", style=filled, fillcolor={}", hl ? "red" : "green");
        else if (hl)
            out += ", style=filled, fillcolor=orange";
        out += "];\n";
    }
    for (std::size_t i = 0; i < g.edges.size(); ++i)
    {
        const auto& e = g.edges[i];
        const bool hl = options.highlight && options.highlight->contains(i);
        out += fmt::format("  n{} -> n{} [label=\"{}\", color={}{}];\n", e.src, e.dst,
            to_string(e.rel), hl ? "orange" : relation_color(e.rel), hl ? ", penwidth=2" : "");
    }
    out += "}\n";
    return out;
}

SplitSpec parse_split_spec(std::string_view text)
{
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw SplitError(SplitErrc::InvalidSpec, fmt::format("split spec '{}' lacks ':'", text));
    const auto kind = text.substr(0, colon);
    const std::string num(text.substr(colon + 1));
    double value = 0;
    try
    {
        std::size_t used = 0;
        value = std::stod(num, &used);
        if (used != num.size())
            throw std::invalid_argument(num);
    }
    catch (const std::exception&)
    {
        throw SplitError(SplitErrc::InvalidSpec, fmt::format("split spec '{}' has a bad number", text));
    }
    SplitSpec s;
    s.value = value;
    if (kind == "kfold")
    {
        s.strategy = SplitStrategy::KFold;
        if (value < 2 || value != std::floor(value))
            throw SplitError(SplitErrc::InvalidSpec, "kfold needs an integer k >= 2");
    }
    else if (kind == "rand" || kind == "old")
    {
        s.strategy = kind == "rand" ? SplitStrategy::RandPct : SplitStrategy::OldPct;
        if (!(value > 0 && value <= 100))
            throw SplitError(SplitErrc::InvalidSpec, "percentage must be in (0, 100]");
    }
    else
        throw SplitError(SplitErrc::InvalidSpec, fmt::format("unknown split strategy '{}'", kind));
    return s;
}

std::string to_string(const SplitSpec& s)
{
    switch (s.strategy)
    {
    case SplitStrategy::KFold:
        return fmt::format("kfold:{}", s.value);
    case SplitStrategy::RandPct:
        return fmt::format("rand:{}", s.value);
    case SplitStrategy::OldPct:
        return fmt::format("old:{}", s.value);
    }
    return "?";
}

std::string_view to_string(Partition p) noexcept
{
    switch (p)
    {
    case Partition::Train:
        return "train";
    case Partition::Val:
        return "val";
    case Partition::Test:
        return "test";
    }
    return "?";
}

SplitPlan make_splits(const DatasetManifest& manifest, const SplitSpec& spec, std::uint64_t seed)
{
    const auto& recs = manifest.records;
    for (const auto& r : recs)
    {
        if (!r.label)
            throw SplitError(SplitErrc::MissingLabel, fmt::format("'{}' is unlabeled", r.id));
        if (spec.strategy == SplitStrategy::OldPct && !r.deployed_at)
            throw SplitError(SplitErrc::MissingTimestamp, fmt::format("'{}' has no deployed_at", r.id));
    }

    SplitPlan plan;
    plan.spec = spec;
    plan.seed = seed;
    plan.assignments.resize(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i)
        plan.assignments[i].id = recs[i].id;

    std::vector<std::size_t> order(recs.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;

    if (spec.strategy == SplitStrategy::OldPct)
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (*recs[a].deployed_at != *recs[b].deployed_at)
                return *recs[a].deployed_at < *recs[b].deployed_at;
            return recs[a].id < recs[b].id;
        });
    else
    {
        Rng rng(seed);
        rng.shuffle(order);
    }

    if (spec.strategy == SplitStrategy::KFold)
    {
        const auto k = static_cast<std::size_t>(spec.value);
        for (std::size_t pos = 0; pos < order.size(); ++pos)
            plan.assignments[order[pos]].fold = static_cast<int>(pos % k);
        return plan;
    }

    const auto n = order.size();
    const auto train = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.value / 100.0)));
    const auto val = (n - train) / 2;
    for (std::size_t pos = 0; pos < n; ++pos)
        plan.assignments[order[pos]].partition =
            pos < train ? Partition::Train : (pos < train + val ? Partition::Val : Partition::Test);
    return plan;
}

std::string to_json(const SplitPlan& plan)
{
    ordered_json j;
    j["strategy"] = to_string(plan.spec);
    j["seed"] = plan.seed;
    auto& a = j["assignments"] = ordered_json::array();
    for (const auto& x : plan.assignments)
    {
        ordered_json row;
        row["id"] = x.id;
        if (x.fold)
            row["fold"] = *x.fold;
        if (x.partition)
            row["partition"] = to_string(*x.partition);
        a.push_back(std::move(row));
    }
    return j.dump(1);
}

SplitPlan split_plan_from_json(std::string_view text)
{
    const auto j = parse_or_throw(text);
    SplitPlan plan;
    try
    {
        plan.spec = parse_split_spec(string_field(j, "", "strategy"));
    }
    catch (const SplitError& e)
    {
        throw SchemaError("/strategy", e.what());
    }
    plan.seed = unsigned_field(j, "", "seed");
    const auto& arr = field(j, "", "assignments");
    if (!arr.is_array())
        throw SchemaError("/assignments", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
    {
        const auto path = fmt::format("/assignments/{}", i);
        SplitPlan::Assignment a;
        a.id = string_field(arr[i], path, "id");
        if (arr[i].contains("fold"))
            a.fold = static_cast<int>(unsigned_field(arr[i], path, "fold"));
        if (arr[i].contains("partition"))
        {
            const auto p = string_field(arr[i], path, "partition");
            if (p == "train")
                a.partition = Partition::Train;
            else if (p == "val")
                a.partition = Partition::Val;
            else if (p == "test")
                a.partition = Partition::Test;
            else
                throw SchemaError(path + "/partition", "expected train, val or test");
        }
        plan.assignments.push_back(std::move(a));
    }
    return plan;
}

}  // namespace seasoned
