#include "seasoned/srg.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include <fmt/format.h>

namespace seasoned
{
std::string_view to_string(Relation r) noexcept
{
    switch (r)
    {
    case Relation::Control:
        return "control";
    case Relation::Data:
        return "data";
    case Relation::Effect:
        return "effect";
    }
    return "?";
}

std::optional<Relation> relation_from_string(std::string_view s) noexcept
{
    if (s == "control")
        return Relation::Control;
    if (s == "data")
        return Relation::Data;
    if (s == "effect")
        return Relation::Effect;
    return std::nullopt;
}

std::size_t Srg::count(Relation r) const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(edges.begin(), edges.end(), [r](const TypedEdge& e) { return e.rel == r; }));
}

namespace
{
bool is_removed_op(std::string_view op)
{
    if (op == "POP")
        return true;
    const auto numbered = [&](std::string_view prefix, int lo, int hi) {
        if (!op.starts_with(prefix))
            return false;
        const auto rest = op.substr(prefix.size());
        if (rest.empty() || rest.size() > 2)
            return false;
        int n = 0;
        for (const char c : rest)
        {
            if (c < '0' || c > '9')
                return false;
            n = n * 10 + (c - '0');
        }
        return n >= lo && n <= hi;
    };
    return numbered("PUSH", 0, 32) || numbered("DUP", 1, 16) || numbered("SWAP", 1, 16);
}
}  // namespace

void check_invariants(const Srg& g)
{
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
    {
        const auto& n = g.nodes[i];
        if (n.id != i)
            throw SrgInvariantError(fmt::format("node {} has id {}", i, n.id));
        if (i > 0 && g.nodes[i - 1].pc >= n.pc)
            throw SrgInvariantError(fmt::format("node pcs not strictly ascending at node {}", i));
        if (is_removed_op(n.op))
            throw SrgInvariantError(fmt::format("node {} carries removed opcode {}", i, n.op));
    }
    std::set<TypedEdge> seen;
    for (const auto& e : g.edges)
    {
        if (e.src >= g.nodes.size() || e.dst >= g.nodes.size())
            throw SrgInvariantError(fmt::format("edge ({}, {}) out of range", e.src, e.dst));
        if (e.rel == Relation::Data && e.src == e.dst)
            throw SrgInvariantError(fmt::format("self data edge on node {}", e.src));
        if (!seen.insert(e).second)
            throw SrgInvariantError(
                fmt::format("duplicate {} edge ({}, {})", to_string(e.rel), e.src, e.dst));
    }
}

std::vector<CfgEdge> build_cfg(const Program& program)
{
    std::map<std::uint64_t, std::size_t> index;
    for (std::size_t b = 0; b < program.blocks.size(); ++b)
        index.emplace(program.blocks[b].entry_pc, b);

    std::set<CfgEdge> edges;
    for (std::size_t b = 0; b < program.blocks.size(); ++b)
    {
        const auto& t = program.blocks[b].terminator;
        for (const auto target : t.targets)
            edges.insert({b, index.at(target), false});
        if (t.fallthrough)
            edges.insert({b, index.at(*t.fallthrough), true});
    }
    return {edges.begin(), edges.end()};
}

SimplifiedNodes simplify_nodes(const Program& program)
{
    SimplifiedNodes out;
    for (const auto& b : program.blocks)
        for (const auto& s : b.statements)
        {
            const auto id = static_cast<NodeId>(out.nodes.size());
            out.nodes.push_back({id, s.pc, std::string{s.op}});
            out.by_pc.emplace(s.pc, id);
        }
    return out;
}

namespace
{
std::vector<TypedEdge> sorted_unique(std::vector<TypedEdge> edges)
{
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}
}  // namespace

std::vector<TypedEdge> build_control_edges(
    const Program& program, std::span<const CfgEdge> cfg, const SimplifiedNodes& nodes)
{
    std::vector<TypedEdge> out;
    for (const auto& e : cfg)
    {
        const auto& from = program.blocks[e.from].statements;
        const auto& to = program.blocks[e.to].statements;
        if (from.empty() || to.empty())
            continue;
        // Destination entry (JUMPDEST when present) -> source branch or last node.
        out.push_back({nodes.by_pc.at(to.front().pc), nodes.by_pc.at(from.back().pc), Relation::Control});
    }
    return sorted_unique(std::move(out));
}

std::vector<TypedEdge> build_data_edges(const Program& program, const SimplifiedNodes& nodes)
{
    std::unordered_map<RegId, NodeId> def_site;
    for (const auto& b : program.blocks)
        for (const auto& s : b.statements)
            if (s.def)
                def_site.emplace(*s.def, nodes.by_pc.at(s.pc));

    std::vector<TypedEdge> out;
    for (const auto& b : program.blocks)
        for (const auto& s : b.statements)
        {
            const auto use = nodes.by_pc.at(s.pc);
            for (const auto& a : s.args)
                for (const auto r : a.regs)
                {
                    const auto it = def_site.find(r);
                    // Loop-carried self-dependencies are dropped.
                    if (it != def_site.end() && it->second != use)
                        out.push_back({use, it->second, Relation::Data});
                }
        }
    return sorted_unique(std::move(out));
}

std::optional<SlotAccess> slot_access(const RtlStatement& s)
{
    const auto key = [&](Space space, std::size_t arg) {
        const auto c = s.args[arg].constants();
        return SlotKey{space, c.single() ? std::optional<u256>{c.only()} : std::nullopt};
    };
    const auto const_store = [&](std::size_t arg) -> std::optional<SlotAccess> {
        const auto k = key(Space::Memory, arg);
        if (!k.address)
            return std::nullopt;
        return SlotAccess{Access::Store, k};
    };
    switch (s.opcode_byte)
    {
    case op::MLOAD:
        return SlotAccess{Access::Load, key(Space::Memory, 0)};
    case op::SLOAD:
        return SlotAccess{Access::Load, key(Space::Storage, 0)};
    case op::MSTORE:
    case op::MSTORE8:
        return SlotAccess{Access::Store, key(Space::Memory, 0)};
    case op::SSTORE:
        return SlotAccess{Access::Store, key(Space::Storage, 0)};
    case op::CALLDATACOPY:
    case op::CODECOPY:
    case op::RETURNDATACOPY:
        return const_store(0);
    case op::EXTCODECOPY:
        return const_store(1);
    case op::CALL:
    case op::CALLCODE:
        return const_store(5);
    case op::DELEGATECALL:
    case op::STATICCALL:
        return const_store(4);
    default:
        return std::nullopt;
    }
}

std::vector<TypedEdge> build_effect_edges(const Program& program, const SimplifiedNodes& nodes)
{
    struct SlotState
    {
        std::optional<NodeId> last_store;
        std::vector<NodeId> loads_since_store;
    };
    std::map<SlotKey, SlotState> slots;
    std::vector<TypedEdge> out;
    for (const auto& b : program.blocks)
        for (const auto& s : b.statements)
        {
            if (s.is_const())
                continue;
            const auto access = slot_access(s);
            if (!access)
                continue;
            const auto node = nodes.by_pc.at(s.pc);
            auto& st = slots[access->slot];
            if (access->access == Access::Load)
            {
                if (st.last_store)
                    out.push_back({node, *st.last_store, Relation::Effect});
                st.loads_since_store.push_back(node);
            }
            else
            {
                if (st.last_store)
                    out.push_back({node, *st.last_store, Relation::Effect});
                for (const auto l : st.loads_since_store)
                    out.push_back({node, l, Relation::Effect});
                st.last_store = node;
                st.loads_since_store.clear();
            }
        }
    return sorted_unique(std::move(out));
}

Srg build_srg(std::string contract_id, BytesView code, OptLabel label)
{
    const auto instructions = disassemble(code);
    const auto program = lift_program(instructions);
    const auto cfg = build_cfg(program);
    auto nodes = simplify_nodes(program);

    Srg g;
    g.contract_id = std::move(contract_id);
    g.label = label;
    g.diagnostics.unresolved_jumps = program.diagnostics.unresolved_jumps;
    g.diagnostics.stack_underflows = program.diagnostics.stack_underflows;
    for (auto edges : {build_control_edges(program, cfg, nodes), build_data_edges(program, nodes),
             build_effect_edges(program, nodes)})
        g.edges.insert(g.edges.end(), edges.begin(), edges.end());
    g.nodes = std::move(nodes.nodes);
    return g;
}

Srg build_srg(const ContractRecord& contract)
{
    return build_srg(contract.id, contract.bytecode, contract.label);
}

GraphStats graph_stats(const Srg& g)
{
    if (g.nodes.empty())
        throw EmptyGraphError{};
    GraphStats st;
    st.node_count = g.nodes.size();
    st.edge_count = g.edges.size();

    std::map<std::string, std::size_t> hist;
    for (const auto& n : g.nodes)
        ++hist[n.op];
    st.opcode_counts.assign(hist.begin(), hist.end());
    for (const auto& [op, c] : hist)
        st.opcode_ratios.emplace_back(op, static_cast<double>(c) / static_cast<double>(g.nodes.size()));
    std::stable_sort(st.opcode_ratios.begin(), st.opcode_ratios.end(),
        [](const auto& a, const auto& b) { return a.second > b.second; });

    for (const auto& e : g.edges)
        ++st.relation_counts[static_cast<std::size_t>(e.rel)];
    if (!g.edges.empty())
        for (std::size_t r = 0; r < relation_count; ++r)
            st.relation_ratios[r] =
                static_cast<double>(st.relation_counts[r]) / static_cast<double>(g.edges.size());

    // Undirected simple adjacency.
    const auto n = g.nodes.size();
    std::vector<std::vector<NodeId>> adj(n);
    for (const auto& e : g.edges)
        if (e.src != e.dst)
        {
            adj[e.src].push_back(e.dst);
            adj[e.dst].push_back(e.src);
        }
    for (auto& a : adj)
    {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }

    // Largest weak component; ties go to the one holding the lowest node id.
    std::vector<std::int64_t> component(n, -1);
    std::vector<NodeId> best;
    for (NodeId s = 0; s < n; ++s)
    {
        if (component[s] >= 0)
            continue;
        std::vector<NodeId> members{s};
        component[s] = s;
        for (std::size_t k = 0; k < members.size(); ++k)
            for (const auto v : adj[members[k]])
                if (component[v] < 0)
                {
                    component[v] = s;
                    members.push_back(v);
                }
        if (members.size() > best.size())
            best = std::move(members);
    }

    double total = 0.0;
    std::size_t pairs = 0;
    std::vector<std::int64_t> dist(n, -1);
    for (const auto s : best)
    {
        for (const auto v : best)
            dist[v] = -1;
        dist[s] = 0;
        std::queue<NodeId> q;
        q.push(s);
        while (!q.empty())
        {
            const auto u = q.front();
            q.pop();
            for (const auto v : adj[u])
                if (dist[v] < 0)
                {
                    dist[v] = dist[u] + 1;
                    q.push(v);
                }
        }
        for (const auto v : best)
            if (v > s)
            {
                total += static_cast<double>(dist[v]);
                ++pairs;
            }
    }
    st.avg_path_length = pairs > 0 ? total / static_cast<double>(pairs) : 0.0;
    return st;
}

}  // namespace seasoned
