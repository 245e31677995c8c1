#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "seasoned/ingest.hpp"
#include "seasoned/lifter.hpp"

namespace seasoned
{
enum class Relation : std::uint8_t
{
    Control = 0,
    Data = 1,
    Effect = 2,
};
inline constexpr std::size_t relation_count = 3;

std::string_view to_string(Relation r) noexcept;
std::optional<Relation> relation_from_string(std::string_view s) noexcept;

using NodeId = std::uint32_t;

struct SemanticNode
{
    NodeId id = 0;
    std::uint64_t pc = 0;
    std::string op;

    bool operator==(const SemanticNode&) const = default;
};

/// Directed dependent -> dependency.
struct TypedEdge
{
    NodeId src = 0;
    NodeId dst = 0;
    Relation rel = Relation::Data;

    bool operator==(const TypedEdge&) const = default;
    auto operator<=>(const TypedEdge& o) const
    {
        return std::tie(rel, src, dst) <=> std::tie(o.rel, o.src, o.dst);
    }
};

struct SrgDiagnostics
{
    std::size_t unresolved_jumps = 0;
    std::size_t stack_underflows = 0;

    bool operator==(const SrgDiagnostics&) const = default;
};

/// Semantic relation graph of one contract.
struct Srg
{
    std::string contract_id;
    std::vector<SemanticNode> nodes;  // ascending pc, id == index
    std::vector<TypedEdge> edges;
    OptLabel label;
    SrgDiagnostics diagnostics;

    std::size_t count(Relation r) const noexcept;
    bool operator==(const Srg&) const = default;
};

struct SrgInvariantError : std::logic_error
{
    using std::logic_error::logic_error;
};

/// Throws SrgInvariantError on out-of-range endpoints, non-dense ids, unsorted or
/// duplicate pcs, self Data edges, duplicate (src, dst, rel) edges, or removed opcodes.
void check_invariants(const Srg& g);

struct CfgEdge
{
    std::size_t from = 0;  // block index
    std::size_t to = 0;
    bool fallthrough = false;

    bool operator==(const CfgEdge&) const = default;
    auto operator<=>(const CfgEdge&) const = default;
};

/// Block-level edges: resolved jump targets plus JUMPI-false and block-end fallthroughs.
std::vector<CfgEdge> build_cfg(const Program& program);

struct SimplifiedNodes
{
    std::vector<SemanticNode> nodes;
    std::unordered_map<std::uint64_t, NodeId> by_pc;
};

/// One node per retained statement, ordered by pc.
SimplifiedNodes simplify_nodes(const Program& program);

std::vector<TypedEdge> build_control_edges(
    const Program& program, std::span<const CfgEdge> cfg, const SimplifiedNodes& nodes);

std::vector<TypedEdge> build_data_edges(const Program& program, const SimplifiedNodes& nodes);

enum class Space : std::uint8_t
{
    Memory,
    Storage,
};

/// Memory/storage slot; every non-constant address of a space shares one bucket.
struct SlotKey
{
    Space space = Space::Memory;
    std::optional<u256> address;

    bool operator==(const SlotKey&) const = default;
    bool operator<(const SlotKey& o) const
    {
        if (space != o.space)
            return space < o.space;
        if (address.has_value() != o.address.has_value())
            return !address.has_value();
        return address.has_value() && *address < *o.address;
    }
};

enum class Access : std::uint8_t
{
    Load,
    Store,
};

struct SlotAccess
{
    Access access;
    SlotKey slot;
};

/// Memory/storage effect of a statement, if any. Copy and call opcodes count as
/// stores only when their destination offset is constant.
std::optional<SlotAccess> slot_access(const RtlStatement& s);

/// Single pc-order scan: RAW (load -> last store), WAW (store -> previous store),
/// WAR (store -> loads since the previous store).
std::vector<TypedEdge> build_effect_edges(const Program& program, const SimplifiedNodes& nodes);

Srg build_srg(std::string contract_id, BytesView code, OptLabel label = std::nullopt);
Srg build_srg(const ContractRecord& contract);

struct GraphStats
{
    /// (opcode, ratio) by descending ratio, then name.
    std::vector<std::pair<std::string, double>> opcode_ratios;
    std::vector<std::pair<std::string, std::size_t>> opcode_counts;
    std::array<double, relation_count> relation_ratios{};
    std::array<std::size_t, relation_count> relation_counts{};
    /// Mean undirected shortest-path length over connected pairs of the largest weak component.
    double avg_path_length = 0.0;
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
};

struct EmptyGraphError : std::invalid_argument
{
    EmptyGraphError() : std::invalid_argument("graph has no nodes") {}
};

GraphStats graph_stats(const Srg& g);

}  // namespace seasoned
