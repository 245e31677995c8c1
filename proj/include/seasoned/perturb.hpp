#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "seasoned/srg.hpp"

namespace seasoned
{
enum class AttackKind
{
    GIA,
    LFA,
    EdgeFlip,
};

struct AttackConfig
{
    AttackKind kind = AttackKind::GIA;
    double k_pct = 50;
    std::size_t m_edges = 1;  // GIA only
    std::uint64_t seed = 0;
};

class AttackSpecError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// "gia:K:M", "lfa:K", "edgeflip:K" with K in (0, 100] and M >= 1.
AttackConfig parse_attack(std::string_view spec, std::uint64_t seed = 0);
std::string to_string(const AttackConfig& a);

/// round(n * k / 100), halves away from zero.
std::size_t scaled_count(std::size_t n, double k_pct);

struct Injection
{
    Srg graph;
    std::vector<NodeId> injected;
};

/// Adds round(|V|*k/100) nodes with opcodes drawn from the host node multiset, each wired
/// to m distinct original nodes (new -> existing, relation uniform). Original nodes and
/// edges keep their ids; new edges are appended.
Injection inject_nodes(const Srg& g, double k_pct, std::size_t m_edges, std::uint64_t seed);

/// Flips exactly round(n*k/100) binary labels chosen uniformly. Unlabeled entries are an error.
std::vector<OptLabel> flip_labels(std::span<const OptLabel> labels, double k_pct, std::uint64_t seed,
    std::vector<std::size_t>* flipped = nullptr);

/// round(|E|*k/100) modifications, each a removal or an insertion with equal odds.
/// Insertions use distinct endpoints, a uniform relation and never duplicate an edge.
Srg flip_edges(const Srg& g, double k_pct, std::uint64_t seed);

}  // namespace seasoned
