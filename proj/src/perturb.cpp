#include "seasoned/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "seasoned/rng.hpp"

namespace seasoned
{
namespace
{
double parse_number(std::string_view s, std::string_view spec)
{
    const std::string str(s);
    try
    {
        std::size_t used = 0;
        const double v = std::stod(str, &used);
        if (used == str.size() && std::isfinite(v))
            return v;
    }
    catch (const std::exception&)
    {
    }
    throw AttackSpecError(fmt::format("attack '{}': '{}' is not a number", spec, s));
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

Relation random_relation(Rng& rng)
{
    return static_cast<Relation>(rng.below(relation_count));
}
}  // namespace

AttackConfig parse_attack(std::string_view spec, std::uint64_t seed)
{
    const auto parts = split(spec, ':');
    AttackConfig a;
    a.seed = seed;
    if (parts[0] == "gia" && parts.size() == 3)
    {
        a.kind = AttackKind::GIA;
        const auto m = parse_number(parts[2], spec);
        if (m < 1 || m != std::floor(m))
            throw AttackSpecError(fmt::format("attack '{}': M must be an integer >= 1", spec));
        a.m_edges = static_cast<std::size_t>(m);
    }
    else if (parts[0] == "lfa" && parts.size() == 2)
        a.kind = AttackKind::LFA;
    else if (parts[0] == "edgeflip" && parts.size() == 2)
        a.kind = AttackKind::EdgeFlip;
    else
        throw AttackSpecError(fmt::format("attack '{}': expected gia:K:M, lfa:K or edgeflip:K", spec));
    a.k_pct = parse_number(parts[1], spec);
    if (!(a.k_pct > 0 && a.k_pct <= 100))
        throw AttackSpecError(fmt::format("attack '{}': K must be in (0, 100]", spec));
    return a;
}

std::string to_string(const AttackConfig& a)
{
    switch (a.kind)
    {
    case AttackKind::GIA:
        return fmt::format("gia:{}:{}", a.k_pct, a.m_edges);
    case AttackKind::LFA:
        return fmt::format("lfa:{}", a.k_pct);
    case AttackKind::EdgeFlip:
        return fmt::format("edgeflip:{}", a.k_pct);
    }
    return "?";
}

std::size_t scaled_count(std::size_t n, double k_pct)
{
    return static_cast<std::size_t>(std::llround(static_cast<double>(n) * k_pct / 100.0));
}

Injection inject_nodes(const Srg& g, double k_pct, std::size_t m_edges, std::uint64_t seed)
{
    if (g.nodes.empty())
        throw std::invalid_argument("inject_nodes: graph has no nodes");
    const auto original = g.nodes.size();
    if (m_edges < 1 || m_edges > original)
        throw std::invalid_argument(
            fmt::format("inject_nodes: M={} must be in [1, {}]", m_edges, original));

    Rng rng(seed);
    Injection out{g, {}};
    const auto count = scaled_count(original, k_pct);
    auto next_pc = g.nodes.back().pc + 1;
    for (std::size_t i = 0; i < count; ++i)
    {
        const auto id = static_cast<NodeId>(out.graph.nodes.size());
        const auto& donor = g.nodes[rng.below(original)];
        out.graph.nodes.push_back({id, next_pc++, donor.op});
        out.injected.push_back(id);
        for (const auto target : rng.sample(original, m_edges))
            out.graph.edges.push_back({id, static_cast<NodeId>(target), random_relation(rng)});
    }
    return out;
}

std::vector<OptLabel> flip_labels(
    std::span<const OptLabel> labels, double k_pct, std::uint64_t seed, std::vector<std::size_t>* flipped)
{
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (!labels[i])
            throw std::invalid_argument(fmt::format("flip_labels: entry {} is unlabeled", i));
    std::vector<OptLabel> out(labels.begin(), labels.end());
    Rng rng(seed);
    auto chosen = rng.sample(labels.size(), scaled_count(labels.size(), k_pct));
    std::sort(chosen.begin(), chosen.end());
    for (const auto i : chosen)
        out[i] = *out[i] == Label::aec ? Label::benign : Label::aec;
    if (flipped != nullptr)
        *flipped = std::move(chosen);
    return out;
}

Srg flip_edges(const Srg& g, double k_pct, std::uint64_t seed)
{
    if (g.edges.empty())
        throw std::invalid_argument("flip_edges: graph has no edges");
    Rng rng(seed);
    Srg out = g;
    std::set<TypedEdge> present(g.edges.begin(), g.edges.end());
    const auto n = g.nodes.size();
    // Distinct endpoints need two nodes; without them only removals are possible.
    const std::size_t max_edges = n >= 2 ? n * (n - 1) * relation_count : 0;

    const auto total = scaled_count(g.edges.size(), k_pct);
    for (std::size_t i = 0; i < total; ++i)
    {
        const bool can_insert = present.size() < max_edges;
        const bool remove = out.edges.empty() ? false : (!can_insert || rng.below(2) == 0);
        if (remove)
        {
            const auto idx = rng.below(out.edges.size());
            present.erase(out.edges[idx]);
            out.edges.erase(out.edges.begin() + static_cast<std::ptrdiff_t>(idx));
            continue;
        }
        if (!can_insert)
            break;
        while (true)
        {
            const auto src = static_cast<NodeId>(rng.below(n));
            auto dst = static_cast<NodeId>(rng.below(n - 1));
            if (dst >= src)
                ++dst;
            const TypedEdge e{src, dst, random_relation(rng)};
            if (present.insert(e).second)
            {
                out.edges.push_back(e);
                break;
            }
        }
    }
    return out;
}

}  // namespace seasoned
