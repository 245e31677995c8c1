#pragma once

#include <set>
#include <string>

#include "seasoned/graphio.hpp"
#include "seasoned/rng.hpp"
#include "seasoned/srg.hpp"

namespace seasoned::testing
{
/// Structurally valid SRG with arbitrary vocabulary opcodes, ascending pcs and
/// unique typed edges in random order.
inline Srg random_srg(std::uint64_t seed, std::size_t max_nodes = 60)
{
    Rng rng(seed);
    const auto& vocab = default_vocab();
    Srg g;
    g.contract_id = "0x" + std::to_string(seed) + (rng.below(4) == 0 ? "\"quoted\\ \xc3\xa9" : "");
    const auto n = rng.below(max_nodes + 1);
    std::uint64_t pc = rng.below(3);
    for (std::size_t i = 0; i < n; ++i)
    {
        g.nodes.push_back({static_cast<NodeId>(i), pc, vocab[rng.below(vocab.size())]});
        pc += 1 + rng.below(33);
    }
    if (n > 0)
    {
        std::set<TypedEdge> seen;
        const auto m = rng.below(3 * n + 1);
        for (std::size_t k = 0; k < m; ++k)
        {
            TypedEdge e{static_cast<NodeId>(rng.below(n)), static_cast<NodeId>(rng.below(n)),
                static_cast<Relation>(rng.below(relation_count))};
            if (e.rel == Relation::Data && e.src == e.dst)
                continue;
            if (seen.insert(e).second)
                g.edges.push_back(e);
        }
    }
    const auto l = rng.below(3);
    g.label = l == 2 ? OptLabel{} : OptLabel{static_cast<Label>(l)};
    g.diagnostics.unresolved_jumps = rng.below(50);
    g.diagnostics.stack_underflows = rng.below(50);
    return g;
}

}  // namespace seasoned::testing
