#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "seasoned/types.hpp"

namespace seasoned::testing
{
/// One memory or storage access as the generator emitted it.
struct MemAccess
{
    std::uint64_t pc = 0;
    bool storage = false;
    bool store = false;
    /// nullopt when the address was derived from environment data.
    std::optional<u256> address;
};

struct GenOptions
{
    std::size_t min_blocks = 3;
    std::size_t max_blocks = 14;
    std::size_t max_body = 14;
    bool memory = true;
    /// Allow addresses computed from runtime data.
    bool unknown_addresses = false;
    /// Blocks that jump to a target left on the stack by their predecessor.
    bool dispatchers = true;
};

struct GeneratedProgram
{
    Bytes code;
    std::vector<MemAccess> accesses;  // ascending pc
    std::size_t blocks = 0;
};

/// Stack-balanced block-structured program. Every block leaves the stack as it found
/// it, except that a predecessor of a dispatcher leaves exactly one jump target behind.
/// Jump targets are always computable from constants.
GeneratedProgram generate_program(std::uint64_t seed, const GenOptions& options = {});

}  // namespace seasoned::testing
