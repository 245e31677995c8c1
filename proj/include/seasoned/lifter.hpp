#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seasoned/disasm.hpp"
#include "seasoned/types.hpp"

namespace seasoned
{
using RegId = std::uint32_t;

/// EVM stack limit.
inline constexpr std::size_t max_stack_depth = 1024;

/// Abstract constant: a bounded set of possible values, or unknown.
class ConstSet
{
public:
    static constexpr std::size_t max_values = 32;

    ConstSet() = default;  // unknown
    static ConstSet unknown() { return {}; }
    static ConstSet of(const u256& v);

    bool known() const noexcept { return known_; }
    bool single() const noexcept { return known_ && values_.size() == 1; }
    const u256& only() const { return values_.front(); }
    std::span<const u256> values() const noexcept { return values_; }

    /// Adds v; collapses to unknown past max_values.
    void insert(const u256& v);
    /// Least upper bound.
    void join(const ConstSet& other);

    bool operator==(const ConstSet&) const = default;

private:
    std::vector<u256> values_;  // sorted, unique
    bool known_ = false;
};

enum class ValueKind : std::uint8_t
{
    Const,
    Reg,
    Unknown,
};

/// Operand of an RTL statement and slot of the abstract stack.
struct Value
{
    ValueKind kind = ValueKind::Unknown;
    /// Payload of a Const value.
    u256 constant = 0;
    /// Defining registers of a Reg value. Holds several ids after a control-flow merge.
    std::vector<RegId> regs;
    /// Constants a Reg value may take.
    ConstSet known;

    static Value make_const(const u256& c);
    static Value make_reg(RegId r, ConstSet known = {});
    static Value unknown() { return {}; }

    bool is_reg() const noexcept { return kind == ValueKind::Reg; }
    /// Constant view of this value regardless of kind.
    ConstSet constants() const;

    bool operator==(const Value&) const = default;
};

/// Least upper bound of two stack slots.
Value join(const Value& a, const Value& b);

struct RtlStatement
{
    std::uint64_t pc = 0;
    std::optional<RegId> def;
    /// Semantic opcode: the EVM mnemonic, or "CONST" for a literal.
    std::string_view op;
    std::uint8_t opcode_byte = 0;
    /// Operands in EVM pop order (stack top first). CONST holds its literal as one Const value.
    std::vector<Value> args;

    bool is_const() const noexcept { return op == "CONST"; }
    bool operator==(const RtlStatement&) const = default;
};

/// "Vk = OP args" / "OP args".
std::string format_statement(const RtlStatement& s);

struct AbstractStack
{
    /// Top at the end.
    std::vector<Value> slots;
    bool overflow = false;

    std::size_t depth() const noexcept { return slots.size(); }
    bool operator==(const AbstractStack&) const = default;
};

/// Pointwise join aligned at the top; shorter stacks are padded with Unknown below.
AbstractStack join(const AbstractStack& a, const AbstractStack& b, bool* depth_mismatch = nullptr);

enum class TerminatorKind : std::uint8_t
{
    Jump,
    JumpI,
    Fallthrough,
    Halt,
};

struct Terminator
{
    TerminatorKind kind = TerminatorKind::Halt;
    /// Resolved JUMPDEST targets, ascending.
    std::vector<std::uint64_t> targets;
    /// Next block for JumpI/Fallthrough.
    std::optional<std::uint64_t> fallthrough;
    /// Jump operand did not fold to constants.
    bool unresolved = false;

    bool operator==(const Terminator&) const = default;
};

/// Instruction range [first, last) of one basic block.
struct BlockSkeleton
{
    std::size_t first = 0;
    std::size_t last = 0;
    std::uint64_t entry_pc = 0;
};

/// Boundaries before every JUMPDEST and after every terminator.
std::vector<BlockSkeleton> split_blocks(std::span<const Instruction> instructions);

struct LiftResult
{
    std::vector<RtlStatement> statements;
    AbstractStack exit;
    std::size_t underflows = 0;
};

/// Symbolic execution of one block. Defining instructions get consecutive ids from first_reg.
LiftResult lift_block(
    std::span<const Instruction> block, const AbstractStack& entry, RegId first_reg);

/// Constant folding over sets of operand constants, in EVM pop order.
ConstSet fold(std::uint8_t opcode, std::span<const ConstSet> args);

using ConstEnv = std::unordered_map<RegId, u256>;

/// Folds ADD/SUB/MUL/DIV/AND/OR/XOR/NOT/SHL/SHR/EXP; Unknown when an operand has no binding.
Value fold_constants(const RtlStatement& stmt, const ConstEnv& env);

struct BasicBlock
{
    std::uint64_t entry_pc = 0;
    std::size_t first_instruction = 0;
    std::size_t instruction_count = 0;
    std::vector<RtlStatement> statements;
    Terminator terminator;
    AbstractStack entry;
    AbstractStack exit;
    std::size_t underflows = 0;
    std::size_t lifts = 0;
    /// Entry stack was widened after the pass cap.
    bool widened = false;
};

struct LiftDiagnostics
{
    std::size_t unresolved_jumps = 0;
    std::size_t stack_underflows = 0;
    std::size_t depth_mismatches = 0;
    std::size_t widened_blocks = 0;

    bool operator==(const LiftDiagnostics&) const = default;
};

struct Program
{
    std::vector<BasicBlock> blocks;  // ascending entry_pc
    LiftDiagnostics diagnostics;
    RegId register_count = 0;

    /// JUMP/JUMPI pc -> resolved targets.
    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> jump_targets() const;
    const BasicBlock* block_at(std::uint64_t entry_pc) const;
};

/// Per-block re-lift cap of the fixpoint before entry stacks are widened.
inline constexpr std::size_t max_lift_passes = 16;

/// Fixpoint propagation of abstract stacks along discovered edges.
/// Blocks not reached from pc 0 are seeded, lowest pc first, with an empty stack.
Program resolve_jumps(std::span<const Instruction> instructions,
    std::span<const BlockSkeleton> blocks);

/// disassembled code -> lifted program.
Program lift_program(std::span<const Instruction> instructions);

}  // namespace seasoned
