#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seasoned/types.hpp"

namespace seasoned
{
/// Static description of one EVM opcode (Shanghai table, PUSH0 included).
struct Opcode
{
    std::string_view mnemonic;
    std::uint8_t byte = 0xfe;
    std::uint8_t stack_in = 0;
    std::uint8_t stack_out = 0;
    std::uint8_t immediate_len = 0;
    bool defined = false;

    bool operator==(const Opcode&) const = default;
};

/// Table lookup. Bytes outside the table map to INVALID (keeping their byte value).
const Opcode& opcode_info(std::uint8_t byte) noexcept;

/// Every defined opcode in byte-value order.
std::span<const Opcode> opcode_table() noexcept;

bool is_push(std::uint8_t byte) noexcept;  // PUSH0..PUSH32
bool is_dup(std::uint8_t byte) noexcept;
bool is_swap(std::uint8_t byte) noexcept;

/// Stack-only instructions (POP, PUSH*, DUP*, SWAP*) carry no semantic node.
bool is_stack_manipulation(std::uint8_t byte) noexcept;

/// Instructions that end a basic block.
bool is_block_terminator(std::uint8_t byte) noexcept;

namespace op
{
inline constexpr std::uint8_t STOP = 0x00;
inline constexpr std::uint8_t ADD = 0x01;
inline constexpr std::uint8_t MUL = 0x02;
inline constexpr std::uint8_t SUB = 0x03;
inline constexpr std::uint8_t DIV = 0x04;
inline constexpr std::uint8_t EXP = 0x0a;
inline constexpr std::uint8_t AND = 0x16;
inline constexpr std::uint8_t OR = 0x17;
inline constexpr std::uint8_t XOR = 0x18;
inline constexpr std::uint8_t NOT = 0x19;
inline constexpr std::uint8_t SHL = 0x1b;
inline constexpr std::uint8_t SHR = 0x1c;
inline constexpr std::uint8_t CALLDATALOAD = 0x35;
inline constexpr std::uint8_t CALLDATACOPY = 0x37;
inline constexpr std::uint8_t CODECOPY = 0x39;
inline constexpr std::uint8_t EXTCODECOPY = 0x3c;
inline constexpr std::uint8_t RETURNDATACOPY = 0x3e;
inline constexpr std::uint8_t POP = 0x50;
inline constexpr std::uint8_t MLOAD = 0x51;
inline constexpr std::uint8_t MSTORE = 0x52;
inline constexpr std::uint8_t MSTORE8 = 0x53;
inline constexpr std::uint8_t SLOAD = 0x54;
inline constexpr std::uint8_t SSTORE = 0x55;
inline constexpr std::uint8_t JUMP = 0x56;
inline constexpr std::uint8_t JUMPI = 0x57;
inline constexpr std::uint8_t JUMPDEST = 0x5b;
inline constexpr std::uint8_t PUSH0 = 0x5f;
inline constexpr std::uint8_t PUSH1 = 0x60;
inline constexpr std::uint8_t PUSH2 = 0x61;
inline constexpr std::uint8_t PUSH32 = 0x7f;
inline constexpr std::uint8_t DUP1 = 0x80;
inline constexpr std::uint8_t DUP16 = 0x8f;
inline constexpr std::uint8_t SWAP1 = 0x90;
inline constexpr std::uint8_t SWAP16 = 0x9f;
inline constexpr std::uint8_t CALL = 0xf1;
inline constexpr std::uint8_t CALLCODE = 0xf2;
inline constexpr std::uint8_t RETURN = 0xf3;
inline constexpr std::uint8_t DELEGATECALL = 0xf4;
inline constexpr std::uint8_t STATICCALL = 0xfa;
inline constexpr std::uint8_t REVERT = 0xfd;
inline constexpr std::uint8_t INVALID = 0xfe;
inline constexpr std::uint8_t SELFDESTRUCT = 0xff;
}  // namespace op

struct Instruction
{
    std::uint64_t pc = 0;
    Opcode opcode;
    /// Push immediate, zero-padded to immediate_len when the code ends early.
    Bytes immediate;
    /// Zero bytes appended because the immediate ran past end-of-code.
    std::uint8_t padding = 0;

    bool truncated() const noexcept { return padding > 0; }
    std::uint64_t next_pc() const noexcept { return pc + 1 + opcode.immediate_len; }
    /// Bytes this instruction occupies in the code (padding excluded).
    std::size_t encoded_size() const noexcept { return 1u + opcode.immediate_len - padding; }
    std::uint8_t byte() const noexcept { return opcode.byte; }
    u256 immediate_value() const { return u256_from_bytes(immediate); }

    bool operator==(const Instruction&) const = default;
};

/// Linear sweep; total over arbitrary bytes.
std::vector<Instruction> disassemble(BytesView code);

/// "PC: MNEMONIC [0xIMM]" per line, pc in lowercase hex.
std::string format_listing(std::span<const Instruction> instructions);

}  // namespace seasoned
