#include "seasoned/disasm.hpp"

#include <array>

#include <fmt/format.h>

namespace seasoned
{
namespace
{
struct Entry
{
    std::uint8_t byte;
    std::string_view name;
    std::uint8_t in;
    std::uint8_t out;
};

// Yellow-paper stack arities, Shanghai fork.
constexpr Entry base_table[] = {
    {0x00, "STOP", 0, 0},
    {0x01, "ADD", 2, 1},
    {0x02, "MUL", 2, 1},
    {0x03, "SUB", 2, 1},
    {0x04, "DIV", 2, 1},
    {0x05, "SDIV", 2, 1},
    {0x06, "MOD", 2, 1},
    {0x07, "SMOD", 2, 1},
    {0x08, "ADDMOD", 3, 1},
    {0x09, "MULMOD", 3, 1},
    {0x0a, "EXP", 2, 1},
    {0x0b, "SIGNEXTEND", 2, 1},
    {0x10, "LT", 2, 1},
    {0x11, "GT", 2, 1},
    {0x12, "SLT", 2, 1},
    {0x13, "SGT", 2, 1},
    {0x14, "EQ", 2, 1},
    {0x15, "ISZERO", 1, 1},
    {0x16, "AND", 2, 1},
    {0x17, "OR", 2, 1},
    {0x18, "XOR", 2, 1},
    {0x19, "NOT", 1, 1},
    {0x1a, "BYTE", 2, 1},
    {0x1b, "SHL", 2, 1},
    {0x1c, "SHR", 2, 1},
    {0x1d, "SAR", 2, 1},
    {0x20, "SHA3", 2, 1},
    {0x30, "ADDRESS", 0, 1},
    {0x31, "BALANCE", 1, 1},
    {0x32, "ORIGIN", 0, 1},
    {0x33, "CALLER", 0, 1},
    {0x34, "CALLVALUE", 0, 1},
    {0x35, "CALLDATALOAD", 1, 1},
    {0x36, "CALLDATASIZE", 0, 1},
    {0x37, "CALLDATACOPY", 3, 0},
    {0x38, "CODESIZE", 0, 1},
    {0x39, "CODECOPY", 3, 0},
    {0x3a, "GASPRICE", 0, 1},
    {0x3b, "EXTCODESIZE", 1, 1},
    {0x3c, "EXTCODECOPY", 4, 0},
    {0x3d, "RETURNDATASIZE", 0, 1},
    {0x3e, "RETURNDATACOPY", 3, 0},
    {0x3f, "EXTCODEHASH", 1, 1},
    {0x40, "BLOCKHASH", 1, 1},
    {0x41, "COINBASE", 0, 1},
    {0x42, "TIMESTAMP", 0, 1},
    {0x43, "NUMBER", 0, 1},
    {0x44, "PREVRANDAO", 0, 1},
    {0x45, "GASLIMIT", 0, 1},
    {0x46, "CHAINID", 0, 1},
    {0x47, "SELFBALANCE", 0, 1},
    {0x48, "BASEFEE", 0, 1},
    {0x50, "POP", 1, 0},
    {0x51, "MLOAD", 1, 1},
    {0x52, "MSTORE", 2, 0},
    {0x53, "MSTORE8", 2, 0},
    {0x54, "SLOAD", 1, 1},
    {0x55, "SSTORE", 2, 0},
    {0x56, "JUMP", 1, 0},
    {0x57, "JUMPI", 2, 0},
    {0x58, "PC", 0, 1},
    {0x59, "MSIZE", 0, 1},
    {0x5a, "GAS", 0, 1},
    {0x5b, "JUMPDEST", 0, 0},
    {0x5f, "PUSH0", 0, 1},
    {0xf0, "CREATE", 3, 1},
    {0xf1, "CALL", 7, 1},
    {0xf2, "CALLCODE", 7, 1},
    {0xf3, "RETURN", 2, 0},
    {0xf4, "DELEGATECALL", 6, 1},
    {0xf5, "CREATE2", 4, 1},
    {0xfa, "STATICCALL", 6, 1},
    {0xfd, "REVERT", 2, 0},
    {0xfe, "INVALID", 0, 0},
    {0xff, "SELFDESTRUCT", 1, 0},
};

constexpr std::string_view push_names[] = {"PUSH1", "PUSH2", "PUSH3", "PUSH4", "PUSH5", "PUSH6",
    "PUSH7", "PUSH8", "PUSH9", "PUSH10", "PUSH11", "PUSH12", "PUSH13", "PUSH14", "PUSH15",
    "PUSH16", "PUSH17", "PUSH18", "PUSH19", "PUSH20", "PUSH21", "PUSH22", "PUSH23", "PUSH24",
    "PUSH25", "PUSH26", "PUSH27", "PUSH28", "PUSH29", "PUSH30", "PUSH31", "PUSH32"};
constexpr std::string_view dup_names[] = {"DUP1", "DUP2", "DUP3", "DUP4", "DUP5", "DUP6", "DUP7",
    "DUP8", "DUP9", "DUP10", "DUP11", "DUP12", "DUP13", "DUP14", "DUP15", "DUP16"};
constexpr std::string_view swap_names[] = {"SWAP1", "SWAP2", "SWAP3", "SWAP4", "SWAP5", "SWAP6",
    "SWAP7", "SWAP8", "SWAP9", "SWAP10", "SWAP11", "SWAP12", "SWAP13", "SWAP14", "SWAP15",
    "SWAP16"};
constexpr std::string_view log_names[] = {"LOG0", "LOG1", "LOG2", "LOG3", "LOG4"};

struct Tables
{
    std::array<Opcode, 256> by_byte{};
    std::vector<Opcode> defined;

    Tables()
    {
        for (unsigned b = 0; b < 256; ++b)
            by_byte[b] = Opcode{"INVALID", static_cast<std::uint8_t>(b), 0, 0, 0, false};

        const auto set = [this](std::uint8_t b, std::string_view name, int in, int out, int imm) {
            by_byte[b] = Opcode{name, b, static_cast<std::uint8_t>(in),
                static_cast<std::uint8_t>(out), static_cast<std::uint8_t>(imm), true};
        };
        for (const auto& e : base_table)
            set(e.byte, e.name, e.in, e.out, 0);
        for (int n = 1; n <= 32; ++n)
            set(static_cast<std::uint8_t>(0x5f + n), push_names[n - 1], 0, 1, n);
        for (int n = 1; n <= 16; ++n)
        {
            set(static_cast<std::uint8_t>(0x7f + n), dup_names[n - 1], n, n + 1, 0);
            set(static_cast<std::uint8_t>(0x8f + n), swap_names[n - 1], n + 1, n + 1, 0);
        }
        for (int n = 0; n <= 4; ++n)
            set(static_cast<std::uint8_t>(0xa0 + n), log_names[n], n + 2, 0, 0);

        for (const auto& o : by_byte)
            if (o.defined)
                defined.push_back(o);
    }
};

const Tables& tables()
{
    static const Tables t;
    return t;
}
}  // namespace

const Opcode& opcode_info(std::uint8_t byte) noexcept
{
    return tables().by_byte[byte];
}

std::span<const Opcode> opcode_table() noexcept
{
    return tables().defined;
}

bool is_push(std::uint8_t byte) noexcept
{
    return byte >= op::PUSH0 && byte <= op::PUSH32;
}

bool is_dup(std::uint8_t byte) noexcept
{
    return byte >= op::DUP1 && byte <= op::DUP16;
}

bool is_swap(std::uint8_t byte) noexcept
{
    return byte >= op::SWAP1 && byte <= op::SWAP16;
}

bool is_stack_manipulation(std::uint8_t byte) noexcept
{
    return byte == op::POP || is_push(byte) || is_dup(byte) || is_swap(byte);
}

bool is_block_terminator(std::uint8_t byte) noexcept
{
    switch (byte)
    {
    case op::JUMP:
    case op::JUMPI:
    case op::STOP:
    case op::RETURN:
    case op::REVERT:
    case op::SELFDESTRUCT:
    case op::INVALID:
        return true;
    default:
        return !opcode_info(byte).defined;
    }
}

std::vector<Instruction> disassemble(BytesView code)
{
    std::vector<Instruction> out;
    out.reserve(code.size());
    std::size_t pc = 0;
    while (pc < code.size())
    {
        Instruction ins;
        ins.pc = pc;
        ins.opcode = opcode_info(code[pc]);
        const std::size_t width = ins.opcode.immediate_len;
        if (width > 0)
        {
            ins.immediate.assign(width, 0);
            const std::size_t avail = std::min(width, code.size() - pc - 1);
            std::copy_n(code.begin() + static_cast<std::ptrdiff_t>(pc + 1), avail,
                ins.immediate.begin());
            ins.padding = static_cast<std::uint8_t>(width - avail);
        }
        pc += 1 + width;
        out.push_back(std::move(ins));
    }
    return out;
}

std::string format_listing(std::span<const Instruction> instructions)
{
    std::string out;
    for (const auto& ins : instructions)
    {
        out += fmt::format("{:02x}: {}", ins.pc, ins.opcode.mnemonic);
        if (!ins.immediate.empty())
            out += " " + to_hex(ins.immediate_value());
        out += '\n';
    }
    return out;
}

}  // namespace seasoned
