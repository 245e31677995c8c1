#include "seasoned/lifter.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

namespace seasoned
{
ConstSet ConstSet::of(const u256& v)
{
    ConstSet s;
    s.known_ = true;
    s.values_.push_back(v);
    return s;
}

void ConstSet::insert(const u256& v)
{
    if (!known_)
        return;
    const auto it = std::lower_bound(values_.begin(), values_.end(), v);
    if (it != values_.end() && *it == v)
        return;
    if (values_.size() == max_values)
    {
        *this = unknown();
        return;
    }
    values_.insert(it, v);
}

void ConstSet::join(const ConstSet& other)
{
    if (!other.known_)
    {
        *this = unknown();
        return;
    }
    for (const auto& v : other.values_)
        insert(v);
}

Value Value::make_const(const u256& c)
{
    Value v;
    v.kind = ValueKind::Const;
    v.constant = c;
    return v;
}

Value Value::make_reg(RegId r, ConstSet known)
{
    Value v;
    v.kind = ValueKind::Reg;
    v.regs.push_back(r);
    v.known = std::move(known);
    return v;
}

ConstSet Value::constants() const
{
    switch (kind)
    {
    case ValueKind::Const:
        return ConstSet::of(constant);
    case ValueKind::Reg:
        return known;
    case ValueKind::Unknown:
        break;
    }
    return ConstSet::unknown();
}

Value join(const Value& a, const Value& b)
{
    if (a == b)
        return a;
    if (a.kind == ValueKind::Const && b.kind == ValueKind::Const)
        return Value::unknown();

    Value out;
    std::set_union(a.regs.begin(), a.regs.end(), b.regs.begin(), b.regs.end(),
        std::back_inserter(out.regs));
    if (out.regs.empty())
        return Value::unknown();
    out.kind = ValueKind::Reg;
    out.known = a.constants();
    out.known.join(b.constants());
    return out;
}

AbstractStack join(const AbstractStack& a, const AbstractStack& b, bool* depth_mismatch)
{
    if (depth_mismatch != nullptr)
        *depth_mismatch = a.depth() != b.depth();
    const auto depth = std::max(a.depth(), b.depth());
    AbstractStack out;
    out.overflow = a.overflow || b.overflow;
    out.slots.resize(depth);
    // Index from the top so both stacks line up at their tops.
    for (std::size_t i = 0; i < depth; ++i)
    {
        const auto pick = [i](const AbstractStack& s) {
            return i < s.depth() ? s.slots[s.depth() - 1 - i] : Value::unknown();
        };
        out.slots[depth - 1 - i] = join(pick(a), pick(b));
    }
    return out;
}

std::string format_statement(const RtlStatement& s)
{
    std::string out;
    if (s.def)
        out += fmt::format("V{} = ", *s.def);
    if (s.is_const())
        return out + to_hex(s.args.front().constant);
    out += s.op;
    for (const auto& a : s.args)
    {
        out += ' ';
        switch (a.kind)
        {
        case ValueKind::Const:
            out += to_hex(a.constant);
            break;
        case ValueKind::Unknown:
            out += '?';
            break;
        case ValueKind::Reg:
            if (a.regs.size() == 1)
                out += fmt::format("V{}", a.regs.front());
            else
                out += fmt::format("{{V{}}}", fmt::join(a.regs, ",V"));
            break;
        }
    }
    return out;
}

std::vector<BlockSkeleton> split_blocks(std::span<const Instruction> instructions)
{
    std::vector<BlockSkeleton> blocks;
    std::size_t start = 0;
    const auto close = [&](std::size_t end) {
        if (end > start)
            blocks.push_back({start, end, instructions[start].pc});
        start = end;
    };
    for (std::size_t i = 0; i < instructions.size(); ++i)
    {
        if (instructions[i].byte() == op::JUMPDEST)
            close(i);
        if (is_block_terminator(instructions[i].byte()))
            close(i + 1);
    }
    close(instructions.size());
    return blocks;
}

namespace
{
bool defines_register(const Instruction& ins) noexcept
{
    const auto b = ins.byte();
    return is_push(b) || (!is_stack_manipulation(b) && ins.opcode.stack_out > 0);
}

void push(AbstractStack& stack, Value v)
{
    stack.slots.push_back(std::move(v));
    if (stack.depth() > max_stack_depth)
    {
        stack.slots.erase(stack.slots.begin());
        stack.overflow = true;
    }
}
}  // namespace

LiftResult lift_block(std::span<const Instruction> block, const AbstractStack& entry, RegId first_reg)
{
    LiftResult out;
    auto& stack = out.exit;
    stack = entry;
    RegId next_reg = first_reg;

    for (const auto& ins : block)
    {
        const auto b = ins.byte();
        const std::size_t need = ins.opcode.stack_in;
        if (stack.depth() < need)
        {
            stack.slots.insert(stack.slots.begin(), need - stack.depth(), Value::unknown());
            ++out.underflows;
        }
        auto& slots = stack.slots;
        const auto top = slots.size();

        if (is_push(b))
        {
            const auto c = ins.immediate_value();
            const auto r = next_reg++;
            out.statements.push_back({ins.pc, r, "CONST", b, {Value::make_const(c)}});
            push(stack, Value::make_reg(r, ConstSet::of(c)));
            continue;
        }
        if (b == op::POP)
        {
            slots.pop_back();
            continue;
        }
        if (is_dup(b))
        {
            auto copy = slots[top - need];
            push(stack, std::move(copy));
            continue;
        }
        if (is_swap(b))
        {
            std::swap(slots[top - 1], slots[top - need]);
            continue;
        }

        RtlStatement s{ins.pc, std::nullopt, ins.opcode.mnemonic, b, {}};
        s.args.reserve(need);
        for (std::size_t k = 0; k < need; ++k)
        {
            s.args.push_back(std::move(slots.back()));
            slots.pop_back();
        }
        if (ins.opcode.stack_out > 0)
        {
            std::vector<ConstSet> consts;
            consts.reserve(s.args.size());
            for (const auto& a : s.args)
                consts.push_back(a.constants());
            s.def = next_reg++;
            push(stack, Value::make_reg(*s.def, fold(b, consts)));
        }
        out.statements.push_back(std::move(s));
    }
    return out;
}

namespace
{
std::optional<u256> fold_one(std::uint8_t opcode, std::span<const u256> a)
{
    switch (opcode)
    {
    case op::ADD:
        return a[0] + a[1];
    case op::SUB:
        return a[0] - a[1];
    case op::MUL:
        return a[0] * a[1];
    case op::DIV:
        return a[1] == 0 ? u256{0} : u256{a[0] / a[1]};
    case op::AND:
        return a[0] & a[1];
    case op::OR:
        return a[0] | a[1];
    case op::XOR:
        return a[0] ^ a[1];
    case op::NOT:
        return ~a[0];
    case op::SHL:
        return a[0] >= 256 ? u256{0} : u256{a[1] << static_cast<unsigned>(a[0])};
    case op::SHR:
        return a[0] >= 256 ? u256{0} : u256{a[1] >> static_cast<unsigned>(a[0])};
    case op::EXP:
    {
        u256 base = a[0];
        u256 e = a[1];
        u256 r = 1;
        while (e != 0)
        {
            if ((e & 1) != 0)
                r *= base;
            base *= base;
            e >>= 1;
        }
        return r;
    }
    default:
        return std::nullopt;
    }
}

bool is_zero(const ConstSet& s)
{
    return s.single() && s.only() == 0;
}

std::size_t fold_arity(std::uint8_t opcode)
{
    switch (opcode)
    {
    case op::ADD:
    case op::SUB:
    case op::MUL:
    case op::DIV:
    case op::AND:
    case op::OR:
    case op::XOR:
    case op::SHL:
    case op::SHR:
    case op::EXP:
        return 2;
    case op::NOT:
        return 1;
    default:
        return 0;
    }
}
}  // namespace

ConstSet fold(std::uint8_t opcode, std::span<const ConstSet> args)
{
    const auto arity = fold_arity(opcode);
    if (arity == 0 || args.size() != arity)
        return ConstSet::unknown();

    // Absorbing zero operands.
    if ((opcode == op::AND || opcode == op::MUL) && (is_zero(args[0]) || is_zero(args[1])))
        return ConstSet::of(0);
    if (opcode == op::DIV && (is_zero(args[0]) || is_zero(args[1])))
        return ConstSet::of(0);

    for (const auto& a : args)
        if (!a.known())
            return ConstSet::unknown();

    ConstSet out;
    bool first = true;
    std::vector<u256> operands(arity);
    std::vector<std::size_t> idx(arity, 0);
    while (true)
    {
        for (std::size_t k = 0; k < arity; ++k)
            operands[k] = args[k].values()[idx[k]];
        const auto r = fold_one(opcode, operands);
        if (!r)
            return ConstSet::unknown();
        if (first)
        {
            out = ConstSet::of(*r);
            first = false;
        }
        else
        {
            out.insert(*r);
            if (!out.known())
                return out;
        }
        std::size_t k = 0;
        for (; k < arity; ++k)
        {
            if (++idx[k] < args[k].values().size())
                break;
            idx[k] = 0;
        }
        if (k == arity)
            break;
    }
    return out;
}

Value fold_constants(const RtlStatement& stmt, const ConstEnv& env)
{
    if (stmt.is_const())
        return stmt.args.front();
    std::vector<ConstSet> consts;
    consts.reserve(stmt.args.size());
    for (const auto& a : stmt.args)
    {
        switch (a.kind)
        {
        case ValueKind::Const:
            consts.push_back(ConstSet::of(a.constant));
            break;
        case ValueKind::Reg:
        {
            const auto it = a.regs.size() == 1 ? env.find(a.regs.front()) : env.end();
            consts.push_back(it != env.end() ? ConstSet::of(it->second) : ConstSet::unknown());
            break;
        }
        case ValueKind::Unknown:
            consts.push_back(ConstSet::unknown());
            break;
        }
    }
    const auto r = fold(stmt.opcode_byte, consts);
    return r.single() ? Value::make_const(r.only()) : Value::unknown();
}

std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> Program::jump_targets() const
{
    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> out;
    for (const auto& b : blocks)
    {
        const auto& t = b.terminator;
        if ((t.kind == TerminatorKind::Jump || t.kind == TerminatorKind::JumpI) &&
            !b.statements.empty())
            out[b.statements.back().pc] = t.targets;
    }
    return out;
}

const BasicBlock* Program::block_at(std::uint64_t entry_pc) const
{
    const auto it = std::lower_bound(blocks.begin(), blocks.end(), entry_pc,
        [](const BasicBlock& b, std::uint64_t pc) { return b.entry_pc < pc; });
    return it != blocks.end() && it->entry_pc == entry_pc ? &*it : nullptr;
}

namespace
{
struct Fixpoint
{
    std::span<const Instruction> instructions;
    std::span<const BlockSkeleton> skeletons;
    std::vector<RegId> first_reg;
    std::map<std::uint64_t, std::size_t> block_by_pc;
    std::set<std::uint64_t> jumpdests;

    std::vector<std::optional<AbstractStack>> entry;
    std::vector<bool> frozen;
    std::vector<BasicBlock> blocks;
    std::set<std::size_t> worklist;
    std::size_t depth_mismatches = 0;

    Fixpoint(std::span<const Instruction> ins, std::span<const BlockSkeleton> sk)
      : instructions(ins), skeletons(sk)
    {
        RegId next = 1;
        first_reg.reserve(sk.size());
        blocks.resize(sk.size());
        entry.resize(sk.size());
        frozen.assign(sk.size(), false);
        for (std::size_t b = 0; b < sk.size(); ++b)
        {
            first_reg.push_back(next);
            block_by_pc.emplace(sk[b].entry_pc, b);
            for (std::size_t i = sk[b].first; i < sk[b].last; ++i)
                next += defines_register(ins[i]) ? 1 : 0;
            blocks[b].entry_pc = sk[b].entry_pc;
            blocks[b].first_instruction = sk[b].first;
            blocks[b].instruction_count = sk[b].last - sk[b].first;
        }
        for (const auto& i : ins)
            if (i.byte() == op::JUMPDEST)
                jumpdests.insert(i.pc);
    }

    Terminator terminate(std::size_t b, const LiftResult& r) const
    {
        Terminator t;
        const auto& last = instructions[skeletons[b].last - 1];
        const auto next = b + 1 < skeletons.size()
                              ? std::optional<std::uint64_t>{skeletons[b + 1].entry_pc}
                              : std::nullopt;
        const auto byte = last.byte();
        if (byte == op::JUMP || byte == op::JUMPI)
        {
            t.kind = byte == op::JUMP ? TerminatorKind::Jump : TerminatorKind::JumpI;
            const auto target = r.statements.back().args.front().constants();
            if (!target.known())
                t.unresolved = true;
            else
                for (const auto& v : target.values())
                    if (v <= u256{std::numeric_limits<std::uint64_t>::max()} &&
                        jumpdests.contains(static_cast<std::uint64_t>(v)))
                        t.targets.push_back(static_cast<std::uint64_t>(v));
            if (byte == op::JUMPI)
                t.fallthrough = next;
        }
        else if (is_block_terminator(byte) || !next)
        {
            t.kind = TerminatorKind::Halt;
        }
        else
        {
            t.kind = TerminatorKind::Fallthrough;
            t.fallthrough = next;
        }
        return t;
    }

    void propagate(const AbstractStack& exit, std::uint64_t target_pc)
    {
        const auto s = block_by_pc.at(target_pc);
        if (!entry[s])
        {
            entry[s] = exit;
            worklist.insert(s);
            return;
        }
        if (frozen[s])
            return;
        bool mismatch = false;
        auto joined = join(*entry[s], exit, &mismatch);
        depth_mismatches += mismatch ? 1 : 0;
        if (joined == *entry[s])
            return;
        if (blocks[s].lifts >= max_lift_passes)
        {
            // Widen: slots still moving become Unknown and the entry is frozen.
            const auto& old = *entry[s];
            const auto depth = joined.depth();
            for (std::size_t i = 0; i < depth; ++i)
            {
                const auto from_top = depth - 1 - i;
                if (from_top >= old.depth() ||
                    old.slots[old.depth() - 1 - from_top] != joined.slots[i])
                    joined.slots[i] = Value::unknown();
            }
            frozen[s] = true;
            blocks[s].widened = true;
        }
        entry[s] = std::move(joined);
        worklist.insert(s);
    }

    void run()
    {
        std::size_t next_root = 0;
        while (true)
        {
            while (!worklist.empty())
            {
                const auto b = *worklist.begin();
                worklist.erase(worklist.begin());
                const auto& sk = skeletons[b];
                auto r = lift_block(instructions.subspan(sk.first, sk.last - sk.first), *entry[b],
                    first_reg[b]);
                auto& blk = blocks[b];
                blk.terminator = terminate(b, r);
                blk.entry = *entry[b];
                blk.exit = r.exit;
                blk.underflows = r.underflows;
                blk.statements = std::move(r.statements);
                ++blk.lifts;
                for (const auto t : blk.terminator.targets)
                    propagate(blk.exit, t);
                if (blk.terminator.fallthrough)
                    propagate(blk.exit, *blk.terminator.fallthrough);
            }
            while (next_root < skeletons.size() && entry[next_root])
                ++next_root;
            if (next_root == skeletons.size())
                break;
            entry[next_root] = AbstractStack{};
            worklist.insert(next_root);
        }
    }
};
}  // namespace

Program resolve_jumps(std::span<const Instruction> instructions, std::span<const BlockSkeleton> blocks)
{
    Fixpoint fp(instructions, blocks);
    fp.run();

    Program p;
    p.blocks = std::move(fp.blocks);
    p.diagnostics.depth_mismatches = fp.depth_mismatches;
    for (const auto& b : p.blocks)
    {
        p.diagnostics.unresolved_jumps += b.terminator.unresolved ? 1 : 0;
        p.diagnostics.stack_underflows += b.underflows;
        p.diagnostics.widened_blocks += b.widened ? 1 : 0;
    }
    std::size_t defs = 0;
    for (const auto& i : instructions)
        defs += defines_register(i) ? 1 : 0;
    p.register_count = static_cast<RegId>(defs);
    return p;
}

Program lift_program(std::span<const Instruction> instructions)
{
    const auto blocks = split_blocks(instructions);
    return resolve_jumps(instructions, blocks);
}

}  // namespace seasoned
