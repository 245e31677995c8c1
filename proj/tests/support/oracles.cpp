#include "oracles.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmp.h>

namespace seasoned::testing
{
namespace
{
class Mpz
{
public:
    Mpz() { mpz_init(v_); }
    explicit Mpz(const u256& x) { mpz_init_set_str(v_, x.str(0, std::ios_base::hex).c_str(), 16); }
    Mpz(const Mpz& o) { mpz_init_set(v_, o.v_); }
    Mpz& operator=(const Mpz& o)
    {
        mpz_set(v_, o.v_);
        return *this;
    }
    ~Mpz() { mpz_clear(v_); }

    mpz_ptr get() { return v_; }
    mpz_srcptr get() const { return v_; }

    u256 to_u256() const
    {
        char* s = mpz_get_str(nullptr, 16, v_);
        u256 out{std::string("0x") + s};
        void (*freefunc)(void*, size_t);
        mp_get_memory_functions(nullptr, nullptr, &freefunc);
        freefunc(s, std::char_traits<char>::length(s) + 1);
        return out;
    }

private:
    mpz_t v_;
};

void wrap(Mpz& x)
{
    mpz_fdiv_r_2exp(x.get(), x.get(), 256);
}

Mpz word_mask()
{
    Mpz m;
    mpz_setbit(m.get(), 256);
    mpz_sub_ui(m.get(), m.get(), 1);
    return m;
}
}  // namespace

u256 evm_binary(std::uint8_t opcode, const u256& a_in, const u256& b_in)
{
    const Mpz a(a_in), b(b_in);
    Mpz r;
    switch (opcode)
    {
    case 0x01:
        mpz_add(r.get(), a.get(), b.get());
        break;
    case 0x02:
        mpz_mul(r.get(), a.get(), b.get());
        break;
    case 0x03:
        mpz_sub(r.get(), a.get(), b.get());
        break;
    case 0x04:
        if (mpz_sgn(b.get()) != 0)
            mpz_fdiv_q(r.get(), a.get(), b.get());
        break;
    case 0x06:
        if (mpz_sgn(b.get()) != 0)
            mpz_fdiv_r(r.get(), a.get(), b.get());
        break;
    case 0x0a: {
        Mpz mod;
        mpz_setbit(mod.get(), 256);
        mpz_powm(r.get(), a.get(), b.get(), mod.get());
        break;
    }
    case 0x10:
        mpz_set_ui(r.get(), mpz_cmp(a.get(), b.get()) < 0);
        break;
    case 0x11:
        mpz_set_ui(r.get(), mpz_cmp(a.get(), b.get()) > 0);
        break;
    case 0x14:
        mpz_set_ui(r.get(), mpz_cmp(a.get(), b.get()) == 0);
        break;
    case 0x16:
        mpz_and(r.get(), a.get(), b.get());
        break;
    case 0x17:
        mpz_ior(r.get(), a.get(), b.get());
        break;
    case 0x18:
        mpz_xor(r.get(), a.get(), b.get());
        break;
    case 0x1a:  // BYTE i x: byte i counted from the most significant end
        if (mpz_cmp_ui(a.get(), 32) < 0)
        {
            const auto i = mpz_get_ui(a.get());
            mpz_fdiv_q_2exp(r.get(), b.get(), 8 * (31 - i));
            mpz_fdiv_r_2exp(r.get(), r.get(), 8);
        }
        break;
    case 0x1b:  // SHL shift value
        if (mpz_cmp_ui(a.get(), 256) < 0)
            mpz_mul_2exp(r.get(), b.get(), mpz_get_ui(a.get()));
        break;
    case 0x1c:
        if (mpz_cmp_ui(a.get(), 256) < 0)
            mpz_fdiv_q_2exp(r.get(), b.get(), mpz_get_ui(a.get()));
        break;
    default:
        throw std::invalid_argument("evm_binary: unsupported opcode");
    }
    wrap(r);
    return r.to_u256();
}

u256 evm_unary(std::uint8_t opcode, const u256& a_in)
{
    const Mpz a(a_in);
    Mpz r;
    if (opcode == 0x19)
        mpz_xor(r.get(), a.get(), word_mask().get());
    else if (opcode == 0x15)
        mpz_set_ui(r.get(), mpz_sgn(a.get()) == 0);
    else
        throw std::invalid_argument("evm_unary: unsupported opcode");
    return r.to_u256();
}

namespace
{
struct Arity
{
    int in;
    int out;
};

/// Hand-written subset of the opcode table: what the generator can emit.
std::optional<Arity> arity(std::uint8_t b)
{
    if (b >= 0x5f && b <= 0x7f)
        return Arity{0, 1};
    if (b >= 0x80 && b <= 0x8f)
        return Arity{b - 0x7f, b - 0x7f + 1};
    if (b >= 0x90 && b <= 0x9f)
        return Arity{b - 0x8f + 1, b - 0x8f + 1};
    switch (b)
    {
    case 0x00:
    case 0x5b:
    case 0xfe:
        return Arity{0, 0};
    case 0x01: case 0x02: case 0x03: case 0x04: case 0x06: case 0x0a: case 0x10: case 0x11:
    case 0x14: case 0x16: case 0x17: case 0x18: case 0x1a: case 0x1b: case 0x1c:
        return Arity{2, 1};
    case 0x15: case 0x19: case 0x31: case 0x35: case 0x51: case 0x54:
        return Arity{1, 1};
    case 0x30: case 0x33: case 0x34: case 0x36: case 0x3d: case 0x42: case 0x43: case 0x5a:
        return Arity{0, 1};
    case 0x37: case 0x39: case 0x3e:
        return Arity{3, 0};
    case 0x3c:
        return Arity{4, 0};
    case 0x50: case 0x56: case 0xff:
        return Arity{1, 0};
    case 0x52: case 0x53: case 0x55: case 0x57: case 0xf3: case 0xfd:
        return Arity{2, 0};
    case 0xf1:
        return Arity{7, 1};
    case 0xfa:
        return Arity{6, 1};
    default:
        return std::nullopt;
    }
}

bool halts(std::uint8_t b)
{
    return b == 0x00 || b == 0xf3 || b == 0xfd || b == 0xfe || b == 0xff;
}

using Word = std::optional<u256>;  // nullopt: opaque
using Stack = std::vector<Word>;   // top at the end

struct Decoded
{
    std::uint64_t pc;
    std::uint8_t byte;
    u256 imm;
};
}  // namespace

JumpOracle enumerate_jumps(BytesView code)
{
    std::vector<Decoded> ins;
    std::map<std::uint64_t, std::size_t> at;
    for (std::size_t pc = 0; pc < code.size();)
    {
        const auto b = code[pc];
        const std::size_t w = b >= 0x5f && b <= 0x7f ? b - 0x5f : 0;
        u256 imm = 0;
        for (std::size_t k = 0; k < w; ++k)
            imm = (imm << 8) | (pc + 1 + k < code.size() ? code[pc + 1 + k] : 0);
        at.emplace(pc, ins.size());
        ins.push_back({pc, b, imm});
        pc += 1 + w;
    }

    std::set<std::uint64_t> jumpdests, starts;
    for (std::size_t i = 0; i < ins.size(); ++i)
    {
        if (i == 0 || ins[i].byte == 0x5b)
            starts.insert(ins[i].pc);
        const auto b = ins[i].byte;
        if (b == 0x5b)
            jumpdests.insert(ins[i].pc);
        if (i + 1 < ins.size() && (b == 0x56 || b == 0x57 || halts(b) || !arity(b)))
            starts.insert(ins[i + 1].pc);
    }

    JumpOracle out;
    std::set<std::pair<std::uint64_t, Stack>> seen;
    std::set<std::uint64_t> entered;
    std::deque<std::pair<std::uint64_t, Stack>> work;
    const auto enter = [&](std::uint64_t pc, const Stack& s) {
        entered.insert(pc);
        if (seen.emplace(pc, s).second)
            work.emplace_back(pc, s);
    };

    const auto run = [&](std::uint64_t pc0, Stack s) {
        std::size_t i = at.at(pc0);
        const auto pop = [&]() -> Word {
            if (s.empty())
                return std::nullopt;
            auto v = s.back();
            s.pop_back();
            return v;
        };
        for (bool first = true; i < ins.size(); ++i, first = false)
        {
            const auto& d = ins[i];
            if (!first && starts.contains(d.pc))
            {
                enter(d.pc, s);
                return;
            }
            const auto b = d.byte;
            const auto ar = arity(b);
            if (!ar)
                throw std::logic_error("oracle: opcode outside the generated subset");
            if (b >= 0x5f && b <= 0x7f)
                s.push_back(d.imm);
            else if (b >= 0x80 && b <= 0x8f)
            {
                const std::size_t n = b - 0x7f;
                s.push_back(n <= s.size() ? s[s.size() - n] : Word{});
            }
            else if (b >= 0x90 && b <= 0x9f)
            {
                const std::size_t n = b - 0x8f;
                while (s.size() < n + 1)
                    s.insert(s.begin(), Word{});
                std::swap(s.back(), s[s.size() - 1 - n]);
            }
            else if (b == 0x56 || b == 0x57)
            {
                const auto t = pop();
                if (b == 0x57)
                    pop();
                if (!t)
                    out.unresolved.insert(d.pc);
                else
                {
                    auto& set = out.targets[d.pc];
                    if (*t <= u256{UINT64_MAX} && jumpdests.contains(static_cast<std::uint64_t>(*t)))
                    {
                        set.insert(static_cast<std::uint64_t>(*t));
                        enter(static_cast<std::uint64_t>(*t), s);
                    }
                }
                if (b == 0x56)
                    return;
                // JUMPI: the other branch continues at the next instruction
                if (i + 1 < ins.size())
                    enter(ins[i + 1].pc, s);
                return;
            }
            else if (halts(b))
                return;
            else
            {
                std::vector<Word> args;
                for (int k = 0; k < ar->in; ++k)
                    args.push_back(pop());
                if (ar->out == 0)
                    continue;
                Word r;
                const bool all = std::all_of(args.begin(), args.end(), [](const Word& w) { return w.has_value(); });
                if (all && ar->in == 2 && b <= 0x1c)
                    r = evm_binary(b, *args[0], *args[1]);
                else if (all && ar->in == 1 && (b == 0x15 || b == 0x19))
                    r = evm_unary(b, *args[0]);
                s.push_back(r);
            }
        }
    };

    enter(0, {});
    while (true)
    {
        while (!work.empty())
        {
            auto [pc, s] = std::move(work.front());
            work.pop_front();
            run(pc, std::move(s));
        }
        const auto next = std::find_if(starts.begin(), starts.end(),
            [&](std::uint64_t pc) { return !entered.contains(pc); });
        if (next == starts.end())
            break;
        enter(*next, {});
    }
    if (code.empty())
        out.targets.clear();
    return out;
}

std::set<std::pair<std::uint64_t, std::uint64_t>> brute_force_effects(std::span<const MemAccess> accesses)
{
    std::vector<MemAccess> a(accesses.begin(), accesses.end());
    std::sort(a.begin(), a.end(), [](const MemAccess& x, const MemAccess& y) { return x.pc < y.pc; });
    const auto same = [](const MemAccess& x, const MemAccess& y) {
        return x.storage == y.storage && x.address == y.address;
    };
    std::set<std::pair<std::uint64_t, std::uint64_t>> out;
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t i = 0; i < j; ++i)
        {
            if (!same(a[i], a[j]) || (!a[i].store && !a[j].store))
                continue;
            bool blocked = false;
            for (std::size_t k = i + 1; k < j && !blocked; ++k)
                blocked = a[k].store && same(a[k], a[i]);
            if (!blocked)
                out.emplace(a[j].pc, a[i].pc);
        }
    return out;
}

}  // namespace seasoned::testing
