#include "seasoned/types.hpp"

namespace seasoned
{
std::string to_hex(const u256& v)
{
    if (v == 0)
        return "0x0";
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    u256 x = v;
    while (x != 0)
    {
        out.push_back(digits[static_cast<unsigned>(x & 0xf)]);
        x >>= 4;
    }
    out += "x0";
    return {out.rbegin(), out.rend()};
}

std::string to_hex(BytesView bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out = "0x";
    out.reserve(2 + bytes.size() * 2);
    for (const auto b : bytes)
    {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

u256 u256_from_bytes(BytesView big_endian)
{
    u256 v = 0;
    for (const auto b : big_endian)
        v = (v << 8) | b;
    return v;
}

}  // namespace seasoned
