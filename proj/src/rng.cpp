#include "nrsim/rng.hpp"

namespace nrsim
{
namespace
{
constexpr std::uint32_t kWeylA = 0x9E3779B9;
constexpr std::uint32_t kWeylB = 0xBB67AE85;
constexpr std::uint32_t kMulA = 0xD2511F53;
constexpr std::uint32_t kMulB = 0xCD9E8D57;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi)
{
    std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(product);
    hi = static_cast<std::uint32_t>(product >> 32);
}
}  // namespace

PhiloxStream::PhiloxStream(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}
    , stream_(stream)
{
}

PhiloxStream::Block PhiloxStream::block(Block ctr, Key key)
{
    for (int round = 0; round < 10; ++round)
    {
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kMulA, ctr[0], lo0, hi0);
        mulhilo(kMulB, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeylA;
        key[1] += kWeylB;
    }
    return ctr;
}

std::uint64_t PhiloxStream::next()
{
    // Each Philox block yields two 64-bit outputs.
    std::uint64_t half = counter_ & 1u;
    if (half == 0)
    {
        std::uint64_t blk = counter_ >> 1;
        buffer_ = block({static_cast<std::uint32_t>(blk),
                         static_cast<std::uint32_t>(blk >> 32),
                         static_cast<std::uint32_t>(stream_),
                         static_cast<std::uint32_t>(stream_ >> 32)},
                        key_);
    }
    ++counter_;
    auto lo = buffer_[2 * half];
    auto hi = buffer_[2 * half + 1];
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

double PhiloxStream::uniform()
{
    return static_cast<double>(this->next() >> 11) * 0x1.0p-53;
}

}  // namespace nrsim
