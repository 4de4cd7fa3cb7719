#include <doctest.h>

#include <cmath>
#include <set>

#include "nrsim/rng.hpp"

using nrsim::PhiloxStream;

TEST_CASE("Philox4x32-10 known-answer vectors")
{
    using B = PhiloxStream::Block;
    using K = PhiloxStream::Key;
    CHECK(PhiloxStream::block(B{0, 0, 0, 0}, K{0, 0})
          == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(PhiloxStream::block(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff})
          == B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(PhiloxStream::block(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0})
          == B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct")
{
    PhiloxStream a(42, 0), b(42, 0), c(42, 1), d(43, 0);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i)
    {
        auto x = a.next();
        CHECK(x == b.next());
        CHECK(x != c.next());
        CHECK(x != d.next());
        seen.insert(x);
    }
    CHECK(seen.size() == 1000);
    CHECK(a.draws() == 1000);
}

TEST_CASE("uniform draws lie in [0, 1) with the right moments")
{
    PhiloxStream r(1, 0);
    constexpr int n = 200000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i)
    {
        double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sq += u * u;
    }
    double mean = sum / n;
    double var = sq / n - mean * mean;
    CHECK(std::abs(mean - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
    CHECK(std::abs(var - 1.0 / 12) < 1e-3);
}
