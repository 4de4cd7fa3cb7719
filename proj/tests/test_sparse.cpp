#include <doctest.h>

#include <random>

#include "nrsim/sparse.hpp"

using namespace nrsim;

TEST_CASE("duplicates are summed and rows sorted")
{
    CsrMatrix m(3, {{2, 0, 1.0}, {0, 2, 2.0}, {0, 1, 3.0}, {0, 2, 0.5}, {1, 1, Complex(0, 1)}});
    CHECK(m.nonzeros() == 4);
    CHECK(m.at(0, 2) == Complex(2.5));
    CHECK(m.at(0, 1) == Complex(3.0));
    CHECK(m.at(1, 0) == Complex(0.0));
    auto cols = m.row_cols(0);
    REQUIRE(cols.size() == 2);
    CHECK(cols[0] == 1);
    CHECK(cols[1] == 2);
    CHECK(m.row_cols(2).size() == 1);
}

TEST_CASE("apply matches a dense product")
{
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1, 1);
    std::size_t const n = 6;
    std::vector<Triplet> t;
    std::vector<Complex> dense(n * n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if ((r * 7 + c * 3) % 4 == 0)
            {
                Complex v(u(gen), u(gen));
                t.push_back({r, c, v});
                dense[r * n + c] += v;
            }
    CsrMatrix m(n, t);
    std::vector<Complex> x(n), y(n);
    for (auto& v : x)
        v = {u(gen), u(gen)};
    m.apply(x, y);
    for (std::size_t r = 0; r < n; ++r)
    {
        Complex ref = 0;
        for (std::size_t c = 0; c < n; ++c)
            ref += dense[r * n + c] * x[c];
        CHECK(std::abs(y[r] - ref) < 1e-14);
    }
}

TEST_CASE("Hermitian check")
{
    CHECK(CsrMatrix(2, {{0, 1, Complex(1, 2)}, {1, 0, Complex(1, -2)}}).is_hermitian());
    CHECK_FALSE(CsrMatrix(2, {{0, 1, Complex(1, 2)}}).is_hermitian());
    CHECK_FALSE(CsrMatrix(2, {{0, 0, Complex(0, 1)}}).is_hermitian());
}

TEST_CASE("triplets round-trip")
{
    CsrMatrix m(3, {{1, 2, 4.0}, {0, 0, 1.0}});
    CsrMatrix again(3, m.triplets());
    CHECK(again.at(1, 2) == Complex(4.0));
    CHECK(again.at(0, 0) == Complex(1.0));
    CHECK(again.nonzeros() == 2);
}
