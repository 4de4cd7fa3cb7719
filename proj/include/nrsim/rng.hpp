#pragma once

#include <array>
#include <cstdint>

namespace nrsim
{

/*!
 * Philox4x32-10 counter-based generator.
 *
 * A stream is identified by (seed, stream index); the draw counter and the
 * stream index together form the 128-bit Philox counter, so every draw is a
 * pure function of (seed, stream, draw number). Trajectory i of an ensemble
 * uses stream i of the master seed regardless of which worker runs it.
 */
class PhiloxStream
{
  public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    PhiloxStream(std::uint64_t seed, std::uint64_t stream);

    //! Raw Philox4x32-10 bijection.
    static Block block(Block counter, Key key);

    //! Next 64 random bits.
    std::uint64_t next();
    //! Uniform double in [0, 1) with 53 random bits.
    double uniform();

    std::uint64_t draws() const { return counter_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() { return this->next(); }

  private:
    Key key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;  // number of 64-bit draws taken
    Block buffer_{};
};

}  // namespace nrsim
