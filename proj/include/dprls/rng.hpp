#pragma once

// Counter-based random streams (Philox4x32-10). A stream is fully determined
// by (seed, stream id), so every noise source in an experiment gets its own
// independent, reproducible sequence regardless of draw order elsewhere.

#include <array>
#include <cstdint>

namespace dprls {

// Well-known stream ids. Participant-indexed roles add the participant
// index (0-based) to the base id.
namespace stream_id {
inline constexpr std::uint64_t system_noise = 0x1000;
inline constexpr std::uint64_t output_perturbation = 0x2000;
inline constexpr std::uint64_t input_perturbation = 0x3000;
inline constexpr std::uint64_t input_signal = 0x4000;
inline constexpr std::uint64_t test_scratch = 0xF000;
}  // namespace stream_id

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1); 53 random bits, never 0 or 1.
    double uniform_open();
    // Uniform on (-1/2, 1/2), never 0 exactly.
    double uniform_centered() { return uniform_open() - 0.5; }
    double standard_normal();
    double normal(double variance);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int available_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

// Philox4x32-10 block function; exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

}  // namespace dprls
