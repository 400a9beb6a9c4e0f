#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace xmodal {

uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 14695981039346656037ull);
uint64_t fnv1a64(std::string_view s, uint64_t h = 14695981039346656037ull);

// xoshiro256** seeded through splitmix64. One master stream per run; child
// streams are derived by split(tag) from the original seed, so adding a
// consumer does not shift the draws of any other module.
class Rng {
public:
    explicit Rng(uint64_t seed = 0) { reseed(seed); }

    void reseed(uint64_t seed);
    uint64_t seed() const { return seed_; }

    uint64_t next_u64();
    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);   // [lo, hi)
    double normal();                        // standard normal, Box-Muller
    int uniform_int(int n);                 // [0, n), n > 0

    Rng split(std::string_view tag) const;
    Rng split(std::string_view tag, uint64_t index) const;

    std::array<uint64_t, 4> state() const { return {s_[0], s_[1], s_[2], s_[3]}; }
    void set_state(const std::array<uint64_t, 4>& s, uint64_t seed);

private:
    uint64_t s_[4] = {};
    uint64_t seed_ = 0;
};

}  // namespace xmodal
