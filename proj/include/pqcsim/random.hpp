#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pqcsim {

std::uint64_t splitmix64(std::uint64_t x);

// Order-sensitive hash of a key tuple into a 64-bit stream seed.
std::uint64_t hash_seed(std::initializer_list<std::uint64_t> parts);

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    std::uint64_t bits() { return engine_(); }
    double uniform();  // open interval (0, 1)
    double normal();
    std::size_t below(std::size_t n);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace pqcsim
