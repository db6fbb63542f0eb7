#pragma once

#include <cstdint>
#include <random>

namespace macopp {

// splitmix64 finaliser, used to derive independent RNG streams from a
// master seed and a task index.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

// Stream for task `index` under `master_seed`: seed ^ index pushed through
// the 64-bit mix so that neighbouring indices decorrelate.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(mix64(master_seed ^ mix64(index)));
}

}  // namespace macopp
