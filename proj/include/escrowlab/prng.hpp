#pragma once

#include <cstdint>
#include <random>

#include "escrowlab/bytes.hpp"

namespace escrowlab {

// All randomness in a scenario flows from one seeded engine so that replays
// with the same seed are byte-identical. mt19937_64 output is fully specified
// by the standard, which keeps transcripts portable across toolchains.
class Prng {
public:
    explicit Prng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // value in [0, bound)
    std::uint64_t next_below(std::uint64_t bound) {
        // Desk-scale simulation; modulo bias is irrelevant here.
        return engine_() % bound;
    }

    Bytes next_bytes(std::size_t n) {
        Bytes out;
        out.reserve(n);
        while (out.size() < n) {
            std::uint64_t v = engine_();
            for (int shift = 56; shift >= 0 && out.size() < n; shift -= 8) {
                out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
            }
        }
        return out;
    }

    // Derives an independent child stream; used to give each agent its own
    // nonce source while everything still descends from the scenario seed.
    Prng fork(std::uint64_t salt) { return Prng(next_u64() ^ salt); }

private:
    std::mt19937_64 engine_;
};

}  // namespace escrowlab
