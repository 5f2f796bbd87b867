#pragma once

// Hash commitment over a single-bit choice: digest = SHA-256(choice byte || nonce).

#include <cstdint>
#include <stdexcept>

#include "escrowlab/bytes.hpp"
#include "escrowlab/prng.hpp"
#include "escrowlab/sha256.hpp"

namespace escrowlab {

struct Nonce {
    Bytes bytes;  // 32 bytes, drawn from the scenario PRNG

    static Nonce draw(Prng& rng) { return Nonce{rng.next_bytes(32)}; }

    bool operator==(const Nonce&) const = default;
};

struct Commitment {
    Digest digest{};

    bool operator==(const Commitment&) const = default;

    std::string hex() const { return hex_encode(digest); }

    static Commitment from_hex(std::string_view h) {
        Bytes raw = hex_decode(h);
        if (raw.size() != 32) throw std::invalid_argument("commitment: need 32 bytes");
        Commitment c;
        std::copy(raw.begin(), raw.end(), c.digest.begin());
        return c;
    }

    static Commitment from_bytes(const Bytes& raw) {
        if (raw.size() != 32) throw std::invalid_argument("commitment: need 32 bytes");
        Commitment c;
        std::copy(raw.begin(), raw.end(), c.digest.begin());
        return c;
    }
};

inline Bytes commit_encoding(int choice, const Nonce& nonce) {
    Bytes msg;
    msg.push_back(static_cast<std::uint8_t>(choice));
    msg.insert(msg.end(), nonce.bytes.begin(), nonce.bytes.end());
    return msg;
}

inline Commitment commit(int choice, const Nonce& nonce) {
    if (choice != 0 && choice != 1) throw std::invalid_argument("commit: choice must be 0 or 1");
    return Commitment{sha256(commit_encoding(choice, nonce))};
}

inline bool verify_opening(int choice, const Nonce& nonce, const Commitment& c) {
    if (choice != 0 && choice != 1) return false;
    return commit(choice, nonce) == c;
}

}  // namespace escrowlab
