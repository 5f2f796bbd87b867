#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace escrowlab {

using Money = std::int64_t;
using Round = std::int64_t;
using AccountId = std::string;
using ContractId = std::string;

// The two transacting roles. Alice buys, Bob sells.
enum class Party : int { alice = 0, bob = 1 };

inline Party opponent(Party p) {
    return p == Party::alice ? Party::bob : Party::alice;
}

inline const char* party_name(Party p) {
    return p == Party::alice ? "alice" : "bob";
}

inline Party party_from_name(const std::string& s) {
    if (s == "alice") return Party::alice;
    if (s == "bob") return Party::bob;
    throw std::invalid_argument("unknown party: " + s);
}

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownAccount : std::runtime_error {
    explicit UnknownAccount(const std::string& id) : std::runtime_error("unknown account: " + id) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace escrowlab
