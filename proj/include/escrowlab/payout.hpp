#pragma once

// Payout and net-payoff tables for the two-party sales escrow.
//
// Choices are a single bit per party: 1 = "the good was delivered",
// 0 = "not delivered". Deposits: the buyer (Alice) puts down 2x, the seller
// (Bob) x; a variant has both parties deposit 2x, which changes no analysis.

#include <array>
#include <stdexcept>

#include "escrowlab/common.hpp"

namespace escrowlab {

enum class DepositVariant {
    main,     // Alice 2x, Bob x
    both_2x,  // Alice 2x, Bob 2x
};

inline Money required_deposit(Party p, Money x, DepositVariant v) {
    if (p == Party::alice) return 2 * x;
    return v == DepositVariant::main ? x : 2 * x;
}

struct PayoutResult {
    Money pay_alice = 0;
    Money pay_bob = 0;
    Money burned = 0;

    Money total() const { return pay_alice + pay_bob + burned; }
    bool operator==(const PayoutResult&) const = default;
};

// Gross payouts from the pot of deposits:
//   (0,0) -> refund (2x, x); (1,1) -> transfer, (x, 2x);
//   disagreement -> everything burns.
inline PayoutResult classical_payout(int choice_alice, int choice_bob, Money x,
                                     DepositVariant v = DepositVariant::main) {
    if ((choice_alice != 0 && choice_alice != 1) || (choice_bob != 0 && choice_bob != 1)) {
        throw std::invalid_argument("classical_payout: choices must be bits");
    }
    const Money da = required_deposit(Party::alice, x, v);
    const Money db = required_deposit(Party::bob, x, v);
    if (choice_alice == choice_bob) {
        if (choice_alice == 1) return PayoutResult{da - x, db + x, 0};  // (x, 2x) in the main variant
        return PayoutResult{da, db, 0};
    }
    return PayoutResult{0, 0, da + db};
}

// Same table with the initial deposits deducted: the players' total payoffs.
inline std::array<Money, 2> net_payoffs(int choice_alice, int choice_bob, Money x,
                                        DepositVariant v = DepositVariant::main) {
    const PayoutResult gross = classical_payout(choice_alice, choice_bob, x, v);
    return {gross.pay_alice - required_deposit(Party::alice, x, v),
            gross.pay_bob - required_deposit(Party::bob, x, v)};
}

// 2x2 normal-form game over the two declaration bits.
struct MatrixGame {
    // payoff[a][b] = (alice_net, bob_net) when Alice declares a and Bob declares b
    std::array<std::array<std::array<Money, 2>, 2>, 2> payoff{};

    Money alice(int a, int b) const { return payoff[a][b][0]; }
    Money bob(int a, int b) const { return payoff[a][b][1]; }
};

inline MatrixGame net_matrix(Money x, DepositVariant v = DepositVariant::main) {
    MatrixGame g;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            auto n = net_payoffs(a, b, x, v);
            g.payoff[a][b] = {n[0], n[1]};
        }
    }
    return g;
}

}  // namespace escrowlab
