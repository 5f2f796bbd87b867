#pragma once

// Pure escrow state machines. These cores know nothing about the ledger:
// money movement is expressed as verdicts and settlement values, and the
// same core code backs the hosted contract, the mirror replica and the
// run enumerator, so all three see identical semantics.

#include <array>
#include <optional>
#include <string>

#include "escrowlab/commitment.hpp"
#include "escrowlab/common.hpp"
#include "escrowlab/ledger.hpp"
#include "escrowlab/payout.hpp"

namespace escrowlab {

enum class EscrowKind { classical, commit_reveal, safe_remote_purchase };

inline const char* escrow_kind_name(EscrowKind k) {
    switch (k) {
        case EscrowKind::classical: return "classical";
        case EscrowKind::commit_reveal: return "commit_reveal";
        case EscrowKind::safe_remote_purchase: return "safe_remote_purchase";
    }
    return "?";
}

struct EscrowParams {
    EscrowKind kind = EscrowKind::classical;
    Money x = 0;
    Round phase1_end = 0;         // deposits accepted in rounds [0, phase1_end)
    Round delivery_deadline = 0;  // phase 2 is [phase1_end, delivery_deadline)
    Round commit_end = 0;         // commit-reveal: commit window is [delivery_deadline, commit_end)
    Round phase3_end = 0;         // t: the contract settles when the round reaches this
    DepositVariant deposit_variant = DepositVariant::main;
    bool guess_defense = false;  // commit-reveal: enable the guess counter-claim
    AccountId buyer;             // alice
    AccountId seller;            // bob

    void validate() const {
        if (x <= 0) throw ConfigError("x must be a positive integer");
        if (!(0 < phase1_end && phase1_end < delivery_deadline && delivery_deadline < phase3_end)) {
            throw ConfigError("deadlines must satisfy 0 < phase1_end < delivery_deadline < phase3_end");
        }
        if (kind == EscrowKind::commit_reveal &&
            !(delivery_deadline < commit_end && commit_end < phase3_end)) {
            throw ConfigError("commit_end must lie strictly inside phase 3");
        }
    }

    const AccountId& id_of(Party p) const { return p == Party::alice ? buyer : seller; }

    std::optional<Party> party_of(const AccountId& id) const {
        if (id == buyer) return Party::alice;
        if (id == seller) return Party::bob;
        return std::nullopt;
    }

    Money deposit_of(Party p) const { return required_deposit(p, x, deposit_variant); }
    Money pot() const { return deposit_of(Party::alice) + deposit_of(Party::bob); }
};

enum class OutcomeClass {
    unsettled,
    agree_delivered,      // both effective choices 1
    agree_not_delivered,  // both effective choices 0
    disagree,             // effective choices differ -> burn
    guess_claim,          // pot claimed through the guess defense
    locked,               // safe-remote-purchase funds locked forever
    aborted,              // deposits incomplete at phase1_end, refunds issued
};

inline const char* outcome_name(OutcomeClass o) {
    switch (o) {
        case OutcomeClass::unsettled: return "unsettled";
        case OutcomeClass::agree_delivered: return "agree_delivered";
        case OutcomeClass::agree_not_delivered: return "agree_not_delivered";
        case OutcomeClass::disagree: return "disagree";
        case OutcomeClass::guess_claim: return "guess_claim";
        case OutcomeClass::locked: return "locked";
        case OutcomeClass::aborted: return "aborted";
    }
    return "?";
}

struct Settlement {
    PayoutResult payout;
    OutcomeClass outcome = OutcomeClass::unsettled;
    std::array<std::optional<int>, 2> effective_choice{};  // indexed by Party
    std::optional<Party> guess_winner;
    Money locked_amount = 0;

    bool operator==(const Settlement&) const = default;
};

// What a core wants done at a round boundary.
struct CoreEvent {
    enum class Kind { none, abort_refund, settle };
    Kind kind = Kind::none;
    std::array<Money, 2> refund{0, 0};  // abort: per-party refunds
    Settlement settlement;              // settle
};

// Deadline rule for missing/mismatched openings in the commit-reveal escrow:
// the default most favorable to the other party. With one opening on record
// the silent party is deemed to agree with it; with none, both default to 0
// and the deposits flow back.
inline std::pair<int, int> most_favorable_defaults(const std::optional<int>& revealed_alice,
                                                   const std::optional<int>& revealed_bob) {
    if (revealed_alice && revealed_bob) return {*revealed_alice, *revealed_bob};
    if (revealed_alice) return {*revealed_alice, *revealed_alice};
    if (revealed_bob) return {*revealed_bob, *revealed_bob};
    return {0, 0};
}

namespace detail {

// Deposit bookkeeping shared by all three escrows.
struct DepositLeg {
    std::array<bool, 2> paid{false, false};

    bool both() const { return paid[0] && paid[1]; }

    Reject pay(const EscrowParams& p, Party who, Money amount, Round r) {
        if (r >= p.phase1_end) return Reject::wrong_phase;
        if (paid[static_cast<int>(who)]) return Reject::already_deposited;
        if (amount != p.deposit_of(who)) return Reject::wrong_deposit_amount;
        paid[static_cast<int>(who)] = true;
        return Reject::none;
    }

    CoreEvent abort_event(const EscrowParams& p) const {
        CoreEvent ev;
        ev.kind = CoreEvent::Kind::abort_refund;
        for (int i = 0; i < 2; ++i) {
            if (paid[i]) ev.refund[i] = p.deposit_of(static_cast<Party>(i));
        }
        return ev;
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Classical escrow: declare a bit in phase 3; missing declarations default
// to 1 at the deadline; disagreement burns the pot.

class ClassicalCore {
public:
    explicit ClassicalCore(EscrowParams p) : p_(std::move(p)) {}

    const EscrowParams& params() const { return p_; }
    bool aborted() const { return aborted_; }
    bool settled() const { return settled_; }
    const Settlement& settlement() const { return settlement_; }
    std::optional<int> choice(Party who) const { return choice_[static_cast<int>(who)]; }
    bool deposited(Party who) const { return deposits_.paid[static_cast<int>(who)]; }

    Reject deposit(Party who, Money amount, Round r) {
        if (closed()) return Reject::contract_closed;
        return deposits_.pay(p_, who, amount, r);
    }

    Reject declare(Party who, int bit, Round r) {
        if (closed()) return Reject::contract_closed;
        if (bit != 0 && bit != 1) return Reject::bad_args;
        if (!in_phase3(r)) return Reject::wrong_phase;
        auto& c = choice_[static_cast<int>(who)];
        if (c.has_value()) return Reject::already_declared;
        c = bit;
        return Reject::none;
    }

    CoreEvent on_round(Round now) {
        if (closed()) return {};
        if (now >= p_.phase1_end && !deposits_.both()) {
            aborted_ = true;
            return deposits_.abort_event(p_);
        }
        if (now >= p_.phase3_end) {
            // Unset choices take the default (1).
            const int ca = choice_[0].value_or(1);
            const int cb = choice_[1].value_or(1);
            settled_ = true;
            settlement_.payout = classical_payout(ca, cb, p_.x, p_.deposit_variant);
            settlement_.effective_choice = {ca, cb};
            settlement_.outcome = ca == cb ? (ca == 1 ? OutcomeClass::agree_delivered
                                                      : OutcomeClass::agree_not_delivered)
                                           : OutcomeClass::disagree;
            CoreEvent ev;
            ev.kind = CoreEvent::Kind::settle;
            ev.settlement = settlement_;
            return ev;
        }
        return {};
    }

    bool in_phase3(Round r) const { return r >= p_.delivery_deadline && r < p_.phase3_end; }

private:
    bool closed() const { return aborted_ || settled_; }

    EscrowParams p_;
    detail::DepositLeg deposits_;
    std::array<std::optional<int>, 2> choice_;
    bool aborted_ = false;
    bool settled_ = false;
    Settlement settlement_;
};

// ---------------------------------------------------------------------------
// Commit-reveal escrow: phase 3 splits into a commit window (store digests)
// and a reveal window (open them). A missing or mismatched opening takes the
// default most favorable to the other party: the other party's revealed
// choice, or 0 for both when nobody revealed. The optional guess defense
// pays the whole pot to a party that opens the opponent's digest before the
// opponent does.

class CommitRevealCore {
public:
    explicit CommitRevealCore(EscrowParams p) : p_(std::move(p)) {}

    const EscrowParams& params() const { return p_; }
    bool aborted() const { return aborted_; }
    bool settled() const { return settled_; }
    const Settlement& settlement() const { return settlement_; }
    std::optional<Commitment> stored_hash(Party who) const { return hash_[static_cast<int>(who)]; }
    std::optional<int> recorded_choice(Party who) const { return recorded_[static_cast<int>(who)]; }
    bool revealed(Party who) const { return recorded_[static_cast<int>(who)].has_value(); }
    bool deposited(Party who) const { return deposits_.paid[static_cast<int>(who)]; }

    Reject deposit(Party who, Money amount, Round r) {
        if (closed()) return Reject::contract_closed;
        return deposits_.pay(p_, who, amount, r);
    }

    Reject commit_hash(Party who, const Commitment& c, Round r) {
        if (closed()) return Reject::contract_closed;
        if (!in_commit_window(r)) return Reject::wrong_phase;
        auto& h = hash_[static_cast<int>(who)];
        if (h.has_value()) return Reject::already_committed;
        h = c;
        return Reject::none;
    }

    Reject reveal(Party who, int choice, const Nonce& nonce, Round r) {
        if (closed()) return Reject::contract_closed;
        if (!in_reveal_window(r)) return Reject::wrong_phase;
        if (choice != 0 && choice != 1) return Reject::bad_args;
        const int i = static_cast<int>(who);
        if (!hash_[i].has_value()) return Reject::hash_mismatch;  // nothing to open
        if (recorded_[i].has_value()) return Reject::already_revealed;
        if (!verify_opening(choice, nonce, *hash_[i])) return Reject::hash_mismatch;
        recorded_[i] = choice;
        opening_[i] = std::pair<int, Nonce>(choice, nonce);
        return Reject::none;
    }

    // Guess the opponent's opening; a correct guess claims the entire pot.
    Reject guess(Party guesser, int choice, const Nonce& nonce, Round r) {
        if (closed()) return Reject::contract_closed;
        if (!p_.guess_defense) return Reject::defense_disabled;
        const int opp = static_cast<int>(opponent(guesser));
        if (!hash_[opp].has_value()) return Reject::guess_window_closed;  // not open yet
        if (recorded_[opp].has_value()) return Reject::already_revealed;
        if (r < p_.delivery_deadline || r >= p_.phase3_end) return Reject::guess_window_closed;
        if (choice != 0 && choice != 1) return Reject::bad_args;
        if (!verify_opening(choice, nonce, *hash_[opp])) return Reject::invalid_opening;
        settled_ = true;
        settlement_.outcome = OutcomeClass::guess_claim;
        settlement_.guess_winner = guesser;
        if (guesser == Party::alice) {
            settlement_.payout = PayoutResult{p_.pot(), 0, 0};
        } else {
            settlement_.payout = PayoutResult{0, p_.pot(), 0};
        }
        return Reject::none;
    }

    CoreEvent on_round(Round now) {
        if (closed()) return {};
        if (now >= p_.phase1_end && !deposits_.both()) {
            aborted_ = true;
            return deposits_.abort_event(p_);
        }
        if (now >= p_.phase3_end) {
            const auto [ca, cb] = effective_choices();
            settled_ = true;
            settlement_.payout = classical_payout(ca, cb, p_.x, p_.deposit_variant);
            settlement_.effective_choice = {ca, cb};
            settlement_.outcome = ca == cb ? (ca == 1 ? OutcomeClass::agree_delivered
                                                      : OutcomeClass::agree_not_delivered)
                                           : OutcomeClass::disagree;
            CoreEvent ev;
            ev.kind = CoreEvent::Kind::settle;
            ev.settlement = settlement_;
            return ev;
        }
        return {};
    }

    bool in_commit_window(Round r) const {
        return r >= p_.delivery_deadline && r < p_.commit_end;
    }
    bool in_reveal_window(Round r) const { return r >= p_.commit_end && r < p_.phase3_end; }

    // Public phase-3 state, for mirror-fidelity comparison.
    struct Snapshot {
        std::array<std::optional<std::string>, 2> hash_hex;
        std::array<std::optional<int>, 2> recorded;
        bool settled = false;
        OutcomeClass outcome = OutcomeClass::unsettled;
        std::array<std::optional<int>, 2> effective_choice{};

        bool operator==(const Snapshot&) const = default;
    };

    Snapshot snapshot() const {
        Snapshot s;
        for (int i = 0; i < 2; ++i) {
            if (hash_[i]) s.hash_hex[i] = hash_[i]->hex();
            s.recorded[i] = recorded_[i];
        }
        s.settled = settled_;
        s.outcome = settlement_.outcome;
        s.effective_choice = settlement_.effective_choice;
        return s;
    }

private:
    bool closed() const { return aborted_ || settled_; }

    std::pair<int, int> effective_choices() const {
        return most_favorable_defaults(recorded_[0], recorded_[1]);
    }

    EscrowParams p_;
    detail::DepositLeg deposits_;
    std::array<std::optional<Commitment>, 2> hash_;
    std::array<std::optional<std::pair<int, Nonce>>, 2> opening_;
    std::array<std::optional<int>, 2> recorded_;
    bool aborted_ = false;
    bool settled_ = false;
    Settlement settlement_;
};

// ---------------------------------------------------------------------------
// Safe remote purchase: funds unlock only on the buyer's confirmation.
// Without it they stay locked forever; nothing is refunded.

class SrpCore {
public:
    explicit SrpCore(EscrowParams p) : p_(std::move(p)) {}

    const EscrowParams& params() const { return p_; }
    bool aborted() const { return aborted_; }
    bool settled() const { return settled_; }
    const Settlement& settlement() const { return settlement_; }
    bool confirmed() const { return confirmed_; }
    bool deposited(Party who) const { return deposits_.paid[static_cast<int>(who)]; }

    Reject deposit(Party who, Money amount, Round r) {
        if (closed()) return Reject::contract_closed;
        return deposits_.pay(p_, who, amount, r);
    }

    Reject confirm(Party who, Round r) {
        if (closed()) return Reject::contract_closed;
        if (who != Party::alice) return Reject::unauthorized;
        if (r < p_.delivery_deadline || r >= p_.phase3_end) return Reject::wrong_phase;
        confirmed_ = true;
        settled_ = true;
        settlement_.outcome = OutcomeClass::agree_delivered;
        settlement_.payout =
            PayoutResult{p_.deposit_of(Party::alice) - p_.x, p_.deposit_of(Party::bob) + p_.x, 0};
        settlement_.effective_choice = {1, 1};
        return Reject::none;
    }

    CoreEvent on_round(Round now) {
        if (closed()) return {};
        if (now >= p_.phase1_end && !deposits_.both()) {
            aborted_ = true;
            return deposits_.abort_event(p_);
        }
        if (now >= p_.phase3_end) {
            settled_ = true;
            settlement_.outcome = OutcomeClass::locked;
            settlement_.locked_amount = p_.pot();
            CoreEvent ev;
            ev.kind = CoreEvent::Kind::settle;
            ev.settlement = settlement_;
            return ev;
        }
        return {};
    }

private:
    bool closed() const { return aborted_ || settled_; }

    EscrowParams p_;
    detail::DepositLeg deposits_;
    bool confirmed_ = false;
    bool aborted_ = false;
    bool settled_ = false;
    Settlement settlement_;
};

}  // namespace escrowlab
