#pragma once

// Enumeration-facing view of an escrow's phase 3: a deterministic transition
// system over a small abstract action alphabet. The axiom checker walks every
// run of one of these; the bundled processes reuse the same payout and
// default rules as the hosted contracts.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "escrowlab/escrow_core.hpp"

namespace escrowlab {

struct ProcAction {
    enum class Kind {
        wait = 0,
        declare = 1,
        commit = 2,
        reveal = 3,
        reveal_garbage = 4,  // opening attempt that fails the hash check
        guess_hit = 5,       // guess with a correct opening of the opponent's digest
        guess_miss = 6,
        confirm = 7,
        bonus = 8,  // only mutants emit this
    };
    Kind kind = Kind::wait;
    int bit = 0;  // declare/commit payload

    bool operator==(const ProcAction&) const = default;

    std::string name() const {
        switch (kind) {
            case Kind::wait: return "wait";
            case Kind::declare: return "declare" + std::to_string(bit);
            case Kind::commit: return "commit" + std::to_string(bit);
            case Kind::reveal: return "reveal";
            case Kind::reveal_garbage: return "reveal_garbage";
            case Kind::guess_hit: return "guess_hit";
            case Kind::guess_miss: return "guess_miss";
            case Kind::confirm: return "confirm";
            case Kind::bonus: return "bonus";
        }
        return "?";
    }
};

// States are opaque encoded strings owned by the process; equality gives
// enumeration-level deduplication.
class EscrowProcess {
public:
    virtual ~EscrowProcess() = default;

    virtual std::string name() const = 0;
    virtual const EscrowParams& params() const = 0;

    virtual std::string initial() const = 0;
    virtual bool is_settled(const std::string& s) const = 0;
    virtual Settlement settlement(const std::string& s) const = 0;

    // Actions available to `p` at round `r` (wait always included while the
    // contract is live).
    virtual std::vector<ProcAction> actions(const std::string& s, Party p, Round r) const = 0;

    // True when the party still owes the contract a decision that a deadline
    // would have to complete.
    virtual bool decision_pending(const std::string& s, Party p, Round r) const = 0;

    // True when the contract defines a completion for that pending decision
    // (an assumed action or a settlement rule). The liveness axiom requires
    // this everywhere a decision can be pending.
    virtual bool default_defined(const std::string& s, Party p, Round r) const = 0;

    virtual std::string apply(const std::string& s, Party p, const ProcAction& a, Round r) const = 0;

    // Invoked when the round advances to `now`; deadline transitions happen here.
    virtual std::string at_deadline(const std::string& s, Round now) const = 0;
};

namespace proc_detail {

inline char enc_tri(const std::optional<int>& v) { return v ? static_cast<char>('0' + *v) : '-'; }
inline std::optional<int> dec_tri(char c) {
    if (c == '-') return std::nullopt;
    return c - '0';
}

}  // namespace proc_detail

// ---------------------------------------------------------------------------
// Classical escrow process: declare a bit once during phase 3; unset choices
// default to 1 at the deadline.

class ClassicalProcess : public EscrowProcess {
public:
    explicit ClassicalProcess(EscrowParams p) : p_(std::move(p)) {}

    std::string name() const override { return "classical"; }
    const EscrowParams& params() const override { return p_; }

    // state: [choice_a][choice_b][settled][eff_a][eff_b]
    std::string initial() const override { return "--0--"; }

    bool is_settled(const std::string& s) const override { return s[2] == '1'; }

    Settlement settlement(const std::string& s) const override {
        Settlement out;
        if (!is_settled(s)) return out;
        const int ea = *proc_detail::dec_tri(s[3]);
        const int eb = *proc_detail::dec_tri(s[4]);
        out.payout = settle_payout(ea, eb);
        out.effective_choice = {ea, eb};
        out.outcome = ea == eb ? (ea == 1 ? OutcomeClass::agree_delivered
                                          : OutcomeClass::agree_not_delivered)
                               : OutcomeClass::disagree;
        return out;
    }

    std::vector<ProcAction> actions(const std::string& s, Party p, Round r) const override {
        std::vector<ProcAction> out{ProcAction{}};
        if (is_settled(s) || !in_phase3(r)) return out;
        if (!choice_of(s, p)) {
            out.push_back(ProcAction{ProcAction::Kind::declare, 0});
            out.push_back(ProcAction{ProcAction::Kind::declare, 1});
        }
        return out;
    }

    bool decision_pending(const std::string& s, Party p, Round) const override {
        return !is_settled(s) && !choice_of(s, p);
    }

    bool default_defined(const std::string&, Party, Round) const override { return true; }

    std::string apply(const std::string& s, Party p, const ProcAction& a, Round r) const override {
        if (a.kind == ProcAction::Kind::wait) return s;
        if (a.kind != ProcAction::Kind::declare || is_settled(s) || !in_phase3(r) ||
            choice_of(s, p)) {
            return s;  // rejected call, no state change
        }
        std::string t = s;
        t[p == Party::alice ? 0 : 1] = static_cast<char>('0' + a.bit);
        return t;
    }

    std::string at_deadline(const std::string& s, Round now) const override {
        if (is_settled(s) || now < p_.phase3_end) return s;
        return settle_state(s);
    }

protected:
    // Mutant hooks: how unset choices complete and what the table pays.
    virtual std::string settle_state(const std::string& s) const {
        const int ea = choice_of(s, Party::alice).value_or(1);
        const int eb = choice_of(s, Party::bob).value_or(1);
        std::string t = s;
        t[2] = '1';
        t[3] = static_cast<char>('0' + ea);
        t[4] = static_cast<char>('0' + eb);
        return t;
    }

    virtual PayoutResult settle_payout(int ea, int eb) const {
        return classical_payout(ea, eb, p_.x, p_.deposit_variant);
    }

    std::optional<int> choice_of(const std::string& s, Party p) const {
        return proc_detail::dec_tri(s[p == Party::alice ? 0 : 1]);
    }

    bool in_phase3(Round r) const { return r >= p_.delivery_deadline && r < p_.phase3_end; }

    EscrowParams p_;
};

// ---------------------------------------------------------------------------
// Commit-reveal escrow process. Commit window actions fix a bit behind a
// digest; reveal window opens it (or fumbles it); the optional guess defense
// adds the counter-claim moves.

class CommitRevealProcess : public EscrowProcess {
public:
    explicit CommitRevealProcess(EscrowParams p) : p_(std::move(p)) {}

    std::string name() const override { return "commit_reveal"; }
    const EscrowParams& params() const override { return p_; }

    // state: [commit_a][commit_b][rev_a][rev_b][settled][winner][eff_a][eff_b]
    std::string initial() const override { return "--000---"; }

    bool is_settled(const std::string& s) const override { return s[4] == '1'; }

    Settlement settlement(const std::string& s) const override {
        Settlement out;
        if (!is_settled(s)) return out;
        if (s[5] != '-') {
            const Party winner = s[5] == '0' ? Party::alice : Party::bob;
            out.outcome = OutcomeClass::guess_claim;
            out.guess_winner = winner;
            out.payout = winner == Party::alice ? PayoutResult{p_.pot(), 0, 0}
                                                : PayoutResult{0, p_.pot(), 0};
            return out;
        }
        const int ea = *proc_detail::dec_tri(s[6]);
        const int eb = *proc_detail::dec_tri(s[7]);
        out.payout = classical_payout(ea, eb, p_.x, p_.deposit_variant);
        out.effective_choice = {ea, eb};
        out.outcome = ea == eb ? (ea == 1 ? OutcomeClass::agree_delivered
                                          : OutcomeClass::agree_not_delivered)
                               : OutcomeClass::disagree;
        return out;
    }

    std::vector<ProcAction> actions(const std::string& s, Party p, Round r) const override {
        std::vector<ProcAction> out{ProcAction{}};
        if (is_settled(s)) return out;
        const int i = idx(p), o = idx(opponent(p));
        if (in_commit_window(r) && s[i] == '-') {
            out.push_back(ProcAction{ProcAction::Kind::commit, 0});
            out.push_back(ProcAction{ProcAction::Kind::commit, 1});
        }
        if (in_reveal_window(r) && s[i] != '-' && s[2 + i] == '0') {
            out.push_back(ProcAction{ProcAction::Kind::reveal, 0});
            out.push_back(ProcAction{ProcAction::Kind::reveal_garbage, 0});
        }
        if (p_.guess_defense && in_phase3(r) && s[o] != '-' && s[2 + o] == '0') {
            out.push_back(ProcAction{ProcAction::Kind::guess_hit, 0});
            out.push_back(ProcAction{ProcAction::Kind::guess_miss, 0});
        }
        return out;
    }

    bool decision_pending(const std::string& s, Party p, Round r) const override {
        if (is_settled(s)) return false;
        const int i = idx(p);
        if (r < p_.commit_end) return s[i] == '-';   // commit still owed
        return s[i] != '-' && s[2 + i] == '0';       // opening still owed
    }

    bool default_defined(const std::string&, Party, Round) const override {
        return true;  // the most-favorable rule completes any missing opening
    }

    std::string apply(const std::string& s, Party p, const ProcAction& a, Round r) const override {
        if (is_settled(s) || a.kind == ProcAction::Kind::wait) return s;
        const int i = idx(p), o = idx(opponent(p));
        std::string t = s;
        switch (a.kind) {
            case ProcAction::Kind::commit:
                if (!in_commit_window(r) || s[i] != '-') return s;
                t[i] = static_cast<char>('0' + a.bit);
                return t;
            case ProcAction::Kind::reveal:
                if (!in_reveal_window(r) || s[i] == '-' || s[2 + i] == '1') return s;
                t[2 + i] = '1';
                return t;
            case ProcAction::Kind::reveal_garbage:
            case ProcAction::Kind::guess_miss:
                return s;  // rejected by the hash check, no state change
            case ProcAction::Kind::guess_hit: {
                if (!p_.guess_defense || !in_phase3(r) || s[o] == '-' || s[2 + o] == '1') return s;
                t[4] = '1';
                t[5] = p == Party::alice ? '0' : '1';
                return t;
            }
            default: return s;
        }
    }

    std::string at_deadline(const std::string& s, Round now) const override {
        if (is_settled(s) || now < p_.phase3_end) return s;
        auto revealed = [&](Party p) -> std::optional<int> {
            const int i = idx(p);
            if (s[i] != '-' && s[2 + i] == '1') return s[i] - '0';
            return std::nullopt;
        };
        const auto [ea, eb] = most_favorable_defaults(revealed(Party::alice), revealed(Party::bob));
        std::string t = s;
        t[4] = '1';
        t[6] = static_cast<char>('0' + ea);
        t[7] = static_cast<char>('0' + eb);
        return t;
    }

private:
    static int idx(Party p) { return p == Party::alice ? 0 : 1; }
    bool in_phase3(Round r) const { return r >= p_.delivery_deadline && r < p_.phase3_end; }
    bool in_commit_window(Round r) const { return r >= p_.delivery_deadline && r < p_.commit_end; }
    bool in_reveal_window(Round r) const { return r >= p_.commit_end && r < p_.phase3_end; }

    EscrowParams p_;
};

// ---------------------------------------------------------------------------
// Safe remote purchase process: only the buyer's confirmation releases funds;
// otherwise they lock forever.

class SrpProcess : public EscrowProcess {
public:
    explicit SrpProcess(EscrowParams p) : p_(std::move(p)) {}

    std::string name() const override { return "safe_remote_purchase"; }
    const EscrowParams& params() const override { return p_; }

    // state: [confirmed][settled]
    std::string initial() const override { return "00"; }
    bool is_settled(const std::string& s) const override { return s[1] == '1'; }

    Settlement settlement(const std::string& s) const override {
        Settlement out;
        if (!is_settled(s)) return out;
        if (s[0] == '1') {
            out.outcome = OutcomeClass::agree_delivered;
            out.payout = PayoutResult{p_.deposit_of(Party::alice) - p_.x,
                                      p_.deposit_of(Party::bob) + p_.x, 0};
            out.effective_choice = {1, 1};
        } else {
            out.outcome = OutcomeClass::locked;
            out.locked_amount = p_.pot();
        }
        return out;
    }

    std::vector<ProcAction> actions(const std::string& s, Party p, Round r) const override {
        std::vector<ProcAction> out{ProcAction{}};
        if (!is_settled(s) && p == Party::alice && in_phase3(r) && s[0] == '0') {
            out.push_back(ProcAction{ProcAction::Kind::confirm, 0});
        }
        return out;
    }

    bool decision_pending(const std::string& s, Party p, Round) const override {
        return !is_settled(s) && p == Party::alice && s[0] == '0';
    }

    bool default_defined(const std::string&, Party, Round) const override {
        return true;  // the lock rule is the (harsh) default
    }

    std::string apply(const std::string& s, Party p, const ProcAction& a, Round r) const override {
        if (is_settled(s) || a.kind != ProcAction::Kind::confirm) return s;
        if (p != Party::alice || !in_phase3(r) || s[0] == '1') return s;
        return "11";
    }

    std::string at_deadline(const std::string& s, Round now) const override {
        if (is_settled(s) || now < p_.phase3_end) return s;
        std::string t = s;
        t[1] = '1';
        return t;
    }

private:
    bool in_phase3(Round r) const { return r >= p_.delivery_deadline && r < p_.phase3_end; }

    EscrowParams p_;
};

inline std::unique_ptr<EscrowProcess> make_process(const EscrowParams& p) {
    switch (p.kind) {
        case EscrowKind::classical: return std::make_unique<ClassicalProcess>(p);
        case EscrowKind::commit_reveal: return std::make_unique<CommitRevealProcess>(p);
        case EscrowKind::safe_remote_purchase: return std::make_unique<SrpProcess>(p);
    }
    throw std::invalid_argument("unknown escrow kind");
}

}  // namespace escrowlab
