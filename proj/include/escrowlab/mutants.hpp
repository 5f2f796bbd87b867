#pragma once

// Deliberately broken escrow variants, one per axiom. Used to prove the
// checker detects exactly what it claims to detect; check-axioms accepts
// them as named variants.

#include <memory>

#include "escrowlab/process.hpp"

namespace escrowlab {

// 1: no delivery window — a "sales escrow" with nowhere to ship the good.
class MutantPhases final : public ClassicalProcess {
public:
    explicit MutantPhases(EscrowParams p) : ClassicalProcess(collapse(std::move(p))) {}
    std::string name() const override { return "mutant_phases"; }

private:
    static EscrowParams collapse(EscrowParams p) {
        p.delivery_deadline = p.phase1_end;  // phase 2 vanishes
        return p;
    }
};

// 2: no defaults — a silent party is handled by burning the pot, but the
// contract never defines an assumed action for them.
class MutantLiveness final : public ClassicalProcess {
public:
    explicit MutantLiveness(EscrowParams p) : ClassicalProcess(std::move(p)) {}
    std::string name() const override { return "mutant_liveness"; }

    bool default_defined(const std::string&, Party, Round) const override { return false; }

protected:
    std::string settle_state(const std::string& s) const override {
        const auto ca = choice_of(s, Party::alice);
        const auto cb = choice_of(s, Party::bob);
        std::string t = s;
        t[2] = '1';
        // Any missing declaration is treated as a disagreement and burned.
        t[3] = static_cast<char>('0' + (ca && cb ? *ca : 0));
        t[4] = static_cast<char>('0' + (ca && cb ? *cb : 1));
        return t;
    }
};

// 3: settles only when both parties declared; otherwise runs forever.
class MutantTermination final : public ClassicalProcess {
public:
    explicit MutantTermination(EscrowParams p) : ClassicalProcess(std::move(p)) {}
    std::string name() const override { return "mutant_termination"; }

    std::string at_deadline(const std::string& s, Round now) const override {
        if (is_settled(s) || now < params().phase3_end) return s;
        if (!choice_of(s, Party::alice) || !choice_of(s, Party::bob)) return s;  // stuck
        return settle_state(s);
    }
};

// 4: agreement on delivery pays the whole pot to the seller.
class MutantAgreement final : public ClassicalProcess {
public:
    explicit MutantAgreement(EscrowParams p) : ClassicalProcess(std::move(p)) {}
    std::string name() const override { return "mutant_agreement"; }

protected:
    PayoutResult settle_payout(int ea, int eb) const override {
        if (ea == 1 && eb == 1) return PayoutResult{0, params().pot(), 0};
        return ClassicalProcess::settle_payout(ea, eb);
    }
};

// 5: disagreement refunds the deposits instead of burning them.
class MutantIncentives final : public ClassicalProcess {
public:
    explicit MutantIncentives(EscrowParams p) : ClassicalProcess(std::move(p)) {}
    std::string name() const override { return "mutant_incentives"; }

protected:
    PayoutResult settle_payout(int ea, int eb) const override {
        if (ea != eb) {
            return PayoutResult{params().deposit_of(Party::alice), params().deposit_of(Party::bob),
                                0};
        }
        return ClassicalProcess::settle_payout(ea, eb);
    }
};

// 6: one branch promises the seller far more money than the contract holds.
class MutantBoundedness final : public ClassicalProcess {
public:
    explicit MutantBoundedness(EscrowParams p) : ClassicalProcess(std::move(p)) {}
    std::string name() const override { return "mutant_boundedness"; }

protected:
    PayoutResult settle_payout(int ea, int eb) const override {
        if (ea == 1 && eb == 0) return PayoutResult{0, 100 * params().x, 0};
        return ClassicalProcess::settle_payout(ea, eb);
    }
};

inline const std::vector<std::string>& mutant_names() {
    static const std::vector<std::string> names{
        "mutant_phases",     "mutant_liveness",   "mutant_termination",
        "mutant_agreement", "mutant_incentives", "mutant_boundedness",
    };
    return names;
}

inline std::unique_ptr<EscrowProcess> make_mutant_process(const std::string& name,
                                                          EscrowParams p) {
    p.kind = EscrowKind::classical;
    if (name == "mutant_phases") return std::make_unique<MutantPhases>(std::move(p));
    if (name == "mutant_liveness") return std::make_unique<MutantLiveness>(std::move(p));
    if (name == "mutant_termination") return std::make_unique<MutantTermination>(std::move(p));
    if (name == "mutant_agreement") return std::make_unique<MutantAgreement>(std::move(p));
    if (name == "mutant_incentives") return std::make_unique<MutantIncentives>(std::move(p));
    if (name == "mutant_boundedness") return std::make_unique<MutantBoundedness>(std::move(p));
    throw ConfigError("unknown mutant: " + name);
}

}  // namespace escrowlab
