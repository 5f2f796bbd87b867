#pragma once

// Ledger-hosted escrow contracts. Each wraps a pure core and translates
// signed calls into core steps and settlement values into money effects.

#include <memory>
#include <sstream>

#include "escrowlab/escrow_core.hpp"
#include "escrowlab/ledger.hpp"

namespace escrowlab {

// Shared phase-3 dispatch: the mirror replays relayed calls through the same
// code path the hosted escrow uses, so replica semantics cannot drift.
inline Reject apply_phase3_call(ClassicalCore& core, Party who, const SignedCall& call) {
    if (call.function == "declare") {
        if (call.args.size() != 1 || call.args[0].kind != CallArg::Kind::int64) return Reject::bad_args;
        return core.declare(who, static_cast<int>(call.args[0].i), call.round);
    }
    return Reject::unknown_function;
}

inline Reject apply_phase3_call(CommitRevealCore& core, Party who, const SignedCall& call) {
    if (call.function == "commit") {
        if (call.args.size() != 1 || call.args[0].kind != CallArg::Kind::bytes ||
            call.args[0].b.size() != 32) {
            return Reject::bad_args;
        }
        return core.commit_hash(who, Commitment::from_bytes(call.args[0].b), call.round);
    }
    if (call.function == "reveal" || call.function == "guess") {
        if (call.args.size() != 2 || call.args[0].kind != CallArg::Kind::int64 ||
            call.args[1].kind != CallArg::Kind::bytes || call.args[1].b.size() != 32) {
            return Reject::bad_args;
        }
        const int bit = static_cast<int>(call.args[0].i);
        const Nonce nonce{call.args[1].b};
        if (call.function == "reveal") return core.reveal(who, bit, nonce, call.round);
        return core.guess(who, bit, nonce, call.round);
    }
    return Reject::unknown_function;
}

namespace detail {

inline std::string fmt_choice(const std::optional<int>& c) {
    return c ? std::to_string(*c) : "unset";
}

// Effects for a core event, in party terms resolved against params.
inline std::vector<Effect> event_effects(const EscrowParams& p, const CoreEvent& ev) {
    std::vector<Effect> fx;
    if (ev.kind == CoreEvent::Kind::abort_refund) {
        for (int i = 0; i < 2; ++i) {
            if (ev.refund[i] > 0) fx.push_back(Effect::pay(p.id_of(static_cast<Party>(i)), ev.refund[i]));
        }
    } else if (ev.kind == CoreEvent::Kind::settle) {
        const PayoutResult& pr = ev.settlement.payout;
        if (pr.pay_alice > 0) fx.push_back(Effect::pay(p.buyer, pr.pay_alice));
        if (pr.pay_bob > 0) fx.push_back(Effect::pay(p.seller, pr.pay_bob));
        if (pr.burned > 0) fx.push_back(Effect::burn(pr.burned));
        if (ev.settlement.locked_amount > 0) fx.push_back(Effect::lock(ev.settlement.locked_amount));
    }
    return fx;
}

inline std::string event_note(const CoreEvent& ev) {
    if (ev.kind == CoreEvent::Kind::abort_refund) return "aborted: deposits incomplete, refunds issued";
    if (ev.kind == CoreEvent::Kind::settle) {
        std::ostringstream os;
        os << "settled: " << outcome_name(ev.settlement.outcome);
        return os.str();
    }
    return {};
}

}  // namespace detail

// ---------------------------------------------------------------------------

class ClassicalEscrowContract final : public Contract {
public:
    ClassicalEscrowContract(ContractId id, AccountId deployer, EscrowParams p)
        : Contract(std::move(id), std::move(deployer)), core_(std::move(p)) {}

    std::string type_name() const override { return "classical_escrow"; }
    const ClassicalCore& core() const { return core_; }
    const EscrowParams& params() const { return core_.params(); }

    CallOutcome on_call(const SignedCall& call, const ContractHost& host) override {
        auto who = core_.params().party_of(call.caller);
        if (!who) return CallOutcome::reject(Reject::unauthorized, "not a party to this escrow");
        if (call.function == "deposit") {
            if (call.args.size() != 1 || call.args[0].kind != CallArg::Kind::int64) {
                return CallOutcome::reject(Reject::bad_args);
            }
            const Money amount = call.args[0].i;
            if (amount < 0 || host.account_balance(call.caller) < amount) {
                return CallOutcome::reject(Reject::insufficient_funds);
            }
            Reject r = core_.deposit(*who, amount, call.round);
            if (r != Reject::none) return CallOutcome::reject(r);
            return CallOutcome::accept({Effect::collect(call.caller, amount)}, "deposit recorded");
        }
        Reject r = apply_phase3_call(core_, *who, call);
        if (r != Reject::none) return CallOutcome::reject(r);
        return CallOutcome::accept({}, "choice recorded");
    }

    std::vector<Effect> on_round(Round now, const ContractHost&, std::string& note) override {
        CoreEvent ev = core_.on_round(now);
        note = detail::event_note(ev);
        return detail::event_effects(core_.params(), ev);
    }

    std::map<std::string, std::string> public_state() const override {
        const auto& p = core_.params();
        return {
            {"type", type_name()},
            {"x", std::to_string(p.x)},
            {"choice_alice", detail::fmt_choice(core_.choice(Party::alice))},
            {"choice_bob", detail::fmt_choice(core_.choice(Party::bob))},
            {"settled", core_.settled() ? "true" : "false"},
            {"aborted", core_.aborted() ? "true" : "false"},
        };
    }

private:
    ClassicalCore core_;
};

class CommitRevealEscrowContract final : public Contract {
public:
    CommitRevealEscrowContract(ContractId id, AccountId deployer, EscrowParams p)
        : Contract(std::move(id), std::move(deployer)), core_(std::move(p)) {}

    std::string type_name() const override { return "commit_reveal_escrow"; }
    const CommitRevealCore& core() const { return core_; }
    const EscrowParams& params() const { return core_.params(); }

    CallOutcome on_call(const SignedCall& call, const ContractHost& host) override {
        auto who = core_.params().party_of(call.caller);
        if (!who) return CallOutcome::reject(Reject::unauthorized, "not a party to this escrow");
        if (call.function == "deposit") {
            if (call.args.size() != 1 || call.args[0].kind != CallArg::Kind::int64) {
                return CallOutcome::reject(Reject::bad_args);
            }
            const Money amount = call.args[0].i;
            if (amount < 0 || host.account_balance(call.caller) < amount) {
                return CallOutcome::reject(Reject::insufficient_funds);
            }
            Reject r = core_.deposit(*who, amount, call.round);
            if (r != Reject::none) return CallOutcome::reject(r);
            return CallOutcome::accept({Effect::collect(call.caller, amount)}, "deposit recorded");
        }
        const bool was_settled = core_.settled();
        Reject r = apply_phase3_call(core_, *who, call);
        if (r != Reject::none) return CallOutcome::reject(r);
        if (!was_settled && core_.settled() &&
            core_.settlement().outcome == OutcomeClass::guess_claim) {
            // Correct guess: the entire pot moves to the guesser at once.
            CoreEvent ev;
            ev.kind = CoreEvent::Kind::settle;
            ev.settlement = core_.settlement();
            return CallOutcome::accept(detail::event_effects(core_.params(), ev),
                                       "guess verified, pot claimed");
        }
        return CallOutcome::accept({}, call.function + " accepted");
    }

    std::vector<Effect> on_round(Round now, const ContractHost&, std::string& note) override {
        CoreEvent ev = core_.on_round(now);
        note = detail::event_note(ev);
        return detail::event_effects(core_.params(), ev);
    }

    std::map<std::string, std::string> public_state() const override {
        const auto& p = core_.params();
        auto hash_str = [&](Party pt) {
            auto h = core_.stored_hash(pt);
            return h ? h->hex() : std::string("unset");
        };
        return {
            {"type", type_name()},
            {"x", std::to_string(p.x)},
            {"defense", p.guess_defense ? "on" : "off"},
            {"hash_alice", hash_str(Party::alice)},
            {"hash_bob", hash_str(Party::bob)},
            {"revealed_alice", detail::fmt_choice(core_.recorded_choice(Party::alice))},
            {"revealed_bob", detail::fmt_choice(core_.recorded_choice(Party::bob))},
            {"settled", core_.settled() ? "true" : "false"},
            {"aborted", core_.aborted() ? "true" : "false"},
        };
    }

private:
    CommitRevealCore core_;
};

class SrpContract final : public Contract {
public:
    SrpContract(ContractId id, AccountId deployer, EscrowParams p)
        : Contract(std::move(id), std::move(deployer)), core_(std::move(p)) {}

    std::string type_name() const override { return "safe_remote_purchase"; }
    const SrpCore& core() const { return core_; }
    const EscrowParams& params() const { return core_.params(); }

    CallOutcome on_call(const SignedCall& call, const ContractHost& host) override {
        auto who = core_.params().party_of(call.caller);
        if (!who) return CallOutcome::reject(Reject::unauthorized, "not a party to this escrow");
        if (call.function == "deposit") {
            if (call.args.size() != 1 || call.args[0].kind != CallArg::Kind::int64) {
                return CallOutcome::reject(Reject::bad_args);
            }
            const Money amount = call.args[0].i;
            if (amount < 0 || host.account_balance(call.caller) < amount) {
                return CallOutcome::reject(Reject::insufficient_funds);
            }
            Reject r = core_.deposit(*who, amount, call.round);
            if (r != Reject::none) return CallOutcome::reject(r);
            return CallOutcome::accept({Effect::collect(call.caller, amount)}, "deposit recorded");
        }
        if (call.function == "confirm") {
            Reject r = core_.confirm(*who, call.round);
            if (r != Reject::none) return CallOutcome::reject(r);
            CoreEvent ev;
            ev.kind = CoreEvent::Kind::settle;
            ev.settlement = core_.settlement();
            return CallOutcome::accept(detail::event_effects(core_.params(), ev),
                                       "delivery confirmed, funds released");
        }
        return CallOutcome::reject(Reject::unknown_function);
    }

    std::vector<Effect> on_round(Round now, const ContractHost&, std::string& note) override {
        CoreEvent ev = core_.on_round(now);
        note = detail::event_note(ev);
        return detail::event_effects(core_.params(), ev);
    }

    std::map<std::string, std::string> public_state() const override {
        return {
            {"type", type_name()},
            {"x", std::to_string(core_.params().x)},
            {"confirmed", core_.confirmed() ? "true" : "false"},
            {"settled", core_.settled() ? "true" : "false"},
            {"aborted", core_.aborted() ? "true" : "false"},
        };
    }

private:
    SrpCore core_;
};

// ---------------------------------------------------------------------------
// Deploy factories. Escrow deploy args:
//   [type, buyer, seller, x, phase1_end, delivery_deadline, (commit_end,)
//    phase3_end, deposit_variant, (defense)]

namespace detail {

inline bool want_int(const SignedCall& c, std::size_t i, Money& out) {
    if (i >= c.args.size() || c.args[i].kind != CallArg::Kind::int64) return false;
    out = c.args[i].i;
    return true;
}

inline bool want_bytes(const SignedCall& c, std::size_t i, Bytes& out) {
    if (i >= c.args.size() || c.args[i].kind != CallArg::Kind::bytes) return false;
    out = c.args[i].b;
    return true;
}

inline DeployResult parse_escrow_deploy(EscrowKind kind, const ContractId& fresh,
                                        const SignedCall& call, const ContractHost& host) {
    DeployResult out;
    EscrowParams p;
    p.kind = kind;
    Bytes buyer, seller;
    Money x = 0, p1 = 0, dd = 0, ce = 0, p3 = 0, variant = 0, defense = 0;
    const bool cr = kind == EscrowKind::commit_reveal;
    std::size_t i = 1;
    bool ok = want_bytes(call, i++, buyer) && want_bytes(call, i++, seller) &&
              want_int(call, i++, x) && want_int(call, i++, p1) && want_int(call, i++, dd);
    if (ok && cr) ok = want_int(call, i++, ce);
    ok = ok && want_int(call, i++, p3) && want_int(call, i++, variant);
    if (ok && cr) ok = want_int(call, i++, defense);
    if (!ok || i != call.args.size()) {
        out.reason = Reject::bad_args;
        out.detail = "malformed escrow deploy";
        return out;
    }
    p.buyer = to_string(buyer);
    p.seller = to_string(seller);
    p.x = x;
    p.phase1_end = p1;
    p.delivery_deadline = dd;
    p.commit_end = ce;
    p.phase3_end = p3;
    p.deposit_variant = variant == 0 ? DepositVariant::main : DepositVariant::both_2x;
    p.guess_defense = defense != 0;
    if (!host.account_exists(p.buyer) || !host.account_exists(p.seller)) {
        out.reason = Reject::unknown_account;
        return out;
    }
    try {
        p.validate();
    } catch (const ConfigError& e) {
        out.reason = Reject::bad_args;
        out.detail = e.what();
        return out;
    }
    switch (kind) {
        case EscrowKind::classical:
            out.contract = std::make_unique<ClassicalEscrowContract>(fresh, call.caller, p);
            break;
        case EscrowKind::commit_reveal:
            out.contract = std::make_unique<CommitRevealEscrowContract>(fresh, call.caller, p);
            break;
        case EscrowKind::safe_remote_purchase:
            out.contract = std::make_unique<SrpContract>(fresh, call.caller, p);
            break;
    }
    return out;
}

}  // namespace detail

inline void register_escrow_factories(Ledger& ledger) {
    ledger.register_factory("classical", [](const ContractId& id, const SignedCall& c,
                                            const ContractHost& h) {
        return detail::parse_escrow_deploy(EscrowKind::classical, id, c, h);
    });
    ledger.register_factory("commit_reveal", [](const ContractId& id, const SignedCall& c,
                                                const ContractHost& h) {
        return detail::parse_escrow_deploy(EscrowKind::commit_reveal, id, c, h);
    });
    ledger.register_factory("srp", [](const ContractId& id, const SignedCall& c,
                                      const ContractHost& h) {
        return detail::parse_escrow_deploy(EscrowKind::safe_remote_purchase, id, c, h);
    });
}

// Convenience for building the deploy call argument list.
inline std::vector<CallArg> escrow_deploy_args(const EscrowParams& p) {
    std::vector<CallArg> args;
    args.push_back(CallArg::of_bytes(to_bytes(escrow_kind_name(p.kind) == std::string("safe_remote_purchase")
                                                  ? "srp"
                                                  : escrow_kind_name(p.kind))));
    args.push_back(CallArg::of_bytes(to_bytes(p.buyer)));
    args.push_back(CallArg::of_bytes(to_bytes(p.seller)));
    args.push_back(CallArg::of_int(p.x));
    args.push_back(CallArg::of_int(p.phase1_end));
    args.push_back(CallArg::of_int(p.delivery_deadline));
    if (p.kind == EscrowKind::commit_reveal) args.push_back(CallArg::of_int(p.commit_end));
    args.push_back(CallArg::of_int(p.phase3_end));
    args.push_back(CallArg::of_int(p.deposit_variant == DepositVariant::main ? 0 : 1));
    if (p.kind == EscrowKind::commit_reveal) args.push_back(CallArg::of_int(p.guess_defense ? 1 : 0));
    return args;
}

}  // namespace escrowlab
