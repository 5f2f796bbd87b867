#pragma once

// Deterministic single-instance ledger: discrete rounds, simulated signatures,
// contract hosting, miner-priority transaction ordering and conservation
// accounting (balances + contract funds + burned == minted, always).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "escrowlab/bytes.hpp"
#include "escrowlab/common.hpp"
#include "escrowlab/sha256.hpp"

namespace escrowlab {

// ---------------------------------------------------------------------------
// Rejection reasons. Per-call failures are recorded in the log, never thrown.

enum class Reject {
    none,
    invalid_signature,
    unknown_account,
    unknown_contract,
    unknown_function,
    stale_round,
    insufficient_funds,
    bad_args,
    wrong_phase,
    wrong_deposit_amount,
    already_deposited,
    already_declared,
    already_committed,
    already_revealed,
    hash_mismatch,
    defense_disabled,
    guess_window_closed,
    invalid_opening,
    not_owner,
    unauthorized,
    invalid_relayed_signature,
    out_of_order_round,
    already_claimed,
    too_early,
    too_late,
    already_settled,
    invalid_proof,
    contract_closed,
};

inline const char* reject_name(Reject r) {
    switch (r) {
        case Reject::none: return "none";
        case Reject::invalid_signature: return "invalid_signature";
        case Reject::unknown_account: return "unknown_account";
        case Reject::unknown_contract: return "unknown_contract";
        case Reject::unknown_function: return "unknown_function";
        case Reject::stale_round: return "stale_round";
        case Reject::insufficient_funds: return "insufficient_funds";
        case Reject::bad_args: return "bad_args";
        case Reject::wrong_phase: return "wrong_phase";
        case Reject::wrong_deposit_amount: return "wrong_deposit_amount";
        case Reject::already_deposited: return "already_deposited";
        case Reject::already_declared: return "already_declared";
        case Reject::already_committed: return "already_committed";
        case Reject::already_revealed: return "already_revealed";
        case Reject::hash_mismatch: return "hash_mismatch";
        case Reject::defense_disabled: return "defense_disabled";
        case Reject::guess_window_closed: return "guess_window_closed";
        case Reject::invalid_opening: return "invalid_opening";
        case Reject::not_owner: return "not_owner";
        case Reject::unauthorized: return "unauthorized";
        case Reject::invalid_relayed_signature: return "invalid_relayed_signature";
        case Reject::out_of_order_round: return "out_of_order_round";
        case Reject::already_claimed: return "already_claimed";
        case Reject::too_early: return "too_early";
        case Reject::too_late: return "too_late";
        case Reject::already_settled: return "already_settled";
        case Reject::invalid_proof: return "invalid_proof";
        case Reject::contract_closed: return "contract_closed";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Signed calls and their canonical byte encoding.

struct SignedCall;

struct CallArg {
    enum class Kind { int64, bytes, call };
    Kind kind = Kind::int64;
    std::int64_t i = 0;
    Bytes b;
    std::shared_ptr<SignedCall> c;  // set iff kind == call

    static CallArg of_int(std::int64_t v) {
        CallArg a;
        a.kind = Kind::int64;
        a.i = v;
        return a;
    }
    static CallArg of_bytes(Bytes v) {
        CallArg a;
        a.kind = Kind::bytes;
        a.b = std::move(v);
        return a;
    }
    static CallArg of_call(SignedCall v);

    bool operator==(const CallArg& o) const;
};

struct SignedCall {
    AccountId caller;
    ContractId contract;
    std::string function;
    std::vector<CallArg> args;
    Round round = 0;
    Bytes sig;  // tag over (caller, contract, function, args, round)

    bool operator==(const SignedCall& o) const {
        return caller == o.caller && contract == o.contract && function == o.function &&
               round == o.round && sig == o.sig && args == o.args;
    }
};

inline CallArg CallArg::of_call(SignedCall v) {
    CallArg a;
    a.kind = Kind::call;
    a.c = std::make_shared<SignedCall>(std::move(v));
    return a;
}

inline bool CallArg::operator==(const CallArg& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
        case Kind::int64: return i == o.i;
        case Kind::bytes: return b == o.b;
        case Kind::call: return *c == *o.c;
    }
    return false;
}

Bytes encode_call_signed(const SignedCall& call);

// Fields in declaration order, integers 8-byte big-endian, strings
// length-prefixed. Nested calls carry their own signature so relayed calls
// stay verifiable.
inline void encode_arg(Bytes& out, const CallArg& a) {
    switch (a.kind) {
        case CallArg::Kind::int64:
            out.push_back(0x01);
            append_i64be(out, a.i);
            break;
        case CallArg::Kind::bytes:
            out.push_back(0x02);
            append_blob(out, a.b);
            break;
        case CallArg::Kind::call: {
            out.push_back(0x03);
            append_blob(out, encode_call_signed(*a.c));
            break;
        }
    }
}

inline Bytes encode_call_payload(const SignedCall& call) {
    Bytes out;
    append_str(out, call.caller);
    append_str(out, call.contract);
    append_str(out, call.function);
    append_u64be(out, call.args.size());
    for (const CallArg& a : call.args) encode_arg(out, a);
    append_i64be(out, call.round);
    return out;
}

inline Bytes encode_call_signed(const SignedCall& call) {
    Bytes out = encode_call_payload(call);
    append_blob(out, call.sig);
    return out;
}

// ---------------------------------------------------------------------------
// Simulated signatures: a keyed deterministic tag. Unforgeable within the
// simulation because secrets never leave the ledger's key registry.

struct SecretKey {
    Bytes bytes;
};

inline Bytes sign_tag(const SecretKey& key, std::span<const std::uint8_t> payload) {
    Bytes msg = key.bytes;
    msg.insert(msg.end(), payload.begin(), payload.end());
    return digest_bytes(sha256(msg));
}

inline bool verify_tag(const SecretKey& key, std::span<const std::uint8_t> payload, const Bytes& tag) {
    return sign_tag(key, payload) == tag;
}

inline void sign_call(const SecretKey& key, SignedCall& call) {
    call.sig = sign_tag(key, encode_call_payload(call));
}

// ---------------------------------------------------------------------------

struct Account {
    AccountId id;
    Money balance = 0;
    std::string key_id;
};

// Total order over account ids used to sequence same-round submissions;
// models which party reaches the miners first.
struct OrderingPolicy {
    std::vector<AccountId> priority;  // listed ids apply first, in list order

    std::size_t rank(const AccountId& id) const {
        for (std::size_t k = 0; k < priority.size(); ++k) {
            if (priority[k] == id) return k;
        }
        return priority.size();  // unlisted ids come after, ordered by id
    }

    static OrderingPolicy prefer(std::initializer_list<AccountId> ids) {
        return OrderingPolicy{std::vector<AccountId>(ids)};
    }
};

// ---------------------------------------------------------------------------
// Contracts.

struct Effect {
    enum class Kind { collect, pay, burn, lock };
    Kind kind;
    AccountId account;  // collect: debited account; pay: credited account
    Money amount = 0;

    static Effect collect(AccountId from, Money amount) {
        return Effect{Kind::collect, std::move(from), amount};
    }
    static Effect pay(AccountId to, Money amount) {
        return Effect{Kind::pay, std::move(to), amount};
    }
    static Effect burn(Money amount) { return Effect{Kind::burn, {}, amount}; }
    static Effect lock(Money amount) { return Effect{Kind::lock, {}, amount}; }
};

struct CallOutcome {
    Reject reason = Reject::none;
    std::string detail;
    std::vector<Effect> effects;
    std::string note;

    bool ok() const { return reason == Reject::none; }

    static CallOutcome accept(std::vector<Effect> fx = {}, std::string note = "") {
        CallOutcome o;
        o.effects = std::move(fx);
        o.note = std::move(note);
        return o;
    }
    static CallOutcome reject(Reject r, std::string detail = "") {
        CallOutcome o;
        o.reason = r;
        o.detail = std::move(detail);
        return o;
    }
};

class Contract;

// Read-only view contracts get while handling a call or a round boundary.
class ContractHost {
public:
    virtual ~ContractHost() = default;
    virtual Round round() const = 0;
    virtual bool account_exists(const AccountId& id) const = 0;
    virtual Money account_balance(const AccountId& id) const = 0;
    virtual Money contract_funds(const ContractId& id) const = 0;
    virtual bool verify_call_signature(const SignedCall& call) const = 0;
    virtual const Contract* find_contract(const ContractId& id) const = 0;
};

class Contract {
public:
    Contract(ContractId id, AccountId owner) : id_(std::move(id)), owner_(std::move(owner)) {}
    virtual ~Contract() = default;

    const ContractId& id() const { return id_; }
    const AccountId& owner() const { return owner_; }

    virtual std::string type_name() const = 0;
    virtual CallOutcome on_call(const SignedCall& call, const ContractHost& host) = 0;

    // Fires once each time the ledger advances to `now`; deadline-driven
    // transitions (defaults, settlement) happen here.
    virtual std::vector<Effect> on_round(Round now, const ContractHost& host, std::string& note) {
        (void)now;
        (void)host;
        (void)note;
        return {};
    }

    // Public on-chain state, as key -> rendered value. Everything here is
    // visible to every agent.
    virtual std::map<std::string, std::string> public_state() const = 0;

private:
    ContractId id_;
    AccountId owner_;
};

// ---------------------------------------------------------------------------
// Log records.

struct CallRecord {
    SignedCall call;
    bool applied = false;
    Reject reason = Reject::none;
    std::string detail;
    std::vector<Effect> effects;
    std::string note;
};

// Deadline-driven effects, recorded separately from the call log.
struct RoundEvent {
    Round round = 0;
    ContractId contract;
    std::string note;
    std::vector<Effect> effects;
};

struct SubmitResult {
    bool ok = false;
    Reject reason = Reject::none;
};

// ---------------------------------------------------------------------------

struct DeployResult {
    std::unique_ptr<Contract> contract;
    std::vector<Effect> effects;
    Reject reason = Reject::none;
    std::string detail;
};

// Factory invoked for `deploy` calls addressed to the "sys" pseudo-contract.
using DeployFactory =
    std::function<DeployResult(const ContractId& fresh_id, const SignedCall& call, const ContractHost& host)>;

class Ledger final : public ContractHost {
public:
    static constexpr const char* kSystem = "sys";

    explicit Ledger(std::uint64_t key_seed = 1) : key_seed_(key_seed) {}

    // --- accounts --------------------------------------------------------

    AccountId create_account(Money initial_balance, std::string label = "") {
        if (initial_balance < 0) throw std::invalid_argument("create_account: negative balance");
        AccountId id = label.empty() ? "acct" + std::to_string(next_account_++) : std::move(label);
        if (accounts_.count(id) || contracts_.count(id)) {
            throw std::invalid_argument("create_account: id already in use: " + id);
        }
        Account acct;
        acct.id = id;
        acct.balance = initial_balance;
        acct.key_id = "k:" + id;
        accounts_.emplace(id, acct);
        keys_.emplace(id, derive_key(id));
        minted_ += initial_balance;
        genesis_.emplace_back(id, initial_balance);
        return id;
    }

    const Account& account(const AccountId& id) const {
        auto it = accounts_.find(id);
        if (it == accounts_.end()) throw UnknownAccount(id);
        return it->second;
    }

    // Balance of an account or of a contract's held funds.
    Money balance_of(const std::string& id) const {
        if (auto it = accounts_.find(id); it != accounts_.end()) return it->second.balance;
        if (auto it = funds_.find(id); it != funds_.end()) return it->second;
        throw UnknownAccount(id);
    }

    const SecretKey& key_of(const AccountId& id) const {
        auto it = keys_.find(id);
        if (it == keys_.end()) throw UnknownAccount(id);
        return it->second;
    }

    // --- calls -----------------------------------------------------------

    SignedCall make_call(const AccountId& caller, const ContractId& contract,
                         const std::string& function, std::vector<CallArg> args) const {
        SignedCall call;
        call.caller = caller;
        call.contract = contract;
        call.function = function;
        call.args = std::move(args);
        call.round = round_;
        sign_call(key_of(caller), call);
        return call;
    }

    SubmitResult submit(const SignedCall& call) {
        auto key = keys_.find(call.caller);
        if (key == keys_.end()) return SubmitResult{false, Reject::unknown_account};
        if (!verify_tag(key->second, encode_call_payload(call), call.sig)) {
            return SubmitResult{false, Reject::invalid_signature};
        }
        if (call.round != round_) return SubmitResult{false, Reject::stale_round};
        pending_.push_back(call);
        return SubmitResult{true, Reject::none};
    }

    // Applies pending calls in policy order, advances the round, then runs
    // contract deadline hooks. Returns the records appended this round.
    std::vector<CallRecord> finalize_round() {
        std::vector<std::size_t> order(pending_.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto ra = ordering_.rank(pending_[a].caller);
            const auto rb = ordering_.rank(pending_[b].caller);
            if (ra != rb) return ra < rb;
            if (pending_[a].caller != pending_[b].caller) return pending_[a].caller < pending_[b].caller;
            return a < b;  // same caller: submission order
        });

        std::vector<CallRecord> out;
        out.reserve(pending_.size());
        for (std::size_t idx : order) out.push_back(apply_call(pending_[idx]));
        pending_.clear();
        log_.insert(log_.end(), out.begin(), out.end());

        round_ += 1;
        for (const ContractId& id : contract_order_) {
            Contract* c = contracts_.at(id).get();
            std::string note;
            std::vector<Effect> fx = c->on_round(round_, *this, note);
            if (!fx.empty() || !note.empty()) {
                apply_effects(id, {}, fx);
                events_.push_back(RoundEvent{round_, id, note, fx});
            }
        }
        return out;
    }

    Round round() const override { return round_; }

    // --- contracts -------------------------------------------------------

    void register_factory(const std::string& type_name, DeployFactory f) {
        factories_[type_name] = std::move(f);
    }

    Contract* find_contract_mut(const ContractId& id) {
        auto it = contracts_.find(id);
        return it == contracts_.end() ? nullptr : it->second.get();
    }

    const Contract* find_contract(const ContractId& id) const override {
        auto it = contracts_.find(id);
        return it == contracts_.end() ? nullptr : it->second.get();
    }

    template <typename T>
    const T* find_as(const ContractId& id) const {
        return dynamic_cast<const T*>(find_contract(id));
    }

    const std::vector<ContractId>& contract_ids() const { return contract_order_; }

    // --- conservation ----------------------------------------------------

    Money minted() const { return minted_; }
    Money burned() const { return burned_; }
    Money locked() const { return locked_; }

    Money total_account_balances() const {
        Money s = 0;
        for (const auto& [id, a] : accounts_) s += a.balance;
        return s;
    }
    Money total_contract_funds() const {
        Money s = 0;
        for (const auto& [id, m] : funds_) s += m;
        return s;
    }
    bool conservation_holds() const {
        return total_account_balances() + total_contract_funds() + burned_ == minted_;
    }

    // --- introspection ---------------------------------------------------

    const std::vector<CallRecord>& log() const { return log_; }
    const std::vector<RoundEvent>& events() const { return events_; }
    const std::vector<std::pair<AccountId, Money>>& genesis() const { return genesis_; }
    OrderingPolicy& ordering() { return ordering_; }
    const OrderingPolicy& ordering() const { return ordering_; }

    // ContractHost
    bool account_exists(const AccountId& id) const override { return accounts_.count(id) > 0; }
    Money account_balance(const AccountId& id) const override { return account(id).balance; }
    Money contract_funds(const ContractId& id) const override {
        auto it = funds_.find(id);
        return it == funds_.end() ? 0 : it->second;
    }
    bool verify_call_signature(const SignedCall& call) const override {
        auto key = keys_.find(call.caller);
        if (key == keys_.end()) return false;
        return verify_tag(key->second, encode_call_payload(call), call.sig);
    }

private:
    SecretKey derive_key(const AccountId& id) {
        Bytes seed_material;
        append_u64be(seed_material, key_seed_);
        append_str(seed_material, id);
        return SecretKey{digest_bytes(sha256(seed_material))};
    }

    CallRecord apply_call(const SignedCall& call) {
        CallRecord rec;
        rec.call = call;
        // Signature re-check: nothing applied may carry an invalid tag.
        auto key = keys_.find(call.caller);
        if (key == keys_.end() || !verify_tag(key->second, encode_call_payload(call), call.sig)) {
            rec.reason = Reject::invalid_signature;
            return rec;
        }
        CallOutcome outcome;
        Contract* target = nullptr;
        if (call.contract == kSystem) {
            outcome = apply_deploy(call);
        } else {
            target = find_contract_mut(call.contract);
            if (!target) {
                rec.reason = Reject::unknown_contract;
                return rec;
            }
            outcome = target->on_call(call, *this);
        }
        rec.reason = outcome.reason;
        rec.detail = outcome.detail;
        rec.note = outcome.note;
        if (outcome.ok()) {
            apply_effects(call.contract == kSystem ? last_deployed_ : call.contract, call.caller,
                          outcome.effects);
            rec.applied = true;
            rec.effects = outcome.effects;
        }
        return rec;
    }

    CallOutcome apply_deploy(const SignedCall& call) {
        if (call.function != "deploy" || call.args.empty() ||
            call.args[0].kind != CallArg::Kind::bytes) {
            return CallOutcome::reject(Reject::bad_args, "deploy expects a type-name argument");
        }
        std::string type = to_string(call.args[0].b);
        auto it = factories_.find(type);
        if (it == factories_.end()) {
            return CallOutcome::reject(Reject::bad_args, "no such contract type: " + type);
        }
        ContractId fresh = type + "-" + std::to_string(next_contract_++);
        DeployResult res = it->second(fresh, call, *this);
        if (res.reason != Reject::none) {
            next_contract_--;  // id not consumed
            return CallOutcome::reject(res.reason, res.detail);
        }
        last_deployed_ = fresh;
        funds_[fresh] = 0;
        contract_order_.push_back(fresh);
        contracts_.emplace(fresh, std::move(res.contract));
        return CallOutcome::accept(std::move(res.effects), "deployed " + fresh);
    }

    void apply_effects(const ContractId& contract, const AccountId& caller,
                       const std::vector<Effect>& effects) {
        for (const Effect& e : effects) {
            switch (e.kind) {
                case Effect::Kind::collect: {
                    const AccountId& from = e.account.empty() ? caller : e.account;
                    Account& a = accounts_.at(from);
                    if (a.balance < e.amount || e.amount < 0) {
                        throw std::logic_error("effect collect exceeds balance of " + from);
                    }
                    a.balance -= e.amount;
                    funds_.at(contract) += e.amount;
                    break;
                }
                case Effect::Kind::pay: {
                    Money& pot = funds_.at(contract);
                    if (pot < e.amount || e.amount < 0) {
                        throw std::logic_error("effect pay exceeds funds of " + contract);
                    }
                    pot -= e.amount;
                    accounts_.at(e.account).balance += e.amount;
                    break;
                }
                case Effect::Kind::burn: {
                    Money& pot = funds_.at(contract);
                    if (pot < e.amount || e.amount < 0) {
                        throw std::logic_error("effect burn exceeds funds of " + contract);
                    }
                    pot -= e.amount;
                    burned_ += e.amount;
                    break;
                }
                case Effect::Kind::lock:
                    // Funds stay under the contract; they are just reported
                    // as permanently unreachable.
                    locked_ += e.amount;
                    break;
            }
        }
    }

    std::uint64_t key_seed_;
    Round round_ = 0;
    Money minted_ = 0;
    Money burned_ = 0;
    Money locked_ = 0;
    int next_account_ = 1;
    int next_contract_ = 1;
    ContractId last_deployed_;

    std::map<AccountId, Account> accounts_;
    std::map<AccountId, SecretKey> keys_;
    std::map<ContractId, std::unique_ptr<Contract>> contracts_;
    std::map<ContractId, Money> funds_;
    std::vector<ContractId> contract_order_;  // creation order, for round hooks
    std::map<std::string, DeployFactory> factories_;

    std::vector<SignedCall> pending_;
    std::vector<CallRecord> log_;
    std::vector<RoundEvent> events_;
    std::vector<std::pair<AccountId, Money>> genesis_;
    OrderingPolicy ordering_;
};

}  // namespace escrowlab
