#include <catch2/catch_amalgamated.hpp>

#include "escrowlab/contracts.hpp"
#include "escrowlab/prng.hpp"

using namespace escrowlab;

namespace {

struct EscrowRig {
    Ledger ledger{42};
    AccountId alice, bob;
    ContractId escrow;
    EscrowParams params;

    explicit EscrowRig(EscrowKind kind, Money x = 100, bool defense = false,
                       DepositVariant dv = DepositVariant::main) {
        register_escrow_factories(ledger);
        alice = ledger.create_account(2000, "alice");
        bob = ledger.create_account(2000, "bob");
        ledger.ordering() = OrderingPolicy::prefer({"bob", "alice"});
        params.kind = kind;
        params.x = x;
        params.phase1_end = 2;
        params.delivery_deadline = 4;
        params.commit_end = 6;
        params.phase3_end = kind == EscrowKind::commit_reveal ? 9 : 8;
        params.deposit_variant = dv;
        params.guess_defense = defense;
        params.buyer = alice;
        params.seller = bob;
        SignedCall dep = ledger.make_call(alice, Ledger::kSystem, "deploy", escrow_deploy_args(params));
        REQUIRE(ledger.submit(dep).ok);
        ledger.finalize_round();
        escrow = ledger.contract_ids().at(0);
    }

    void submit(const AccountId& who, const std::string& fn, std::vector<CallArg> args) {
        REQUIRE(ledger.submit(ledger.make_call(who, escrow, fn, std::move(args))).ok);
    }

    std::vector<CallRecord> step() { return ledger.finalize_round(); }

    void advance_to(Round r) {
        while (ledger.round() < r) ledger.finalize_round();
    }

    void deposit_both() {
        submit(alice, "deposit", {CallArg::of_int(params.deposit_of(Party::alice))});
        submit(bob, "deposit", {CallArg::of_int(params.deposit_of(Party::bob))});
        auto recs = step();
        for (const auto& r : recs) REQUIRE(r.applied);
    }

    Reject last_reason(const std::vector<CallRecord>& recs, const AccountId& who) {
        for (auto it = recs.rbegin(); it != recs.rend(); ++it) {
            if (it->call.caller == who) return it->reason;
        }
        FAIL("no record for " + who);
        return Reject::none;
    }
};

}  // namespace

TEST_CASE("classical payout table") {
    CHECK(classical_payout(0, 0, 100) == PayoutResult{200, 100, 0});
    CHECK(classical_payout(1, 1, 100) == PayoutResult{100, 200, 0});
    CHECK(classical_payout(0, 1, 100) == PayoutResult{0, 0, 300});
    CHECK(classical_payout(1, 0, 100) == PayoutResult{0, 0, 300});
}

TEST_CASE("net payoff matrix") {
    CHECK(net_payoffs(1, 1, 100) == std::array<Money, 2>{-100, 100});
    CHECK(net_payoffs(0, 0, 100) == std::array<Money, 2>{0, 0});
    CHECK(net_payoffs(1, 0, 100) == std::array<Money, 2>{-200, -100});
    CHECK(net_payoffs(0, 1, 100) == std::array<Money, 2>{-200, -100});
}

TEST_CASE("net payoffs equal gross payouts minus deposits, both variants") {
    for (DepositVariant v : {DepositVariant::main, DepositVariant::both_2x}) {
        for (Money x : {1, 7, 10, 100, 12345}) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    auto net = net_payoffs(a, b, x, v);
                    auto gross = classical_payout(a, b, x, v);
                    CHECK(net[0] == gross.pay_alice - required_deposit(Party::alice, x, v));
                    CHECK(net[1] == gross.pay_bob - required_deposit(Party::bob, x, v));
                    CHECK(gross.total() == required_deposit(Party::alice, x, v) +
                                               required_deposit(Party::bob, x, v));
                }
            }
        }
    }
}

TEST_CASE("classical escrow: declared choices settle by the table") {
    EscrowRig rig(EscrowKind::classical);
    rig.deposit_both();
    rig.advance_to(4);
    rig.submit(rig.bob, "declare", {CallArg::of_int(1)});
    auto recs = rig.step();
    CHECK(recs[0].applied);

    // Bob's declaration is on-chain, visible before Alice submits hers.
    const auto* c = rig.ledger.find_as<ClassicalEscrowContract>(rig.escrow);
    REQUIRE(c != nullptr);
    CHECK(c->core().choice(Party::bob) == 1);

    rig.submit(rig.alice, "declare", {CallArg::of_int(1)});
    rig.step();
    rig.advance_to(8);
    CHECK(c->core().settled());
    CHECK(c->core().settlement().outcome == OutcomeClass::agree_delivered);
    CHECK(rig.ledger.balance_of(rig.alice) == 2000 - 200 + 100);
    CHECK(rig.ledger.balance_of(rig.bob) == 2000 - 100 + 200);
    CHECK(rig.ledger.conservation_holds());
}

TEST_CASE("classical escrow: missing declaration defaults to 1 at the deadline") {
    EscrowRig rig(EscrowKind::classical);
    rig.deposit_both();
    rig.advance_to(4);
    rig.submit(rig.bob, "declare", {CallArg::of_int(1)});
    rig.step();
    rig.advance_to(8);  // Alice never declares
    const auto* c = rig.ledger.find_as<ClassicalEscrowContract>(rig.escrow);
    CHECK(c->core().settlement().effective_choice[0] == 1);
    CHECK(c->core().settlement().outcome == OutcomeClass::agree_delivered);
    CHECK(rig.ledger.balance_of(rig.alice) == 1900);
    CHECK(rig.ledger.balance_of(rig.bob) == 2100);
}

TEST_CASE("classical escrow: disagreement burns the pot") {
    EscrowRig rig(EscrowKind::classical);
    rig.deposit_both();
    rig.advance_to(4);
    rig.submit(rig.bob, "declare", {CallArg::of_int(1)});
    rig.submit(rig.alice, "declare", {CallArg::of_int(0)});
    rig.step();
    rig.advance_to(8);
    CHECK(rig.ledger.burned() == 300);
    CHECK(rig.ledger.balance_of(rig.escrow) == 0);
    CHECK(rig.ledger.balance_of(rig.alice) == 1800);
    CHECK(rig.ledger.balance_of(rig.bob) == 1900);
    CHECK(rig.ledger.conservation_holds());
}

TEST_CASE("classical escrow rejects out-of-phase and duplicate steps") {
    EscrowRig rig(EscrowKind::classical);
    rig.deposit_both();

    // Declaring during the delivery window is premature.
    rig.advance_to(2);
    rig.submit(rig.alice, "declare", {CallArg::of_int(0)});
    auto recs = rig.step();
    CHECK(rig.last_reason(recs, rig.alice) == Reject::wrong_phase);

    rig.advance_to(4);
    rig.submit(rig.alice, "declare", {CallArg::of_int(0)});
    rig.step();
    rig.submit(rig.alice, "declare", {CallArg::of_int(1)});
    recs = rig.step();
    CHECK(rig.last_reason(recs, rig.alice) == Reject::already_declared);

    // Deposits are phase-1 only and amount-checked.
    EscrowRig rig2(EscrowKind::classical);
    rig2.submit(rig2.alice, "deposit", {CallArg::of_int(150)});
    recs = rig2.step();
    CHECK(rig2.last_reason(recs, rig2.alice) == Reject::wrong_deposit_amount);
    rig2.submit(rig2.alice, "deposit", {CallArg::of_int(200)});
    rig2.step();
    rig2.submit(rig2.alice, "deposit", {CallArg::of_int(200)});
    recs = rig2.step();
    CHECK(rig2.last_reason(recs, rig2.alice) == Reject::already_deposited);
}

TEST_CASE("classical escrow aborts and refunds when deposits are incomplete") {
    EscrowRig rig(EscrowKind::classical);
    rig.submit(rig.alice, "deposit", {CallArg::of_int(200)});
    rig.step();
    rig.advance_to(3);  // phase1_end passed, Bob never paid
    const auto* c = rig.ledger.find_as<ClassicalEscrowContract>(rig.escrow);
    CHECK(c->core().aborted());
    CHECK(rig.ledger.balance_of(rig.alice) == 2000);
    CHECK(rig.ledger.balance_of(rig.escrow) == 0);
    CHECK(rig.ledger.conservation_holds());

    // The contract is closed afterwards.
    rig.advance_to(4);
    rig.submit(rig.bob, "declare", {CallArg::of_int(1)});
    auto recs = rig.step();
    CHECK(rig.last_reason(recs, rig.bob) == Reject::contract_closed);
}

TEST_CASE("commit-reveal: commit then reveal records the choice") {
    EscrowRig rig(EscrowKind::commit_reveal);
    rig.deposit_both();
    rig.advance_to(4);
    Prng rng(1);
    Nonce n = Nonce::draw(rng);
    Commitment c = commit(1, n);
    rig.submit(rig.bob, "commit", {CallArg::of_bytes(digest_bytes(c.digest))});
    rig.step();

    const auto* esc = rig.ledger.find_as<CommitRevealEscrowContract>(rig.escrow);
    REQUIRE(esc != nullptr);
    CHECK(esc->core().stored_hash(Party::bob) == c);
    // Only digest bytes are on-chain; the recorded choice is still unset.
    CHECK_FALSE(esc->core().recorded_choice(Party::bob).has_value());

    rig.advance_to(6);
    rig.submit(rig.bob, "reveal", {CallArg::of_int(1), CallArg::of_bytes(n.bytes)});
    auto recs = rig.step();
    CHECK(recs[0].applied);
    CHECK(esc->core().recorded_choice(Party::bob) == 1);
}

TEST_CASE("commit-reveal: mismatched reveal is rejected and the default applies") {
    EscrowRig rig(EscrowKind::commit_reveal);
    rig.deposit_both();
    rig.advance_to(4);
    Prng rng(2);
    Nonce nb = Nonce::draw(rng);
    Commitment cb = commit(1, nb);
    rig.submit(rig.bob, "commit", {CallArg::of_bytes(digest_bytes(cb.digest))});
    rig.step();
    rig.advance_to(6);
    // Bob tries to reopen his commitment as a 0.
    rig.submit(rig.bob, "reveal", {CallArg::of_int(0), CallArg::of_bytes(nb.bytes)});
    auto recs = rig.step();
    CHECK(rig.last_reason(recs, rig.bob) == Reject::hash_mismatch);

    rig.advance_to(9);
    const auto* esc = rig.ledger.find_as<CommitRevealEscrowContract>(rig.escrow);
    CHECK(esc->core().settled());
    // Nobody revealed: both default to 0, deposits refunded.
    CHECK(esc->core().settlement().outcome == OutcomeClass::agree_not_delivered);
    CHECK(rig.ledger.balance_of(rig.alice) == 2000);
    CHECK(rig.ledger.balance_of(rig.bob) == 2000);
}

TEST_CASE("commit-reveal: one-sided reveal makes the silent party agree") {
    EscrowRig rig(EscrowKind::commit_reveal);
    rig.deposit_both();
    rig.advance_to(4);
    Prng rng(3);
    Nonce nb = Nonce::draw(rng);
    rig.submit(rig.bob, "commit", {CallArg::of_bytes(digest_bytes(commit(1, nb).digest))});
    rig.step();
    rig.advance_to(6);
    rig.submit(rig.bob, "reveal", {CallArg::of_int(1), CallArg::of_bytes(nb.bytes)});
    rig.step();
    rig.advance_to(9);
    const auto* esc = rig.ledger.find_as<CommitRevealEscrowContract>(rig.escrow);
    CHECK(esc->core().settlement().outcome == OutcomeClass::agree_delivered);
    CHECK(rig.ledger.balance_of(rig.alice) == 1900);
    CHECK(rig.ledger.balance_of(rig.bob) == 2100);
}

TEST_CASE("guess defense pays the pot for a correct early opening") {
    EscrowRig rig(EscrowKind::commit_reveal, 100, /*defense=*/true);
    rig.deposit_both();
    rig.advance_to(4);
    Prng rng(4);
    Nonce nb = Nonce::draw(rng);
    rig.submit(rig.bob, "commit", {CallArg::of_bytes(digest_bytes(commit(1, nb).digest))});
    rig.step();

    // Alice knows Bob's opening (leaked off-chain) and claims it.
    rig.submit(rig.alice, "guess", {CallArg::of_int(1), CallArg::of_bytes(nb.bytes)});
    auto recs = rig.step();
    CHECK(recs[0].applied);
    const auto* esc = rig.ledger.find_as<CommitRevealEscrowContract>(rig.escrow);
    CHECK(esc->core().settlement().outcome == OutcomeClass::guess_claim);
    CHECK(esc->core().settlement().guess_winner == Party::alice);
    CHECK(rig.ledger.balance_of(rig.alice) == 2000 - 200 + 300);  // net +x
    CHECK(rig.ledger.balance_of(rig.bob) == 1900);                // net -x
    CHECK(rig.ledger.conservation_holds());
}

TEST_CASE("guess paths: wrong nonce, disabled defense, after reveal") {
    Prng rng(5);
    Nonce nb = Nonce::draw(rng);
    Nonce wrong = Nonce::draw(rng);

    SECTION("wrong nonce leaves the state untouched") {
        EscrowRig rig(EscrowKind::commit_reveal, 100, true);
        rig.deposit_both();
        rig.advance_to(4);
        rig.submit(rig.bob, "commit", {CallArg::of_bytes(digest_bytes(commit(1, nb).digest))});
        rig.step();
        rig.submit(rig.alice, "guess", {CallArg::of_int(1), CallArg::of_bytes(wrong.bytes)});
        auto recs = rig.step();
        CHECK(rig.last_reason(recs, rig.alice) == Reject::invalid_opening);
        CHECK(rig.ledger.balance_of(rig.escrow) == 300);
    }
    SECTION("defense disabled") {
        EscrowRig rig(EscrowKind::commit_reveal, 100, false);
        rig.deposit_both();
        rig.advance_to(4);
        rig.submit(rig.bob, "commit", {CallArg::of_bytes(digest_bytes(commit(1, nb).digest))});
        rig.step();
        rig.submit(rig.alice, "guess", {CallArg::of_int(1), CallArg::of_bytes(nb.bytes)});
        auto recs = rig.step();
        CHECK(rig.last_reason(recs, rig.alice) == Reject::defense_disabled);
    }
    SECTION("guess after the opponent revealed") {
        EscrowRig rig(EscrowKind::commit_reveal, 100, true);
        rig.deposit_both();
        rig.advance_to(4);
        rig.submit(rig.bob, "commit", {CallArg::of_bytes(digest_bytes(commit(1, nb).digest))});
        rig.step();
        rig.advance_to(6);
        rig.submit(rig.bob, "reveal", {CallArg::of_int(1), CallArg::of_bytes(nb.bytes)});
        rig.step();
        rig.submit(rig.alice, "guess", {CallArg::of_int(1), CallArg::of_bytes(nb.bytes)});
        auto recs = rig.step();
        CHECK(rig.last_reason(recs, rig.alice) == Reject::already_revealed);
    }
    SECTION("guess before any hash is stored") {
        EscrowRig rig(EscrowKind::commit_reveal, 100, true);
        rig.deposit_both();
        rig.advance_to(4);
        rig.submit(rig.alice, "guess", {CallArg::of_int(1), CallArg::of_bytes(nb.bytes)});
        auto recs = rig.step();
        CHECK(rig.last_reason(recs, rig.alice) == Reject::guess_window_closed);
    }
}

TEST_CASE("commit-reveal rejects double commits and premature reveals") {
    EscrowRig rig(EscrowKind::commit_reveal);
    rig.deposit_both();
    rig.advance_to(4);
    Prng rng(6);
    Nonce n = Nonce::draw(rng);
    rig.submit(rig.bob, "commit", {CallArg::of_bytes(digest_bytes(commit(1, n).digest))});
    rig.step();
    rig.submit(rig.bob, "commit", {CallArg::of_bytes(digest_bytes(commit(0, n).digest))});
    auto recs = rig.step();
    CHECK(rig.last_reason(recs, rig.bob) == Reject::already_committed);

    // Reveal during the commit window is out of phase.
    rig.submit(rig.bob, "reveal", {CallArg::of_int(1), CallArg::of_bytes(n.bytes)});
    recs = rig.step();
    CHECK(rig.last_reason(recs, rig.bob) == Reject::wrong_phase);
}

TEST_CASE("safe remote purchase: confirmation releases, silence locks") {
    SECTION("alice confirms") {
        EscrowRig rig(EscrowKind::safe_remote_purchase);
        rig.deposit_both();
        rig.advance_to(4);
        rig.submit(rig.alice, "confirm", {});
        auto recs = rig.step();
        CHECK(recs[0].applied);
        CHECK(rig.ledger.balance_of(rig.alice) == 1900);
        CHECK(rig.ledger.balance_of(rig.bob) == 2100);
        CHECK(rig.ledger.locked() == 0);
    }
    SECTION("no confirmation: the pot stays locked forever") {
        EscrowRig rig(EscrowKind::safe_remote_purchase);
        rig.deposit_both();
        rig.advance_to(8);
        const auto* c = rig.ledger.find_as<SrpContract>(rig.escrow);
        CHECK(c->core().settled());
        CHECK(c->core().settlement().outcome == OutcomeClass::locked);
        CHECK(rig.ledger.balance_of(rig.escrow) == 300);
        CHECK(rig.ledger.locked() == 300);
        CHECK(rig.ledger.balance_of(rig.alice) == 1800);
        CHECK(rig.ledger.balance_of(rig.bob) == 1900);
        CHECK(rig.ledger.conservation_holds());
    }
    SECTION("bob cannot confirm") {
        EscrowRig rig(EscrowKind::safe_remote_purchase);
        rig.deposit_both();
        rig.advance_to(4);
        rig.submit(rig.bob, "confirm", {});
        auto recs = rig.step();
        CHECK(rig.last_reason(recs, rig.bob) == Reject::unauthorized);
    }
}

TEST_CASE("strangers cannot touch an escrow") {
    EscrowRig rig(EscrowKind::classical);
    AccountId mallory = rig.ledger.create_account(500, "mallory");
    REQUIRE(rig.ledger.submit(rig.ledger.make_call(mallory, rig.escrow, "deposit",
                                                   {CallArg::of_int(100)}))
                .ok);
    auto recs = rig.step();
    CHECK(rig.last_reason(recs, mallory) == Reject::unauthorized);
}

TEST_CASE("stage monotonicity: no operation reopens a settled escrow") {
    EscrowRig rig(EscrowKind::classical);
    rig.deposit_both();
    rig.advance_to(4);
    rig.submit(rig.alice, "declare", {CallArg::of_int(1)});
    rig.submit(rig.bob, "declare", {CallArg::of_int(1)});
    rig.step();
    rig.advance_to(8);
    const auto* c = rig.ledger.find_as<ClassicalEscrowContract>(rig.escrow);
    REQUIRE(c->core().settled());
    rig.submit(rig.alice, "declare", {CallArg::of_int(0)});
    auto recs = rig.step();
    CHECK(rig.last_reason(recs, rig.alice) == Reject::contract_closed);
    CHECK(c->core().settlement().outcome == OutcomeClass::agree_delivered);
}
