#pragma once

// Exhaustive phase-3 run enumeration against the six escrow axioms:
//   1 phases      — three-phase structure with a real delivery window
//   2 liveness    — a default exists wherever a decision can be pending
//   3 termination — every run settles by the deadline t
//   4 agreement   — agreeing runs pay exactly (-x, x) / (0, 0), and exist
//   5 incentives  — every disagreement leaves the buyer strictly below -x
//   6 boundedness — payouts stay covered by the pot, so |payoff| <= m < inf
//
// Within a round the seller's action is applied before the buyer's, matching
// the lab's default miner priority; the axioms are quantified over all runs,
// so any fixed intra-round order yields the same verdicts.

#include <deque>
#include <map>
#include <sstream>

#include "escrowlab/ledger.hpp"
#include "escrowlab/process.hpp"

namespace escrowlab {

struct WitnessStep {
    Round round = 0;
    Party party = Party::alice;
    ProcAction action;
};

struct AxiomVerdict {
    bool pass = true;
    std::string message;
    std::vector<WitnessStep> witness;  // replayable counterexample when failed
};

struct AxiomReport {
    std::string process_name;
    std::array<AxiomVerdict, 6> axiom;
    Money m = 0;  // max |net payoff| over all enumerated runs
    std::size_t terminal_states = 0;
    std::size_t states_visited = 0;

    bool all_pass() const {
        for (const auto& v : axiom) {
            if (!v.pass) return false;
        }
        return true;
    }
};

inline const char* axiom_name(int i) {
    static constexpr const char* names[6] = {"phases",     "liveness",   "termination",
                                             "agreement",  "incentives", "boundedness"};
    return names[i];
}

struct CheckOptions {
    std::size_t state_budget = 1'000'000;
};

namespace axiom_detail {

struct Node {
    Round round = 0;       // round about to be played (or reached, for terminals)
    std::string state;
    int parent = -1;
    bool has_step = false;
    WitnessStep step;
};

inline std::vector<WitnessStep> path_of(const std::vector<Node>& arena, int idx) {
    std::vector<WitnessStep> steps;
    for (int cur = idx; cur >= 0; cur = arena[cur].parent) {
        if (arena[cur].has_step) steps.push_back(arena[cur].step);
    }
    std::reverse(steps.begin(), steps.end());
    return steps;
}

}  // namespace axiom_detail

inline AxiomReport check_axioms(const EscrowProcess& proc, const CheckOptions& opts = {}) {
    using axiom_detail::Node;
    const EscrowParams& p = proc.params();
    AxiomReport report;
    report.process_name = proc.name();

    // Axiom 1: structural boundaries.
    {
        auto& v = report.axiom[0];
        const bool ok = 0 < p.phase1_end && p.phase1_end < p.delivery_deadline &&
                        p.delivery_deadline < p.phase3_end &&
                        (p.kind != EscrowKind::commit_reveal ||
                         (p.delivery_deadline < p.commit_end && p.commit_end < p.phase3_end));
        v.pass = ok;
        if (!ok) {
            std::ostringstream os;
            os << "phase boundaries invalid: phase1_end=" << p.phase1_end
               << " delivery_deadline=" << p.delivery_deadline << " phase3_end=" << p.phase3_end;
            v.message = os.str();
        }
    }

    std::vector<Node> arena;
    std::map<std::pair<Round, std::string>, int> seen;
    std::deque<int> frontier;

    auto intern = [&](Node n) -> int {
        arena.push_back(std::move(n));
        if (arena.size() > opts.state_budget) {
            throw BudgetExceeded("axiom check exceeded the state budget");
        }
        return static_cast<int>(arena.size()) - 1;
    };

    {
        Node root;
        root.round = p.delivery_deadline;
        root.state = proc.initial();
        int idx = intern(root);
        seen.emplace(std::make_pair(root.round, root.state), idx);
        frontier.push_back(idx);
    }

    auto& liveness = report.axiom[1];
    auto& termination = report.axiom[2];
    auto& agreement = report.axiom[3];
    auto& incentives = report.axiom[4];
    auto& bounded = report.axiom[5];
    bool agree1_seen = false, agree0_seen = false;

    auto nets = [&](const Settlement& s) -> std::array<Money, 2> {
        return {s.payout.pay_alice - p.deposit_of(Party::alice),
                s.payout.pay_bob - p.deposit_of(Party::bob)};
    };
    auto mag = [](Money v) { return v < 0 ? -v : v; };

    auto note_terminal = [&](int idx) {
        report.terminal_states += 1;
        const Settlement s = proc.settlement(arena[idx].state);
        const auto n = nets(s);
        report.m = std::max({report.m, mag(n[0]), mag(n[1])});

        if (s.outcome == OutcomeClass::agree_delivered) {
            agree1_seen = true;
            if (agreement.pass && !(n[0] == -p.x && n[1] == p.x)) {
                agreement.pass = false;
                std::ostringstream os;
                os << "agreement on delivery pays (" << n[0] << ", " << n[1] << "), expected ("
                   << -p.x << ", " << p.x << ")";
                agreement.message = os.str();
                agreement.witness = axiom_detail::path_of(arena, idx);
            }
        } else if (s.outcome == OutcomeClass::agree_not_delivered) {
            agree0_seen = true;
            if (agreement.pass && !(n[0] == 0 && n[1] == 0)) {
                agreement.pass = false;
                std::ostringstream os;
                os << "agreement on non-delivery pays (" << n[0] << ", " << n[1]
                   << "), expected (0, 0)";
                agreement.message = os.str();
                agreement.witness = axiom_detail::path_of(arena, idx);
            }
        } else if (s.outcome == OutcomeClass::disagree) {
            if (incentives.pass && !(n[0] < -p.x)) {
                incentives.pass = false;
                std::ostringstream os;
                os << "disagreement leaves the buyer at " << n[0] << ", not strictly below "
                   << -p.x;
                incentives.message = os.str();
                incentives.witness = axiom_detail::path_of(arena, idx);
            }
        }

        const Money promised = s.payout.pay_alice + s.payout.pay_bob + s.payout.burned;
        const bool covered = s.payout.pay_alice >= 0 && s.payout.pay_bob >= 0 &&
                             s.payout.burned >= 0 && promised <= p.pot();
        if (bounded.pass && !covered) {
            bounded.pass = false;
            std::ostringstream os;
            os << "settlement promises " << promised << " from a pot of " << p.pot()
               << "; payoffs are not bounded by any m";
            bounded.message = os.str();
            bounded.witness = axiom_detail::path_of(arena, idx);
        }
    };

    while (!frontier.empty()) {
        const int at = frontier.front();
        frontier.pop_front();
        const Round r = arena[at].round;
        const std::string state = arena[at].state;
        report.states_visited += 1;

        if (proc.is_settled(state)) {
            note_terminal(at);
            continue;
        }
        if (r >= p.phase3_end) {
            if (termination.pass) {
                termination.pass = false;
                std::ostringstream os;
                os << "run is still unsettled at t=" << p.phase3_end;
                termination.message = os.str();
                termination.witness = axiom_detail::path_of(arena, at);
            }
            continue;
        }

        for (Party party : {Party::alice, Party::bob}) {
            if (liveness.pass && proc.decision_pending(state, party, r) &&
                !proc.default_defined(state, party, r)) {
                liveness.pass = false;
                std::ostringstream os;
                os << party_name(party) << " has a pending decision at round " << r
                   << " with no default defined";
                liveness.message = os.str();
                liveness.witness = axiom_detail::path_of(arena, at);
            }
        }

        // Seller moves first within a round (default miner priority), then
        // the buyer, then the round boundary fires.
        for (const ProcAction& ab : proc.actions(state, Party::bob, r)) {
            const std::string s1 = proc.apply(state, Party::bob, ab, r);
            Node bn;
            bn.round = r;
            bn.state = s1;
            bn.parent = at;
            if (ab.kind != ProcAction::Kind::wait) {
                bn.has_step = true;
                bn.step = WitnessStep{r, Party::bob, ab};
            }
            const int bidx = intern(bn);
            for (const ProcAction& aa : proc.actions(s1, Party::alice, r)) {
                const std::string s2 = proc.apply(s1, Party::alice, aa, r);
                Node an;
                an.round = r;
                an.state = s2;
                an.parent = bidx;
                if (aa.kind != ProcAction::Kind::wait) {
                    an.has_step = true;
                    an.step = WitnessStep{r, Party::alice, aa};
                }
                const int aidx = intern(an);

                const std::string s3 = proc.at_deadline(s2, r + 1);
                Node next;
                next.round = r + 1;
                next.state = s3;
                next.parent = aidx;
                const auto key = std::make_pair(next.round, next.state);
                if (seen.count(key)) continue;
                const int nidx = intern(next);
                seen.emplace(key, nidx);
                frontier.push_back(nidx);
            }
        }
    }

    if (agreement.pass && !(agree1_seen && agree0_seen)) {
        agreement.pass = false;
        agreement.message = std::string("missing agreement profile: ") +
                            (agree1_seen ? "" : "(sigma1, sigma1) ") +
                            (agree0_seen ? "" : "(sigma0, sigma0)");
    }
    return report;
}

// ---------------------------------------------------------------------------
// Witness replay and materialization.

// Replays a witness through the process and returns the resulting terminal
// (or stuck) state. Deterministic, so a failed axiom can be demonstrated.
inline std::string replay_witness(const EscrowProcess& proc,
                                  const std::vector<WitnessStep>& steps) {
    const EscrowParams& p = proc.params();
    std::string state = proc.initial();
    std::size_t next = 0;
    for (Round r = p.delivery_deadline; r < p.phase3_end; ++r) {
        while (next < steps.size() && steps[next].round == r) {
            state = proc.apply(state, steps[next].party, steps[next].action, r);
            ++next;
        }
        state = proc.at_deadline(state, r + 1);
    }
    return state;
}

// Renders a witness as real signed calls against a scratch ledger, matching
// the JSON trace format used everywhere else. Commit/reveal steps use
// deterministic per-party nonces.
inline std::vector<SignedCall> witness_calls(const std::vector<WitnessStep>& steps,
                                             const ContractId& escrow_id = "escrow-witness") {
    Ledger scratch(7);
    const AccountId alice = scratch.create_account(0, "alice");
    const AccountId bob = scratch.create_account(0, "bob");
    auto nonce_for = [](Party p) {
        return Nonce{digest_bytes(sha256(to_bytes(std::string("witness-nonce:") + party_name(p))))};
    };
    std::array<std::optional<int>, 2> committed;
    std::vector<SignedCall> out;
    for (const WitnessStep& w : steps) {
        const AccountId& caller = w.party == Party::alice ? alice : bob;
        const Party opp = opponent(w.party);
        SignedCall call;
        switch (w.action.kind) {
            case ProcAction::Kind::declare:
                call = SignedCall{caller, escrow_id, "declare", {CallArg::of_int(w.action.bit)}, w.round, {}};
                break;
            case ProcAction::Kind::commit: {
                committed[static_cast<int>(w.party)] = w.action.bit;
                const Commitment c = commit(w.action.bit, nonce_for(w.party));
                call = SignedCall{caller, escrow_id, "commit",
                                  {CallArg::of_bytes(digest_bytes(c.digest))}, w.round, {}};
                break;
            }
            case ProcAction::Kind::reveal: {
                const int bit = committed[static_cast<int>(w.party)].value_or(0);
                call = SignedCall{caller, escrow_id, "reveal",
                                  {CallArg::of_int(bit), CallArg::of_bytes(nonce_for(w.party).bytes)},
                                  w.round, {}};
                break;
            }
            case ProcAction::Kind::reveal_garbage: {
                const int bit = committed[static_cast<int>(w.party)].value_or(0);
                call = SignedCall{caller, escrow_id, "reveal",
                                  {CallArg::of_int(bit), CallArg::of_bytes(Bytes(32, 0))}, w.round, {}};
                break;
            }
            case ProcAction::Kind::guess_hit: {
                const int bit = committed[static_cast<int>(opp)].value_or(0);
                call = SignedCall{caller, escrow_id, "guess",
                                  {CallArg::of_int(bit), CallArg::of_bytes(nonce_for(opp).bytes)},
                                  w.round, {}};
                break;
            }
            case ProcAction::Kind::guess_miss:
                call = SignedCall{caller, escrow_id, "guess",
                                  {CallArg::of_int(0), CallArg::of_bytes(Bytes(32, 0))}, w.round, {}};
                break;
            case ProcAction::Kind::confirm:
                call = SignedCall{caller, escrow_id, "confirm", {}, w.round, {}};
                break;
            case ProcAction::Kind::bonus:
                call = SignedCall{caller, escrow_id, "bonus", {}, w.round, {}};
                break;
            case ProcAction::Kind::wait:
                continue;
        }
        sign_call(scratch.key_of(caller), call);
        out.push_back(std::move(call));
    }
    return out;
}

}  // namespace escrowlab
