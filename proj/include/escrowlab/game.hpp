#pragma once

// Extensive-form engine for the phase-3 declaration game: tree construction,
// subgame-perfect solving by backward induction, matrix-game deviation checks
// and the extortion predicate.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "escrowlab/escrow_core.hpp"
#include "escrowlab/payout.hpp"

namespace escrowlab {

struct HasSimultaneousStage : std::runtime_error {
    HasSimultaneousStage()
        : std::runtime_error("backward induction needs perfect information; "
                             "game contains a simultaneous stage") {}
};

struct UnsettledTranscript : std::runtime_error {
    UnsettledTranscript() : std::runtime_error("transcript is not settled") {}
};

struct GameNode {
    enum class Kind { decision, simultaneous, terminal };
    Kind kind = Kind::terminal;

    // decision
    Party mover = Party::alice;
    std::vector<std::string> actions;  // canonical order == index order
    std::vector<int> children;

    // simultaneous stage (analyzed only by profile enumeration)
    std::vector<std::string> actions_alice;
    std::vector<std::string> actions_bob;
    std::vector<int> grid;  // child index at [a * |actions_bob| + b]

    // terminal
    std::array<Money, 2> payoff{0, 0};
};

struct ExtensiveGame {
    std::vector<GameNode> nodes;
    int root = 0;

    int add_terminal(Money alice_net, Money bob_net) {
        GameNode n;
        n.kind = GameNode::Kind::terminal;
        n.payoff = {alice_net, bob_net};
        nodes.push_back(std::move(n));
        return static_cast<int>(nodes.size()) - 1;
    }

    int add_decision(Party mover, std::vector<std::string> actions, std::vector<int> children) {
        if (actions.empty() || actions.size() != children.size()) {
            throw std::invalid_argument("decision node needs matching, non-empty actions/children");
        }
        GameNode n;
        n.kind = GameNode::Kind::decision;
        n.mover = mover;
        n.actions = std::move(actions);
        n.children = std::move(children);
        nodes.push_back(std::move(n));
        return static_cast<int>(nodes.size()) - 1;
    }

    int add_simultaneous(std::vector<std::string> aa, std::vector<std::string> ab,
                         std::vector<int> grid) {
        if (aa.empty() || ab.empty() || grid.size() != aa.size() * ab.size()) {
            throw std::invalid_argument("simultaneous node grid size mismatch");
        }
        GameNode n;
        n.kind = GameNode::Kind::simultaneous;
        n.actions_alice = std::move(aa);
        n.actions_bob = std::move(ab);
        n.grid = std::move(grid);
        nodes.push_back(std::move(n));
        return static_cast<int>(nodes.size()) - 1;
    }

    bool has_simultaneous() const {
        for (const auto& n : nodes) {
            if (n.kind == GameNode::Kind::simultaneous) return true;
        }
        return false;
    }
};

// One player's (or a full) pure strategy: chosen action index per decision
// node, total over that player's nodes; -1 elsewhere.
struct StrategyProfile {
    std::vector<int> choice;

    static StrategyProfile blank(const ExtensiveGame& g) {
        StrategyProfile p;
        p.choice.assign(g.nodes.size(), -1);
        return p;
    }
};

struct SolveResult {
    StrategyProfile profile;
    std::array<Money, 2> value{0, 0};
};

// Subgame-perfect equilibrium by backward induction. Ties break toward the
// lowest action index (canonical action order: 0 < 1 < guess < no-op).
inline SolveResult backward_induction(const ExtensiveGame& g) {
    if (g.has_simultaneous()) throw HasSimultaneousStage();
    SolveResult out;
    out.profile = StrategyProfile::blank(g);
    auto solve = [&](auto&& self, int idx) -> std::array<Money, 2> {
        const GameNode& n = g.nodes[idx];
        if (n.kind == GameNode::Kind::terminal) return n.payoff;
        const int me = static_cast<int>(n.mover);
        int best_action = 0;
        std::array<Money, 2> best = self(self, n.children[0]);
        for (std::size_t a = 1; a < n.children.size(); ++a) {
            auto v = self(self, n.children[a]);
            if (v[me] > best[me]) {
                best = v;
                best_action = static_cast<int>(a);
            }
        }
        out.profile.choice[idx] = best_action;
        return best;
    };
    out.value = solve(solve, g.root);
    return out;
}

// Payoffs when both players follow `profile` from the root.
inline std::array<Money, 2> play_value(const ExtensiveGame& g, const StrategyProfile& profile) {
    int idx = g.root;
    for (;;) {
        const GameNode& n = g.nodes[idx];
        if (n.kind == GameNode::Kind::terminal) return n.payoff;
        if (n.kind == GameNode::Kind::simultaneous) throw HasSimultaneousStage();
        const int a = profile.choice[idx];
        if (a < 0 || a >= static_cast<int>(n.children.size())) {
            throw std::invalid_argument("profile does not cover node " + std::to_string(idx));
        }
        idx = n.children[a];
    }
}

// Best response to a fixed opponent strategy over the tree: at the player's
// nodes pick argmax, at the opponent's follow their profile.
inline SolveResult best_response(const ExtensiveGame& g, Party player,
                                 const StrategyProfile& opponent) {
    if (g.has_simultaneous()) throw HasSimultaneousStage();
    SolveResult out;
    out.profile = StrategyProfile::blank(g);
    const int me = static_cast<int>(player);
    auto solve = [&](auto&& self, int idx) -> std::array<Money, 2> {
        const GameNode& n = g.nodes[idx];
        if (n.kind == GameNode::Kind::terminal) return n.payoff;
        if (n.mover != player) {
            const int a = opponent.choice[idx];
            if (a < 0 || a >= static_cast<int>(n.children.size())) {
                throw std::invalid_argument("opponent strategy not total at node " +
                                            std::to_string(idx));
            }
            out.profile.choice[idx] = a;
            return self(self, n.children[a]);
        }
        int best_action = 0;
        std::array<Money, 2> best = self(self, n.children[0]);
        for (std::size_t a = 1; a < n.children.size(); ++a) {
            auto v = self(self, n.children[a]);
            if (v[me] > best[me]) {
                best = v;
                best_action = static_cast<int>(a);
            }
        }
        out.profile.choice[idx] = best_action;
        return best;
    };
    out.value = solve(solve, g.root);
    return out;
}

// Matrix-game best response against a fixed opponent bit; ties -> action 0.
struct MatrixResponse {
    int bit = 0;
    Money payoff = 0;
};

inline MatrixResponse best_response(const MatrixGame& m, Party player, int opponent_bit) {
    auto value = [&](int mine) {
        return player == Party::alice ? m.alice(mine, opponent_bit) : m.bob(opponent_bit, mine);
    };
    MatrixResponse r{0, value(0)};
    if (value(1) > r.payoff) r = MatrixResponse{1, value(1)};
    return r;
}

// Truthful play as an equilibrium of the matrix game: given the shared ground
// truth, neither player gains by unilateral deviation from (g, g).
inline bool is_truthful_equilibrium(const MatrixGame& m, int ground_truth) {
    const int g = ground_truth;
    if (g != 0 && g != 1) throw std::invalid_argument("ground truth must be a bit");
    const bool alice_ok = m.alice(g, g) >= m.alice(1 - g, g);
    const bool bob_ok = m.bob(g, g) >= m.bob(g, 1 - g);
    return alice_ok && bob_ok;
}

// ---------------------------------------------------------------------------
// Reduced phase-3 choice game for an escrow: each party picks the bit it will
// end up declaring. On-chain visibility makes the classical escrow a
// perfect-information sequential game in miner-priority order; commitments
// hide the bits until both are fixed, which is one simultaneous stage.

struct GameBuildOptions {
    bool force_simultaneous = false;  // model the folklore normal-form view
    Money good_value = 0;             // add the good's value to Alice at every leaf when delivered
    bool delivered = false;
    std::size_t node_budget = 10'000;
};

inline ExtensiveGame build_escrow_choice_game(const EscrowParams& params,
                                              const OrderingPolicy& ordering,
                                              const GameBuildOptions& opts = {}) {
    ExtensiveGame g;
    const Money bonus = (opts.delivered && opts.good_value > 0) ? opts.good_value : 0;
    auto leaf = [&](int a, int b) {
        auto n = net_payoffs(a, b, params.x, params.deposit_variant);
        return g.add_terminal(n[0] + bonus, n[1]);
    };
    const bool simultaneous =
        opts.force_simultaneous || params.kind == EscrowKind::commit_reveal;
    if (simultaneous) {
        std::vector<int> grid;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) grid.push_back(leaf(a, b));
        }
        g.root = g.add_simultaneous({"0", "1"}, {"0", "1"}, grid);
        return g;
    }
    const bool bob_first = ordering.rank(params.seller) < ordering.rank(params.buyer);
    if (bob_first) {
        std::vector<int> bob_children;
        for (int b = 0; b < 2; ++b) {
            int a0 = leaf(0, b);
            int a1 = leaf(1, b);
            bob_children.push_back(g.add_decision(Party::alice, {"0", "1"}, {a0, a1}));
        }
        g.root = g.add_decision(Party::bob, {"0", "1"}, bob_children);
    } else {
        std::vector<int> alice_children;
        for (int a = 0; a < 2; ++a) {
            int b0 = leaf(a, 0);
            int b1 = leaf(a, 1);
            alice_children.push_back(g.add_decision(Party::bob, {"0", "1"}, {b0, b1}));
        }
        g.root = g.add_decision(Party::alice, {"0", "1"}, alice_children);
    }
    if (g.nodes.size() > opts.node_budget) {
        throw BudgetExceeded("game tree exceeds node budget");
    }
    return g;
}

// ---------------------------------------------------------------------------
// Extortion predicate: money moved from buyer to seller while the good was
// never provided.

struct SettledOutcome {
    bool settled = false;
    bool delivered = false;
    Money alice_net = 0;
    Money bob_net = 0;
};

inline bool detect_extortion(const SettledOutcome& o) {
    if (!o.settled) throw UnsettledTranscript();
    return !o.delivered && o.alice_net < 0 && o.bob_net > 0;
}

}  // namespace escrowlab
