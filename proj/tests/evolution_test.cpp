#include "emcs/evolution.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace emcs;
using namespace emcs::testing;

namespace {

// next(add(p)) <- (o1@q) over a fact store c1 with signature {p}.
EMCS deferred_add_system() {
    EMCS m;
    auto c = context("c1", LogicKind::factstore, {"p"});
    c.bridge_rules.push_back({next(add("p")), {observed(0, "q")}});
    m.contexts.push_back(std::move(c));
    m.observers.push_back(observer("o1", {"q"}));
    return m;
}

TEST(NextKb, Examples) {
    const EMCS plain = deferred_add_system();
    EXPECT_EQ(next_kb(plain, state({{}}), obs({{}}), config({{}})), (std::set<KBConfiguration>{config({{}})}));
    EXPECT_EQ(next_kb(plain, state({{}}), obs({{"q"}}), config({{}})),
              (std::set<KBConfiguration>{config({facts({"p"})})}));

    EMCS conflict = plain;
    conflict.contexts[0].bridge_rules.push_back({next(del("p")), {observed(0, "q")}});
    EXPECT_EQ(next_kb(conflict, state({{}}), obs({{"q"}}), config({{}})),
              (std::set<KBConfiguration>{config({facts({"p"})}), config({{}})}));
}

TEST(NextKb, IsTheProductOfPerContextResults) {
    EMCS m;
    for (const char* name : {"c1", "c2"}) {
        auto c = context(name, LogicKind::factstore, {"p"});
        c.bridge_rules.push_back({next(add("p")), {}});
        c.bridge_rules.push_back({next(del("p")), {}});
        m.contexts.push_back(c);
    }
    EXPECT_EQ(next_kb(m, state({{}, {}}), empty_observation(m), config({{}, {}})).size(), 4u);
}

TEST(Evolve, DeferredAddTakesEffectAtTheNextStep) {
    const EMCS m = deferred_add_system();
    const ObservationSequence seq{obs({{"q"}}), obs({{}})};
    const auto traces = enumerate_evolving_equilibria(m, seq, 2);
    ASSERT_EQ(traces.size(), 1u);
    EXPECT_EQ(traces[0].states, (EvolvingBeliefState{state({{}}), state({{"p"}})}));
    EXPECT_EQ(traces[0].kb_configs, (std::vector<KBConfiguration>{config({{}}), config({facts({"p"})})}));
    EXPECT_EQ(traces[0].applied_next_ops, (std::vector<std::vector<OperationSet>>{{{add("p")}}}));
}

TEST(Evolve, SizeOneIsStaticSolving) {
    Generator gen(99);
    for (int round = 0; round < 50; ++round) {
        const auto inst = gen.next();
        const auto traces = enumerate_evolving_equilibria(inst.system, inst.observations, 1);
        const auto eqs = enumerate_equilibria(inst.system, inst.observations.front());
        ASSERT_EQ(traces.size(), eqs.size());
        for (std::size_t x = 0; x < eqs.size(); ++x) EXPECT_EQ(traces[x].states.front(), eqs[x].state);
    }
}

TEST(Evolve, InconsistentContextHasNoTraces) {
    EMCS m;
    m.contexts.push_back(context("c1", LogicKind::asp, {"a"}, {rule("a", {}, {"a"})}));
    const ObservationSequence seq(3, empty_observation(m));
    for (std::size_t s = 1; s <= 3; ++s) EXPECT_TRUE(enumerate_evolving_equilibria(m, seq, s).empty());
}

TEST(Evolve, RejectsSizeBeyondObservations) {
    const EMCS m = deferred_add_system();
    EXPECT_THROW(enumerate_evolving_equilibria(m, {obs({{}})}, 2), SizeExceedsObservations);
    EXPECT_THROW(is_evolving_equilibrium(m, {obs({{}})}, {state({{}}), state({{}})}), SizeExceedsObservations);
}

TEST(IsEvolving, Examples) {
    const EMCS m = deferred_add_system();
    const ObservationSequence seq{obs({{"q"}}), obs({{}})};
    for (const auto& t : enumerate_evolving_equilibria(m, seq, 2)) {
        const auto ws = evolving_witnesses(m, seq, t.states);
        EXPECT_NE(std::find(ws.begin(), ws.end(), t.kb_configs), ws.end());
    }
    EXPECT_FALSE(is_evolving_equilibrium(m, seq, {state({{"p"}}), state({{"p"}})}));
    EXPECT_TRUE(is_evolving_equilibrium(m, seq, {state({{}})}));
}

TEST(PrefixProperty, Examples) {
    const EMCS m = deferred_add_system();
    const ObservationSequence seq{obs({{"q"}}), obs({{}})};
    const auto traces = enumerate_evolving_equilibria(m, seq, 2);
    ASSERT_EQ(traces.size(), 1u);
    EXPECT_TRUE(check_prefix_property(m, seq, traces[0]));
    EXPECT_TRUE(is_evolving_equilibrium(m, {seq[0]}, {state({{}})}));
    EXPECT_TRUE(is_evolving_equilibrium(m, seq, {state({{}})}));
    for (const auto& t : enumerate_evolving_equilibria(m, seq, 1)) EXPECT_TRUE(check_prefix_property(m, seq, t));
}

// Two bridge rules with the same body, one instantaneous and one deferred:
// the observation acts at once and persists into the next step.
TEST(Evolve, InstantAndPersistentEffects) {
    const EMCS m = instant_and_persistent_system();
    const ObservationSequence seq{obs({{"q"}}), obs({{}})};
    const auto traces = enumerate_evolving_equilibria(m, seq, 2);
    ASSERT_EQ(traces.size(), 1u);
    EXPECT_TRUE(traces[0].states[0][0].contains("p"));
    EXPECT_TRUE(traces[0].kb_configs[1][0].contains(Rule::fact("p")));
    EXPECT_EQ(traces[0].states[1], state({{"p"}}));
}

TEST(EvolveProperty, TracesAreSoundCompleteBranchesAndPrefixClosed) {
    Generator gen(1234);
    for (int round = 0; round < 150; ++round) {
        const auto inst = gen.next();
        const EMCS& m = inst.system;
        const auto& seq = inst.observations;
        const std::size_t size = gen.pick(1, seq.size());
        const auto traces = enumerate_evolving_equilibria(m, seq, size);
        ASSERT_TRUE(std::is_sorted(traces.begin(), traces.end()));
        if (enumerate_equilibria(m, seq.front()).empty()) {
            EXPECT_TRUE(traces.empty());
        }
        for (const auto& t : traces) {
            ASSERT_EQ(t.kb_configs.front(), initial_configuration(m));
            for (std::size_t j = 0; j < t.size(); ++j) {
                ASSERT_TRUE(is_equilibrium(m, t.kb_configs[j], seq[j], t.states[j]));
                ASSERT_TRUE(is_equilibrium(replace(m, t.kb_configs[j], seq[j]), seq[j], t.states[j]));
                if (j + 1 < t.size()) {
                    ASSERT_TRUE(next_kb(m, t.states[j], seq[j], t.kb_configs[j]).contains(t.kb_configs[j + 1]));
                }
            }
            const auto ws = evolving_witnesses(m, seq, t.states);
            ASSERT_NE(std::find(ws.begin(), ws.end(), t.kb_configs), ws.end());
            ASSERT_TRUE(check_prefix_property(m, seq, t)) << "round " << round;
        }
    }
}

} // namespace
