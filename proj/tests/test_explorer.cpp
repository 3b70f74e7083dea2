#include <doctest.h>

#include <map>

#include "aodv/builtins.hpp"
#include "aodv/explorer.hpp"

using namespace aodv;

namespace {

ExploreBounds smallBounds() {
    ExploreBounds b;
    b.maxStates = 400000;
    b.maxDepth = 120;
    return b;
}

}  // namespace

TEST_CASE("hash equality on small explorations means state equality") {
    // Collision check: replay every state reached within a small scenario and
    // compare full canonical forms per hash bucket.
    const Scenario s = findBuiltin("fig5shape")->scenario;
    InterpretationConfig cfg;

    std::map<std::uint64_t, std::string> byHash;
    std::uint64_t clashes = 0;

    // Walk the space manually, mirroring the explorer's expansion.
    struct Item {
        NetworkState net;
        std::size_t cursor;
    };
    std::vector<Item> stack{{makeInitialNetwork(s.nodes, s.initialEdges, cfg), 0}};
    std::vector<ScenarioEvent> events;
    for (const ScenarioEvent& ev : s.events)
        if (ev.kind != ScenarioEvent::Kind::Assert && ev.kind != ScenarioEvent::Kind::Step &&
            ev.kind != ScenarioEvent::Kind::Drain)
            events.push_back(ev);
    std::size_t visited = 0;
    while (!stack.empty() && visited < 30000) {
        Item cur = std::move(stack.back());
        stack.pop_back();
        const std::uint64_t h = canonicalHash(cur.net) * 31 + cur.cursor;
        const std::string full = canonicalSerialize(cur.net) + "#" + std::to_string(cur.cursor);
        auto [it, inserted] = byHash.insert({h, full});
        if (!inserted) {
            CHECK(it->second == full);  // same hash, same state
            ++clashes;
            continue;
        }
        ++visited;
        std::vector<Choice> choices = enabledProtocolChoices(cur.net);
        std::size_t protocolCount = choices.size();
        for (std::size_t i = 0; i <= protocolCount; ++i) {
            Item next{cur.net, cur.cursor};
            Choice c;
            if (i < protocolCount) {
                c = choices[i];
            } else if (cur.cursor < events.size()) {
                const ScenarioEvent& ev = events[cur.cursor];
                c.kind = ev.kind == ScenarioEvent::Kind::Connect ? Choice::Kind::Connect
                         : ev.kind == ScenarioEvent::Kind::Disconnect
                             ? Choice::Kind::Disconnect
                             : Choice::Kind::Inject;
                c.node = ev.a;
                if (c.kind == Choice::Kind::Inject) {
                    c.dip = ev.b;
                    c.payload = ev.payload;
                } else {
                    c.peer = ev.b;
                }
                next.cursor = cur.cursor + 1;
            } else {
                continue;
            }
            StepOptions so;
            so.computeHash = false;
            stepNetwork(next.net, c, cfg, so);
            stack.push_back(std::move(next));
        }
    }
    CHECK(visited > 3000);
    CHECK(clashes > 0);  // dedup actually exercised
}

TEST_CASE("exploration bounds are enforced up front") {
    const Builtin* shape = findBuiltin("fig8shape");
    REQUIRE(shape != nullptr);
    ExploreBounds bounds;  // default injection bound is far below the shape's preloads
    CHECK_THROWS_AS(
        (void)exploreAll(shape->scenario, InterpretationConfig{}, bounds,
                         CheckSelection{.state = false, .monotone = false, .loops = true}),
        std::invalid_argument);
}

TEST_CASE("the scripted prefix before a free block replays into exploration") {
    const Builtin* shape = findBuiltin("fig8shape");
    REQUIRE(shape != nullptr);
    ExploreBounds bounds;
    bounds.maxInjections = 14;
    bounds.maxTopologyEvents = 6;
    CheckSelection checks;
    checks.loops = true;
    const InterpretationConfig cfg = parseConfig("amb8=8b");
    const ExploreReport r = exploreAll(shape->scenario, cfg, bounds, checks);
    const ExploreViolation* loop = nullptr;
    for (const ExploreViolation& v : r.violations)
        if (v.id == "routing-loop") loop = &v;
    REQUIRE(loop != nullptr);
    CHECK(detectRoutingLoop(replayWitness(shape->scenario, cfg, loop->witness)).has_value());
    // Default config over the same space stays clean.
    const ExploreReport clean =
        exploreAll(shape->scenario, InterpretationConfig{}, bounds, checks);
    CHECK(!clean.frontierTruncated);
    CHECK(clean.violations.empty());
}

TEST_CASE("identical bounds reproduce identical coverage") {
    const Builtin* shape = findBuiltin("fig5shape");
    REQUIRE(shape != nullptr);
    CheckSelection checks;
    checks.loops = true;
    const ExploreReport a =
        exploreAll(shape->scenario, InterpretationConfig{}, smallBounds(), checks);
    const ExploreReport b =
        exploreAll(shape->scenario, InterpretationConfig{}, smallBounds(), checks);
    CHECK(a.statesVisited == b.statesVisited);
    CHECK(a.transitionsFired == b.transitionsFired);
    CHECK(!a.frontierTruncated);
    CHECK(a.violations.empty());  // default config: no loop in any interleaving
}

TEST_CASE("the no-increment resolution has a loop some interleaving reaches") {
    const Builtin* shape = findBuiltin("fig5shape");
    REQUIRE(shape != nullptr);
    CheckSelection checks;
    checks.loops = true;
    const ExploreReport report =
        exploreAll(shape->scenario, parseConfig("amb7=7b"), smallBounds(), checks);
    REQUIRE(!report.violations.empty());

    const ExploreViolation* loop = nullptr;
    for (const ExploreViolation& v : report.violations)
        if (v.id == "routing-loop") loop = &v;
    REQUIRE(loop != nullptr);

    // The witness replays deterministically to a looping state.
    const NetworkState end =
        replayWitness(shape->scenario, parseConfig("amb7=7b"), loop->witness);
    const auto cycle = detectRoutingLoop(end);
    REQUIRE(cycle.has_value());
    CHECK(cycle->dip == "d");
}

TEST_CASE("truncation is reported instead of silently underexploring") {
    const Builtin* shape = findBuiltin("fig5shape");
    REQUIRE(shape != nullptr);
    ExploreBounds tiny;
    tiny.maxStates = 50;
    CheckSelection checks;
    checks.loops = true;
    const ExploreReport report =
        exploreAll(shape->scenario, InterpretationConfig{}, tiny, checks);
    CHECK(report.frontierTruncated);
}

TEST_CASE("explorer findings never contradict a safe classification") {
    // Any loop the explorer finds must belong to a reading already classified
    // unsafe; conversely acceptable readings survive exhaustion of the shapes.
    const std::vector<std::string> sample = {
        "",            "amb5=5b",      "amb6=6b",      "amb8=8d",
        "amb8=8e",     "amb2=2a",      "amb2=2d",      "amb8=8a,amb5=5b",
        "amb7=7b",     "amb8=8a",      "amb8=8b",      "amb8=8c",
        "amb2=2b",
    };
    CheckSelection checks;
    checks.loops = true;
    for (const std::string& text : sample) {
        const InterpretationConfig cfg = parseConfig(text);
        for (const char* shapeName : {"fig5shape", "fig8shape"}) {
            ExploreBounds bounds;
            bounds.maxInjections = 14;
            bounds.maxTopologyEvents = 6;
            const Builtin* shape = findBuiltin(shapeName);
            const ExploreReport r = exploreAll(shape->scenario, cfg, bounds, checks);
            bool foundLoop = false;
            for (const ExploreViolation& v : r.violations)
                foundLoop = foundLoop || v.id == "routing-loop";
            INFO("config ", cfg.key(), " on ", shapeName);
            if (validateCombo(cfg) == Classification::LoopFreeAcceptable)
                CHECK(!foundLoop);
        }
    }
}

TEST_CASE("the three-node relay core has no loop in any interleaving") {
    const Scenario core = parseScenario(
        "nodes a d s\n"
        "connect s a\n"
        "connect a d\n"
        "inject a d \"pa\"\n"
        "inject s d \"ps\"\n");
    CheckSelection checks;
    checks.loops = true;
    const ExploreReport r =
        exploreAll(core, InterpretationConfig{}, ExploreBounds{}, checks);
    CHECK(!r.frontierTruncated);
    CHECK(r.violations.empty());
    CHECK(r.statesVisited > 100);
}
