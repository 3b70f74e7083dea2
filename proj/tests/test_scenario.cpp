#include <doctest.h>

#include "aodv/scenario.hpp"

using namespace aodv;

TEST_CASE("a minimal two-node scenario parses") {
    const Scenario s = parseScenario(
        "# comment line\n"
        "nodes a b\n"
        "connect a b\n"
        "inject a b \"hello world\"\n"
        "drain\n"
        "assert delivered b \"hello world\"\n");
    CHECK(s.nodes == std::vector<Address>{"a", "b"});
    REQUIRE(s.initialEdges.size() == 1);
    CHECK(s.initialEdges[0] == std::pair<Address, Address>{"a", "b"});
    REQUIRE(s.events.size() == 3);
    CHECK(s.events[0].kind == ScenarioEvent::Kind::Inject);
    CHECK(s.events[0].payload == "hello world");
    CHECK(s.events[2].kind == ScenarioEvent::Kind::Assert);
    CHECK(s.events[2].assertion.kind == Assertion::Kind::Delivered);
}

TEST_CASE("scripted connects after other statements stay scripted") {
    const Scenario s = parseScenario(
        "nodes a b c\n"
        "connect a b\n"
        "step 5\n"
        "connect b c\n");
    CHECK(s.initialEdges.size() == 1);
    REQUIRE(s.events.size() == 2);
    CHECK(s.events[1].kind == ScenarioEvent::Kind::Connect);
}

TEST_CASE("free blocks collect events for the explorer") {
    const Scenario s = parseScenario(
        "nodes a b\n"
        "inject a b \"p\"\n"
        "free {\n"
        "disconnect a b\n"
        "connect a b\n"
        "}\n");
    CHECK(s.events.size() == 1);
    REQUIRE(s.freeEvents.size() == 2);
    CHECK(s.freeEvents[0].kind == ScenarioEvent::Kind::Disconnect);
}

TEST_CASE("parse errors carry line and column and name the offender") {
    const auto expectError = [](const std::string& text, const std::string& needle) {
        try {
            (void)parseScenario(text);
            FAIL("expected a parse error for: " << text);
        } catch (const ScenarioParseError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expectError("nodes a b\nconnect a z\n", "\"z\"");
    expectError("nodes a b\nwobble a\n", "wobble");
    expectError("nodes a b\nassert route a b valid hops=x nhop=b\n", "hops");
    expectError("nodes a b\nstep six\n", "step count");
    expectError("connect a b\n", "nodes statement");
    expectError("nodes a b\ninject a b \"unterminated\n", "quote");
    expectError("nodes a b\nassert route a b valid hops=2\n", "nhop");
}

TEST_CASE("print then parse is the identity on scenario structure") {
    const std::vector<std::string> cases = {
        "nodes a b\n"
        "connect a b\n"
        "inject a b \"p q\"\n"
        "step 3\n"
        "drain\n"
        "assert loop-free\n"
        "assert route a b valid hops=1 nhop=b\n"
        "assert no-valid-route b a\n"
        "assert delivered b \"p q\"\n",
        "nodes s d\n"
        "connect s d\n"  // leading scripted connect needs the step-0 guard
        "free {\n"
        "disconnect s d\n"
        "}\n",
    };
    for (const std::string& text : cases) {
        const Scenario once = parseScenario(text);
        const Scenario twice = parseScenario(printScenario(once));
        CHECK(printScenario(once) == printScenario(twice));
        CHECK(once.nodes == twice.nodes);
        CHECK(once.events == twice.events);
        CHECK(once.freeEvents == twice.freeEvents);
        CHECK(once.initialEdges == twice.initialEdges);
    }

    // A scenario whose first scripted event is a connect round-trips too.
    Scenario s;
    s.nodes = {"a", "b"};
    ScenarioEvent ev;
    ev.kind = ScenarioEvent::Kind::Connect;
    ev.a = "a";
    ev.b = "b";
    s.events.push_back(ev);
    const Scenario back = parseScenario(printScenario(s));
    CHECK(back.initialEdges.empty());
    REQUIRE(back.events.size() == 2);  // step 0 guard plus the connect
    CHECK(back.events[1].kind == ScenarioEvent::Kind::Connect);
}
