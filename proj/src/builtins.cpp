#include "aodv/builtins.hpp"

#include <algorithm>

namespace aodv {

namespace {

using AK = Assertion::Kind;

Assertion loopFree() {
    Assertion a;
    a.kind = AK::LoopFree;
    return a;
}

Assertion routeValid(const Address& node, const Address& dip, HopCount hops, const Address& nhop) {
    Assertion a;
    a.kind = AK::RouteValid;
    a.node = node;
    a.dip = dip;
    a.hops = hops;
    a.nhop = nhop;
    return a;
}

Assertion noValidRoute(const Address& node, const Address& dip) {
    Assertion a;
    a.kind = AK::NoValidRoute;
    a.node = node;
    a.dip = dip;
    return a;
}

Assertion delivered(const Address& node, const Data& payload) {
    Assertion a;
    a.kind = AK::Delivered;
    a.node = node;
    a.payload = payload;
    return a;
}

Assertion loopExists(const Address& dip, const Address& cycleA, const Address& cycleB) {
    Assertion a;
    a.kind = AK::LoopExists;
    a.dip = dip;
    a.cycleA = cycleA;
    a.cycleB = cycleB;
    return a;
}

Assertion selfEntry(const Address& node) {
    Assertion a;
    a.kind = AK::SelfEntryExists;
    a.node = node;
    return a;
}

std::function<bool(const InterpretationConfig&)> exactly(const std::string& configText) {
    const InterpretationConfig want = parseConfig(configText);
    return [want](const InterpretationConfig& cfg) { return cfg == want; };
}

BuiltinExpectation defaults(std::vector<Assertion> asserts,
                            std::vector<std::pair<MonitorKind, VerdictOutcome>> verdicts = {}) {
    BuiltinExpectation e;
    e.configNote = "default";
    e.matches = exactly("");
    e.finalAssertions = std::move(asserts);
    e.expectedVerdicts = std::move(verdicts);
    return e;
}

BuiltinExpectation under(const std::string& configText, std::vector<Assertion> asserts,
                         std::vector<std::pair<MonitorKind, VerdictOutcome>> verdicts = {},
                         bool expectsLoop = false) {
    BuiltinExpectation e;
    e.configNote = configText;
    e.matches = exactly(configText);
    e.finalAssertions = std::move(asserts);
    e.expectedVerdicts = std::move(verdicts);
    e.expectsLoop = expectsLoop;
    return e;
}

Builtin makeBuiltin(const std::string& name, const std::string& description,
                    const std::string& scenarioText, std::vector<BuiltinExpectation> expectations) {
    Builtin b;
    b.name = name;
    b.description = description;
    b.scenario = parseScenario(scenarioText);
    b.scenario.name = name;
    b.expectations = std::move(expectations);
    return b;
}

std::vector<Builtin> makeLibrary() {
    std::vector<Builtin> lib;

    // Basic route discovery across a diamond; the reply travels d-a-s.
    lib.push_back(makeBuiltin(
        "fig1", "basic route discovery, s reaches d at two hops via a",
        "nodes s a b d\n"
        "connect s a\n"
        "connect s b\n"
        "connect a d\n"
        "connect b d\n"
        "inject s d \"p1\"\n"
        "drain\n"
        "assert route s d valid hops=2 nhop=a\n"
        "assert delivered d \"p1\"\n"
        "assert loop-free\n",
        {defaults({routeValid("s", "d", 2, "a"), delivered("d", "p1"), loopFree()})}));

    // Four-node discovery with the reply forwarded by an intermediate node.
    lib.push_back(makeBuiltin(
        "fig2", "discovery where the reply is relayed, a reaches c via b",
        "nodes a b c d\n"
        "connect a b\n"
        "connect a d\n"
        "connect b c\n"
        "inject a c \"p1\"\n"
        "drain\n"
        "assert route a c valid hops=2 nhop=b\n"
        "assert delivered c \"p1\"\n"
        "assert loop-free\n",
        {defaults({routeValid("a", "c", 2, "b"), delivered("c", "p1"), loopFree()})}));

    // Sequence-number decrease through full-overwrite updates yields a loop.
    lib.push_back(makeBuiltin(
        "fig4", "unknown-sequence-number overwrite decreases a's number for d",
        "nodes a d s x\n"
        "connect s a\n"
        "connect a d\n"
        "inject d s \"p1\"\n"
        "drain\n"
        "inject s x \"p2\"\n"
        "drain\n"
        "disconnect a d\n"
        "inject a d \"p3\"\n"
        "drain\n"
        "assert loop-free\n",
        {defaults({loopFree(), delivered("s", "p1")}),
         under("amb2=2b", {loopExists("d", "a", "s")}, {}, true)}));

    // Invalidation without an increment for unknown sequence numbers.
    lib.push_back(makeBuiltin(
        "fig5", "no-increment invalidation lets a stale reply close a cycle",
        "nodes a b d s\n"
        "connect s a\n"
        "connect a d\n"
        "connect b d\n"
        "inject s d \"p1\"\n"
        "drain\n"
        "inject b a \"p2\"\n"
        "drain\n"
        "disconnect a d\n"
        "inject a d \"p3\"\n"
        "drain\n"
        "assert loop-free\n",
        {defaults({loopFree(), delivered("d", "p1"), delivered("a", "p2")}),
         under("amb7=7b", {loopExists("d", "a", "s")}, {}, true)}));

    // Self-entry formation followed by an invalidation that keeps the number.
    const std::string fig8Text =
        "nodes a b d s x\n"
        "connect s b\n"
        "connect b a\n"
        "connect a d\n"
        "inject b b \"z1\"\n"
        "inject b b \"z2\"\n"
        "inject b b \"z3\"\n"
        "inject b b \"z4\"\n"
        "inject b b \"z5\"\n"
        "inject b b \"z6\"\n"
        "inject b b \"z7\"\n"
        "inject b b \"z8\"\n"
        "inject s d \"P1\"\n"
        "step 4\n"
        "connect s d\n"
        "inject s x \"P2\"\n"
        "step 4\n"
        "inject d a \"P3\"\n"
        "drain\n"
        "connect s x\n"
        "inject d x \"P4\"\n"
        "drain\n"
        "disconnect a d\n"
        "inject d a \"P5\"\n"
        "step 3\n"
        "disconnect s d\n"
        "disconnect s b\n"
        "drain\n"
        "inject s d \"P6\"\n"
        "drain\n"
        "assert loop-free\n";
    lib.push_back(makeBuiltin(
        "fig8", "self-entry at d plus a kept-number invalidation; loop between s and x",
        fig8Text,
        {defaults({loopFree(), selfEntry("d")}),
         under("amb8=8a", {selfEntry("d"), loopExists("d", "s", "x")}, {}, true),
         under("amb8=8b", {selfEntry("d"), loopExists("d", "s", "x")}, {}, true),
         under("amb8=8c", {selfEntry("d"), loopExists("d", "s", "x")}, {}, true)}));

    // A reply without fresh information is dropped on the way back.
    lib.push_back(makeBuiltin(
        "fig10", "s's reply is dropped at a because nothing is fresher",
        "nodes a d s\n"
        "connect s a\n"
        "connect a d\n"
        "inject d d \"z1\"\n"
        "inject d d \"z2\"\n"
        "inject d d \"z3\"\n"
        "inject a d \"pa\"\n"
        "inject s d \"ps\"\n"
        "drain\n",
        {defaults({noValidRoute("s", "d"), routeValid("a", "d", 1, "d"), delivered("d", "pa")},
                  {{MonitorKind::RouteDiscovery, VerdictOutcome::Violated},
                   {MonitorKind::ReplyIssued, VerdictOutcome::Satisfied}}),
         under("improve=fwd-rrep",
               {routeValid("s", "d", 2, "a"), delivered("d", "pa"), delivered("d", "ps")},
               {{MonitorKind::RouteDiscovery, VerdictOutcome::Satisfied},
                {MonitorKind::ReplyIssued, VerdictOutcome::Satisfied}})}));

    // Same failure with an unknown-flagged entry created by a passing flood.
    lib.push_back(makeBuiltin(
        "fig11", "repeated requests cannot restore discovery without forwarding",
        "nodes a b d s x\n"
        "connect s a\n"
        "connect a d\n"
        "connect d b\n"
        "inject a d \"p1\"\n"
        "drain\n"
        "inject b x \"p2\"\n"
        "drain\n"
        "inject s d \"p3\"\n"
        "drain\n",
        {defaults({noValidRoute("s", "d"), delivered("d", "p1")},
                  {{MonitorKind::RouteDiscovery, VerdictOutcome::Violated},
                   {MonitorKind::ReplyIssued, VerdictOutcome::Satisfied}}),
         under("improve=fwd-rrep", {routeValid("s", "d", 2, "a"), delivered("d", "p3")},
               {{MonitorKind::RouteDiscovery, VerdictOutcome::Satisfied},
                {MonitorKind::ReplyIssued, VerdictOutcome::Satisfied}})}));

    // The destination's own number falls behind the requested one.
    lib.push_back(makeBuiltin(
        "fig13", "own-number update rule decides whether the reply is good enough",
        "nodes a d s x\n"
        "connect s d\n"
        "connect a d\n"
        "inject d s \"p1\"\n"
        "drain\n"
        "disconnect s d\n"
        "inject s d \"p2\"\n"
        "drain\n"
        "connect s d\n"
        "inject a x \"p3\"\n"
        "drain\n"
        "disconnect s d\n"
        "connect s a\n"
        "inject s d \"p4\"\n"
        "drain\n",
        {defaults({routeValid("s", "d", 2, "a"), delivered("d", "p4"), delivered("s", "p1")}),
         under("amb10=10b", {noValidRoute("s", "d"), delivered("s", "p1")})}));

    // A packet in flight is dropped when the next link has silently gone.
    lib.push_back(makeBuiltin(
        "fig14", "single injection is lost at the stale intermediate hop",
        "nodes a d s\n"
        "connect s a\n"
        "connect a d\n"
        "inject s d \"p0\"\n"
        "drain\n"
        "disconnect a d\n"
        "connect s d\n"
        "inject s d \"dp\"\n"
        "drain\n",
        {defaults({delivered("d", "p0"), noValidRoute("s", "d")},
                  {{MonitorKind::Pd1, VerdictOutcome::Violated}})}));

    // Re-injecting after the error message repairs delivery.
    lib.push_back(makeBuiltin(
        "fig14cont", "re-injection after the error message gets through",
        "nodes a d s\n"
        "connect s a\n"
        "connect a d\n"
        "inject s d \"p0\"\n"
        "drain\n"
        "disconnect a d\n"
        "connect s d\n"
        "inject s d \"dp\"\n"
        "drain\n"
        "inject s d \"dp\"\n"
        "drain\n",
        {defaults({delivered("d", "dp")}, {{MonitorKind::Pd3, VerdictOutcome::Satisfied}})}));

    // Empty precursor lists leave the source unaware of the break.
    lib.push_back(makeBuiltin(
        "fig15", "no precursors: repeated packets keep dying at the same hop",
        "nodes a b d s\n"
        "connect d a\n"
        "connect a s\n"
        "connect d b\n"
        "connect a b\n"
        "inject d b \"q\"\n"
        "drain\n"
        "disconnect a d\n"
        "inject s d \"dp\"\n"
        "drain\n"
        "inject s d \"dp\"\n"
        "drain\n",
        {defaults({delivered("b", "q")}, {{MonitorKind::Pd3, VerdictOutcome::Violated}}),
         under("improve=bcast-rerr", {delivered("b", "q"), delivered("d", "dp")},
               {{MonitorKind::Pd3, VerdictOutcome::Satisfied}})}));

    // Same effect on the reverse route of a discovery.
    lib.push_back(makeBuiltin(
        "fig16", "incomplete precursor lists on the reverse route",
        "nodes a b c d s\n"
        "connect s a\n"
        "connect s b\n"
        "connect a b\n"
        "connect a d\n"
        "connect b c\n"
        "connect c d\n"
        "inject s d \"p1\"\n"
        "drain\n"
        "disconnect s a\n"
        "disconnect a b\n"
        "inject d s \"dp\"\n"
        "drain\n"
        "inject d s \"dp\"\n"
        "drain\n",
        {defaults({delivered("d", "p1")}, {{MonitorKind::Pd3, VerdictOutcome::Violated}}),
         under("improve=bcast-rerr", {delivered("d", "p1"), delivered("s", "dp")},
               {{MonitorKind::Pd3, VerdictOutcome::Satisfied}})}));

    // Ring of eight: the long way round wins unless the destination forwards.
    lib.push_back(makeBuiltin(
        "fig17", "request dies at the destination, downstream learns a 6-hop route",
        "nodes a d r s t u v w\n"
        "connect s d\n"
        "connect d a\n"
        "connect a r\n"
        "connect r t\n"
        "connect t u\n"
        "connect u v\n"
        "connect v w\n"
        "connect w s\n"
        "inject s d \"p\"\n"
        "drain\n",
        {defaults({routeValid("a", "s", 6, "r"), routeValid("s", "d", 1, "d"),
                   delivered("d", "p"), loopFree()}),
         under("improve=fwd-rreq",
               {routeValid("a", "s", 2, "d"), routeValid("s", "d", 1, "d"), delivered("d", "p"),
                loopFree()})}));

    // Forwarded handled requests give the destination the reverse route.
    lib.push_back(makeBuiltin(
        "fig18", "intermediate answer leaves the destination without a reverse route",
        "nodes a d s\n"
        "connect a d\n"
        "inject d a \"q1\"\n"
        "drain\n"
        "connect s a\n"
        "inject s d \"p\"\n"
        "drain\n",
        {defaults({routeValid("s", "d", 2, "a"), noValidRoute("d", "s"), delivered("a", "q1"),
                   delivered("d", "p")}),
         under("improve=fwd-rreq",
               {routeValid("s", "d", 2, "a"), routeValid("d", "s", 2, "a"), delivered("a", "q1"),
                delivered("d", "p")})}));

    // A one-hop neighbour update either reclaims the short route or not.
    lib.push_back(makeBuiltin(
        "fig19", "neighbour update with unknown number reclaims the direct route",
        "nodes a b d s x\n"
        "connect s a\n"
        "connect s b\n"
        "connect b a\n"
        "connect a d\n"
        "inject s a \"p1\"\n"
        "drain\n"
        "disconnect s a\n"
        "inject s a \"p2\"\n"
        "drain\n"
        "connect s a\n"
        "inject d x \"p3\"\n"
        "drain\n",
        {defaults({routeValid("s", "a", 1, "a"), delivered("a", "p1"), delivered("a", "p2")}),
         under("amb2=2a", {routeValid("s", "a", 2, "b"), delivered("a", "p1"),
                           delivered("a", "p2")})}));

    // Keeping the stored number and flag revives stale freshness claims.
    lib.push_back(makeBuiltin(
        "fig20", "status-flag retention lets a stale entry outbid the destination",
        "nodes a b d s x\n"
        "connect a d\n"
        "connect b d\n"
        "connect s a\n"
        "inject a d \"p1\"\n"
        "drain\n"
        "disconnect a d\n"
        "inject a d \"p2\"\n"
        "drain\n"
        "connect a d\n"
        "inject b x \"p4\"\n"
        "drain\n"
        "connect s d\n"
        "inject a a \"z1\"\n"
        "inject a a \"z2\"\n"
        "inject a a \"z3\"\n"
        "inject s d \"p5\"\n"
        "drain\n",
        {defaults({routeValid("s", "d", 1, "d"), delivered("d", "p5"), delivered("d", "p1")}),
         under("amb2=2d", {routeValid("s", "d", 2, "a"), delivered("d", "p5"),
                           delivered("d", "p1")})}));

    // Escalated invalid numbers block the destination's reply path.
    lib.push_back(makeBuiltin(
        "fig21", "invalid entry outruns the originator's own number",
        "nodes a b d s x\n"
        "connect s d\n"
        "connect s a\n"
        "inject s d \"p1\"\n"
        "drain\n"
        "disconnect s d\n"
        "inject d s \"q1\"\n"
        "drain\n"
        "connect s d\n"
        "inject a x \"p3\"\n"
        "drain\n"
        "disconnect s d\n"
        "inject d s \"q2\"\n"
        "drain\n"
        "connect s b\n"
        "connect b d\n"
        "inject s d \"p4\"\n"
        "drain\n",
        {defaults({noValidRoute("s", "d"), delivered("d", "p1"), delivered("s", "q1")},
                  {{MonitorKind::ReplyIssued, VerdictOutcome::Satisfied},
                   {MonitorKind::RouteDiscovery, VerdictOutcome::Violated}}),
         under("amb2=2e",
               {routeValid("s", "d", 2, "b"), delivered("d", "p4"), delivered("s", "q2")},
               {{MonitorKind::RouteDiscovery, VerdictOutcome::Satisfied}})}));

    // Explorer shapes: the same causal cores with events left free to place.
    lib.push_back(makeBuiltin(
        "fig5shape", "fig5 core for exhaustive interleaving",
        "nodes a b d s\n"
        "connect s a\n"
        "connect a d\n"
        "connect b d\n"
        "inject s d \"p1\"\n"
        "inject b a \"p2\"\n"
        "disconnect a d\n"
        "inject a d \"p3\"\n",
        {defaults({}), under("amb7=7b", {}, {}, true)}));

    lib.push_back(makeBuiltin(
        "fig8shape", "fig8 core: scripted formation, free error phase",
        "nodes a b d s x\n"
        "connect s b\n"
        "connect b a\n"
        "connect a d\n"
        "inject b b \"z1\"\n"
        "inject b b \"z2\"\n"
        "inject b b \"z3\"\n"
        "inject b b \"z4\"\n"
        "inject b b \"z5\"\n"
        "inject b b \"z6\"\n"
        "inject b b \"z7\"\n"
        "inject b b \"z8\"\n"
        "inject s d \"P1\"\n"
        "step 4\n"
        "connect s d\n"
        "inject s x \"P2\"\n"
        "step 4\n"
        "inject d a \"P3\"\n"
        "drain\n"
        "connect s x\n"
        "inject d x \"P4\"\n"
        "drain\n"
        "disconnect s b\n"
        "drain\n"
        "free {\n"
        "disconnect a d\n"
        "inject d a \"P5\"\n"
        "disconnect s d\n"
        "inject s d \"P6\"\n"
        "}\n",
        {defaults({}), under("amb8=8a", {}, {}, true), under("amb8=8b", {}, {}, true),
         under("amb8=8c", {}, {}, true)}));

    return lib;
}

}  // namespace

const BuiltinExpectation* Builtin::expectationFor(const InterpretationConfig& cfg) const {
    for (const BuiltinExpectation& e : expectations)
        if (e.matches(cfg)) return &e;
    return nullptr;
}

const std::vector<Builtin>& builtinLibrary() {
    static const std::vector<Builtin> lib = makeLibrary();
    return lib;
}

const Builtin* findBuiltin(const std::string& name) {
    for (const Builtin& b : builtinLibrary())
        if (b.name == name) return &b;
    return nullptr;
}

std::vector<std::string> builtinNames() {
    std::vector<std::string> names;
    for (const Builtin& b : builtinLibrary()) names.push_back(b.name);
    return names;
}

bool BuiltinRunResult::allExpectationsMet() const {
    if (!std::all_of(expectationResults.begin(), expectationResults.end(),
                     [](const AssertionResult& r) { return r.pass; }))
        return false;
    return verdictFailures.empty();
}

BuiltinRunResult runBuiltin(const Builtin& builtin, const InterpretationConfig& cfg,
                            RunOptions opts) {
    BuiltinRunResult out;
    out.expectation = builtin.expectationFor(cfg);

    opts.collectTrace = true;  // expectation checks read deliveries off the trace
    // Make sure every monitor an expectation talks about is switched on. The
    // in-scenario asserts state default-config outcomes; a matched non-default
    // expectation supersedes them.
    if (out.expectation) {
        if (out.expectation->configNote != "default") opts.skipScenarioAsserts = true;
        for (const auto& [kind, outcome] : out.expectation->expectedVerdicts)
            if (std::find(opts.monitors.begin(), opts.monitors.end(), kind) ==
                opts.monitors.end())
                opts.monitors.push_back(kind);
        if (out.expectation->expectsLoop) opts.stopOnLoop = true;
    }
    out.run = runScenario(builtin.scenario, cfg, opts);

    if (out.expectation) {
        std::vector<std::pair<Address, Data>> delivered;
        for (const TransitionRecord& rec : out.run.trace)
            if (rec.kind == TransitionRecord::Kind::Deliver)
                delivered.push_back({rec.src, rec.payload});
        for (const Assertion& a : out.expectation->finalAssertions)
            out.expectationResults.push_back(evaluateAssertion(
                a, out.run.finalState, delivered, out.run.finalState.stepCount));
        for (const auto& [kind, want] : out.expectation->expectedVerdicts) {
            bool found = false;
            for (const Verdict& v : out.run.verdicts)
                if (v.kind == kind) {
                    found = true;
                    if (v.outcome != want)
                        out.verdictFailures.push_back(std::string(monitorName(kind)) +
                                                      ": expected " + verdictName(want) +
                                                      ", got " + verdictName(v.outcome));
                }
            if (!found)
                out.verdictFailures.push_back(std::string(monitorName(kind)) + ": no verdict");
        }
    }
    return out;
}

}  // namespace aodv
