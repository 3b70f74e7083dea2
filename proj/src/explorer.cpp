#include "aodv/explorer.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "aodv/runner.hpp"

namespace aodv {

namespace {

Choice eventToChoice(const ScenarioEvent& ev) {
    Choice c;
    switch (ev.kind) {
        case ScenarioEvent::Kind::Connect:
            c.kind = Choice::Kind::Connect;
            c.node = ev.a;
            c.peer = ev.b;
            break;
        case ScenarioEvent::Kind::Disconnect:
            c.kind = Choice::Kind::Disconnect;
            c.node = ev.a;
            c.peer = ev.b;
            break;
        case ScenarioEvent::Kind::Inject:
            c.kind = Choice::Kind::Inject;
            c.node = ev.a;
            c.dip = ev.b;
            c.payload = ev.payload;
            break;
        default:
            break;  // step/drain/assert have no meaning under free interleaving
    }
    return c;
}

bool isEnvironmentEvent(const ScenarioEvent& ev) {
    return ev.kind == ScenarioEvent::Kind::Connect || ev.kind == ScenarioEvent::Kind::Disconnect ||
           ev.kind == ScenarioEvent::Kind::Inject;
}

struct TaggedChoice {
    Choice choice;
    bool advancesCursor = false;
    int freeIndex = -1;
};

struct SearchNode {
    NetworkState net;
    std::size_t eventCursor = 0;
    std::uint32_t freeFired = 0;
    std::vector<TaggedChoice> choices;
    std::size_t nextChoice = 0;
};

std::uint64_t searchKey(const NetworkState& net, std::size_t cursor, std::uint32_t freeFired) {
    std::uint64_t h = canonicalHash(net);
    h ^= 0x9e3779b97f4a7c15ull * (cursor + 1);
    h ^= 0xc2b2ae3d27d4eb4full * (freeFired + 1);
    return h;
}

}  // namespace

std::string ExploreReport::summaryText() const {
    std::ostringstream out;
    out << "states=" << statesVisited << " transitions=" << transitionsFired
        << " truncated=" << (frontierTruncated ? "yes" : "no")
        << " violations=" << violations.size();
    for (const ExploreViolation& v : violations)
        out << "\n  " << v.id << " (witness length " << v.witness.size() << "): " << v.detail;
    return out.str();
}

std::string ExploreReport::summaryJson(const std::string& witnessFile) const {
    nlohmann::json j;
    j["states_visited"] = statesVisited;
    j["transitions_fired"] = transitionsFired;
    j["frontier_truncated"] = frontierTruncated;
    if (!witnessFile.empty() && !violations.empty()) j["witness_file"] = witnessFile;
    j["violations"] = nlohmann::json::array();
    for (const ExploreViolation& v : violations) {
        nlohmann::json vj;
        vj["id"] = v.id;
        vj["detail"] = v.detail;
        vj["witness_length"] = v.witness.size();
        nlohmann::json steps = nlohmann::json::array();
        for (const Choice& c : v.witness) steps.push_back(c.text());
        vj["witness"] = steps;
        j["violations"].push_back(vj);
    }
    return j.dump(2);
}

NetworkState replayWitness(const Scenario& scenario, const InterpretationConfig& cfg,
                           const std::vector<Choice>& witness) {
    NetworkState net;
    if (!scenario.freeEvents.empty() && !scenario.events.empty()) {
        Scenario prefix = scenario;
        prefix.freeEvents.clear();
        RunOptions ropts;
        ropts.collectTrace = false;
        ropts.skipScenarioAsserts = true;
        net = runScenario(prefix, cfg, ropts).finalState;
    } else {
        net = makeInitialNetwork(scenario.nodes, scenario.initialEdges, cfg);
    }
    StepOptions opts;
    opts.computeHash = false;
    for (const Choice& c : witness) stepNetwork(net, c, cfg, opts);
    return net;
}

ExploreReport exploreAll(const Scenario& scenario, const InterpretationConfig& cfg,
                         const ExploreBounds& bounds, const CheckSelection& checks) {
    ExploreReport report;

    std::vector<ScenarioEvent> ordered;
    for (const ScenarioEvent& ev : scenario.events)
        if (isEnvironmentEvent(ev)) ordered.push_back(ev);
    if (scenario.freeEvents.size() > 32)
        throw std::invalid_argument("at most 32 free events supported");

    std::size_t injections = 0, topoEvents = 0;
    const auto tally = [&](const ScenarioEvent& ev) {
        if (ev.kind == ScenarioEvent::Kind::Inject) ++injections;
        else ++topoEvents;
    };
    for (const ScenarioEvent& ev : ordered) tally(ev);
    for (const ScenarioEvent& ev : scenario.freeEvents) tally(ev);
    if (scenario.nodes.size() > bounds.maxNodes || injections > bounds.maxInjections ||
        topoEvents > bounds.maxTopologyEvents)
        throw std::invalid_argument("scenario exceeds exploration bounds");

    const auto expand = [&](const NetworkState& net, std::size_t cursor, std::uint32_t freeFired) {
        std::vector<TaggedChoice> out;
        for (const Choice& c : enabledProtocolChoices(net)) out.push_back({c, false, -1});
        if (cursor < ordered.size()) out.push_back({eventToChoice(ordered[cursor]), true, -1});
        for (std::size_t i = 0; i < scenario.freeEvents.size(); ++i)
            if (!(freeFired & (1u << i)))
                out.push_back({eventToChoice(scenario.freeEvents[i]), false, static_cast<int>(i)});
        return out;
    };

    std::unordered_set<std::uint64_t> visited;
    std::vector<SearchNode> stack;

    SearchNode root;
    if (!scenario.freeEvents.empty() && !scenario.events.empty()) {
        // With a free block, the ordered script is a deterministic prefix and
        // only the free events (plus protocol steps) are left to place.
        Scenario prefix = scenario;
        prefix.freeEvents.clear();
        RunOptions opts;
        opts.collectTrace = false;
        opts.skipScenarioAsserts = true;
        RunResult prefixRun = runScenario(prefix, cfg, opts);
        root.net = std::move(prefixRun.finalState);
        ordered.clear();
    } else {
        root.net = makeInitialNetwork(scenario.nodes, scenario.initialEdges, cfg);
    }
    root.choices = expand(root.net, 0, 0);
    visited.insert(searchKey(root.net, 0, 0));
    report.statesVisited = 1;
    stack.push_back(std::move(root));

    const auto recordViolation = [&](const std::string& id, const std::string& detail,
                                     std::vector<Choice> witness) {
        for (ExploreViolation& v : report.violations)
            if (v.id == id) {
                if (witness.size() < v.witness.size()) {
                    v.witness = std::move(witness);
                    v.detail = detail;
                }
                return;
            }
        report.violations.push_back({id, detail, std::move(witness)});
    };

    StepOptions stepOpts;
    stepOpts.computeHash = false;

    while (!stack.empty()) {
        SearchNode& top = stack.back();
        if (top.nextChoice >= top.choices.size()) {
            stack.pop_back();
            continue;
        }
        if (stack.size() > bounds.maxDepth) {
            report.frontierTruncated = true;
            stack.pop_back();
            continue;
        }
        const TaggedChoice tagged = top.choices[top.nextChoice++];

        SearchNode next;
        next.net = top.net;
        next.eventCursor = top.eventCursor + (tagged.advancesCursor ? 1 : 0);
        next.freeFired = top.freeFired;
        if (tagged.freeIndex >= 0) next.freeFired |= (1u << tagged.freeIndex);
        stepNetwork(next.net, tagged.choice, cfg, stepOpts);
        ++report.transitionsFired;

        const std::uint64_t key = searchKey(next.net, next.eventCursor, next.freeFired);
        if (visited.count(key)) continue;
        visited.insert(key);
        ++report.statesVisited;

        if (checks.any()) {
            const auto vs =
                checkAfterTransition(top.net, next.net, cfg, checks, report.statesVisited);
            if (!vs.empty()) {
                std::vector<Choice> witness;
                witness.reserve(stack.size());
                for (std::size_t i = 1; i < stack.size(); ++i)
                    witness.push_back(stack[i - 1].choices[stack[i - 1].nextChoice - 1].choice);
                // The edge from the current top is the one just fired.
                witness.push_back(tagged.choice);
                for (const Violation& v : vs) recordViolation(v.id, v.text(), witness);
            }
        }

        if (report.statesVisited >= bounds.maxStates) {
            report.frontierTruncated = true;
            return report;
        }
        next.choices = expand(next.net, next.eventCursor, next.freeFired);
        stack.push_back(std::move(next));
    }
    return report;
}

}  // namespace aodv
