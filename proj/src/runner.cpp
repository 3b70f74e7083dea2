#include "aodv/runner.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace {

std::string routingTablesLine(const aodv::NetworkState& net) {
    std::ostringstream out;
    for (const aodv::NodeState& n : net.nodes) {
        out << n.ip << ":";
        for (const aodv::RouteEntry& e : n.rt.entries())
            out << "(" << e.dip << "," << e.dsn << "," << static_cast<int>(e.dsk) << ","
                << static_cast<int>(e.flag) << "," << e.hops << "," << e.nhip << ")";
        out << ";";
    }
    return out.str();
}

}  // namespace

namespace aodv {

bool RunResult::allAssertionsPass() const {
    return std::all_of(assertions.begin(), assertions.end(),
                       [](const AssertionResult& r) { return r.pass; });
}

AssertionResult evaluateAssertion(const Assertion& a, const NetworkState& net,
                                  const std::vector<std::pair<Address, Data>>& delivered,
                                  std::uint64_t traceIndex) {
    AssertionResult res;
    res.assertion = a;
    res.traceIndex = traceIndex;
    switch (a.kind) {
        case Assertion::Kind::LoopFree: {
            const auto loop = detectRoutingLoop(net);
            res.pass = !loop.has_value();
            if (loop) res.detail = loop->text();
            break;
        }
        case Assertion::Kind::RouteValid: {
            const NodeState* n = net.findNode(a.node);
            const RouteEntry* e = n ? n->rt.find(a.dip) : nullptr;
            if (!e) {
                res.detail = "no entry";
            } else if (e->flag != RouteFlag::Valid) {
                res.detail = "entry invalid";
            } else if (e->hops != a.hops || e->nhip != a.nhop) {
                std::ostringstream out;
                out << "hops=" << e->hops << " nhop=" << e->nhip;
                res.detail = out.str();
            } else {
                res.pass = true;
            }
            break;
        }
        case Assertion::Kind::NoValidRoute: {
            const NodeState* n = net.findNode(a.node);
            res.pass = !n || !n->rt.hasValidRoute(a.dip);
            if (!res.pass) res.detail = "valid route present";
            break;
        }
        case Assertion::Kind::Delivered: {
            res.pass = std::find(delivered.begin(), delivered.end(),
                                 std::make_pair(a.node, a.payload)) != delivered.end();
            if (!res.pass) res.detail = "not delivered";
            break;
        }
        case Assertion::Kind::LoopExists: {
            const auto loop = detectRoutingLoop(net);
            if (!loop) {
                res.detail = "no loop found";
                break;
            }
            res.detail = loop->text();
            if (loop->dip != a.dip) break;
            const bool matches =
                a.cycleA.empty() ||
                (std::find(loop->cycle.begin(), loop->cycle.end(), a.cycleA) !=
                     loop->cycle.end() &&
                 std::find(loop->cycle.begin(), loop->cycle.end(), a.cycleB) !=
                     loop->cycle.end());
            res.pass = matches;
            break;
        }
        case Assertion::Kind::SelfEntryExists: {
            const NodeState* n = net.findNode(a.node);
            res.pass = n && n->rt.find(a.node) != nullptr;
            if (!res.pass) res.detail = "no self-entry";
            break;
        }
    }
    return res;
}

FairScheduler::FairScheduler(const std::vector<Address>& addresses) : addresses_(addresses) {
    std::sort(addresses_.begin(), addresses_.end());
    cursor_.assign(addresses_.size(), 0);
}

std::optional<Choice> FairScheduler::next(const NetworkState& net) {
    // Classes per node: 0 = handle-message, 1..n = send-data per destination,
    // n+1..2n = initiate-request per destination (destinations in address order).
    const std::size_t n = addresses_.size();
    const std::size_t classes = 1 + 2 * n;
    for (std::size_t visited = 0; visited < n; ++visited) {
        const std::size_t idx = (nodePos_ + visited) % n;
        const NodeState* node = net.findNode(addresses_[idx]);
        if (!node) continue;
        if (node->frame) {
            nodePos_ = (idx + 1) % n;
            Choice c;
            c.kind = Choice::Kind::Resume;
            c.node = node->ip;
            return c;
        }
        for (std::size_t k = 0; k < classes; ++k) {
            const std::size_t cls = (cursor_[idx] + k) % classes;
            Choice c;
            c.node = node->ip;
            bool enabled = false;
            if (cls == 0) {
                c.kind = Choice::Kind::HandleMsg;
                enabled = !node->msgq.empty();
            } else if (cls <= n) {
                c.kind = Choice::Kind::SendData;
                c.dip = addresses_[cls - 1];
                enabled = sendDataEnabled(*node, c.dip);
            } else {
                c.kind = Choice::Kind::InitiateRreq;
                c.dip = addresses_[cls - n - 1];
                enabled = initiateRreqEnabled(*node, c.dip);
            }
            if (enabled) {
                cursor_[idx] = (cls + 1) % classes;
                nodePos_ = (idx + 1) % n;
                return c;
            }
        }
    }
    return std::nullopt;
}

namespace {

struct RunContext {
    const InterpretationConfig& cfg;
    const RunOptions& opts;
    NetworkState net;
    RunResult result;
    MonitorSet monitors;
    FairnessCertificate fairness;
    StrongRouteCorrectness strongRoute;
    FairScheduler fair;
    std::mt19937_64 rng;
    std::vector<std::pair<Address, Data>> delivered;
    std::uint64_t protocolTransitions = 0;
    bool loopStopped = false;

    RunContext(const Scenario& scenario, const InterpretationConfig& cfg_, const RunOptions& o)
        : cfg(cfg_),
          opts(o),
          net(makeInitialNetwork(scenario.nodes, scenario.initialEdges, cfg_)),
          monitors(o.monitors),
          fair(scenario.nodes),
          rng(o.seed) {}

    void fire(const Choice& choice) {
        const NetworkState before = net;
        const TransitionRecord rec = stepNetwork(net, choice, cfg);
        if (rec.kind == TransitionRecord::Kind::Deliver)
            delivered.push_back({rec.src, rec.payload});
        if (!opts.monitors.empty()) monitors.observe(before, rec, net);
        if (opts.fairnessCertificate) fairness.observe(before, rec, net, choice);
        if (opts.checks.any()) {
            auto vs = checkAfterTransition(before, net, cfg, opts.checks, rec.index);
            for (Violation& v : vs) result.violations.push_back(std::move(v));
            if (opts.checks.strongRouteCorrect) strongRoute.observe(net);
        }
        if (opts.stopOnLoop && !loopStopped && detectRoutingLoop(net)) loopStopped = true;
        if (opts.collectTableProjection)
            result.tableProjection.push_back(routingTablesLine(net));
        if (opts.collectTrace) result.trace.push_back(rec);
    }

    bool budgetLeft() const { return protocolTransitions < opts.budget; }

    // Runs up to `limit` protocol transitions under the configured policy.
    void runProtocol(std::uint64_t limit) {
        while (limit > 0 && budgetLeft() && !loopStopped) {
            std::optional<Choice> choice;
            if (opts.policy == SchedulerPolicy::FairRoundRobin) {
                choice = fair.next(net);
            } else {
                const auto enabled = enabledProtocolChoices(net);
                if (!enabled.empty())
                    choice = enabled[std::uniform_int_distribution<std::size_t>(
                        0, enabled.size() - 1)(rng)];
            }
            if (!choice) return;  // quiescent
            fire(*choice);
            ++protocolTransitions;
            --limit;
        }
    }
};

}  // namespace

RunResult runScenario(const Scenario& scenario, const InterpretationConfig& cfg,
                      const RunOptions& opts) {
    g_engineAnomalies = 0;
    RunContext ctx(scenario, cfg, opts);

    const auto handleEvent = [&](const ScenarioEvent& ev) {
        switch (ev.kind) {
            case ScenarioEvent::Kind::Connect: {
                Choice c;
                c.kind = Choice::Kind::Connect;
                c.node = ev.a;
                c.peer = ev.b;
                ctx.fire(c);
                break;
            }
            case ScenarioEvent::Kind::Disconnect: {
                Choice c;
                c.kind = Choice::Kind::Disconnect;
                c.node = ev.a;
                c.peer = ev.b;
                ctx.fire(c);
                break;
            }
            case ScenarioEvent::Kind::Inject: {
                Choice c;
                c.kind = Choice::Kind::Inject;
                c.node = ev.a;
                c.dip = ev.b;
                c.payload = ev.payload;
                ctx.fire(c);
                break;
            }
            case ScenarioEvent::Kind::Step:
                ctx.runProtocol(ev.steps);
                break;
            case ScenarioEvent::Kind::Drain:
                ctx.runProtocol(ctx.opts.budget);
                break;
            case ScenarioEvent::Kind::Assert:
                if (!opts.skipScenarioAsserts)
                    ctx.result.assertions.push_back(evaluateAssertion(
                        ev.assertion, ctx.net, ctx.delivered, ctx.net.stepCount));
                break;
        }
    };

    for (const ScenarioEvent& ev : scenario.events) handleEvent(ev);
    // In scripted runs, free events execute in listing order at this point.
    for (const ScenarioEvent& ev : scenario.freeEvents) handleEvent(ev);
    ctx.runProtocol(ctx.opts.budget);  // implicit final drain

    ctx.result.endedQuiescent = quiescent(ctx.net) || ctx.loopStopped;
    ctx.result.budgetExhausted = !quiescent(ctx.net) && !ctx.loopStopped;
    ctx.result.finalState = std::move(ctx.net);
    if (!opts.monitors.empty())
        ctx.result.verdicts = ctx.monitors.finalize(ctx.result.endedQuiescent);
    if (opts.fairnessCertificate) {
        ctx.result.fairnessMaxStreak = ctx.fairness.maxStreak();
        ctx.result.fairnessBound = ctx.fairness.bound(ctx.result.finalState.nodes.size());
    }
    if (opts.checks.strongRouteCorrect)
        for (const Violation& v : ctx.strongRoute.violations())
            ctx.result.violations.push_back(v);
    ctx.result.engineAnomalies = g_engineAnomalies;
    return ctx.result;
}

}  // namespace aodv
