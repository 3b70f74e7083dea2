#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aodv/checker.hpp"
#include "aodv/monitors.hpp"
#include "aodv/network.hpp"
#include "aodv/scenario.hpp"

// Scripted execution under a fair round-robin or seeded-random scheduler.

namespace aodv {

enum class SchedulerPolicy : std::uint8_t { FairRoundRobin, SeededRandom };

struct RunOptions {
    SchedulerPolicy policy = SchedulerPolicy::FairRoundRobin;
    std::uint64_t seed = 1;
    std::uint64_t budget = 1000000;
    bool collectTrace = true;
    CheckSelection checks;
    std::vector<MonitorKind> monitors;
    bool fairnessCertificate = false;
    bool stopOnLoop = false;  // stop the run at the first routing loop (diagnostics)
    bool skipScenarioAsserts = false;  // builtin expectations replace the baked asserts
    bool collectTableProjection = false;  // per-transition routing-table snapshots
};

struct AssertionResult {
    Assertion assertion;
    bool pass = false;
    std::string detail;
    std::uint64_t traceIndex = 0;
};

struct RunResult {
    NetworkState finalState;
    std::vector<TransitionRecord> trace;
    bool endedQuiescent = false;
    bool budgetExhausted = false;
    std::vector<AssertionResult> assertions;
    std::vector<Violation> violations;
    std::vector<Verdict> verdicts;
    std::vector<std::string> tableProjection;  // one line per transition when collected
    std::uint64_t fairnessMaxStreak = 0;
    std::uint64_t fairnessBound = 0;
    std::uint64_t engineAnomalies = 0;

    bool allAssertionsPass() const;
};

// Evaluates one assertion against a state and the deliveries seen so far.
AssertionResult evaluateAssertion(const Assertion& a, const NetworkState& net,
                                  const std::vector<std::pair<Address, Data>>& delivered,
                                  std::uint64_t traceIndex);

RunResult runScenario(const Scenario& scenario, const InterpretationConfig& cfg,
                      const RunOptions& opts);

// Per-node rotating cursor over {handle, send(dip...), initiate(dip...)};
// nodes are serviced in address order, one transition per turn.
class FairScheduler {
public:
    FairScheduler(const std::vector<Address>& addresses);
    std::optional<Choice> next(const NetworkState& net);

private:
    std::vector<Address> addresses_;
    std::vector<std::size_t> cursor_;
    std::size_t nodePos_ = 0;
};

}  // namespace aodv
