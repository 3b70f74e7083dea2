#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aodv/monitors.hpp"
#include "aodv/runner.hpp"
#include "aodv/scenario.hpp"

// Built-in scenario library transcribing the worked examples, with
// per-interpretation expected outcomes encoded as assertions.

namespace aodv {

struct BuiltinExpectation {
    std::string configNote;  // e.g. "default", "amb7=7b"
    std::function<bool(const InterpretationConfig&)> matches;
    std::vector<Assertion> finalAssertions;
    std::vector<std::pair<MonitorKind, VerdictOutcome>> expectedVerdicts;
    bool expectsLoop = false;  // run stops at the first loop (it may never quiesce)
};

struct Builtin {
    std::string name;
    std::string description;
    Scenario scenario;
    std::vector<BuiltinExpectation> expectations;

    const BuiltinExpectation* expectationFor(const InterpretationConfig& cfg) const;
};

const std::vector<Builtin>& builtinLibrary();
const Builtin* findBuiltin(const std::string& name);
std::vector<std::string> builtinNames();

struct BuiltinRunResult {
    RunResult run;
    const BuiltinExpectation* expectation = nullptr;  // null: no documented outcome
    std::vector<AssertionResult> expectationResults;
    std::vector<std::string> verdictFailures;

    bool allExpectationsMet() const;
};

BuiltinRunResult runBuiltin(const Builtin& builtin, const InterpretationConfig& cfg,
                            RunOptions opts);

}  // namespace aodv
