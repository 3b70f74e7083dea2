#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "aodv/core.hpp"

// Scenario language: node list, initial topology, ordered event script, and
// an optional free event set for the explorer.

namespace aodv {

struct Assertion {
    enum class Kind : std::uint8_t {
        LoopFree,        // assert loop-free
        RouteValid,      // assert route <ip> <dip> valid hops=<n> nhop=<id>
        NoValidRoute,    // assert no-valid-route <ip> <dip>
        Delivered,       // assert delivered <ip> <quoted>
        // Builtin-only kinds (not part of the scenario grammar):
        LoopExists,      // a routing loop for dip with the given 2-cycle exists
        SelfEntryExists, // node has a (possibly non-optimal) self-entry
    } kind = Kind::LoopFree;
    Address node;
    Address dip;
    HopCount hops = 0;
    Address nhop;
    Data payload;
    Address cycleA, cycleB;

    std::string text() const;
    bool operator==(const Assertion&) const = default;
};

struct ScenarioEvent {
    enum class Kind : std::uint8_t { Connect, Disconnect, Inject, Step, Drain, Assert } kind;
    Address a;
    Address b;
    Data payload;
    std::uint64_t steps = 0;
    Assertion assertion;

    bool operator==(const ScenarioEvent&) const = default;
};

struct Scenario {
    std::string name;
    std::vector<Address> nodes;
    std::vector<std::pair<Address, Address>> initialEdges;
    std::vector<ScenarioEvent> events;
    std::vector<ScenarioEvent> freeEvents;  // explorer may place these anywhere

    bool operator==(const Scenario&) const = default;
};

struct ScenarioParseError : std::runtime_error {
    ScenarioParseError(std::size_t line, std::size_t column, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ":" + std::to_string(column) +
                             ": " + what),
          line(line),
          column(column) {}
    std::size_t line;
    std::size_t column;
};

Scenario parseScenario(const std::string& text);
std::string printScenario(const Scenario& s);

}  // namespace aodv
