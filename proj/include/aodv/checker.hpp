#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aodv/network.hpp"

// Executable state and transition invariants, evaluated after every
// transition or on demand. Which rules apply depends on the interpretation.

namespace aodv {

struct Violation {
    std::string id;      // e.g. "sn-positive", "dsn-monotone", "routing-loop"
    Address node;
    Address dip;
    std::string detail;
    std::uint64_t traceIndex = 0;

    std::string text() const;
};

std::vector<Violation> checkStateInvariants(const NetworkState& net,
                                            const InterpretationConfig& cfg);

std::vector<Violation> checkTransitionMonotone(const NetworkState& before,
                                               const NetworkState& after,
                                               const InterpretationConfig& cfg);

struct RoutingLoop {
    Address dip;
    std::vector<Address> cycle;  // closed walk of next hops, first == last omitted
    std::string text() const;
};

// Cycle in some per-destination routing graph, if one exists.
std::optional<RoutingLoop> detectRoutingLoop(const NetworkState& net);

// Strict quality increase along every valid next-hop arc whose endpoint also
// holds a valid route; a cycle always implies a violation here.
std::vector<Violation> checkQualityChain(const NetworkState& net);

// Every entry corresponds to a path of its exact hop count in the history
// connectivity graph, starting with its next hop.
std::vector<Violation> checkRouteCorrectness(const NetworkState& net);

// Stronger route-correctness diagnostic: every entry must be backed by a
// historical link to its next hop and, beyond one hop, by a valid entry one
// hop shorter seen at the next hop at some earlier point. Known not to hold
// for this protocol; diagnostic only, never an acceptance gate.
class StrongRouteCorrectness {
public:
    void observe(const NetworkState& after);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    // (node, dip, hops) triples seen as valid entries so far.
    std::vector<std::tuple<Address, Address, HopCount>> seenValid_;
    std::vector<Violation> violations_;
};

struct CheckSelection {
    bool state = false;
    bool monotone = false;
    bool loops = false;
    bool routeCorrect = false;
    bool strongRouteCorrect = false;  // diagnostic only

    static CheckSelection all() { return {true, true, true, true, false}; }
    bool any() const {
        return state || monotone || loops || routeCorrect || strongRouteCorrect;
    }
};

// Runs the selected checkers against one transition; used by the runner.
std::vector<Violation> checkAfterTransition(const NetworkState& before, const NetworkState& after,
                                            const InterpretationConfig& cfg,
                                            const CheckSelection& sel, std::uint64_t traceIndex);

}  // namespace aodv
