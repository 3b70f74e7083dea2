#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aodv/checker.hpp"
#include "aodv/network.hpp"
#include "aodv/scenario.hpp"

// Bounded exhaustive exploration over transition interleavings and
// topology-event placements, with state deduplication on canonical hashes.

namespace aodv {

struct ExploreBounds {
    std::size_t maxNodes = 5;
    std::size_t maxInjections = 3;
    std::size_t maxTopologyEvents = 4;
    std::size_t maxDepth = 300;
    std::size_t maxStates = 5000000;
};

struct ExploreViolation {
    std::string id;
    std::string detail;
    std::vector<Choice> witness;  // replays deterministically from the initial state
};

struct ExploreReport {
    std::uint64_t statesVisited = 0;
    std::uint64_t transitionsFired = 0;
    bool frontierTruncated = false;
    std::vector<ExploreViolation> violations;  // deduplicated by id, shortest witness kept

    std::string summaryText() const;
    std::string summaryJson(const std::string& witnessFile = {}) const;
};

// Breadth-first search; ordered events keep their relative order, free events
// may fire at any point. Every visited state runs the selected checkers.
ExploreReport exploreAll(const Scenario& scenario, const InterpretationConfig& cfg,
                         const ExploreBounds& bounds, const CheckSelection& checks);

// Replays a witness from the scenario's initial state; returns the final network.
NetworkState replayWitness(const Scenario& scenario, const InterpretationConfig& cfg,
                           const std::vector<Choice>& witness);

}  // namespace aodv
