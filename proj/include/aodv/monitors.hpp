#pragma once

#include <string>
#include <vector>

#include "aodv/network.hpp"

// Trace-level verdicts for the temporal properties, evaluated over complete
// runs produced by a fair scheduler. "Eventually" on a finite complete run
// means at or before the final state.

namespace aodv {

enum class MonitorKind : std::uint8_t { RouteDiscovery, ReplyIssued, Pd1, Pd2, Pd3 };

const char* monitorName(MonitorKind k);

enum class VerdictOutcome : std::uint8_t { Satisfied, Violated, Vacuous, BudgetInconclusive };

const char* verdictName(VerdictOutcome v);

struct Verdict {
    MonitorKind kind;
    VerdictOutcome outcome;
    std::vector<std::uint64_t> witnesses;  // trace indices of unmet obligations
    std::string detail;

    std::string text() const;
};

// Reachability in the current symmetric topology.
bool connectedStar(const NetworkState& net, const Address& oip, const Address& dip);

// Online observer over one run; feed every transition in order, then finalize.
class MonitorSet {
public:
    explicit MonitorSet(std::vector<MonitorKind> kinds) : kinds_(std::move(kinds)) {}

    void observe(const NetworkState& before, const TransitionRecord& rec,
                 const NetworkState& after);
    std::vector<Verdict> finalize(bool endedQuiescent) const;

private:
    struct Obligation {
        std::uint64_t traceIndex;
        Address oip, dip;
        Data payload;  // packet-delivery only
        bool satisfied = false;
        std::uint64_t lastInjection = 0;
    };
    struct PairTrack {  // per (oip,dip): request-required-flag precondition data
        Address oip, dip;
        std::vector<bool> queuedWithoutRoute;
        std::vector<bool> flagNonPending;
    };

    bool wants(MonitorKind k) const;
    PairTrack& track(const Address& oip, const Address& dip);

    std::vector<MonitorKind> kinds_;
    std::vector<Obligation> discovery_;
    std::vector<Obligation> reply_;
    std::vector<Obligation> delivery_;
    std::vector<PairTrack> tracks_;
    std::uint64_t positions_ = 0;
};

// Scheduler-fairness certificate: longest stretch a task guard stayed true
// without the task being served; must stay within
// nodes x task classes x (queue bound + 1).
class FairnessCertificate {
public:
    void observe(const NetworkState& before, const TransitionRecord& rec,
                 const NetworkState& after, const Choice& fired);
    std::uint64_t maxStreak() const { return maxStreak_; }
    std::uint64_t bound(std::size_t nodeCount) const;

private:
    struct Key {
        Address node;
        int cls;      // 0 = handle, 1 = send, 2 = initiate
        Address dip;
        bool operator==(const Key&) const = default;
    };
    std::vector<std::pair<Key, std::uint64_t>> streaks_;
    std::uint64_t maxStreak_ = 0;
    std::uint64_t maxQueueSeen_ = 0;
};

}  // namespace aodv
