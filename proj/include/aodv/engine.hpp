#pragma once

#include <optional>
#include <vector>

#include "aodv/config.hpp"
#include "aodv/core.hpp"

// The seven node processes (main loop, NEWPKT, PKT, RREQ, RREP, RERR, message
// queue) as resumable handlers over NodeState. A handler runs silently up to
// its next visible action; the network layer applies the action and resumes.

namespace aodv {

enum class HandlerKind : std::uint8_t { NewPkt, Pkt, Rreq, Rrep, Rerr, SendData, InitiateRreq };

enum class Stage : std::uint8_t {
    Entry,
    SendDataOk,
    LinkBreakRecovery,  // failed unicast: invalidate and raise an error message
    RreqReplySent,      // destination or intermediate reply went out
    Finish,
};

// Local bindings of the running handler; mirrors the process parameters.
struct Locals {
    HopCount hops = 0;
    RreqId rreqid = 0;
    Address dip;
    SeqNum dsn = 0;
    SqnStatus dsk = SqnStatus::Unknown;
    Address oip;
    SeqNum osn = 0;
    Address sip;
    bool handled = false;
    Data data;
    DestsMap dests;
    Address failedNhip;  // unicast target for link-break handling

    bool operator==(const Locals&) const = default;
};

struct CastAction {
    enum class Kind : std::uint8_t { Broadcast, Groupcast, Unicast, Deliver } kind;
    Address dest;        // unicast target
    AddressSet group;    // groupcast recipients
    Message msg;
    Data payload;        // deliver
    Stage okStage = Stage::Finish;    // continuation (also the success branch of unicast)
    Stage failStage = Stage::Finish;  // failure branch of unicast

    bool operator==(const CastAction&) const = default;
};

struct Frame {
    HandlerKind kind;
    Stage stage = Stage::Entry;
    Locals locals;
    std::optional<CastAction> pending;  // next visible action, not yet applied

    bool operator==(const Frame&) const = default;
};

struct NodeState {
    Address ip;
    SeqNum sn = 1;
    RoutingTable rt;
    std::vector<std::pair<Address, RreqId>> rreqs;  // sorted; (oip, osn) under skip-rreqid
    Store store;
    std::vector<Message> msgq;  // FIFO, front = oldest
    std::optional<Frame> frame;

    bool hasSeenRreq(const Address& oip, RreqId key) const;
    void recordRreq(const Address& oip, RreqId key);
    SeqNum ownSeq(const InterpretationConfig& cfg) const;

    bool operator==(const NodeState&) const = default;
};

// Fresh node; under resolution 6b the routing table starts with the optimal self-entry.
NodeState makeInitialNode(const Address& ip, const InterpretationConfig& cfg);

struct BlockResult {
    bool done = false;
    std::optional<CastAction> emit;
};

// Runs the silent code of the current stage; returns the next visible action or done.
// Throws IllFormedUpdate only for messages the engine itself can never produce.
BlockResult advanceBlock(NodeState& node, Frame& frame, const InterpretationConfig& cfg);

// Task starts. HandleMsg pops the queue head and performs the sender pre-update
// for control messages before entering the matching handler.
void startHandleMsg(NodeState& node, const InterpretationConfig& cfg);
void startSendData(NodeState& node, const Address& dip, const InterpretationConfig& cfg);
void startInitiateRreq(NodeState& node, const Address& dip, const InterpretationConfig& cfg);

bool sendDataEnabled(const NodeState& node, const Address& dip);
bool initiateRreqEnabled(const NodeState& node, const Address& dip);

// Destinations with some enabled send or route-discovery task.
AddressSet sendDataDests(const NodeState& node);
AddressSet initiateRreqDests(const NodeState& node);

}  // namespace aodv
