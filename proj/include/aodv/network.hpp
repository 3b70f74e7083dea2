#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aodv/engine.hpp"

// Node/network level semantics: symmetric topology, cast synchronization with
// guaranteed in-range receipt, connect/disconnect, packet injection.

namespace aodv {

class Topology {
public:
    bool connected(const Address& a, const Address& b) const;
    void connect(const Address& a, const Address& b);
    void disconnect(const Address& a, const Address& b);
    AddressSet neighbours(const Address& ip) const;
    const std::vector<std::pair<Address, Address>>& edges() const { return edges_; }

    bool operator==(const Topology&) const = default;

private:
    std::vector<std::pair<Address, Address>> edges_;  // normalized a < b, sorted
};

struct NetworkState {
    std::vector<NodeState> nodes;  // sorted by address
    Topology topology;
    std::vector<std::pair<Address, Address>> historyEdges;  // grows monotonically
    std::uint64_t stepCount = 0;

    NodeState* findNode(const Address& ip);
    const NodeState* findNode(const Address& ip) const;

    bool operator==(const NetworkState&) const = default;
};

NetworkState makeInitialNetwork(const std::vector<Address>& addresses,
                                const std::vector<std::pair<Address, Address>>& edges,
                                const InterpretationConfig& cfg);

// A schedulable step: either one node task or one environment event.
struct Choice {
    enum class Kind : std::uint8_t {
        Resume,        // apply the node's pending visible action and run on
        HandleMsg,
        SendData,
        InitiateRreq,
        Connect,
        Disconnect,
        Inject,
    } kind = Kind::Resume;
    Address node;    // acting node (Resume/HandleMsg/SendData/InitiateRreq/Inject target)
    Address dip;     // task destination / inject destination
    Address peer;    // connect/disconnect partner
    Data payload;    // inject payload

    bool operator==(const Choice&) const = default;
    std::string text() const;
};

struct TransitionRecord {
    enum class Kind : std::uint8_t {
        Bcast, Gcast, Ucast, UcastFail, Deliver, Tau, Newpkt, Connect, Disconnect,
    } kind = Kind::Tau;
    std::uint64_t index = 0;
    Address src;
    AddressSet receivers;
    bool hasMsg = false;
    Message msg;
    Data payload;          // deliver / inject payload
    Address peerA, peerB;  // connect / disconnect
    std::uint64_t hashAfter = 0;

    std::string labelText(const InterpretationConfig& cfg) const;
};

// Node-level transitions currently enabled (environment events excluded).
std::vector<Choice> enabledProtocolChoices(const NetworkState& net);

// True iff no internal or output transition is enabled anywhere.
bool quiescent(const NetworkState& net);

// Executes one choice; the choice must be enabled (environment events always are).
// Counts handler steps that had to drop an ill-formed hand-injected message.
struct StepOptions {
    bool computeHash = true;
};
TransitionRecord stepNetwork(NetworkState& net, const Choice& choice,
                             const InterpretationConfig& cfg,
                             const StepOptions& opts = {});

extern thread_local std::uint64_t g_engineAnomalies;  // ill-formed-update drops

// Canonical, order-independent serialization and 64-bit content hash.
std::string canonicalSerialize(const NetworkState& net);
std::uint64_t canonicalHash(const NetworkState& net);

}  // namespace aodv
