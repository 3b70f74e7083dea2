#include "aodv/network.hpp"

#include <algorithm>
#include <sstream>

namespace aodv {

thread_local std::uint64_t g_engineAnomalies = 0;

namespace {

std::pair<Address, Address> normEdge(const Address& a, const Address& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

bool Topology::connected(const Address& a, const Address& b) const {
    if (a == b) return false;
    return std::binary_search(edges_.begin(), edges_.end(), normEdge(a, b));
}

void Topology::connect(const Address& a, const Address& b) {
    if (a == b) return;
    const auto e = normEdge(a, b);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it == edges_.end() || *it != e) edges_.insert(it, e);
}

void Topology::disconnect(const Address& a, const Address& b) {
    const auto e = normEdge(a, b);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it != edges_.end() && *it == e) edges_.erase(it);
}

AddressSet Topology::neighbours(const Address& ip) const {
    AddressSet out;
    for (const auto& [a, b] : edges_) {
        if (a == ip) out.push_back(b);
        else if (b == ip) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

NodeState* NetworkState::findNode(const Address& ip) {
    for (NodeState& n : nodes)
        if (n.ip == ip) return &n;
    return nullptr;
}

const NodeState* NetworkState::findNode(const Address& ip) const {
    for (const NodeState& n : nodes)
        if (n.ip == ip) return &n;
    return nullptr;
}

NetworkState makeInitialNetwork(const std::vector<Address>& addresses,
                                const std::vector<std::pair<Address, Address>>& edges,
                                const InterpretationConfig& cfg) {
    NetworkState net;
    std::vector<Address> sorted = addresses;
    std::sort(sorted.begin(), sorted.end());
    for (const Address& ip : sorted) net.nodes.push_back(makeInitialNode(ip, cfg));
    for (const auto& [a, b] : edges) net.topology.connect(a, b);
    net.historyEdges = net.topology.edges();
    return net;
}

std::string Choice::text() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::Resume: out << "resume " << node; break;
        case Kind::HandleMsg: out << "handle " << node; break;
        case Kind::SendData: out << "send " << node << " " << dip; break;
        case Kind::InitiateRreq: out << "rreq " << node << " " << dip; break;
        case Kind::Connect: out << "connect " << node << " " << peer; break;
        case Kind::Disconnect: out << "disconnect " << node << " " << peer; break;
        case Kind::Inject: out << "inject " << node << " " << dip << " \"" << payload << "\""; break;
    }
    return out.str();
}

std::vector<Choice> enabledProtocolChoices(const NetworkState& net) {
    std::vector<Choice> out;
    for (const NodeState& node : net.nodes) {
        if (node.frame) {
            Choice c;
            c.kind = Choice::Kind::Resume;
            c.node = node.ip;
            out.push_back(c);
            continue;
        }
        if (!node.msgq.empty()) {
            Choice c;
            c.kind = Choice::Kind::HandleMsg;
            c.node = node.ip;
            out.push_back(c);
        }
        for (const Address& dip : sendDataDests(node)) {
            Choice c;
            c.kind = Choice::Kind::SendData;
            c.node = node.ip;
            c.dip = dip;
            out.push_back(c);
        }
        for (const Address& dip : initiateRreqDests(node)) {
            Choice c;
            c.kind = Choice::Kind::InitiateRreq;
            c.node = node.ip;
            c.dip = dip;
            out.push_back(c);
        }
    }
    return out;
}

bool quiescent(const NetworkState& net) {
    return enabledProtocolChoices(net).empty();
}

namespace {

// Applies a pending visible action against the live topology; fills in the
// record and the continuation stage.
void applyAction(NetworkState& net, NodeState& node, Frame& frame, const CastAction& action,
                 TransitionRecord& rec) {
    switch (action.kind) {
        case CastAction::Kind::Broadcast: {
            rec.kind = TransitionRecord::Kind::Bcast;
            rec.receivers = net.topology.neighbours(node.ip);
            rec.hasMsg = true;
            rec.msg = action.msg;
            for (const Address& r : rec.receivers) net.findNode(r)->msgq.push_back(action.msg);
            frame.stage = action.okStage;
            break;
        }
        case CastAction::Kind::Groupcast: {
            rec.kind = TransitionRecord::Kind::Gcast;
            const AddressSet inRange = net.topology.neighbours(node.ip);
            for (const Address& r : action.group)
                if (addressSetContains(inRange, r)) rec.receivers.push_back(r);
            rec.hasMsg = true;
            rec.msg = action.msg;
            for (const Address& r : rec.receivers) net.findNode(r)->msgq.push_back(action.msg);
            frame.stage = action.okStage;
            break;
        }
        case CastAction::Kind::Unicast: {
            rec.hasMsg = true;
            rec.msg = action.msg;
            if (net.topology.connected(node.ip, action.dest)) {
                rec.kind = TransitionRecord::Kind::Ucast;
                rec.receivers = {action.dest};
                net.findNode(action.dest)->msgq.push_back(action.msg);
                frame.stage = action.okStage;
            } else {
                rec.kind = TransitionRecord::Kind::UcastFail;
                rec.receivers = {action.dest};
                frame.stage = action.failStage;
            }
            break;
        }
        case CastAction::Kind::Deliver: {
            rec.kind = TransitionRecord::Kind::Deliver;
            rec.payload = action.payload;
            frame.stage = action.okStage;
            break;
        }
    }
}

// Runs the node forward: applies the pending action if asked, then folds
// silent work until the next visible action (deferred) or completion.
void runNode(NetworkState& net, NodeState& node, const InterpretationConfig& cfg,
             TransitionRecord& rec, bool applyPendingFirst) {
    if (applyPendingFirst) {
        const CastAction action = *node.frame->pending;
        node.frame->pending.reset();
        applyAction(net, node, *node.frame, action, rec);
    }
    bool actionApplied = rec.kind != TransitionRecord::Kind::Tau;
    while (node.frame && !node.frame->pending) {
        BlockResult r;
        try {
            r = advanceBlock(node, *node.frame, cfg);
        } catch (const IllFormedUpdate&) {
            ++g_engineAnomalies;  // hand-injected malformed message: drop it
            node.frame.reset();
            break;
        }
        if (r.done) {
            node.frame.reset();
            break;
        }
        if (!actionApplied) {
            applyAction(net, node, *node.frame, *r.emit, rec);
            actionApplied = rec.kind != TransitionRecord::Kind::Tau;
        } else {
            node.frame->pending = r.emit;
            break;
        }
    }
}

}  // namespace

TransitionRecord stepNetwork(NetworkState& net, const Choice& choice,
                             const InterpretationConfig& cfg, const StepOptions& opts) {
    TransitionRecord rec;
    rec.index = net.stepCount;
    rec.src = choice.node;
    switch (choice.kind) {
        case Choice::Kind::Connect:
            net.topology.connect(choice.node, choice.peer);
            {
                const auto e = choice.node < choice.peer
                                   ? std::make_pair(choice.node, choice.peer)
                                   : std::make_pair(choice.peer, choice.node);
                auto it = std::lower_bound(net.historyEdges.begin(), net.historyEdges.end(), e);
                if (it == net.historyEdges.end() || *it != e) net.historyEdges.insert(it, e);
            }
            rec.kind = TransitionRecord::Kind::Connect;
            rec.peerA = choice.node;
            rec.peerB = choice.peer;
            break;
        case Choice::Kind::Disconnect:
            net.topology.disconnect(choice.node, choice.peer);
            rec.kind = TransitionRecord::Kind::Disconnect;
            rec.peerA = choice.node;
            rec.peerB = choice.peer;
            break;
        case Choice::Kind::Inject: {
            NodeState* node = net.findNode(choice.node);
            node->msgq.push_back(NewPktMsg{choice.payload, choice.dip});
            rec.kind = TransitionRecord::Kind::Newpkt;
            rec.hasMsg = true;
            rec.msg = NewPktMsg{choice.payload, choice.dip};
            rec.payload = choice.payload;
            break;
        }
        case Choice::Kind::Resume: {
            NodeState* node = net.findNode(choice.node);
            runNode(net, *node, cfg, rec, true);
            break;
        }
        case Choice::Kind::HandleMsg: {
            NodeState* node = net.findNode(choice.node);
            startHandleMsg(*node, cfg);
            runNode(net, *node, cfg, rec, false);
            break;
        }
        case Choice::Kind::SendData: {
            NodeState* node = net.findNode(choice.node);
            startSendData(*node, choice.dip, cfg);
            runNode(net, *node, cfg, rec, false);
            break;
        }
        case Choice::Kind::InitiateRreq: {
            NodeState* node = net.findNode(choice.node);
            startInitiateRreq(*node, choice.dip, cfg);
            runNode(net, *node, cfg, rec, false);
            break;
        }
    }
    ++net.stepCount;
    if (opts.computeHash) rec.hashAfter = canonicalHash(net);
    return rec;
}

std::string TransitionRecord::labelText(const InterpretationConfig& cfg) const {
    std::ostringstream out;
    out << index << " ";
    switch (kind) {
        case Kind::Bcast: out << "bcast " << src; break;
        case Kind::Gcast: out << "gcast " << src; break;
        case Kind::Ucast: out << "ucast " << src; break;
        case Kind::UcastFail: out << "ucast-fail " << src; break;
        case Kind::Deliver: out << "deliver " << src; break;
        case Kind::Tau: out << "tau " << src; break;
        case Kind::Newpkt: out << "newpkt " << src; break;
        case Kind::Connect: out << "connect " << peerA << "~" << peerB; break;
        case Kind::Disconnect: out << "disconnect " << peerA << "~" << peerB; break;
    }
    out << " [";
    for (std::size_t i = 0; i < receivers.size(); ++i) out << (i ? "," : "") << receivers[i];
    out << "] ";
    if (hasMsg)
        out << messageText(msg, cfg.skipRreqId, cfg.fwdRreq);
    else if (kind == Kind::Deliver)
        out << payload;
    else
        out << "-";
    out << " ";
    out << std::hex << hashAfter << std::dec;
    return out.str();
}

// --- canonical serialization -------------------------------------------------

namespace {

void serializeMessage(std::ostringstream& out, const Message& m) {
    out << messageText(m, false, true);  // full field set, independent of config
}

void serializeNode(std::ostringstream& out, const NodeState& n) {
    out << "node " << n.ip << " sn=" << n.sn << "\n";
    for (const RouteEntry& e : n.rt.entries()) {
        out << " rt " << e.dip << "," << e.dsn << ","
            << (e.dsk == SqnStatus::Known ? "kno" : "unkno") << ","
            << (e.flag == RouteFlag::Valid ? "val" : "inval") << "," << e.hops << "," << e.nhip
            << ",{";
        for (std::size_t i = 0; i < e.pre.size(); ++i) out << (i ? "," : "") << e.pre[i];
        out << "}\n";
    }
    for (const auto& [oip, id] : n.rreqs) out << " rreq-seen " << oip << "," << id << "\n";
    for (const StoreSlot& s : n.store.slots()) {
        out << " store " << s.dip << "," << (s.rrf == RreqFlag::Pending ? "pen" : "non-pen") << ",[";
        for (std::size_t i = 0; i < s.queue.size(); ++i) out << (i ? "," : "") << s.queue[i];
        out << "]\n";
    }
    for (const Message& m : n.msgq) {
        out << " msg ";
        serializeMessage(out, m);
        out << "\n";
    }
    if (n.frame) {
        out << " frame k=" << static_cast<int>(n.frame->kind)
            << " st=" << static_cast<int>(n.frame->stage);
        const Locals& l = n.frame->locals;
        out << " l=" << l.hops << "," << l.rreqid << "," << l.dip << "," << l.dsn << ","
            << static_cast<int>(l.dsk) << "," << l.oip << "," << l.osn << "," << l.sip << ","
            << l.handled << "," << l.data << "," << l.failedNhip << ",[";
        for (const auto& [rip, rsn] : l.dests.items()) out << "(" << rip << "," << rsn << ")";
        out << "]";
        if (n.frame->pending) {
            const CastAction& a = *n.frame->pending;
            out << " pend k=" << static_cast<int>(a.kind) << " d=" << a.dest << " g={";
            for (std::size_t i = 0; i < a.group.size(); ++i) out << (i ? "," : "") << a.group[i];
            out << "} m=";
            serializeMessage(out, a.msg);
            out << " p=" << a.payload << " ok=" << static_cast<int>(a.okStage)
                << " fail=" << static_cast<int>(a.failStage);
        }
        out << "\n";
    }
}

}  // namespace

std::string canonicalSerialize(const NetworkState& net) {
    std::ostringstream out;
    for (const NodeState& n : net.nodes) serializeNode(out, n);
    out << "topo";
    for (const auto& [a, b] : net.topology.edges()) out << " " << a << "~" << b;
    out << "\nhist";
    for (const auto& [a, b] : net.historyEdges) out << " " << a << "~" << b;
    out << "\n";
    return out.str();
}

namespace {

// FNV-1a over the canonical field order; avoids building the text form.
struct Fnv {
    std::uint64_t h = 1469598103934665603ull;
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    }
    void u64(std::uint64_t v) { bytes(&v, sizeof v); }
    void u8(std::uint8_t v) { bytes(&v, sizeof v); }
    void str(const std::string& s) {
        u64(s.size());
        bytes(s.data(), s.size());
    }
    void addrs(const AddressSet& set) {
        u64(set.size());
        for (const Address& a : set) str(a);
    }
    void dests(const DestsMap& d) {
        u64(d.size());
        for (const auto& [rip, rsn] : d.items()) {
            str(rip);
            u64(rsn);
        }
    }
    void message(const Message& m) {
        u8(static_cast<std::uint8_t>(m.index()));
        if (const auto* q = std::get_if<RreqMsg>(&m)) {
            u64(q->hops);
            u64(q->rreqid);
            str(q->dip);
            u64(q->dsn);
            u8(static_cast<std::uint8_t>(q->dsk));
            str(q->oip);
            u64(q->osn);
            str(q->sip);
            u8(q->handled);
        } else if (const auto* r = std::get_if<RrepMsg>(&m)) {
            u64(r->hops);
            str(r->dip);
            u64(r->dsn);
            str(r->oip);
            str(r->sip);
        } else if (const auto* e = std::get_if<RerrMsg>(&m)) {
            dests(e->dests);
            str(e->sip);
        } else if (const auto* p = std::get_if<PktMsg>(&m)) {
            str(p->data);
            str(p->dip);
            str(p->sip);
        } else if (const auto* n = std::get_if<NewPktMsg>(&m)) {
            str(n->data);
            str(n->dip);
        }
    }
};

}  // namespace

std::uint64_t canonicalHash(const NetworkState& net) {
    Fnv f;
    for (const NodeState& n : net.nodes) {
        f.str(n.ip);
        f.u64(n.sn);
        f.u64(n.rt.entries().size());
        for (const RouteEntry& e : n.rt.entries()) {
            f.str(e.dip);
            f.u64(e.dsn);
            f.u8(static_cast<std::uint8_t>(e.dsk));
            f.u8(static_cast<std::uint8_t>(e.flag));
            f.u64(e.hops);
            f.str(e.nhip);
            f.addrs(e.pre);
        }
        f.u64(n.rreqs.size());
        for (const auto& [oip, id] : n.rreqs) {
            f.str(oip);
            f.u64(id);
        }
        f.u64(n.store.slots().size());
        for (const StoreSlot& s : n.store.slots()) {
            f.str(s.dip);
            f.u8(static_cast<std::uint8_t>(s.rrf));
            f.u64(s.queue.size());
            for (const Data& d : s.queue) f.str(d);
        }
        f.u64(n.msgq.size());
        for (const Message& m : n.msgq) f.message(m);
        f.u8(n.frame.has_value());
        if (n.frame) {
            f.u8(static_cast<std::uint8_t>(n.frame->kind));
            f.u8(static_cast<std::uint8_t>(n.frame->stage));
            const Locals& l = n.frame->locals;
            f.u64(l.hops);
            f.u64(l.rreqid);
            f.str(l.dip);
            f.u64(l.dsn);
            f.u8(static_cast<std::uint8_t>(l.dsk));
            f.str(l.oip);
            f.u64(l.osn);
            f.str(l.sip);
            f.u8(l.handled);
            f.str(l.data);
            f.dests(l.dests);
            f.str(l.failedNhip);
            f.u8(n.frame->pending.has_value());
            if (n.frame->pending) {
                const CastAction& a = *n.frame->pending;
                f.u8(static_cast<std::uint8_t>(a.kind));
                f.str(a.dest);
                f.addrs(a.group);
                f.message(a.msg);
                f.str(a.payload);
                f.u8(static_cast<std::uint8_t>(a.okStage));
                f.u8(static_cast<std::uint8_t>(a.failStage));
            }
        }
    }
    f.u64(net.topology.edges().size());
    for (const auto& [a, b] : net.topology.edges()) {
        f.str(a);
        f.str(b);
    }
    f.u64(net.historyEdges.size());
    for (const auto& [a, b] : net.historyEdges) {
        f.str(a);
        f.str(b);
    }
    return f.h;
}

}  // namespace aodv
