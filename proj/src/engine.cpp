#include "aodv/engine.hpp"

#include <algorithm>

namespace aodv {

namespace {

UpdateOverlay overlayEverywhere(const InterpretationConfig& cfg) {
    // Reading 3b applies the RREP-style replacement at every update site.
    return cfg.amb3 == Amb3::Extra1a2aVariant ? UpdateOverlay::Rrep1a : UpdateOverlay::None;
}

UpdateOverlay overlayAtRrepSite(const InterpretationConfig& cfg) {
    if (cfg.amb1 == Amb1::R1a || cfg.amb3 == Amb3::Extra1a2aVariant) return UpdateOverlay::Rrep1a;
    return UpdateOverlay::None;
}

void applyUpdate(NodeState& node, const RouteEntry& r, const InterpretationConfig& cfg,
                 UpdateOverlay overlay) {
    node.rt = updateRoute(node.rt, r, cfg.amb2, overlay, cfg.amb4 == Amb4::R4a);
}

// Sender pre-update shared by all control messages: a 1-hop route with
// unknown sequence number.
void senderPreUpdate(NodeState& node, const Address& sip, const InterpretationConfig& cfg) {
    applyUpdate(node, RouteEntry{sip, 0, SqnStatus::Unknown, RouteFlag::Valid, 1, sip, {}}, cfg,
                overlayEverywhere(cfg));
}

RreqId rreqDedupKey(const RreqMsg& m, const InterpretationConfig& cfg) {
    return cfg.skipRreqId ? m.osn : m.rreqid;
}

// Destinations routed over a broken next hop, with the per-resolution-7
// sequence number treatment.
DestsMap brokenLinkDests(const NodeState& node, const Address& nhip,
                         const InterpretationConfig& cfg) {
    DestsMap dests;
    for (const RouteEntry& e : node.rt.entries()) {
        if (e.flag != RouteFlag::Valid || e.nhip != nhip) continue;
        const bool increment = cfg.amb7 == Amb7::R7a || e.dsk == SqnStatus::Known;
        dests.put(e.dip, increment ? incSeqNum(e.dsn) : e.dsn);
    }
    return dests;
}

// Invalidation plus error-message assembly after a detected link break.
BlockResult linkBreakRecovery(NodeState& node, Frame& frame, const InterpretationConfig& cfg) {
    const DestsMap dests = brokenLinkDests(node, frame.locals.failedNhip, cfg);
    node.rt = invalidateRoutes(node.rt, dests, cfg.amb8);
    node.store.setNonPending(dests);

    if (cfg.bcastRerr) {
        CastAction cast;
        cast.kind = CastAction::Kind::Broadcast;
        cast.msg = RerrMsg{dests, node.ip};
        cast.okStage = Stage::Finish;
        return {false, cast};
    }
    AddressSet pre;
    DestsMap thinned;
    for (const auto& [rip, rsn] : dests.items()) {
        const auto precs = node.rt.precs(rip);
        if (precs && !precs->empty()) {
            pre = addressSetUnion(pre, *precs);
            thinned.put(rip, rsn);
        }
    }
    CastAction cast;
    cast.kind = CastAction::Kind::Groupcast;
    cast.group = pre;
    cast.msg = RerrMsg{thinned, node.ip};
    cast.okStage = Stage::Finish;
    return {false, cast};
}

BlockResult emitBroadcast(Message msg) {
    CastAction cast;
    cast.kind = CastAction::Kind::Broadcast;
    cast.msg = std::move(msg);
    cast.okStage = Stage::Finish;
    return {false, cast};
}

BlockResult emitUnicast(const Address& dest, Message msg, Stage ok, Stage fail, Frame& frame) {
    frame.locals.failedNhip = dest;
    CastAction cast;
    cast.kind = CastAction::Kind::Unicast;
    cast.dest = dest;
    cast.msg = std::move(msg);
    cast.okStage = ok;
    cast.failStage = fail;
    return {false, cast};
}

// Own-sequence-number bump at the destination of a route request (ambiguity 10).
void bumpOwnSeqForReply(NodeState& node, SeqNum dsn, const InterpretationConfig& cfg) {
    if (cfg.amb6 == Amb6::R6b) {
        const SeqNum cur = node.rt.sqn(node.ip);
        SeqNum next = cur;
        if (cfg.amb10 == Amb10::R10a)
            next = std::max(cur, dsn);
        else if (dsn == incSeqNum(cur))
            next = incSeqNum(cur);
        if (next != cur)
            applyUpdate(node,
                        RouteEntry{node.ip, next, SqnStatus::Known, RouteFlag::Valid, 0, node.ip, {}},
                        cfg, overlayEverywhere(cfg));
        return;
    }
    if (cfg.amb10 == Amb10::R10a)
        node.sn = std::max(node.sn, dsn);
    else if (dsn == incSeqNum(node.sn))
        node.sn = incSeqNum(node.sn);
}

RreqMsg forwardedRreq(const NodeState& node, const Locals& l, bool handled,
                      const InterpretationConfig& cfg) {
    RreqMsg fwd;
    fwd.hops = l.hops + 1;
    fwd.rreqid = cfg.skipRreqId ? 0 : l.rreqid;
    fwd.dip = l.dip;
    fwd.dsn = std::max(node.rt.sqn(l.dip), l.dsn);
    fwd.dsk = l.dsk;
    fwd.oip = l.oip;
    fwd.osn = l.osn;
    fwd.sip = node.ip;
    fwd.handled = handled;
    return fwd;
}

BlockResult rreqEntry(NodeState& node, Frame& frame, const InterpretationConfig& cfg) {
    Locals& l = frame.locals;
    const RreqId key = l.rreqid;  // already the dedup key (osn under skip-rreqid)
    if (node.hasSeenRreq(l.oip, key)) return {true, {}};  // handled before: silently ignore

    applyUpdate(node,
                RouteEntry{l.oip, l.osn, SqnStatus::Known, RouteFlag::Valid, l.hops + 1, l.sip, {}},
                cfg, overlayEverywhere(cfg));
    node.recordRreq(l.oip, key);

    if (cfg.fwdRreq && l.handled)  // a reply was generated upstream: forward only
        return emitBroadcast(forwardedRreq(node, l, true, cfg));

    if (l.dip == node.ip) {
        bumpOwnSeqForReply(node, l.dsn, cfg);
        RrepMsg rep{0, l.dip, node.ownSeq(cfg), l.oip, node.ip};
        return emitUnicast(node.rt.nhop(l.oip).value(), rep, Stage::RreqReplySent,
                           Stage::LinkBreakRecovery, frame);
    }
    if (node.rt.hasValidRoute(l.dip) && l.dsn <= node.rt.sqn(l.dip) &&
        node.rt.sqnf(l.dip) == SqnStatus::Known) {
        // Fresh enough: answer on the destination's behalf.
        node.rt = addPrecursors(node.rt, l.dip, {l.sip});
        node.rt = addPrecursors(node.rt, l.oip, {node.rt.nhop(l.dip).value()});
        RrepMsg rep{node.rt.dhops(l.dip).value(), l.dip, node.rt.sqn(l.dip), l.oip, node.ip};
        return emitUnicast(node.rt.nhop(l.oip).value(), rep, Stage::RreqReplySent,
                           Stage::LinkBreakRecovery, frame);
    }
    return emitBroadcast(forwardedRreq(node, l, l.handled, cfg));
}

BlockResult rrepEntry(NodeState& node, Frame& frame, const InterpretationConfig& cfg) {
    Locals& l = frame.locals;
    const bool selfDestined = l.dip == node.ip;
    if (cfg.amb5 == Amb5::R5b && selfDestined) return {true, {}};  // never create a self-entry
    const bool skipTableWork = cfg.amb5 == Amb5::R5c && selfDestined;

    const UpdateOverlay overlay = overlayAtRrepSite(cfg);
    const RouteEntry incoming{l.dip, l.dsn, SqnStatus::Known, RouteFlag::Valid,
                              l.hops + 1, l.sip, {}};

    if (cfg.fwdRrep) {
        if (!skipTableWork) applyUpdate(node, incoming, cfg, overlay);
        if (l.oip == node.ip) return {true, {}};
        if (node.rt.hasValidRoute(l.oip) && node.rt.hasValidRoute(l.dip)) {
            const Address toward = node.rt.nhop(l.oip).value();
            if (!skipTableWork) {
                node.rt = addPrecursors(node.rt, l.dip, {toward});
                const Address nhipDip = node.rt.nhop(l.dip).value();
                if (node.rt.hasKnownRoute(nhipDip))
                    node.rt = addPrecursors(node.rt, nhipDip, {toward});
                if (cfg.extraPrecursor)
                    node.rt = addPrecursors(node.rt, l.oip, {node.rt.nhop(l.dip).value()});
            }
            // Forward with the freshest information available.
            RrepMsg fwd{node.rt.dhops(l.dip).value(), l.dip, node.rt.sqn(l.dip), l.oip, node.ip};
            return emitUnicast(toward, fwd, Stage::Finish, Stage::LinkBreakRecovery, frame);
        }
        return {true, {}};
    }

    if (!skipTableWork) {
        const bool invalidRepair =
            cfg.amb4 == Amb4::R4a && node.rt.hasKnownRoute(l.dip) &&
            node.rt.sqn(l.dip) == l.dsn && node.rt.status(l.dip) == RouteFlag::Invalid;
        const bool shorter = node.rt.hasKnownRoute(l.dip) && node.rt.sqn(l.dip) == l.dsn &&
                             node.rt.dhops(l.dip) && node.rt.dhops(l.dip).value() > l.hops + 1;
        const bool wouldUpdate =
            !node.rt.hasKnownRoute(l.dip) || node.rt.sqn(l.dip) < l.dsn || shorter ||
            invalidRepair ||
            (overlay == UpdateOverlay::Rrep1a && node.rt.hasKnownRoute(l.dip) &&
             node.rt.sqnf(l.dip) == SqnStatus::Unknown);
        if (!wouldUpdate) return {true, {}};  // nothing fresher: drop the reply
        applyUpdate(node, incoming, cfg, overlay);
    }
    if (l.oip == node.ip) return {true, {}};
    if (!node.rt.hasValidRoute(l.oip)) return {true, {}};  // reply lost, no error raised

    const Address toward = node.rt.nhop(l.oip).value();
    if (!skipTableWork) {
        node.rt = addPrecursors(node.rt, l.dip, {toward});
        const Address nhipDip = node.rt.nhop(l.dip).value();
        if (node.rt.hasKnownRoute(nhipDip)) node.rt = addPrecursors(node.rt, nhipDip, {toward});
        if (cfg.extraPrecursor) node.rt = addPrecursors(node.rt, l.oip, {node.rt.nhop(l.dip).value()});
    }
    RrepMsg fwd{l.hops + 1, l.dip, l.dsn, l.oip, node.ip};
    return emitUnicast(toward, fwd, Stage::Finish, Stage::LinkBreakRecovery, frame);
}

BlockResult rerrEntry(NodeState& node, Frame& frame, const InterpretationConfig& cfg) {
    Locals& l = frame.locals;
    DestsMap affected;
    for (const auto& [rip, rsn] : l.dests.items()) {
        if (!node.rt.hasValidRoute(rip)) continue;
        if (node.rt.nhop(rip).value() != l.sip) continue;
        const SeqNum stored = node.rt.sqn(rip);
        bool hit = false;
        switch (cfg.amb8) {
            case InvalidateVariant::V8a:
            case InvalidateVariant::V8c:
            case InvalidateVariant::V8d: hit = true; break;
            case InvalidateVariant::V8b:
            case InvalidateVariant::V8e: hit = stored <= rsn; break;
            case InvalidateVariant::V8f: hit = stored < rsn; break;
        }
        if (hit) affected.put(rip, rsn);
    }
    node.rt = invalidateRoutes(node.rt, affected, cfg.amb8);
    node.store.setNonPending(affected);

    if (cfg.bcastRerr) {
        if (affected.empty()) return {true, {}};
        return emitBroadcast(RerrMsg{affected, node.ip});
    }
    AddressSet pre;
    DestsMap thinned;
    for (const auto& [rip, rsn] : affected.items()) {
        const auto precs = node.rt.precs(rip);
        if (precs && !precs->empty()) {
            pre = addressSetUnion(pre, *precs);
            thinned.put(rip, rsn);
        }
    }
    CastAction cast;
    cast.kind = CastAction::Kind::Groupcast;
    cast.group = pre;
    cast.msg = RerrMsg{thinned, node.ip};
    cast.okStage = Stage::Finish;
    return {false, cast};
}

BlockResult pktEntry(NodeState& node, Frame& frame, const InterpretationConfig& cfg) {
    Locals& l = frame.locals;
    if (l.dip == node.ip) {
        CastAction deliver;
        deliver.kind = CastAction::Kind::Deliver;
        deliver.payload = l.data;
        deliver.okStage = Stage::Finish;
        return {false, deliver};
    }
    if (node.rt.hasValidRoute(l.dip))
        return emitUnicast(node.rt.nhop(l.dip).value(), PktMsg{l.data, l.dip, node.ip}, Stage::Finish,
                           Stage::LinkBreakRecovery, frame);
    if (node.rt.hasKnownRoute(l.dip)) {
        // Invalid route: packet is dropped, interested neighbours are told.
        DestsMap dests{{l.dip, node.rt.sqn(l.dip)}};
        if (cfg.bcastRerr) return emitBroadcast(RerrMsg{dests, node.ip});
        CastAction cast;
        cast.kind = CastAction::Kind::Groupcast;
        cast.group = node.rt.precs(l.dip).value();
        cast.msg = RerrMsg{dests, node.ip};
        cast.okStage = Stage::Finish;
        return {false, cast};
    }
    if (cfg.amb9 == Amb9::R9b)
        return emitBroadcast(RerrMsg{DestsMap{{l.dip, 0}}, node.ip});
    return {true, {}};  // unknown destination: drop silently
}

}  // namespace

bool NodeState::hasSeenRreq(const Address& oip, RreqId key) const {
    return std::binary_search(rreqs.begin(), rreqs.end(), std::make_pair(oip, key));
}

void NodeState::recordRreq(const Address& oip, RreqId key) {
    const auto item = std::make_pair(oip, key);
    auto it = std::lower_bound(rreqs.begin(), rreqs.end(), item);
    if (it == rreqs.end() || *it != item) rreqs.insert(it, item);
}

SeqNum NodeState::ownSeq(const InterpretationConfig& cfg) const {
    return cfg.amb6 == Amb6::R6b ? rt.sqn(ip) : sn;
}

NodeState makeInitialNode(const Address& ip, const InterpretationConfig& cfg) {
    NodeState node;
    node.ip = ip;
    node.sn = 1;
    if (cfg.amb6 == Amb6::R6b)
        node.rt.put(RouteEntry{ip, 1, SqnStatus::Known, RouteFlag::Valid, 0, ip, {}});
    return node;
}

BlockResult advanceBlock(NodeState& node, Frame& frame, const InterpretationConfig& cfg) {
    switch (frame.stage) {
        case Stage::Finish:
            return {true, {}};
        case Stage::LinkBreakRecovery:
            return linkBreakRecovery(node, frame, cfg);
        case Stage::SendDataOk:
            node.store.dropHead(frame.locals.dip);
            return {true, {}};
        case Stage::RreqReplySent:
            if (cfg.fwdRreq)
                return emitBroadcast(forwardedRreq(node, frame.locals, true, cfg));
            return {true, {}};
        case Stage::Entry:
            break;
    }
    switch (frame.kind) {
        case HandlerKind::NewPkt: {
            Locals& l = frame.locals;
            if (l.dip == node.ip) {
                CastAction deliver;
                deliver.kind = CastAction::Kind::Deliver;
                deliver.payload = l.data;
                deliver.okStage = Stage::Finish;
                return {false, deliver};
            }
            node.store.add(l.data, l.dip);
            return {true, {}};
        }
        case HandlerKind::Pkt:
            return pktEntry(node, frame, cfg);
        case HandlerKind::Rreq:
            return rreqEntry(node, frame, cfg);
        case HandlerKind::Rrep:
            return rrepEntry(node, frame, cfg);
        case HandlerKind::Rerr:
            return rerrEntry(node, frame, cfg);
        case HandlerKind::SendData: {
            Locals& l = frame.locals;
            l.data = node.store.headPacket(l.dip).value();
            return emitUnicast(node.rt.nhop(l.dip).value(), PktMsg{l.data, l.dip, node.ip},
                               Stage::SendDataOk, Stage::LinkBreakRecovery, frame);
        }
        case HandlerKind::InitiateRreq: {
            Locals& l = frame.locals;
            node.store.setPending(l.dip);
            if (cfg.amb6 == Amb6::R6b)
                applyUpdate(node,
                            RouteEntry{node.ip, incSeqNum(node.rt.sqn(node.ip)), SqnStatus::Known,
                                       RouteFlag::Valid, 0, node.ip, {}},
                            cfg, overlayEverywhere(cfg));
            else
                node.sn = incSeqNum(node.sn);
            const SeqNum osn = node.ownSeq(cfg);
            RreqMsg req;
            req.hops = 0;
            if (cfg.skipRreqId) {
                node.recordRreq(node.ip, osn);
            } else {
                req.rreqid = newRreqId(node.rreqs, node.ip);
                node.recordRreq(node.ip, req.rreqid);
            }
            req.dip = l.dip;
            req.dsn = node.rt.sqn(l.dip);
            req.dsk = node.rt.sqnf(l.dip);
            req.oip = node.ip;
            req.osn = osn;
            req.sip = node.ip;
            req.handled = false;
            return emitBroadcast(req);
        }
    }
    return {true, {}};
}

void startHandleMsg(NodeState& node, const InterpretationConfig& cfg) {
    const Message msg = node.msgq.front();
    node.msgq.erase(node.msgq.begin());

    Frame frame;
    if (const auto* m = std::get_if<NewPktMsg>(&msg)) {
        frame.kind = HandlerKind::NewPkt;
        frame.locals.data = m->data;
        frame.locals.dip = m->dip;
    } else if (const auto* m = std::get_if<PktMsg>(&msg)) {
        frame.kind = HandlerKind::Pkt;
        frame.locals.data = m->data;
        frame.locals.dip = m->dip;
        frame.locals.oip = m->sip;
    } else if (const auto* m = std::get_if<RreqMsg>(&msg)) {
        senderPreUpdate(node, m->sip, cfg);
        frame.kind = HandlerKind::Rreq;
        frame.locals.hops = m->hops;
        frame.locals.rreqid = rreqDedupKey(*m, cfg);
        frame.locals.dip = m->dip;
        frame.locals.dsn = m->dsn;
        frame.locals.dsk = m->dsk;
        frame.locals.oip = m->oip;
        frame.locals.osn = m->osn;
        frame.locals.sip = m->sip;
        frame.locals.handled = m->handled;
    } else if (const auto* m = std::get_if<RrepMsg>(&msg)) {
        senderPreUpdate(node, m->sip, cfg);
        frame.kind = HandlerKind::Rrep;
        frame.locals.hops = m->hops;
        frame.locals.dip = m->dip;
        frame.locals.dsn = m->dsn;
        frame.locals.oip = m->oip;
        frame.locals.sip = m->sip;
    } else if (const auto* m = std::get_if<RerrMsg>(&msg)) {
        senderPreUpdate(node, m->sip, cfg);
        frame.kind = HandlerKind::Rerr;
        frame.locals.dests = m->dests;
        frame.locals.sip = m->sip;
    }
    node.frame = frame;
}

void startSendData(NodeState& node, const Address& dip, const InterpretationConfig& cfg) {
    (void)cfg;
    Frame frame;
    frame.kind = HandlerKind::SendData;
    frame.locals.dip = dip;
    node.frame = frame;
}

void startInitiateRreq(NodeState& node, const Address& dip, const InterpretationConfig& cfg) {
    (void)cfg;
    Frame frame;
    frame.kind = HandlerKind::InitiateRreq;
    frame.locals.dip = dip;
    node.frame = frame;
}

bool sendDataEnabled(const NodeState& node, const Address& dip) {
    return !node.frame && node.store.find(dip) != nullptr && node.rt.hasValidRoute(dip);
}

bool initiateRreqEnabled(const NodeState& node, const Address& dip) {
    if (node.frame) return false;
    const StoreSlot* slot = node.store.find(dip);
    return slot && !node.rt.hasValidRoute(dip) && slot->rrf == RreqFlag::NonPending;
}

AddressSet sendDataDests(const NodeState& node) {
    AddressSet out;
    for (const StoreSlot& s : node.store.slots())
        if (node.rt.hasValidRoute(s.dip)) out.push_back(s.dip);
    return out;
}

AddressSet initiateRreqDests(const NodeState& node) {
    AddressSet out;
    for (const StoreSlot& s : node.store.slots())
        if (!node.rt.hasValidRoute(s.dip) && s.rrf == RreqFlag::NonPending) out.push_back(s.dip);
    return out;
}

}  // namespace aodv
