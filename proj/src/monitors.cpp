#include "aodv/monitors.hpp"

#include <algorithm>
#include <sstream>

namespace aodv {

const char* monitorName(MonitorKind k) {
    switch (k) {
        case MonitorKind::RouteDiscovery: return "route-discovery";
        case MonitorKind::ReplyIssued: return "reply-issued";
        case MonitorKind::Pd1: return "pd1";
        case MonitorKind::Pd2: return "pd2";
        case MonitorKind::Pd3: return "pd3";
    }
    return "?";
}

const char* verdictName(VerdictOutcome v) {
    switch (v) {
        case VerdictOutcome::Satisfied: return "satisfied";
        case VerdictOutcome::Violated: return "violated";
        case VerdictOutcome::Vacuous: return "vacuous";
        case VerdictOutcome::BudgetInconclusive: return "budget-inconclusive";
    }
    return "?";
}

std::string Verdict::text() const {
    std::ostringstream out;
    out << monitorName(kind) << ": " << verdictName(outcome);
    if (!witnesses.empty()) {
        out << " (obligations at";
        for (std::uint64_t w : witnesses) out << " " << w;
        out << ")";
    }
    if (!detail.empty()) out << " - " << detail;
    return out.str();
}

bool connectedStar(const NetworkState& net, const Address& oip, const Address& dip) {
    if (oip == dip) return true;
    AddressSet reached{oip};
    AddressSet frontier{oip};
    while (!frontier.empty()) {
        AddressSet next;
        for (const Address& f : frontier)
            for (const Address& n : net.topology.neighbours(f))
                if (!addressSetContains(reached, n)) {
                    if (n == dip) return true;
                    addressSetInsert(reached, n);
                    addressSetInsert(next, n);
                }
        frontier = std::move(next);
    }
    return false;
}

bool MonitorSet::wants(MonitorKind k) const {
    return std::find(kinds_.begin(), kinds_.end(), k) != kinds_.end();
}

MonitorSet::PairTrack& MonitorSet::track(const Address& oip, const Address& dip) {
    for (PairTrack& t : tracks_)
        if (t.oip == oip && t.dip == dip) return t;
    PairTrack t;
    t.oip = oip;
    t.dip = dip;
    t.queuedWithoutRoute.assign(positions_, false);
    t.flagNonPending.assign(positions_, false);
    tracks_.push_back(std::move(t));
    return tracks_.back();
}

void MonitorSet::observe(const NetworkState& before, const TransitionRecord& rec,
                         const NetworkState& after) {
    // New obligations raised by this transition.
    if (rec.kind == TransitionRecord::Kind::Bcast && rec.hasMsg) {
        if (const auto* rreq = std::get_if<RreqMsg>(&rec.msg)) {
            if (rreq->sip == rreq->oip && connectedStar(before, rreq->oip, rreq->dip)) {
                if (wants(MonitorKind::RouteDiscovery))
                    discovery_.push_back({rec.index, rreq->oip, rreq->dip, {}, false});
                if (wants(MonitorKind::ReplyIssued))
                    reply_.push_back({rec.index, rreq->oip, rreq->dip, {}, false});
            }
        }
    }
    if (rec.kind == TransitionRecord::Kind::Newpkt &&
        (wants(MonitorKind::Pd1) || wants(MonitorKind::Pd2) || wants(MonitorKind::Pd3))) {
        const auto* np = std::get_if<NewPktMsg>(&rec.msg);
        if (np && np->dip != rec.src && connectedStar(before, rec.src, np->dip))
            delivery_.push_back({rec.index, rec.src, np->dip, np->data, false});
        if (np && np->dip != rec.src) track(rec.src, np->dip);  // watch the flag precondition
    }

    // Resolution of open obligations.
    const bool disconnect = rec.kind == TransitionRecord::Kind::Disconnect;
    if (disconnect) {
        for (Obligation& o : discovery_) o.satisfied = true;
        for (Obligation& o : reply_) o.satisfied = true;
        for (Obligation& o : delivery_) o.satisfied = true;
    }
    for (Obligation& o : discovery_)
        if (!o.satisfied) {
            const NodeState* n = after.findNode(o.oip);
            if (n && n->rt.hasValidRoute(o.dip)) o.satisfied = true;
        }
    if ((rec.kind == TransitionRecord::Kind::Ucast ||
         rec.kind == TransitionRecord::Kind::UcastFail) &&
        rec.hasMsg) {
        if (const auto* rrep = std::get_if<RrepMsg>(&rec.msg)) {
            for (Obligation& o : reply_)
                if (!o.satisfied && rrep->dip == o.dip && rrep->oip == o.oip) o.satisfied = true;
        }
    }
    if (rec.kind == TransitionRecord::Kind::Deliver) {
        for (Obligation& o : delivery_)
            if (!o.satisfied && rec.src == o.dip && rec.payload == o.payload) o.satisfied = true;
    }
    if (rec.kind == TransitionRecord::Kind::Newpkt) {
        // The keep-injecting side condition: any obligation whose triple is
        // injected again restarts its discharge window.
        if (const auto* np = std::get_if<NewPktMsg>(&rec.msg))
            for (Obligation& o : delivery_)
                if (o.oip == rec.src && o.dip == np->dip && o.payload == np->data)
                    o.lastInjection = rec.index;
    }

    // Per-position data for the PD3 request-required-flag precondition.
    ++positions_;
    for (PairTrack& t : tracks_) {
        const NodeState* n = after.findNode(t.oip);
        const bool queued = n && n->store.find(t.dip) != nullptr && !n->rt.hasValidRoute(t.dip);
        const bool nonPen = n && n->store.flag(t.dip) == RreqFlag::NonPending;
        t.queuedWithoutRoute.push_back(queued);
        t.flagNonPending.push_back(nonPen);
    }
}

std::vector<Verdict> MonitorSet::finalize(bool endedQuiescent) const {
    std::vector<Verdict> out;
    const auto summarize = [&](MonitorKind kind, const std::vector<Obligation>& obs,
                               bool discharged) {
        Verdict v;
        v.kind = kind;
        if (!endedQuiescent) {
            v.outcome = VerdictOutcome::BudgetInconclusive;
            v.detail = "run did not reach quiescence";
        } else if (discharged) {
            v.outcome = VerdictOutcome::Vacuous;
            v.detail = "request-required-flag precondition violated by the run";
        } else if (obs.empty()) {
            v.outcome = VerdictOutcome::Vacuous;
        } else {
            for (const Obligation& o : obs)
                if (!o.satisfied) v.witnesses.push_back(o.traceIndex);
            v.outcome = v.witnesses.empty() ? VerdictOutcome::Satisfied : VerdictOutcome::Violated;
        }
        out.push_back(std::move(v));
    };

    if (wants(MonitorKind::RouteDiscovery))
        summarize(MonitorKind::RouteDiscovery, discovery_, false);
    if (wants(MonitorKind::ReplyIssued)) summarize(MonitorKind::ReplyIssued, reply_, false);
    if (wants(MonitorKind::Pd1)) summarize(MonitorKind::Pd1, delivery_, false);
    if (wants(MonitorKind::Pd2)) {
        // Demonstrator: on a finite complete run the keep-injecting side
        // condition eventually fails (the client stops), so every obligation
        // is discharged unless the run ends exactly on its injection.
        std::vector<Obligation> adjusted = delivery_;
        for (Obligation& o : adjusted)
            if (!o.satisfied && o.lastInjection + 1 < positions_) o.satisfied = true;
        summarize(MonitorKind::Pd2, adjusted, false);
    }
    if (wants(MonitorKind::Pd3)) {
        // Discharged when some suffix keeps packets queued without a valid
        // route while the flag never returns to non-pending.
        bool preconditionViolated = false;
        for (const PairTrack& t : tracks_) {
            bool allQueued = true;
            bool noneNonPen = true;
            for (std::size_t i = t.queuedWithoutRoute.size(); i-- > 0;) {
                allQueued = allQueued && t.queuedWithoutRoute[i];
                noneNonPen = noneNonPen && !t.flagNonPending[i];
                if (allQueued && noneNonPen) {
                    preconditionViolated = true;
                    break;
                }
                if (!allQueued) break;  // no earlier suffix can be all-queued either
            }
            if (preconditionViolated) break;
        }
        summarize(MonitorKind::Pd3, delivery_, preconditionViolated);
    }
    return out;
}

void FairnessCertificate::observe(const NetworkState& before, const TransitionRecord& rec,
                                  const NetworkState& after, const Choice& fired) {
    (void)before;
    (void)rec;
    for (const NodeState& n : after.nodes)
        maxQueueSeen_ = std::max(maxQueueSeen_, static_cast<std::uint64_t>(n.msgq.size()));

    const auto bump = [&](const Key& key, bool guard, bool served) {
        auto it = std::find_if(streaks_.begin(), streaks_.end(),
                               [&](const auto& p) { return p.first == key; });
        if (it == streaks_.end()) {
            streaks_.push_back({key, 0});
            it = std::prev(streaks_.end());
        }
        if (served || !guard)
            it->second = 0;
        else
            maxStreak_ = std::max(maxStreak_, ++it->second);
    };

    for (const NodeState& n : after.nodes) {
        const bool servedHere = fired.node == n.ip;
        bump({n.ip, 0, ""}, !n.msgq.empty(),
             servedHere && (fired.kind == Choice::Kind::HandleMsg ||
                            fired.kind == Choice::Kind::Resume));
        for (const NodeState& other : after.nodes) {
            if (other.ip == n.ip) continue;
            const StoreSlot* slot = n.store.find(other.ip);
            const bool sendGuard = slot && n.rt.hasValidRoute(other.ip);
            const bool initGuard =
                slot && !n.rt.hasValidRoute(other.ip) && slot->rrf == RreqFlag::NonPending;
            bump({n.ip, 1, other.ip}, sendGuard,
                 servedHere && fired.kind == Choice::Kind::SendData && fired.dip == other.ip);
            bump({n.ip, 2, other.ip}, initGuard,
                 servedHere && fired.kind == Choice::Kind::InitiateRreq && fired.dip == other.ip);
        }
    }
}

std::uint64_t FairnessCertificate::bound(std::size_t nodeCount) const {
    const std::uint64_t classes = 1 + 2 * static_cast<std::uint64_t>(nodeCount);
    return static_cast<std::uint64_t>(nodeCount) * classes * (maxQueueSeen_ + 1);
}

}  // namespace aodv
