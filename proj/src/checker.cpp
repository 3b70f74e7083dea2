#include "aodv/checker.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace aodv {

std::string Violation::text() const {
    std::ostringstream out;
    out << id << " at " << node;
    if (!dip.empty()) out << " dest " << dip;
    if (!detail.empty()) out << ": " << detail;
    out << " (step " << traceIndex << ")";
    return out.str();
}

std::string RoutingLoop::text() const {
    std::ostringstream out;
    out << "cycle for " << dip << ":";
    for (const Address& n : cycle) out << " " << n;
    return out.str();
}

std::vector<Violation> checkStateInvariants(const NetworkState& net,
                                            const InterpretationConfig& cfg) {
    std::vector<Violation> out;
    const bool selfEntryModel = cfg.amb6 == Amb6::R6b;
    // Prop "optimal" needs 6b without the (2d, 5a) mix.
    const bool optimalSelfEntry =
        selfEntryModel && !(cfg.amb2 == UpdateVariant::V2d && cfg.amb5 == Amb5::R5a);

    for (const NodeState& n : net.nodes) {
        const SeqNum own = n.ownSeq(cfg);
        if (own < 1)
            out.push_back({"sn-positive", n.ip, "", "own sequence number is " +
                                                       std::to_string(own)});

        const auto& entries = n.rt.entries();
        for (std::size_t i = 1; i < entries.size(); ++i)
            if (entries[i - 1].dip == entries[i].dip)
                out.push_back({"rt-unique", n.ip, entries[i].dip, "duplicate entry"});

        for (const RouteEntry& e : entries) {
            const bool self = e.dip == n.ip;
            if (e.hops < 1 && !(selfEntryModel && self))
                out.push_back({"hops-positive", n.ip, e.dip, "hop count 0"});
            if (e.dsn == 0 && e.dsk == SqnStatus::Known)
                out.push_back({"zero-sqn-known", n.ip, e.dip, "dsn 0 marked known"});
            if (e.dsk == SqnStatus::Unknown && e.hops != 1)
                out.push_back({"unknown-sqn-hops", n.ip, e.dip,
                               "unknown sqn with hop count " + std::to_string(e.hops)});
            if (e.hops == 1 && e.nhip != e.dip)
                out.push_back({"one-hop-nhip", n.ip, e.dip, "next hop " + e.nhip});
            if (optimalSelfEntry) {
                const bool zeroHops = e.hops == 0;
                const bool selfNhip = e.nhip == n.ip;
                if (self != zeroHops || self != selfNhip)
                    out.push_back({"self-entry-shape", n.ip, e.dip, "non-optimal self-entry"});
            }
            // Valid non-trivial routes must be backed by the next hop's table.
            if (e.flag == RouteFlag::Valid && e.nhip != e.dip && e.dip != n.ip) {
                const NodeState* nh = net.findNode(e.nhip);
                if (!nh) {
                    out.push_back({"nsqn-step", n.ip, e.dip, "next hop " + e.nhip + " unknown"});
                } else if (const RouteEntry* ne = nh->rt.find(e.dip); !ne) {
                    out.push_back(
                        {"nsqn-step", n.ip, e.dip, "next hop " + e.nhip + " has no entry"});
                } else if (netSeqNum(e) > netSeqNum(*ne)) {
                    out.push_back({"nsqn-step", n.ip, e.dip,
                                   "net sqn " + std::to_string(netSeqNum(e)) + " > " +
                                       std::to_string(netSeqNum(*ne)) + " at " + e.nhip});
                }
            }
        }
        if (optimalSelfEntry) {
            const RouteEntry* self = n.rt.find(n.ip);
            if (!self || self->flag != RouteFlag::Valid || self->hops != 0 ||
                self->dsk != SqnStatus::Known)
                out.push_back({"self-entry-present", n.ip, n.ip, "optimal self-entry missing"});
        }

        for (const StoreSlot& s : n.store.slots()) {
            if (s.queue.empty())
                out.push_back({"store-empty-queue", n.ip, s.dip, "empty packet queue"});
            if (s.dip == n.ip)
                out.push_back({"store-self", n.ip, s.dip, "queued packets for itself"});
        }
    }
    return out;
}

std::vector<Violation> checkTransitionMonotone(const NetworkState& before,
                                               const NetworkState& after,
                                               const InterpretationConfig& cfg) {
    std::vector<Violation> out;
    const bool nsqnRule = cfg.amb2 == UpdateVariant::V2e;
    for (const NodeState& b : before.nodes) {
        const NodeState* a = after.findNode(b.ip);
        if (!a) continue;
        if (a->ownSeq(cfg) < b.ownSeq(cfg))
            out.push_back({"sn-monotone", b.ip, "",
                           std::to_string(b.ownSeq(cfg)) + " -> " +
                               std::to_string(a->ownSeq(cfg))});
        for (const auto& seen : b.rreqs)
            if (!a->hasSeenRreq(seen.first, seen.second))
                out.push_back({"rreqs-monotone", b.ip, seen.first, "seen-request entry lost"});
        for (const RouteEntry& e : b.rt.entries()) {
            const RouteEntry* ae = a->rt.find(e.dip);
            if (!ae) {
                out.push_back({"kd-monotone", b.ip, e.dip, "destination dropped"});
                continue;
            }
            if (nsqnRule) {
                if (netSeqNum(*ae) < netSeqNum(e))
                    out.push_back({"nsqn-monotone", b.ip, e.dip,
                                   std::to_string(netSeqNum(e)) + " -> " +
                                       std::to_string(netSeqNum(*ae))});
            } else if (ae->dsn < e.dsn) {
                out.push_back({"dsn-monotone", b.ip, e.dip,
                               std::to_string(e.dsn) + " -> " + std::to_string(ae->dsn)});
            }
            if (compareQuality(b.rt, a->rt, e.dip) == QualityOrder::Worse)
                out.push_back({"quality-monotone", b.ip, e.dip, "table quality decreased"});
        }
    }
    return out;
}

std::optional<RoutingLoop> detectRoutingLoop(const NetworkState& net) {
    for (const NodeState& target : net.nodes) {
        const Address& dip = target.ip;
        // Arc ip -> nhip for every valid entry for dip at ip != dip.
        std::map<Address, Address> arc;
        for (const NodeState& n : net.nodes) {
            if (n.ip == dip) continue;
            const RouteEntry* e = n.rt.find(dip);
            if (e && e->flag == RouteFlag::Valid) arc[n.ip] = e->nhip;
        }
        for (const NodeState& n : net.nodes) {
            // Follow next hops; a repeat before reaching dip is a cycle.
            std::vector<Address> path;
            Address cur = n.ip;
            while (cur != dip) {
                auto it = arc.find(cur);
                if (it == arc.end()) break;
                if (std::find(path.begin(), path.end(), cur) != path.end()) {
                    RoutingLoop loop;
                    loop.dip = dip;
                    auto start = std::find(path.begin(), path.end(), cur);
                    loop.cycle.assign(start, path.end());
                    return loop;
                }
                path.push_back(cur);
                cur = it->second;
            }
        }
    }
    return std::nullopt;
}

std::vector<Violation> checkQualityChain(const NetworkState& net) {
    std::vector<Violation> out;
    for (const NodeState& target : net.nodes) {
        const Address& dip = target.ip;
        for (const NodeState& n : net.nodes) {
            if (n.ip == dip) continue;
            const RouteEntry* e = n.rt.find(dip);
            if (!e || e->flag != RouteFlag::Valid || e->nhip == dip) continue;
            const NodeState* next = net.findNode(e->nhip);
            if (!next) continue;
            const RouteEntry* ne = next->rt.find(dip);
            if (!ne || ne->flag != RouteFlag::Valid) continue;
            if (!strictlyBetter(*e, *ne))
                out.push_back({"quality-chain", n.ip, dip,
                               "no strict increase towards " + e->nhip});
        }
    }
    return out;
}

namespace {

// Walk of exactly `hops` edges from `from` to `to` in the history graph,
// with a fixed first step.
bool exactLengthWalk(const NetworkState& net, const Address& from, const Address& firstHop,
                     const Address& to, HopCount hops) {
    if (hops == 0) return from == to;
    const auto connectedInHistory = [&](const Address& a, const Address& b) {
        const auto e = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        return std::binary_search(net.historyEdges.begin(), net.historyEdges.end(), e);
    };
    if (!connectedInHistory(from, firstHop)) return false;
    AddressSet frontier{firstHop};
    for (HopCount step = 1; step < hops; ++step) {
        AddressSet next;
        for (const NodeState& n : net.nodes)
            for (const Address& f : frontier)
                if (connectedInHistory(f, n.ip)) addressSetInsert(next, n.ip);
        frontier = std::move(next);
        if (frontier.empty()) return false;
    }
    return addressSetContains(frontier, to);
}

}  // namespace

std::vector<Violation> checkRouteCorrectness(const NetworkState& net) {
    std::vector<Violation> out;
    for (const NodeState& n : net.nodes) {
        for (const RouteEntry& e : n.rt.entries()) {
            if (e.hops == 0) {
                if (e.dip != n.ip)
                    out.push_back({"route-correct", n.ip, e.dip, "zero-hop non-self entry"});
                continue;
            }
            if (!exactLengthWalk(net, n.ip, e.nhip, e.dip, e.hops))
                out.push_back({"route-correct", n.ip, e.dip,
                               "no " + std::to_string(e.hops) + "-hop path via " + e.nhip});
        }
    }
    return out;
}

void StrongRouteCorrectness::observe(const NetworkState& after) {
    const auto linkedInHistory = [&](const Address& a, const Address& b) {
        const auto e = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        return std::binary_search(after.historyEdges.begin(), after.historyEdges.end(), e);
    };
    const auto seen = [&](const Address& n, const Address& dip, HopCount hops) {
        return std::find(seenValid_.begin(), seenValid_.end(),
                         std::make_tuple(n, dip, hops)) != seenValid_.end();
    };
    for (const NodeState& n : after.nodes) {
        for (const RouteEntry& e : n.rt.entries()) {
            bool ok = true;
            if (e.hops == 0) {
                ok = e.dip == n.ip;
            } else if (e.hops == 1) {
                ok = e.dip == e.nhip && linkedInHistory(n.ip, e.nhip);
            } else {
                ok = linkedInHistory(n.ip, e.nhip) && seen(e.nhip, e.dip, e.hops - 1);
            }
            if (!ok)
                violations_.push_back({"strong-route-correct", n.ip, e.dip,
                                       "no backing for " + std::to_string(e.hops) +
                                           " hops via " + e.nhip,
                                       after.stepCount});
        }
    }
    for (const NodeState& n : after.nodes)
        for (const RouteEntry& e : n.rt.entries())
            if (e.flag == RouteFlag::Valid &&
                !seen(n.ip, e.dip, e.hops))
                seenValid_.push_back({n.ip, e.dip, e.hops});
}

std::vector<Violation> checkAfterTransition(const NetworkState& before, const NetworkState& after,
                                            const InterpretationConfig& cfg,
                                            const CheckSelection& sel, std::uint64_t traceIndex) {
    std::vector<Violation> out;
    const auto absorb = [&](std::vector<Violation> vs) {
        for (Violation& v : vs) {
            v.traceIndex = traceIndex;
            out.push_back(std::move(v));
        }
    };
    if (sel.state) absorb(checkStateInvariants(after, cfg));
    if (sel.monotone) absorb(checkTransitionMonotone(before, after, cfg));
    if (sel.loops) {
        if (auto loop = detectRoutingLoop(after))
            out.push_back({"routing-loop", loop->cycle.front(), loop->dip, loop->text(),
                           traceIndex});
        absorb(checkQualityChain(after));
    }
    if (sel.routeCorrect) absorb(checkRouteCorrectness(after));
    return out;
}

}  // namespace aodv
