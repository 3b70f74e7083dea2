#include "aodv/core.hpp"

#include <algorithm>
#include <sstream>

namespace aodv {

void addressSetInsert(AddressSet& set, const Address& a) {
    auto it = std::lower_bound(set.begin(), set.end(), a);
    if (it == set.end() || *it != a) set.insert(it, a);
}

AddressSet addressSetUnion(const AddressSet& a, const AddressSet& b) {
    AddressSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool addressSetContains(const AddressSet& set, const Address& a) {
    return std::binary_search(set.begin(), set.end(), a);
}

SeqNum netSeqNum(const RouteEntry& r) {
    if (r.flag == RouteFlag::Valid || r.dsn == 0) return r.dsn;
    return r.dsn - 1;
}

const RouteEntry* RoutingTable::find(const Address& dip) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), dip,
                               [](const RouteEntry& e, const Address& d) { return e.dip < d; });
    if (it != entries_.end() && it->dip == dip) return &*it;
    return nullptr;
}

SeqNum RoutingTable::sqn(const Address& dip) const {
    const RouteEntry* e = find(dip);
    return e ? e->dsn : 0;
}

SqnStatus RoutingTable::sqnf(const Address& dip) const {
    const RouteEntry* e = find(dip);
    return e ? e->dsk : SqnStatus::Unknown;
}

std::optional<RouteFlag> RoutingTable::status(const Address& dip) const {
    const RouteEntry* e = find(dip);
    if (!e) return std::nullopt;
    return e->flag;
}

std::optional<HopCount> RoutingTable::dhops(const Address& dip) const {
    const RouteEntry* e = find(dip);
    if (!e) return std::nullopt;
    return e->hops;
}

std::optional<Address> RoutingTable::nhop(const Address& dip) const {
    const RouteEntry* e = find(dip);
    if (!e) return std::nullopt;
    return e->nhip;
}

std::optional<AddressSet> RoutingTable::precs(const Address& dip) const {
    const RouteEntry* e = find(dip);
    if (!e) return std::nullopt;
    return e->pre;
}

SeqNum RoutingTable::nsqn(const Address& dip) const {
    const RouteEntry* e = find(dip);
    return e ? netSeqNum(*e) : 0;
}

bool RoutingTable::hasValidRoute(const Address& dip) const {
    const RouteEntry* e = find(dip);
    return e && e->flag == RouteFlag::Valid;
}

AddressSet RoutingTable::validDests() const {
    AddressSet out;
    for (const RouteEntry& e : entries_)
        if (e.flag == RouteFlag::Valid) out.push_back(e.dip);
    return out;
}

AddressSet RoutingTable::invalidDests() const {
    AddressSet out;
    for (const RouteEntry& e : entries_)
        if (e.flag == RouteFlag::Invalid) out.push_back(e.dip);
    return out;
}

AddressSet RoutingTable::knownDests() const {
    AddressSet out;
    out.reserve(entries_.size());
    for (const RouteEntry& e : entries_) out.push_back(e.dip);
    return out;
}

void RoutingTable::put(const RouteEntry& r) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), r.dip,
                               [](const RouteEntry& e, const Address& d) { return e.dip < d; });
    if (it != entries_.end() && it->dip == r.dip)
        *it = r;
    else
        entries_.insert(it, r);
}

DestsMap::DestsMap(std::initializer_list<std::pair<Address, SeqNum>> init) {
    for (const auto& [rip, rsn] : init) put(rip, rsn);
}

void DestsMap::put(const Address& rip, SeqNum rsn) {
    auto it = std::lower_bound(items_.begin(), items_.end(), rip,
                               [](const auto& p, const Address& a) { return p.first < a; });
    if (it != items_.end() && it->first == rip)
        it->second = rsn;
    else
        items_.insert(it, {rip, rsn});
}

std::optional<SeqNum> DestsMap::lookup(const Address& rip) const {
    auto it = std::lower_bound(items_.begin(), items_.end(), rip,
                               [](const auto& p, const Address& a) { return p.first < a; });
    if (it != items_.end() && it->first == rip) return it->second;
    return std::nullopt;
}

const StoreSlot* Store::find(const Address& dip) const {
    auto it = std::lower_bound(slots_.begin(), slots_.end(), dip,
                               [](const StoreSlot& s, const Address& d) { return s.dip < d; });
    if (it != slots_.end() && it->dip == dip) return &*it;
    return nullptr;
}

StoreSlot* Store::findMutable(const Address& dip) {
    auto it = std::lower_bound(slots_.begin(), slots_.end(), dip,
                               [](const StoreSlot& s, const Address& d) { return s.dip < d; });
    if (it != slots_.end() && it->dip == dip) return &*it;
    return nullptr;
}

AddressSet Store::queuedDests() const {
    AddressSet out;
    out.reserve(slots_.size());
    for (const StoreSlot& s : slots_) out.push_back(s.dip);
    return out;
}

std::optional<RreqFlag> Store::flag(const Address& dip) const {
    const StoreSlot* s = find(dip);
    if (!s) return std::nullopt;
    return s->rrf;
}

std::optional<Data> Store::headPacket(const Address& dip) const {
    const StoreSlot* s = find(dip);
    if (!s || s->queue.empty()) return std::nullopt;
    return s->queue.front();
}

void Store::add(const Data& d, const Address& dip) {
    if (StoreSlot* s = findMutable(dip)) {
        s->queue.push_back(d);
        return;
    }
    auto it = std::lower_bound(slots_.begin(), slots_.end(), dip,
                               [](const StoreSlot& s, const Address& a) { return s.dip < a; });
    slots_.insert(it, StoreSlot{dip, RreqFlag::NonPending, {d}});
}

void Store::dropHead(const Address& dip) {
    auto it = std::lower_bound(slots_.begin(), slots_.end(), dip,
                               [](const StoreSlot& s, const Address& d) { return s.dip < d; });
    if (it == slots_.end() || it->dip != dip || it->queue.empty())
        throw std::logic_error("store drop on empty destination: " + dip);
    it->queue.erase(it->queue.begin());
    if (it->queue.empty()) slots_.erase(it);
}

void Store::setPending(const Address& dip) {
    if (StoreSlot* s = findMutable(dip)) s->rrf = RreqFlag::Pending;
}

void Store::setNonPending(const DestsMap& dests) {
    for (StoreSlot& s : slots_)
        if (dests.contains(s.dip)) s.rrf = RreqFlag::NonPending;
}

// --- message text ----------------------------------------------------------

namespace {

const char* sqnStatusText(SqnStatus s) { return s == SqnStatus::Known ? "kno" : "unkno"; }

}  // namespace

std::string messageText(const Message& msg, bool skipRreqId, bool fwdRreq) {
    std::ostringstream out;
    if (const auto* m = std::get_if<RreqMsg>(&msg)) {
        out << "RREQ{" << m->hops << ",";
        if (!skipRreqId) out << m->rreqid << ",";
        out << m->dip << "," << m->dsn << "," << sqnStatusText(m->dsk) << "," << m->oip << ","
            << m->osn << "," << m->sip;
        if (fwdRreq) out << "," << (m->handled ? "true" : "false");
        out << "}";
    } else if (const auto* m = std::get_if<RrepMsg>(&msg)) {
        out << "RREP{" << m->hops << "," << m->dip << "," << m->dsn << "," << m->oip << ","
            << m->sip << "}";
    } else if (const auto* m = std::get_if<RerrMsg>(&msg)) {
        out << "RERR{[";
        bool first = true;
        for (const auto& [rip, rsn] : m->dests.items()) {
            if (!first) out << ",";
            first = false;
            out << "(" << rip << "," << rsn << ")";
        }
        out << "]," << m->sip << "}";
    } else if (const auto* m = std::get_if<PktMsg>(&msg)) {
        out << "PKT{" << m->data << "," << m->dip << "," << m->sip << "}";
    } else if (const auto* m = std::get_if<NewPktMsg>(&msg)) {
        out << "NEWPKT{" << m->data << "," << m->dip << "}";
    }
    return out.str();
}

// --- update ----------------------------------------------------------------

namespace {

RouteEntry withMergedPrecursors(RouteEntry base, const AddressSet& extra) {
    base.pre = addressSetUnion(base.pre, extra);
    return base;
}

}  // namespace

RoutingTable updateRoute(const RoutingTable& rt, const RouteEntry& r, UpdateVariant variant,
                         UpdateOverlay overlay, bool repairInvalidSameSqn) {
    if (r.flag != RouteFlag::Valid || (r.dsn == 0) != (r.dsk == SqnStatus::Unknown) ||
        (r.dsk == SqnStatus::Unknown && r.hops != 1))
        throw IllFormedUpdate("ill-formed update entry for " + r.dip);

    const RouteEntry* s = rt.find(r.dip);
    if (!s) {  // unknown destination: insert as-is
        RoutingTable out = rt;
        out.put(r);
        return out;
    }

    RoutingTable out = rt;
    const RouteEntry nr = withMergedPrecursors(r, s->pre);      // incoming entry wins
    const RouteEntry ns = withMergedPrecursors(*s, r.pre);      // stored entry wins

    if (overlay == UpdateOverlay::Rrep1a && s->dsk == SqnStatus::Unknown) {
        out.put(nr);  // stored sequence number is untrusted: replace wholesale
        return out;
    }

    const bool sameSqnClausesNeedKnown =
        variant == UpdateVariant::V2d || variant == UpdateVariant::V2e;
    const bool rKnown = r.dsk == SqnStatus::Known;

    if (s->dsn < r.dsn) {  // strictly fresher
        out.put(nr);
        return out;
    }
    if (s->dsn == r.dsn && s->hops > r.hops && (!sameSqnClausesNeedKnown || rKnown)) {
        out.put(nr);  // same freshness, shorter route
        return out;
    }
    if (repairInvalidSameSqn && s->dsn == r.dsn && s->flag == RouteFlag::Invalid &&
        (!sameSqnClausesNeedKnown || rKnown)) {
        out.put(nr);  // same freshness, repairs an invalid entry (dropped by resolution 4b)
        return out;
    }
    if (r.dsk == SqnStatus::Unknown) {
        switch (variant) {
            case UpdateVariant::V2a:
                break;  // clause skipped: fall through to the no-change case
            case UpdateVariant::V2b:
                out.put(nr);  // take everything from the incoming entry
                return out;
            case UpdateVariant::V2c: {
                RouteEntry e = nr;
                e.dsn = s->dsn;  // keep the stored number, flag stays unknown
                out.put(e);
                return out;
            }
            case UpdateVariant::V2d: {
                RouteEntry e = nr;
                e.dsn = s->dsn;
                e.dsk = s->dsk;  // keep number and status flag
                out.put(e);
                return out;
            }
            case UpdateVariant::V2e: {
                RouteEntry e = nr;
                e.dsk = s->dsk;
                // Revalidating an invalidated entry undoes the invalidation increment.
                e.dsn = s->flag == RouteFlag::Valid ? s->dsn : monusOne(s->dsn);
                out.put(e);
                return out;
            }
        }
    }
    out.put(ns);  // nothing fresher: keep the entry, merge precursors
    return out;
}

SeqNum invalidateSeqNum(SeqNum stored, SeqNum rsn, InvalidateVariant variant) {
    switch (variant) {
        case InvalidateVariant::V8c:
            return std::max(stored, rsn);
        case InvalidateVariant::V8d:
        case InvalidateVariant::V8e:
            return std::max(incSeqNum(stored), rsn);
        default:
            return rsn;  // 8a, 8b, 8f copy the provided number
    }
}

RoutingTable invalidateRoutes(const RoutingTable& rt, const DestsMap& dests,
                              InvalidateVariant variant) {
    RoutingTable out;
    for (const RouteEntry& e : rt.entries()) {
        if (std::optional<SeqNum> rsn = dests.lookup(e.dip)) {
            RouteEntry inv = e;
            inv.dsn = invalidateSeqNum(e.dsn, *rsn, variant);
            inv.flag = RouteFlag::Invalid;
            out.put(inv);
        } else {
            out.put(e);
        }
    }
    return out;
}

RoutingTable addPrecursors(const RoutingTable& rt, const Address& dip, const AddressSet& npre) {
    const RouteEntry* e = rt.find(dip);
    if (!e) throw std::logic_error("no entry for " + dip + " when adding precursors");
    RoutingTable out = rt;
    RouteEntry updated = *e;
    updated.pre = addressSetUnion(updated.pre, npre);
    out.put(updated);
    return out;
}

QualityOrder compareQuality(const RoutingTable& a, const RoutingTable& b, const Address& dip) {
    const RouteEntry* ea = a.find(dip);
    const RouteEntry* eb = b.find(dip);
    if (!ea || !eb) return QualityOrder::IncomparableAbsent;
    const SeqNum na = netSeqNum(*ea);
    const SeqNum nb = netSeqNum(*eb);
    if (na != nb) return na < nb ? QualityOrder::Better : QualityOrder::Worse;
    if (ea->hops != eb->hops) return eb->hops < ea->hops ? QualityOrder::Better : QualityOrder::Worse;
    return QualityOrder::Equivalent;
}

bool strictlyBetter(const RouteEntry& a, const RouteEntry& b) {
    const SeqNum na = netSeqNum(a);
    const SeqNum nb = netSeqNum(b);
    return na < nb || (na == nb && a.hops > b.hops);
}

RreqId newRreqId(const std::vector<std::pair<Address, RreqId>>& rreqs, const Address& ip) {
    RreqId maxSeen = 0;
    for (const auto& [addr, id] : rreqs)
        if (addr == ip && id > maxSeen) maxSeen = id;
    return maxSeen + 1;
}

}  // namespace aodv
