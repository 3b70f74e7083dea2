#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Core protocol data: routing tables, packet stores, messages, and the
// pure update/invalidate machinery including all interpretation variants.

namespace aodv {

using Address = std::string;
using SeqNum = std::uint64_t;   // 0 means "truly unknown"
using HopCount = std::uint32_t;
using RreqId = std::uint64_t;
using Data = std::string;

enum class SqnStatus : std::uint8_t { Known, Unknown };
enum class RouteFlag : std::uint8_t { Valid, Invalid };
enum class RreqFlag : std::uint8_t { Pending, NonPending };  // non-pending: a route request still needs to go out

inline SeqNum incSeqNum(SeqNum n) { return n != 0 ? n + 1 : 0; }
inline SeqNum monusOne(SeqNum n) { return n > 0 ? n - 1 : 0; }

// Sorted, duplicate-free address set; cheap to copy, canonical by construction.
using AddressSet = std::vector<Address>;

void addressSetInsert(AddressSet& set, const Address& a);
AddressSet addressSetUnion(const AddressSet& a, const AddressSet& b);
bool addressSetContains(const AddressSet& set, const Address& a);

// The 7-tuple (dip, dsn, dsk, flag, hops, nhip, pre).
struct RouteEntry {
    Address dip;
    SeqNum dsn = 0;
    SqnStatus dsk = SqnStatus::Unknown;
    RouteFlag flag = RouteFlag::Valid;
    HopCount hops = 0;
    Address nhip;
    AddressSet pre;

    bool operator==(const RouteEntry&) const = default;
};

SeqNum netSeqNum(const RouteEntry& r);

// Destination-unique set of route entries, kept sorted by destination.
class RoutingTable {
public:
    const std::vector<RouteEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    const RouteEntry* find(const Address& dip) const;

    // Total extensions: 0 / Unknown when no entry exists.
    SeqNum sqn(const Address& dip) const;
    SqnStatus sqnf(const Address& dip) const;

    // Partial projections.
    std::optional<RouteFlag> status(const Address& dip) const;
    std::optional<HopCount> dhops(const Address& dip) const;
    std::optional<Address> nhop(const Address& dip) const;
    std::optional<AddressSet> precs(const Address& dip) const;

    SeqNum nsqn(const Address& dip) const;

    bool hasValidRoute(const Address& dip) const;
    bool hasKnownRoute(const Address& dip) const { return find(dip) != nullptr; }

    AddressSet validDests() const;    // vD
    AddressSet invalidDests() const;  // iD
    AddressSet knownDests() const;    // kD

    // Replaces or inserts; keeps the one-entry-per-destination invariant.
    void put(const RouteEntry& r);

    bool operator==(const RoutingTable&) const = default;

private:
    std::vector<RouteEntry> entries_;
};

// Finite partial map Address -> SeqNum, sorted by address.
class DestsMap {
public:
    DestsMap() = default;
    DestsMap(std::initializer_list<std::pair<Address, SeqNum>> init);

    void put(const Address& rip, SeqNum rsn);
    std::optional<SeqNum> lookup(const Address& rip) const;
    bool contains(const Address& rip) const { return lookup(rip).has_value(); }
    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }
    const std::vector<std::pair<Address, SeqNum>>& items() const { return items_; }

    bool operator==(const DestsMap&) const = default;

private:
    std::vector<std::pair<Address, SeqNum>> items_;
};

// Per-destination FIFO of queued payloads plus the request-required flag.
struct StoreSlot {
    Address dip;
    RreqFlag rrf = RreqFlag::NonPending;
    std::vector<Data> queue;  // front = oldest

    bool operator==(const StoreSlot&) const = default;
};

class Store {
public:
    const std::vector<StoreSlot>& slots() const { return slots_; }
    bool empty() const { return slots_.empty(); }

    const StoreSlot* find(const Address& dip) const;
    AddressSet queuedDests() const;  // qD
    std::optional<RreqFlag> flag(const Address& dip) const;
    std::optional<Data> headPacket(const Address& dip) const;

    void add(const Data& d, const Address& dip);      // append; fresh queues start non-pending
    void dropHead(const Address& dip);                // throws on absent destination
    void setPending(const Address& dip);              // no-op when absent
    void setNonPending(const DestsMap& dests);        // flags only present destinations

    bool operator==(const Store&) const = default;

private:
    std::vector<StoreSlot> slots_;
    StoreSlot* findMutable(const Address& dip);
};

// --- messages --------------------------------------------------------------

struct RreqMsg {
    HopCount hops = 0;
    RreqId rreqid = 0;   // unused when the skip-rreqid improvement is active
    Address dip;
    SeqNum dsn = 0;
    SqnStatus dsk = SqnStatus::Unknown;
    Address oip;
    SeqNum osn = 0;
    Address sip;
    bool handled = false;  // carried only under the fwd-rreq improvement

    bool operator==(const RreqMsg&) const = default;
};

struct RrepMsg {
    HopCount hops = 0;
    Address dip;
    SeqNum dsn = 0;
    Address oip;
    Address sip;

    bool operator==(const RrepMsg&) const = default;
};

struct RerrMsg {
    DestsMap dests;
    Address sip;

    bool operator==(const RerrMsg&) const = default;
};

struct PktMsg {
    Data data;
    Address dip;
    Address sip;

    bool operator==(const PktMsg&) const = default;
};

struct NewPktMsg {
    Data data;
    Address dip;

    bool operator==(const NewPktMsg&) const = default;
};

using Message = std::variant<RreqMsg, RrepMsg, RerrMsg, PktMsg, NewPktMsg>;

// Canonical text form used in traces and assertions; fixed field order.
std::string messageText(const Message& msg, bool skipRreqId = false, bool fwdRreq = false);

// --- interpretation-variant table operations -------------------------------

enum class UpdateVariant : std::uint8_t { V2a, V2b, V2c, V2d, V2e };
enum class UpdateOverlay : std::uint8_t { None, Rrep1a };  // resolution 1a / 3b update^RREP behaviour
enum class InvalidateVariant : std::uint8_t { V8a, V8b, V8c, V8d, V8e, V8f };

// Thrown when an update entry violates the well-formedness precondition.
struct IllFormedUpdate : std::logic_error {
    using std::logic_error::logic_error;
};

// repairInvalidSameSqn carries resolution 4a/4b: whether an invalid entry is
// replaced by a valid one with an equal sequence number.
RoutingTable updateRoute(const RoutingTable& rt, const RouteEntry& r,
                         UpdateVariant variant = UpdateVariant::V2c,
                         UpdateOverlay overlay = UpdateOverlay::None,
                         bool repairInvalidSameSqn = true);

// Per-variant replacement sequence number when invalidating with (rip, rsn).
SeqNum invalidateSeqNum(SeqNum stored, SeqNum rsn, InvalidateVariant variant);

RoutingTable invalidateRoutes(const RoutingTable& rt, const DestsMap& dests,
                              InvalidateVariant variant = InvalidateVariant::V8f);

// Adds npre to the precursor set of dip's entry; throws on absent dip.
RoutingTable addPrecursors(const RoutingTable& rt, const Address& dip, const AddressSet& npre);

// Quality verdict for table b relative to table a at destination dip.
enum class QualityOrder : std::uint8_t { Worse, Equivalent, Better, IncomparableAbsent };

QualityOrder compareQuality(const RoutingTable& a, const RoutingTable& b, const Address& dip);

// Strict part of the quality preorder on entries for one destination.
bool strictlyBetter(const RouteEntry& a, const RouteEntry& b);

RreqId newRreqId(const std::vector<std::pair<Address, RreqId>>& rreqs, const Address& ip);

}  // namespace aodv
