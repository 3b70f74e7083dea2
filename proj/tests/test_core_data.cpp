#include <doctest.h>

#include "aodv/core.hpp"

using namespace aodv;

namespace {

RouteEntry entry(const Address& dip, SeqNum dsn, SqnStatus dsk, RouteFlag flag, HopCount hops,
                 const Address& nhip, AddressSet pre = {}) {
    return RouteEntry{dip, dsn, dsk, flag, hops, nhip, std::move(pre)};
}

RoutingTable tableOf(std::initializer_list<RouteEntry> entries) {
    RoutingTable rt;
    for (const RouteEntry& e : entries) rt.put(e);
    return rt;
}

}  // namespace

TEST_CASE("sequence number increment keeps the unknown value") {
    CHECK(incSeqNum(0) == 0);
    CHECK(incSeqNum(1) == 2);
    CHECK(incSeqNum(7) == 8);
}

TEST_CASE("projections fall back to total extensions on absent entries") {
    RoutingTable rt;
    CHECK(rt.sqn("d") == 0);
    CHECK(rt.sqnf("d") == SqnStatus::Unknown);
    CHECK(!rt.status("d").has_value());
    CHECK(!rt.dhops("d").has_value());
    CHECK(!rt.nhop("d").has_value());
    CHECK(!rt.precs("d").has_value());

    rt = tableOf({entry("d", 2, SqnStatus::Known, RouteFlag::Valid, 1, "d")});
    CHECK(rt.sqn("d") == 2);
    CHECK(rt.nhop("d") == Address("d"));
    CHECK(rt.dhops("d") == HopCount(1));
    CHECK(rt.status("d") == RouteFlag::Valid);

    // An invalid entry is known but not usable for forwarding.
    rt = tableOf({entry("d", 2, SqnStatus::Known, RouteFlag::Invalid, 1, "d")});
    CHECK(!rt.hasValidRoute("d"));
    CHECK(rt.hasKnownRoute("d"));
}

TEST_CASE("destination sets partition by validity") {
    const RoutingTable rt = tableOf({
        entry("d", 1, SqnStatus::Known, RouteFlag::Valid, 1, "d"),
        entry("a", 1, SqnStatus::Known, RouteFlag::Invalid, 2, "b"),
    });
    CHECK(rt.validDests() == AddressSet{"d"});
    CHECK(rt.invalidDests() == AddressSet{"a"});
    CHECK(rt.knownDests() == AddressSet{"a", "d"});
    CHECK(RoutingTable{}.knownDests().empty());

    Store store;
    store.add("p", "d");
    CHECK(store.queuedDests() == AddressSet{"d"});
}

TEST_CASE("precursor addition is idempotent and preserves the rest") {
    RoutingTable rt = tableOf({entry("d", 2, SqnStatus::Known, RouteFlag::Valid, 1, "d")});
    rt = addPrecursors(rt, "d", {"s"});
    CHECK(rt.precs("d") == AddressSet{"s"});
    rt = addPrecursors(rt, "d", {"s"});
    CHECK(rt.precs("d") == AddressSet{"s"});
    rt = addPrecursors(rt, "d", {"a", "b"});
    CHECK(rt.precs("d") == AddressSet{"a", "b", "s"});
    CHECK(rt.sqn("d") == 2);
    CHECK(rt.dhops("d") == HopCount(1));
    CHECK_THROWS_AS((void)addPrecursors(rt, "zz", {"s"}), std::logic_error);
}

TEST_CASE("update with an unknown destination inserts the entry") {
    const RouteEntry r = entry("d", 2, SqnStatus::Known, RouteFlag::Valid, 3, "a");
    const RoutingTable out = updateRoute(RoutingTable{}, r);
    REQUIRE(out.find("d") != nullptr);
    CHECK(*out.find("d") == r);
}

TEST_CASE("unknown-sequence-number update variants on the worked example") {
    // Existing entry (a,2,kno,val,2,b) updated by (a,0,unkno,val,1,a).
    const RoutingTable rt = tableOf({entry("a", 2, SqnStatus::Known, RouteFlag::Valid, 2, "b")});
    const RouteEntry r = entry("a", 0, SqnStatus::Unknown, RouteFlag::Valid, 1, "a");

    SUBCASE("2a: no update occurs") {
        const RoutingTable out = updateRoute(rt, r, UpdateVariant::V2a);
        CHECK(*out.find("a") == entry("a", 2, SqnStatus::Known, RouteFlag::Valid, 2, "b"));
    }
    SUBCASE("2b: everything taken from the incoming entry") {
        const RoutingTable out = updateRoute(rt, r, UpdateVariant::V2b);
        CHECK(*out.find("a") == entry("a", 0, SqnStatus::Unknown, RouteFlag::Valid, 1, "a"));
    }
    SUBCASE("2c: stored number kept, status flag turns unknown") {
        const RoutingTable out = updateRoute(rt, r, UpdateVariant::V2c);
        CHECK(*out.find("a") == entry("a", 2, SqnStatus::Unknown, RouteFlag::Valid, 1, "a"));
    }
    SUBCASE("2d: stored number and status flag both kept") {
        const RoutingTable out = updateRoute(rt, r, UpdateVariant::V2d);
        CHECK(*out.find("a") == entry("a", 2, SqnStatus::Known, RouteFlag::Valid, 1, "a"));
    }
    SUBCASE("2e valid case behaves like 2d") {
        const RoutingTable out = updateRoute(rt, r, UpdateVariant::V2e);
        CHECK(*out.find("a") == entry("a", 2, SqnStatus::Known, RouteFlag::Valid, 1, "a"));
    }
}

TEST_CASE("2e undoes the invalidation increment when revalidating") {
    const RoutingTable rt =
        tableOf({entry("a", 2, SqnStatus::Known, RouteFlag::Invalid, 2, "b")});
    const RouteEntry r = entry("a", 0, SqnStatus::Unknown, RouteFlag::Valid, 1, "a");
    const RoutingTable out = updateRoute(rt, r, UpdateVariant::V2e);
    CHECK(*out.find("a") == entry("a", 1, SqnStatus::Known, RouteFlag::Valid, 1, "a"));
}

TEST_CASE("strictly fresher entries replace, with precursors merged") {
    const RoutingTable rt =
        tableOf({entry("d", 1, SqnStatus::Known, RouteFlag::Valid, 1, "d", {})});
    const RouteEntry r = entry("d", 2, SqnStatus::Known, RouteFlag::Valid, 3, "a", {"x"});
    const RoutingTable out = updateRoute(rt, r);
    CHECK(*out.find("d") == entry("d", 2, SqnStatus::Known, RouteFlag::Valid, 3, "a", {"x"}));
}

TEST_CASE("equal-number updates need a shorter route or an invalid entry") {
    const RouteEntry incoming = entry("d", 2, SqnStatus::Known, RouteFlag::Valid, 2, "a");
    SUBCASE("shorter") {
        const RoutingTable rt =
            tableOf({entry("d", 2, SqnStatus::Known, RouteFlag::Valid, 4, "b")});
        CHECK(updateRoute(rt, incoming).find("d")->nhip == "a");
    }
    SUBCASE("invalid repaired under 4a") {
        const RoutingTable rt =
            tableOf({entry("d", 2, SqnStatus::Known, RouteFlag::Invalid, 1, "b")});
        CHECK(updateRoute(rt, incoming).find("d")->flag == RouteFlag::Valid);
    }
    SUBCASE("invalid kept under 4b") {
        const RoutingTable rt =
            tableOf({entry("d", 2, SqnStatus::Known, RouteFlag::Invalid, 1, "b")});
        const RoutingTable out =
            updateRoute(rt, incoming, UpdateVariant::V2c, UpdateOverlay::None, false);
        CHECK(out.find("d")->flag == RouteFlag::Invalid);
        CHECK(out.find("d")->nhip == "b");
    }
    SUBCASE("equal and longer changes nothing") {
        const RoutingTable rt =
            tableOf({entry("d", 2, SqnStatus::Known, RouteFlag::Valid, 1, "b")});
        CHECK(updateRoute(rt, incoming).find("d")->nhip == "b");
    }
}

TEST_CASE("the reply overlay replaces unknown-status entries wholesale") {
    // Entry (d,2,unkno,val,1,d) replaced by (d,1,kno,val,n+1,a) from a reply.
    const RoutingTable rt =
        tableOf({entry("d", 2, SqnStatus::Unknown, RouteFlag::Valid, 1, "d", {"p"})});
    const HopCount n = 3;
    const RouteEntry fromReply = entry("d", 1, SqnStatus::Known, RouteFlag::Valid, n + 1, "a");
    const RoutingTable out =
        updateRoute(rt, fromReply, UpdateVariant::V2c, UpdateOverlay::Rrep1a);
    CHECK(*out.find("d") ==
          entry("d", 1, SqnStatus::Known, RouteFlag::Valid, n + 1, "a", {"p"}));
}

TEST_CASE("update rejects ill-formed entries") {
    CHECK_THROWS_AS(
        (void)updateRoute(RoutingTable{},
                          entry("d", 2, SqnStatus::Known, RouteFlag::Invalid, 1, "d")),
        IllFormedUpdate);
    CHECK_THROWS_AS(
        (void)updateRoute(RoutingTable{},
                          entry("d", 0, SqnStatus::Known, RouteFlag::Valid, 1, "d")),
        IllFormedUpdate);
    CHECK_THROWS_AS(
        (void)updateRoute(RoutingTable{},
                          entry("d", 0, SqnStatus::Unknown, RouteFlag::Valid, 2, "d")),
        IllFormedUpdate);
}

TEST_CASE("invalidation copies or clamps the number per variant") {
    SUBCASE("default copies the incoming number") {
        const RoutingTable rt =
            tableOf({entry("d", 1, SqnStatus::Known, RouteFlag::Valid, 1, "d")});
        const RoutingTable out = invalidateRoutes(rt, DestsMap{{"d", 2}});
        CHECK(*out.find("d") == entry("d", 2, SqnStatus::Known, RouteFlag::Invalid, 1, "d"));
    }
    SUBCASE("unknown numbers stay untouched when built without an increment") {
        const RoutingTable rt =
            tableOf({entry("d", 1, SqnStatus::Unknown, RouteFlag::Valid, 1, "d")});
        const RoutingTable out = invalidateRoutes(rt, DestsMap{{"d", 1}});
        CHECK(*out.find("d") == entry("d", 1, SqnStatus::Unknown, RouteFlag::Invalid, 1, "d"));
    }
    SUBCASE("unlisted destinations stay untouched") {
        const RoutingTable rt =
            tableOf({entry("d", 1, SqnStatus::Known, RouteFlag::Valid, 1, "d")});
        CHECK(invalidateRoutes(rt, DestsMap{{"x", 9}}) == rt);
    }
    SUBCASE("8d takes the maximum of the incremented stored number") {
        CHECK(invalidateSeqNum(5, 3, InvalidateVariant::V8d) == 6);
        CHECK(invalidateSeqNum(5, 9, InvalidateVariant::V8d) == 9);
        CHECK(invalidateSeqNum(5, 3, InvalidateVariant::V8c) == 5);
        CHECK(invalidateSeqNum(5, 3, InvalidateVariant::V8a) == 3);
    }
}

TEST_CASE("net sequence numbers compensate the invalidation increment") {
    CHECK(netSeqNum(entry("d", 2, SqnStatus::Known, RouteFlag::Valid, 1, "d")) == 2);
    CHECK(netSeqNum(entry("d", 2, SqnStatus::Known, RouteFlag::Invalid, 1, "d")) == 1);
    CHECK(netSeqNum(entry("d", 0, SqnStatus::Unknown, RouteFlag::Invalid, 1, "d")) == 0);
}

TEST_CASE("quality verdicts are lexicographic on net number then hops") {
    const Address dip = "d";
    const RoutingTable a5 = tableOf({entry(dip, 2, SqnStatus::Known, RouteFlag::Valid, 5, "n")});
    const RoutingTable a3 = tableOf({entry(dip, 2, SqnStatus::Known, RouteFlag::Valid, 3, "n")});
    CHECK(compareQuality(a5, a3, dip) == QualityOrder::Better);
    CHECK(compareQuality(a3, a5, dip) == QualityOrder::Worse);
    CHECK(compareQuality(a5, a5, dip) == QualityOrder::Equivalent);

    const RoutingTable n1 = tableOf({entry(dip, 1, SqnStatus::Known, RouteFlag::Valid, 1, "n")});
    const RoutingTable n2 = tableOf({entry(dip, 2, SqnStatus::Known, RouteFlag::Valid, 9, "n")});
    CHECK(compareQuality(n1, n2, dip) == QualityOrder::Better);
    CHECK(compareQuality(RoutingTable{}, n2, dip) == QualityOrder::IncomparableAbsent);
}

TEST_CASE("fresh request identifiers ignore other originators") {
    CHECK(newRreqId({}, "a") == 1);
    CHECK(newRreqId({{"a", 1}, {"a", 2}, {"b", 7}}, "a") == 3);
    CHECK(newRreqId({{"b", 5}}, "a") == 1);
}

TEST_CASE("store add and drop keep per-destination FIFO queues") {
    Store store;
    store.add("d1", "d");
    CHECK(store.find("d")->rrf == RreqFlag::NonPending);
    CHECK(store.find("d")->queue == std::vector<Data>{"d1"});

    store.setPending("d");
    store.add("d2", "d");
    CHECK(store.find("d")->rrf == RreqFlag::Pending);  // flag preserved on append
    store.add("e1", "e");
    CHECK(store.find("e")->queue == std::vector<Data>{"e1"});

    store.dropHead("d");
    CHECK(store.find("d")->queue == std::vector<Data>{"d2"});
    store.dropHead("d");
    CHECK(store.find("d") == nullptr);  // slot removed with its last packet
    CHECK(store.find("e") != nullptr);
    CHECK_THROWS_AS(store.dropHead("d"), std::logic_error);
}

TEST_CASE("request-required flags touch only present destinations") {
    Store store;
    store.setPending("d");
    CHECK(store.empty());  // absent destination: unchanged

    store.add("p", "d");
    store.setPending("d");
    CHECK(store.flag("d") == RreqFlag::Pending);

    store.add("q", "e");
    store.setNonPending(DestsMap{{"d", 1}, {"x", 2}});
    CHECK(store.flag("d") == RreqFlag::NonPending);
    CHECK(store.flag("e") == RreqFlag::NonPending);
    CHECK(store.find("x") == nullptr);
}

TEST_CASE("message text uses the fixed canonical field order") {
    const Message rreq = RreqMsg{2, 1, "d", 0, SqnStatus::Unknown, "s", 2, "b", false};
    CHECK(messageText(rreq) == "RREQ{2,1,d,0,unkno,s,2,b}");
    CHECK(messageText(rreq, true) == "RREQ{2,d,0,unkno,s,2,b}");
    CHECK(messageText(rreq, false, true) == "RREQ{2,1,d,0,unkno,s,2,b,false}");
    CHECK(messageText(RrepMsg{1, "d", 2, "s", "a"}) == "RREP{1,d,2,s,a}");
    CHECK(messageText(RerrMsg{DestsMap{{"d", 3}, {"a", 2}}, "n"}) ==
          "RERR{[(a,2),(d,3)],n}");
    CHECK(messageText(PktMsg{"data", "d", "s"}) == "PKT{data,d,s}");
    CHECK(messageText(NewPktMsg{"data", "d"}) == "NEWPKT{data,d}");
}
