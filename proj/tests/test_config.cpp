#include <doctest.h>

#include <set>

#include "aodv/config.hpp"

using namespace aodv;

TEST_CASE("the default interpretation is the model's own reading") {
    const InterpretationConfig cfg;
    CHECK(cfg.key() == "1b,2c,3a,4a,5a,6a,7a,8f,9a,10a");
    CHECK(validateCombo(cfg) == Classification::LoopFreeAcceptable);
}

TEST_CASE("config parsing fills defaults and rejects junk") {
    CHECK(parseConfig("") == InterpretationConfig{});

    const InterpretationConfig cfg = parseConfig("amb8=8a,amb5=5b");
    CHECK(cfg.amb8 == InvalidateVariant::V8a);
    CHECK(cfg.amb5 == Amb5::R5b);
    CHECK(cfg.amb2 == UpdateVariant::V2c);

    CHECK_THROWS_AS((void)parseConfig("amb8=8z"), ConfigParseError);
    CHECK_THROWS_AS((void)parseConfig("bogus=1"), ConfigParseError);
    CHECK_THROWS_AS((void)parseConfig("amb1"), ConfigParseError);
    CHECK_THROWS_AS((void)parseConfig("improve=warp-speed"), ConfigParseError);

    const InterpretationConfig imp = parseConfig("improve=skip-rreqid+fwd-rrep");
    CHECK(imp.skipRreqId);
    CHECK(imp.fwdRrep);
    CHECK(imp.key() == "1b,2c,3a,4a,5a,6a,7a,8f,9a,10a+improve=skip-rreqid+fwd-rrep");
}

TEST_CASE("ambiguity-3 coupling is derived, with the lone extra variant") {
    CHECK(parseConfig("amb2=2a").effectiveAmb3() == "3c");
    CHECK(parseConfig("amb2=2c").effectiveAmb3() == "3a");
    CHECK(parseConfig("amb2=2d").effectiveAmb3() == "3a");
    CHECK(parseConfig("amb1=1a,amb2=2a,amb3=3b").effectiveAmb3() == "3b");
    // 3a/3c merely restate the coupling; contradictions are rejected.
    CHECK_THROWS_AS((void)parseConfig("amb2=2c,amb3=3c"), ConfigParseError);
    CHECK(parseConfig("amb2=2a,amb3=3c").effectiveAmb3() == "3c");
    // The extra variant without (1a,2a) cannot arise from the matrix.
    InterpretationConfig bad;
    bad.amb3 = Amb3::Extra1a2aVariant;
    CHECK(validateCombo(bad) == Classification::Incompatible);
}

TEST_CASE("classification matches the tabulated findings") {
    CHECK(validateCombo(parseConfig("amb1=1a")) == Classification::Loops);
    CHECK(validateCombo(parseConfig("amb2=2b")) == Classification::Loops);
    CHECK(validateCombo(parseConfig("amb7=7b")) == Classification::Loops);
    CHECK(validateCombo(parseConfig("amb5=5a,amb6=6a,amb8=8a")) == Classification::Loops);
    CHECK(validateCombo(parseConfig("amb8=8b")) == Classification::Loops);  // 5a,6a default
    CHECK(validateCombo(parseConfig("amb8=8c")) == Classification::Loops);
    CHECK(validateCombo(parseConfig("amb8=8a,amb9=9b,amb5=5b")) == Classification::Loops);
    CHECK(validateCombo(parseConfig("amb2=2d,amb5=5a,amb6=6b,amb8=8b")) ==
          Classification::Loops);

    // Self-entry-free combinations tolerate the unsafe invalidations.
    CHECK(validateCombo(parseConfig("amb8=8a,amb5=5b")) == Classification::LoopFreeAcceptable);
    CHECK(validateCombo(parseConfig("amb8=8b,amb6=6b")) == Classification::LoopFreeAcceptable);
    CHECK(validateCombo(parseConfig("amb8=8d")) == Classification::LoopFreeAcceptable);
    CHECK(validateCombo(parseConfig("amb8=8e,amb9=9b")) == Classification::LoopFreeAcceptable);

    CHECK(validateCombo(parseConfig("amb4=4b")) == Classification::Handicapped);
    CHECK(validateCombo(parseConfig("amb10=10b")) == Classification::LostRrep);
}

TEST_CASE("enumeration yields exactly the published counts") {
    std::set<std::string> keys;
    const EnumerationCounts counts = enumerateInterpretations(
        [&](const InterpretationConfig& cfg, Classification) { keys.insert(cfg.key()); });
    CHECK(counts.total == 5184);
    CHECK(counts.loopFreeAcceptable == 178);
    CHECK(counts.incompatible == 0);
    CHECK(counts.total == counts.loopFreeAcceptable + counts.loops + counts.handicapped +
                              counts.lostRrep + counts.incompatible);
    CHECK(keys.size() == 5184);  // every reading distinct

    // Fixing ambiguity 8 to one resolution removes a factor of six.
    std::uint64_t with8f = 0;
    enumerateInterpretations([&](const InterpretationConfig& cfg, Classification) {
        if (cfg.amb8 == InvalidateVariant::V8f) ++with8f;
    });
    CHECK(with8f == 5184 / 6);
}

TEST_CASE("the acceptable count decomposes like the published formula") {
    // [(1x3)+0] x 1 x [(3*2*1*3*2) + (5*1*5)] x 1 - 5 = 178
    std::uint64_t safeInvalidate = 0, riskyInvalidate = 0, deducted = 0;
    enumerateInterpretations([&](const InterpretationConfig& cfg, Classification c) {
        if (c != Classification::LoopFreeAcceptable) return;
        const bool risky = cfg.amb8 == InvalidateVariant::V8a ||
                           cfg.amb8 == InvalidateVariant::V8b ||
                           cfg.amb8 == InvalidateVariant::V8c;
        (risky ? riskyInvalidate : safeInvalidate)++;
    });
    enumerateInterpretations([&](const InterpretationConfig& cfg, Classification c) {
        const bool risky = cfg.amb8 == InvalidateVariant::V8a ||
                           cfg.amb8 == InvalidateVariant::V8b ||
                           cfg.amb8 == InvalidateVariant::V8c;
        if (c == Classification::Loops && risky && cfg.amb2 == UpdateVariant::V2d &&
            cfg.amb5 == Amb5::R5a && cfg.amb6 == Amb6::R6b && cfg.amb1 == Amb1::R1b &&
            cfg.amb4 == Amb4::R4a && cfg.amb7 == Amb7::R7a && cfg.amb10 == Amb10::R10a &&
            !(cfg.amb8 == InvalidateVariant::V8a && cfg.amb9 == Amb9::R9b))
            ++deducted;
    });
    CHECK(safeInvalidate == 3u * 36u);   // 8d/8e/8f side of the bracket
    CHECK(riskyInvalidate == 3u * 25u - deducted);
    CHECK(deducted == 5);
}
