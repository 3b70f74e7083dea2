#include "aodv/config.hpp"

#include <array>
#include <sstream>
#include <vector>

namespace aodv {

namespace {

const char* amb2Name(UpdateVariant v) {
    switch (v) {
        case UpdateVariant::V2a: return "2a";
        case UpdateVariant::V2b: return "2b";
        case UpdateVariant::V2c: return "2c";
        case UpdateVariant::V2d: return "2d";
        case UpdateVariant::V2e: return "2e";
    }
    return "?";
}

const char* amb8Name(InvalidateVariant v) {
    switch (v) {
        case InvalidateVariant::V8a: return "8a";
        case InvalidateVariant::V8b: return "8b";
        case InvalidateVariant::V8c: return "8c";
        case InvalidateVariant::V8d: return "8d";
        case InvalidateVariant::V8e: return "8e";
        case InvalidateVariant::V8f: return "8f";
    }
    return "?";
}

std::vector<std::string> splitList(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

std::string InterpretationConfig::effectiveAmb3() const {
    if (amb3 == Amb3::Extra1a2aVariant) return "3b";
    // Derived coupling: 2a pairs with 3c, everything else with 3a.
    return amb2 == UpdateVariant::V2a ? "3c" : "3a";
}

std::string InterpretationConfig::key() const {
    std::ostringstream out;
    out << (amb1 == Amb1::R1a ? "1a" : "1b") << "," << amb2Name(amb2) << "," << effectiveAmb3()
        << "," << (amb4 == Amb4::R4a ? "4a" : "4b") << ","
        << (amb5 == Amb5::R5a ? "5a" : amb5 == Amb5::R5b ? "5b" : "5c") << ","
        << (amb6 == Amb6::R6a ? "6a" : "6b") << "," << (amb7 == Amb7::R7a ? "7a" : "7b") << ","
        << amb8Name(amb8) << "," << (amb9 == Amb9::R9a ? "9a" : "9b") << ","
        << (amb10 == Amb10::R10a ? "10a" : "10b");
    std::vector<std::string> imp;
    if (skipRreqId) imp.push_back("skip-rreqid");
    if (fwdRrep) imp.push_back("fwd-rrep");
    if (bcastRerr) imp.push_back("bcast-rerr");
    if (fwdRreq) imp.push_back("fwd-rreq");
    if (extraPrecursor) imp.push_back("extra-precursor");
    if (!imp.empty()) {
        out << "+improve=";
        for (std::size_t i = 0; i < imp.size(); ++i) out << (i ? "+" : "") << imp[i];
    }
    return out.str();
}

InterpretationConfig parseConfig(const std::string& text) {
    InterpretationConfig cfg;
    bool amb3Explicit = false;
    std::string amb3Value;
    for (const std::string& pair : splitList(text, ',')) {
        auto eq = pair.find('=');
        if (eq == std::string::npos)
            throw ConfigParseError("expected key=value, got \"" + pair + "\"");
        const std::string key = pair.substr(0, eq);
        const std::string val = pair.substr(eq + 1);
        if (key == "amb1") {
            if (val == "1a") cfg.amb1 = Amb1::R1a;
            else if (val == "1b") cfg.amb1 = Amb1::R1b;
            else throw ConfigParseError("unknown amb1 value \"" + val + "\"");
        } else if (key == "amb2") {
            if (val == "2a") cfg.amb2 = UpdateVariant::V2a;
            else if (val == "2b") cfg.amb2 = UpdateVariant::V2b;
            else if (val == "2c") cfg.amb2 = UpdateVariant::V2c;
            else if (val == "2d") cfg.amb2 = UpdateVariant::V2d;
            else if (val == "2e") cfg.amb2 = UpdateVariant::V2e;
            else throw ConfigParseError("unknown amb2 value \"" + val + "\"");
        } else if (key == "amb3") {
            if (val != "derived" && val != "3a" && val != "3b" && val != "3c")
                throw ConfigParseError("unknown amb3 value \"" + val + "\"");
            amb3Explicit = true;
            amb3Value = val;
        } else if (key == "amb4") {
            if (val == "4a") cfg.amb4 = Amb4::R4a;
            else if (val == "4b") cfg.amb4 = Amb4::R4b;
            else throw ConfigParseError("unknown amb4 value \"" + val + "\"");
        } else if (key == "amb5") {
            if (val == "5a") cfg.amb5 = Amb5::R5a;
            else if (val == "5b") cfg.amb5 = Amb5::R5b;
            else if (val == "5c") cfg.amb5 = Amb5::R5c;
            else throw ConfigParseError("unknown amb5 value \"" + val + "\"");
        } else if (key == "amb6") {
            if (val == "6a") cfg.amb6 = Amb6::R6a;
            else if (val == "6b") cfg.amb6 = Amb6::R6b;
            else throw ConfigParseError("unknown amb6 value \"" + val + "\"");
        } else if (key == "amb7") {
            if (val == "7a") cfg.amb7 = Amb7::R7a;
            else if (val == "7b") cfg.amb7 = Amb7::R7b;
            else throw ConfigParseError("unknown amb7 value \"" + val + "\"");
        } else if (key == "amb8") {
            if (val == "8a") cfg.amb8 = InvalidateVariant::V8a;
            else if (val == "8b") cfg.amb8 = InvalidateVariant::V8b;
            else if (val == "8c") cfg.amb8 = InvalidateVariant::V8c;
            else if (val == "8d") cfg.amb8 = InvalidateVariant::V8d;
            else if (val == "8e") cfg.amb8 = InvalidateVariant::V8e;
            else if (val == "8f") cfg.amb8 = InvalidateVariant::V8f;
            else throw ConfigParseError("unknown amb8 value \"" + val + "\"");
        } else if (key == "amb9") {
            if (val == "9a") cfg.amb9 = Amb9::R9a;
            else if (val == "9b") cfg.amb9 = Amb9::R9b;
            else throw ConfigParseError("unknown amb9 value \"" + val + "\"");
        } else if (key == "amb10") {
            if (val == "10a") cfg.amb10 = Amb10::R10a;
            else if (val == "10b") cfg.amb10 = Amb10::R10b;
            else throw ConfigParseError("unknown amb10 value \"" + val + "\"");
        } else if (key == "improve") {
            for (const std::string& imp : splitList(val, '+')) {
                if (imp == "skip-rreqid") cfg.skipRreqId = true;
                else if (imp == "fwd-rrep") cfg.fwdRrep = true;
                else if (imp == "bcast-rerr") cfg.bcastRerr = true;
                else if (imp == "fwd-rreq") cfg.fwdRreq = true;
                else if (imp == "extra-precursor") cfg.extraPrecursor = true;
                else throw ConfigParseError("unknown improvement \"" + imp + "\"");
            }
        } else {
            throw ConfigParseError("unknown config key \"" + key + "\"");
        }
    }
    if (amb3Explicit) {
        if (amb3Value == "3b") {
            cfg.amb3 = Amb3::Extra1a2aVariant;
        } else if (amb3Value != "derived") {
            // 3a/3c only restate the derived coupling; reject a contradiction.
            InterpretationConfig derived = cfg;
            derived.amb3 = Amb3::Derived;
            if (derived.effectiveAmb3() != amb3Value)
                throw ConfigParseError("amb3=" + amb3Value + " contradicts amb2=" +
                                       amb2Name(cfg.amb2));
        }
    }
    return cfg;
}

const char* classificationName(Classification c) {
    switch (c) {
        case Classification::LoopFreeAcceptable: return "loop-free-acceptable";
        case Classification::Loops: return "loops";
        case Classification::Handicapped: return "handicapped";
        case Classification::LostRrep: return "lost-rrep";
        case Classification::Incompatible: return "incompatible";
    }
    return "?";
}

Classification validateCombo(const InterpretationConfig& cfg) {
    // The 3b variant exists only on top of (1a, 2a).
    if (cfg.amb3 == Amb3::Extra1a2aVariant &&
        (cfg.amb1 != Amb1::R1a || cfg.amb2 != UpdateVariant::V2a))
        return Classification::Incompatible;

    const bool amb8Unsafe = cfg.amb8 == InvalidateVariant::V8a ||
                            cfg.amb8 == InvalidateVariant::V8b ||
                            cfg.amb8 == InvalidateVariant::V8c;
    const bool nonOptimalSelfEntriesPossible =
        cfg.amb5 == Amb5::R5a &&
        (cfg.amb6 == Amb6::R6a || cfg.amb2 == UpdateVariant::V2d);

    // Readings that can decrease destination sequence numbers, or invalidate
    // without an increase while self-entries are around, produce routing loops.
    if (cfg.amb1 == Amb1::R1a) return Classification::Loops;
    if (cfg.amb2 == UpdateVariant::V2b) return Classification::Loops;
    if (cfg.amb7 == Amb7::R7b) return Classification::Loops;
    if (amb8Unsafe && nonOptimalSelfEntriesPossible) return Classification::Loops;
    if (cfg.amb8 == InvalidateVariant::V8a && cfg.amb9 == Amb9::R9b)
        return Classification::Loops;

    if (cfg.amb4 == Amb4::R4b) return Classification::Handicapped;
    if (cfg.amb10 == Amb10::R10b) return Classification::LostRrep;

    return Classification::LoopFreeAcceptable;
}

EnumerationCounts enumerateInterpretations(
    const std::function<void(const InterpretationConfig&, Classification)>& visit) {
    EnumerationCounts counts;
    const auto consider = [&](const InterpretationConfig& cfg) {
        const Classification c = validateCombo(cfg);
        ++counts.total;
        switch (c) {
            case Classification::LoopFreeAcceptable: ++counts.loopFreeAcceptable; break;
            case Classification::Loops: ++counts.loops; break;
            case Classification::Handicapped: ++counts.handicapped; break;
            case Classification::LostRrep: ++counts.lostRrep; break;
            case Classification::Incompatible: ++counts.incompatible; break;
        }
        if (visit) visit(cfg, c);
    };

    // Ambiguities 1-3 form a bundle: amb3 is derived from (amb1, amb2) except
    // that (1a, 2a) admits both readings 3b and 3c; the RFC-reading count
    // excludes 2e.
    const std::array<Amb1, 2> a1 = {Amb1::R1a, Amb1::R1b};
    const std::array<UpdateVariant, 4> a2 = {UpdateVariant::V2a, UpdateVariant::V2b,
                                             UpdateVariant::V2c, UpdateVariant::V2d};
    const std::array<Amb4, 2> a4 = {Amb4::R4a, Amb4::R4b};
    const std::array<Amb5, 3> a5 = {Amb5::R5a, Amb5::R5b, Amb5::R5c};
    const std::array<Amb6, 2> a6 = {Amb6::R6a, Amb6::R6b};
    const std::array<Amb7, 2> a7 = {Amb7::R7a, Amb7::R7b};
    const std::array<InvalidateVariant, 6> a8 = {InvalidateVariant::V8a, InvalidateVariant::V8b,
                                                 InvalidateVariant::V8c, InvalidateVariant::V8d,
                                                 InvalidateVariant::V8e, InvalidateVariant::V8f};
    const std::array<Amb9, 2> a9 = {Amb9::R9a, Amb9::R9b};
    const std::array<Amb10, 2> a10 = {Amb10::R10a, Amb10::R10b};

    std::vector<std::pair<Amb1, UpdateVariant>> bundle;
    std::vector<Amb3> bundleAmb3;
    for (Amb1 v1 : a1)
        for (UpdateVariant v2 : a2) {
            bundle.push_back({v1, v2});
            bundleAmb3.push_back(Amb3::Derived);
        }
    bundle.push_back({Amb1::R1a, UpdateVariant::V2a});  // the extra (1a,2a,3b) reading
    bundleAmb3.push_back(Amb3::Extra1a2aVariant);

    for (std::size_t i = 0; i < bundle.size(); ++i)
        for (Amb4 v4 : a4)
            for (Amb5 v5 : a5)
                for (Amb6 v6 : a6)
                    for (Amb7 v7 : a7)
                        for (InvalidateVariant v8 : a8)
                            for (Amb9 v9 : a9)
                                for (Amb10 v10 : a10) {
                                    InterpretationConfig cfg;
                                    cfg.amb1 = bundle[i].first;
                                    cfg.amb2 = bundle[i].second;
                                    cfg.amb3 = bundleAmb3[i];
                                    cfg.amb4 = v4;
                                    cfg.amb5 = v5;
                                    cfg.amb6 = v6;
                                    cfg.amb7 = v7;
                                    cfg.amb8 = v8;
                                    cfg.amb9 = v9;
                                    cfg.amb10 = v10;
                                    consider(cfg);
                                }
    return counts;
}

}  // namespace aodv
