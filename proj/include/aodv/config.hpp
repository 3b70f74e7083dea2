#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "aodv/core.hpp"

// One resolution per RFC ambiguity plus improvement toggles. The default is
// the combination the base model follows.

namespace aodv {

enum class Amb1 : std::uint8_t { R1a, R1b };
// Amb2 reuses UpdateVariant (2a..2e); 2e exists only as an improvement-era option.
enum class Amb3 : std::uint8_t { Derived, Extra1a2aVariant };  // 3b only pairs with (1a,2a)
enum class Amb4 : std::uint8_t { R4a, R4b };
enum class Amb5 : std::uint8_t { R5a, R5b, R5c };
enum class Amb6 : std::uint8_t { R6a, R6b };
enum class Amb7 : std::uint8_t { R7a, R7b };
// Amb8 reuses InvalidateVariant (8a..8f).
enum class Amb9 : std::uint8_t { R9a, R9b };
enum class Amb10 : std::uint8_t { R10a, R10b };

struct InterpretationConfig {
    Amb1 amb1 = Amb1::R1b;
    UpdateVariant amb2 = UpdateVariant::V2c;
    Amb3 amb3 = Amb3::Derived;
    Amb4 amb4 = Amb4::R4a;
    Amb5 amb5 = Amb5::R5a;
    Amb6 amb6 = Amb6::R6a;
    Amb7 amb7 = Amb7::R7a;
    InvalidateVariant amb8 = InvalidateVariant::V8f;
    Amb9 amb9 = Amb9::R9a;
    Amb10 amb10 = Amb10::R10a;

    bool skipRreqId = false;
    bool fwdRrep = false;
    bool bcastRerr = false;
    bool fwdRreq = false;
    bool extraPrecursor = false;

    // Effective resolution of ambiguity 3: "3a"/"3b"/"3c".
    std::string effectiveAmb3() const;

    bool anyImprovement() const {
        return skipRreqId || fwdRrep || bcastRerr || fwdRreq || extraPrecursor;
    }

    // Canonical key, e.g. "1b,2c,3a,4a,5a,6a,7a,8f,9a,10a" (+ "+improve=..." when set).
    std::string key() const;

    bool operator==(const InterpretationConfig&) const = default;
};

struct ConfigParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Comma-separated key=value pairs; unknown keys or values are rejected.
// Keys: amb1..amb10, improve (comma-free '+'-separated list inside the value).
InterpretationConfig parseConfig(const std::string& text);

enum class Classification : std::uint8_t {
    LoopFreeAcceptable,
    Loops,
    Handicapped,
    LostRrep,
    Incompatible,
};

const char* classificationName(Classification c);

// Deterministic classification per the tabulated findings and combination results.
Classification validateCombo(const InterpretationConfig& cfg);

struct EnumerationCounts {
    std::uint64_t total = 0;
    std::uint64_t loopFreeAcceptable = 0;
    std::uint64_t loops = 0;
    std::uint64_t handicapped = 0;
    std::uint64_t lostRrep = 0;
    std::uint64_t incompatible = 0;
};

// Enumerates every RFC reading (2e and improvements excluded); yields 5184 configs.
EnumerationCounts enumerateInterpretations(
    const std::function<void(const InterpretationConfig&, Classification)>& visit = nullptr);

}  // namespace aodv
