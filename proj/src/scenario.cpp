#include "aodv/scenario.hpp"

#include <algorithm>
#include <sstream>

namespace aodv {

std::string Assertion::text() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::LoopFree:
            out << "assert loop-free";
            break;
        case Kind::RouteValid:
            out << "assert route " << node << " " << dip << " valid hops=" << hops
                << " nhop=" << nhop;
            break;
        case Kind::NoValidRoute:
            out << "assert no-valid-route " << node << " " << dip;
            break;
        case Kind::Delivered:
            out << "assert delivered " << node << " \"" << payload << "\"";
            break;
        case Kind::LoopExists:
            out << "expect loop for " << dip << " through " << cycleA << "<->" << cycleB;
            break;
        case Kind::SelfEntryExists:
            out << "expect self-entry at " << node;
            break;
    }
    return out.str();
}

namespace {

struct Cursor {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    std::size_t lineNo;

    bool done() const { return pos >= tokens.size(); }
    const std::string& peek() const { return tokens[pos]; }
    std::string take() { return tokens[pos++]; }
};

[[noreturn]] void fail(const Cursor& c, const std::string& what) {
    throw ScenarioParseError(c.lineNo, c.pos + 1, what);
}

std::string expectToken(Cursor& c, const std::string& what) {
    if (c.done()) fail(c, "expected " + what);
    return c.take();
}

// Tokenizes one line; quoted strings form single tokens without the quotes.
std::vector<std::string> tokenize(const std::string& line, std::size_t lineNo) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        if (line[i] == '"') {
            const std::size_t end = line.find('"', i + 1);
            if (end == std::string::npos)
                throw ScenarioParseError(lineNo, i + 1, "unterminated quote");
            out.push_back(line.substr(i + 1, end - i - 1));
            i = end + 1;
            continue;
        }
        std::size_t end = i;
        while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end])) &&
               line[end] != '#')
            ++end;
        out.push_back(line.substr(i, end - i));
        i = end;
    }
    return out;
}

Address expectNode(Cursor& c, const Scenario& s, const std::string& what) {
    const std::string id = expectToken(c, what);
    if (std::find(s.nodes.begin(), s.nodes.end(), id) == s.nodes.end())
        fail(c, "undeclared node \"" + id + "\"");
    return id;
}

std::uint64_t expectNat(Cursor& c, const std::string& what) {
    const std::string tok = expectToken(c, what);
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        fail(c, "malformed " + what + " \"" + tok + "\"");
    }
}

Assertion parseAssertion(Cursor& c, const Scenario& s) {
    Assertion a;
    const std::string what = expectToken(c, "assertion kind");
    if (what == "loop-free") {
        a.kind = Assertion::Kind::LoopFree;
    } else if (what == "route") {
        a.kind = Assertion::Kind::RouteValid;
        a.node = expectNode(c, s, "node");
        a.dip = expectNode(c, s, "destination");
        if (expectToken(c, "\"valid\"") != "valid") fail(c, "expected \"valid\"");
        const std::string hopsTok = expectToken(c, "hops=<nat>");
        if (hopsTok.rfind("hops=", 0) != 0) fail(c, "expected hops=<nat>");
        try {
            a.hops = static_cast<HopCount>(std::stoul(hopsTok.substr(5)));
        } catch (const std::exception&) {
            fail(c, "malformed hops in \"" + hopsTok + "\"");
        }
        const std::string nhopTok = expectToken(c, "nhop=<id>");
        if (nhopTok.rfind("nhop=", 0) != 0) fail(c, "expected nhop=<id>");
        a.nhop = nhopTok.substr(5);
        if (std::find(s.nodes.begin(), s.nodes.end(), a.nhop) == s.nodes.end())
            fail(c, "undeclared node \"" + a.nhop + "\"");
    } else if (what == "no-valid-route") {
        a.kind = Assertion::Kind::NoValidRoute;
        a.node = expectNode(c, s, "node");
        a.dip = expectNode(c, s, "destination");
    } else if (what == "delivered") {
        a.kind = Assertion::Kind::Delivered;
        a.node = expectNode(c, s, "node");
        a.payload = expectToken(c, "quoted payload");
    } else {
        fail(c, "unknown assertion \"" + what + "\"");
    }
    return a;
}

ScenarioEvent parseEvent(Cursor& c, const Scenario& s, const std::string& keyword) {
    ScenarioEvent ev;
    if (keyword == "connect" || keyword == "disconnect") {
        ev.kind = keyword == "connect" ? ScenarioEvent::Kind::Connect
                                       : ScenarioEvent::Kind::Disconnect;
        ev.a = expectNode(c, s, "node");
        ev.b = expectNode(c, s, "node");
    } else if (keyword == "inject") {
        ev.kind = ScenarioEvent::Kind::Inject;
        ev.a = expectNode(c, s, "node");
        ev.b = expectNode(c, s, "destination");
        ev.payload = expectToken(c, "quoted payload");
    } else if (keyword == "step") {
        ev.kind = ScenarioEvent::Kind::Step;
        ev.steps = expectNat(c, "step count");
    } else if (keyword == "drain") {
        ev.kind = ScenarioEvent::Kind::Drain;
    } else if (keyword == "assert") {
        ev.kind = ScenarioEvent::Kind::Assert;
        ev.assertion = parseAssertion(c, s);
    } else {
        fail(c, "unknown statement \"" + keyword + "\"");
    }
    if (!c.done()) fail(c, "trailing tokens after statement");
    return ev;
}

}  // namespace

Scenario parseScenario(const std::string& text) {
    Scenario s;
    std::istringstream in(text);
    std::string line;
    std::size_t lineNo = 0;
    bool inFree = false;
    bool sawNonConnect = false;

    while (std::getline(in, line)) {
        ++lineNo;
        Cursor c{tokenize(line, lineNo), 0, lineNo};
        if (c.done()) continue;
        const std::string keyword = c.take();

        if (keyword == "}") {
            if (!inFree) fail(c, "unmatched \"}\"");
            if (!c.done()) fail(c, "trailing tokens after \"}\"");
            inFree = false;
            continue;
        }
        if (keyword == "free") {
            if (inFree) fail(c, "nested free block");
            if (expectToken(c, "\"{\"") != "{") fail(c, "expected \"{\" after free");
            if (!c.done()) fail(c, "free block events go on their own lines");
            inFree = true;
            continue;
        }
        if (keyword == "nodes") {
            if (!s.nodes.empty()) fail(c, "duplicate nodes statement");
            while (!c.done()) s.nodes.push_back(c.take());
            if (s.nodes.empty()) fail(c, "nodes statement needs at least one id");
            continue;
        }
        if (s.nodes.empty()) fail(c, "nodes statement must come first");

        if (inFree) {
            const ScenarioEvent ev = parseEvent(c, s, keyword);
            if (ev.kind != ScenarioEvent::Kind::Connect &&
                ev.kind != ScenarioEvent::Kind::Disconnect &&
                ev.kind != ScenarioEvent::Kind::Inject)
                fail(c, "only connect/disconnect/inject allowed in free blocks");
            s.freeEvents.push_back(ev);
            continue;
        }
        // Leading connect lines define the initial topology.
        if (keyword == "connect" && !sawNonConnect) {
            const ScenarioEvent ev = parseEvent(c, s, keyword);
            s.initialEdges.push_back({ev.a, ev.b});
            continue;
        }
        sawNonConnect = true;
        s.events.push_back(parseEvent(c, s, keyword));
    }
    if (inFree) throw ScenarioParseError(lineNo, 1, "unterminated free block");
    return s;
}

namespace {

void printEvent(std::ostringstream& out, const ScenarioEvent& ev) {
    switch (ev.kind) {
        case ScenarioEvent::Kind::Connect:
            out << "connect " << ev.a << " " << ev.b << "\n";
            break;
        case ScenarioEvent::Kind::Disconnect:
            out << "disconnect " << ev.a << " " << ev.b << "\n";
            break;
        case ScenarioEvent::Kind::Inject:
            out << "inject " << ev.a << " " << ev.b << " \"" << ev.payload << "\"\n";
            break;
        case ScenarioEvent::Kind::Step:
            out << "step " << ev.steps << "\n";
            break;
        case ScenarioEvent::Kind::Drain:
            out << "drain\n";
            break;
        case ScenarioEvent::Kind::Assert:
            out << ev.assertion.text() << "\n";
            break;
    }
}

}  // namespace

std::string printScenario(const Scenario& s) {
    std::ostringstream out;
    out << "nodes";
    for (const Address& n : s.nodes) out << " " << n;
    out << "\n";
    for (const auto& [a, b] : s.initialEdges) out << "connect " << a << " " << b << "\n";
    // A leading scripted connect would otherwise read back as an initial edge.
    if (!s.events.empty() && s.events.front().kind == ScenarioEvent::Kind::Connect)
        out << "step 0\n";
    for (const ScenarioEvent& ev : s.events) printEvent(out, ev);
    if (!s.freeEvents.empty()) {
        out << "free {\n";
        for (const ScenarioEvent& ev : s.freeEvents) printEvent(out, ev);
        out << "}\n";
    }
    return out.str();
}

}  // namespace aodv
