// Command-line front end: run scenarios, explore interleavings, enumerate
// readings of the RFC's ambiguity matrix.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "aodv/builtins.hpp"
#include "aodv/config.hpp"
#include "aodv/explorer.hpp"
#include "aodv/runner.hpp"

namespace {

using namespace aodv;

std::string readFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

CheckSelection parseChecks(const std::string& text) {
    CheckSelection sel;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item == "all") sel = CheckSelection::all();
        else if (item == "loops") sel.loops = true;
        else if (item == "monotone") sel.monotone = true;
        else if (item == "route-correct") sel.routeCorrect = true;
        else if (item == "state") sel.state = true;
        else if (item == "strong-route") sel.strongRouteCorrect = true;
        else if (!item.empty()) throw std::runtime_error("unknown check \"" + item + "\"");
    }
    return sel;
}

std::vector<MonitorKind> parseMonitors(const std::string& text) {
    std::vector<MonitorKind> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item == "route-discovery") out.push_back(MonitorKind::RouteDiscovery);
        else if (item == "reply-issued") out.push_back(MonitorKind::ReplyIssued);
        else if (item == "pd1") out.push_back(MonitorKind::Pd1);
        else if (item == "pd2") out.push_back(MonitorKind::Pd2);
        else if (item == "pd3") out.push_back(MonitorKind::Pd3);
        else if (!item.empty()) throw std::runtime_error("unknown monitor \"" + item + "\"");
    }
    return out;
}

void printRoutingTables(const NetworkState& net) {
    for (const NodeState& n : net.nodes) {
        std::cout << "  " << n.ip << " (sn " << n.sn << "):";
        if (n.rt.entries().empty()) std::cout << " -";
        std::cout << "\n";
        for (const RouteEntry& e : n.rt.entries()) {
            std::cout << "    (" << e.dip << "," << e.dsn << ","
                      << (e.dsk == SqnStatus::Known ? "kno" : "unkno") << ","
                      << (e.flag == RouteFlag::Valid ? "val" : "inval") << "," << e.hops << ","
                      << e.nhip << ",{";
            for (std::size_t i = 0; i < e.pre.size(); ++i)
                std::cout << (i ? "," : "") << e.pre[i];
            std::cout << "})\n";
        }
    }
}

int runCommand(const std::string& target, const InterpretationConfig& cfg, RunOptions opts,
               const std::string& tracePath) {
    const Builtin* builtin = findBuiltin(target);
    Scenario fromFile;
    BuiltinRunResult result;
    if (builtin) {
        result = runBuiltin(*builtin, cfg, opts);
    } else {
        std::ifstream probe(target);
        if (!probe) {
            std::cerr << "unknown builtin or scenario file \"" << target << "\"\n";
            std::cerr << "available builtins:";
            for (const std::string& n : builtinNames()) std::cerr << " " << n;
            std::cerr << "\n";
            return 2;
        }
        fromFile = parseScenario(readFile(target));
        result.run = runScenario(fromFile, cfg, opts);
    }
    const RunResult& run = result.run;

    if (!tracePath.empty()) {
        std::ofstream out(tracePath);
        for (const TransitionRecord& rec : run.trace) out << rec.labelText(cfg) << "\n";
    }

    std::cout << "run: " << target << " config=" << cfg.key() << "\n";
    std::cout << "end: " << (run.budgetExhausted ? "budget-exhausted" : "quiescent")
              << " after " << run.finalState.stepCount << " transitions\n";
    std::cout << "final routing tables:\n";
    printRoutingTables(run.finalState);

    bool ok = !run.budgetExhausted || opts.stopOnLoop;
    for (const AssertionResult& r : run.assertions) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.assertion.text();
        if (!r.pass && !r.detail.empty()) std::cout << " [" << r.detail << "]";
        std::cout << "\n";
        ok = ok && r.pass;
    }
    if (result.expectation) {
        std::cout << "expected outcome (" << result.expectation->configNote << "):\n";
        for (const AssertionResult& r : result.expectationResults) {
            std::cout << (r.pass ? "PASS " : "FAIL ") << r.assertion.text();
            if (!r.pass && !r.detail.empty()) std::cout << " [" << r.detail << "]";
            std::cout << "\n";
            ok = ok && r.pass;
        }
        for (const std::string& f : result.verdictFailures) {
            std::cout << "FAIL verdict " << f << "\n";
            ok = false;
        }
    }
    for (const Verdict& v : run.verdicts) std::cout << "monitor " << v.text() << "\n";
    for (const Violation& v : run.violations) std::cout << "violation " << v.text() << "\n";
    if (!run.violations.empty()) ok = false;
    if (run.engineAnomalies) {
        std::cout << "engine anomalies: " << run.engineAnomalies << "\n";
        ok = false;
    }
    if (!ok) {
        std::cout << "result: FAIL\n";
        return 1;
    }
    std::cout << "result: PASS\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"executable model of the ad hoc distance-vector protocol with "
                 "interpretation matrix, checkers, monitors, and explorer"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string configText;
    std::uint64_t seed = 1;
    bool seedSet = false;
    std::uint64_t budget = 1000000;
    std::string checkText, monitorText, tracePath, policyText = "fair";

    app.add_option("--config", configText, "interpretation, e.g. amb8=8a,improve=fwd-rrep");
    app.add_option("--seed", seed, "scheduler seed for the random policy")
        ->each([&](const std::string&) { seedSet = true; });
    app.add_option("--budget", budget, "transition budget");
    app.add_option("--check", checkText, "all|loops|monotone|route-correct|state|strong-route (list)");
    app.add_option("--monitor", monitorText, "route-discovery,reply-issued,pd1,pd2,pd3");
    app.add_option("--trace", tracePath, "write the transition trace to this file");
    app.add_option("--policy", policyText, "fair|random");

    std::string runTarget;
    auto* runCmd = app.add_subcommand("run", "run a builtin or scenario file");
    runCmd->add_option("target", runTarget, "builtin name or scenario path")->required();

    std::string exploreTarget;
    ExploreBounds bounds;
    auto* exploreCmd = app.add_subcommand("explore", "bounded exhaustive exploration");
    exploreCmd->add_option("target", exploreTarget, "builtin name or scenario path")->required();
    exploreCmd->add_option("--max-depth", bounds.maxDepth, "depth bound");
    exploreCmd->add_option("--max-states", bounds.maxStates, "state bound");
    exploreCmd->add_option("--max-nodes", bounds.maxNodes, "node bound");
    exploreCmd->add_option("--max-injections", bounds.maxInjections, "injection bound");
    exploreCmd->add_option("--max-topology-events", bounds.maxTopologyEvents,
                           "topology event bound");
    std::string exploreJsonPath, witnessPath;
    exploreCmd->add_option("--json", exploreJsonPath, "write machine-readable summary here");
    exploreCmd->add_option("--witness", witnessPath, "write violation witnesses here");

    auto* enumCmd = app.add_subcommand("enumerate", "classify every interpretation");
    std::string csvPath;
    enumCmd->add_option("--csv", csvPath, "write config-key,classification lines here");

    app.add_subcommand("list-builtins", "list the builtin scenario library");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage errors
    }

    try {
        InterpretationConfig cfg = parseConfig(configText);
        if (!seedSet)
            if (const char* env = std::getenv("AODV_LAB_SEED")) seed = std::stoull(env);

        RunOptions opts;
        opts.policy = policyText == "random" ? SchedulerPolicy::SeededRandom
                                             : SchedulerPolicy::FairRoundRobin;
        opts.seed = seed;
        opts.budget = budget;
        opts.checks = parseChecks(checkText);
        opts.monitors = parseMonitors(monitorText);

        if (runCmd->parsed()) return runCommand(runTarget, cfg, opts, tracePath);

        if (exploreCmd->parsed()) {
            const Builtin* builtin = findBuiltin(exploreTarget);
            Scenario scenario;
            if (builtin) {
                scenario = builtin->scenario;
            } else {
                scenario = parseScenario(readFile(exploreTarget));
            }
            CheckSelection checks = opts.checks;
            if (!checks.any()) checks.loops = true;
            const ExploreReport report = exploreAll(scenario, cfg, bounds, checks);
            std::cout << report.summaryText() << "\n";
            if (!witnessPath.empty() && !report.violations.empty()) {
                std::ofstream out(witnessPath);
                for (const ExploreViolation& v : report.violations) {
                    out << v.id << "\n";
                    for (const Choice& c : v.witness) out << "  " << c.text() << "\n";
                }
            }
            if (!exploreJsonPath.empty()) {
                std::ofstream out(exploreJsonPath);
                out << report.summaryJson(
                           report.violations.empty() ? std::string{} : witnessPath)
                    << "\n";
            }
            return report.violations.empty() ? 0 : 1;
        }

        if (enumCmd->parsed()) {
            std::ofstream csv;
            if (!csvPath.empty()) csv.open(csvPath);
            const EnumerationCounts counts = enumerateInterpretations(
                [&](const InterpretationConfig& c, Classification cls) {
                    if (csv.is_open())
                        csv << c.key() << "," << classificationName(cls) << "\n";
                });
            std::cout << "total=" << counts.total
                      << " loop-free-acceptable=" << counts.loopFreeAcceptable << "\n";
            std::cout << "loops=" << counts.loops << " handicapped=" << counts.handicapped
                      << " lost-rrep=" << counts.lostRrep
                      << " incompatible=" << counts.incompatible << "\n";
            return 0;
        }

        // list-builtins
        for (const Builtin& b : builtinLibrary())
            std::cout << b.name << ": " << b.description << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
