// Copyright 2026 The hooksmith Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hooksmith/defaults.hpp"
#include "hooksmith/io.hpp"
#include "hooksmith/selector.hpp"
#include "oracles/chain_oracle.hpp"
#include "test_support.hpp"

namespace hooksmith {
namespace {

using Edges = std::set<std::pair<std::string, std::string>>;
using Ids = std::set<std::string>;

MethodAoMap annotate(const std::map<std::string, Ids>& ops) {
  MethodAoMap m;
  for (const auto& [id, o] : ops) {
    m.pms.insert(id);
    m.ops[id] = o;
  }
  return m;
}

TEST(Induced, EmptySelection) {
  const CallGraph g({"A", "B"}, Edges{{"A", "B"}});
  const auto sub = induced_subgraph(g, {});
  EXPECT_EQ(sub.size(), 0u);
  EXPECT_TRUE(enumerate_chains(sub).empty());
}

TEST(Induced, NotTransitive) {
  const CallGraph g({"A", "B", "C"}, Edges{{"A", "B"}, {"B", "C"}});
  const auto sub = induced_subgraph(g, {"A", "C"});
  EXPECT_EQ(sub.nodes(), (std::vector<std::string>{"A", "C"}));
  EXPECT_EQ(sub.edge_count(), 0u);
}

TEST(Induced, UnknownNodeRejected) {
  const CallGraph g({"A"}, Edges{});
  EXPECT_THROW(induced_subgraph(g, {"Z"}), Error);
}

TEST(Closure, AddsPassThroughNodes) {
  const CallGraph g({"A", "B", "C", "D"}, Edges{{"A", "B"}, {"B", "C"}, {"B", "D"}});
  const auto sub = closure_subgraph(g, {"A", "C"});
  // D hangs off the path but does not lead back into the selection.
  EXPECT_EQ(sub.nodes(), (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_EQ(sub.edges(), (Edges{{"A", "B"}, {"B", "C"}}));
}

class SampleSelection : public ::testing::Test {
 protected:
  void SetUp() override {
    c = load_corpus_dir(testing_support::sample_dir() / "corpus");
    g = build_call_graph(c);
    const Ids pms(g.nodes().begin(), g.nodes().end());
    aomap = propagate_keywords(c, g, pms, oal);
    l1 = load_layer1(read_json(testing_support::data_dir() / "layer1.json"), oal);
  }
  Corpus c;
  CallGraph g;
  OalTable oal = default_oal();
  MethodAoMap aomap;
  Layer1Map l1;
};

TEST_F(SampleSelection, GpsObfuscateSubgraphByHand) {
  const auto s = resolve_methods({"gps_obfuscate"}, l1, aomap);
  const auto sub = induced_subgraph(g, s.tm);
  // Read off location.mfw: the fix delivery path and the last-known-location path.
  EXPECT_EQ(sub.edges(), (Edges{
                             {"GnssHal.location_callback/1", "GpsLocationProvider.reportLocation/1"},
                             {"GpsLocationProvider.reportLocation/1", "LocationManagerService.handleLocationChangedLocked/1"},
                             {"LocationManager.getLastKnownLocation/1", "LocationManagerService.getLastLocation/1"},
                             {"LocationManagerService.getLastLocation/1", "GpsLocationProvider.getLastFix/0"},
                             {"LocationManagerService.handleLocationChangedLocked/1", "Receiver.callLocationChangedLocked/1"},
                             {"Receiver.callLocationChangedLocked/1", "LocationListenerTransport.onLocationChanged/1"},
                         }));
}

TEST_F(SampleSelection, GpsObfuscatePlanByHand) {
  const auto u = parse_uppt_text(R"({"rows":[{"context":{"location":"Home"},"resource":"gps","control":"obfuscate"}]})");
  const auto out = select_hooks(c, g, aomap, u, l1, oal);
  // The listener transport is app-side, so the delivery chain falls back to
  // the receiver; the last-known chain ends at the provider's fix.
  std::vector<std::string> ids;
  for (const auto& e : out.plan.entries) ids.push_back(e.method_id);
  EXPECT_EQ(ids, (std::vector<std::string>{"GpsLocationProvider.getLastFix/0", "Receiver.callLocationChangedLocked/1"}));
  for (const auto& e : out.plan.entries) {
    EXPECT_EQ(e.guarded_ops, (Ids{"return_GPS"}));
    EXPECT_EQ(e.resources, (Ids{"gps"}));
    EXPECT_EQ(e.controls, (Ids{"obfuscate"}));
    EXPECT_TRUE(e.sds_var.has_value());
  }
  bool warned = false;
  for (const auto& w : out.plan.warnings) warned = warned || w.find("LocationListenerTransport") != std::string::npos;
  EXPECT_TRUE(warned);
}

TEST_F(SampleSelection, PlanInvariantsOnShippedTables) {
  for (const auto& name : testing_support::sample_uppts()) {
    const auto u = parse_uppt(read_json(testing_support::sample_dir() / "uppt" / (name + ".json")));
    for (bool closure : {false, true}) {
      const auto out = select_hooks(c, g, aomap, u, l1, oal, {closure, 10000});
      const CorpusIndex idx(c);
      for (const auto& e : out.plan.entries) {
        EXPECT_TRUE(out.selection.tm.count(e.method_id)) << e.method_id;
        EXPECT_EQ(idx.unit_of(e.method_id).side, Side::service) << e.method_id;
        const auto& ops = aomap.ops_of(e.method_id);
        EXPECT_TRUE(std::includes(ops.begin(), ops.end(), e.guarded_ops.begin(), e.guarded_ops.end()));
      }
      // Determinism.
      EXPECT_EQ(select_hooks(c, g, aomap, u, l1, oal, {closure, 10000}).plan, out.plan) << name;
    }
  }
}

TEST(Chains, SingleNode) {
  EXPECT_EQ(enumerate_chains(CallGraph({"A"}, Edges{})), (std::vector<CallChain>{{"A"}}));
}

TEST(Chains, Diamond) {
  const CallGraph g({"A", "B", "C", "D"}, Edges{{"A", "B"}, {"A", "C"}, {"B", "D"}, {"C", "D"}});
  EXPECT_EQ(enumerate_chains(g), (std::vector<CallChain>{{"A", "B", "D"}, {"A", "C", "D"}}));
}

TEST(Chains, CycleFlattenedInIdOrder) {
  const CallGraph g({"A", "B", "C"}, Edges{{"B", "A"}, {"A", "B"}, {"B", "C"}});
  EXPECT_EQ(enumerate_chains(g), (std::vector<CallChain>{{"A", "B", "C"}}));
}

TEST(Chains, IsolatedNodesAreSingletons) {
  const CallGraph g({"A", "B", "C"}, Edges{{"A", "B"}});
  EXPECT_EQ(enumerate_chains(g), (std::vector<CallChain>{{"A", "B"}, {"C"}}));
}

TEST(Chains, CapExceeded) {
  // A ladder of k diamonds has 2^k chains.
  std::vector<std::string> nodes{"n0"};
  Edges e;
  for (int i = 0; i < 12; ++i) {
    const auto from = "n" + std::to_string(i);
    const auto to = "n" + std::to_string(i + 1);
    for (const char* side : {"a", "b"}) {
      const auto mid = from + side;
      nodes.push_back(mid);
      e.emplace(from, mid);
      e.emplace(mid, to);
    }
    nodes.push_back(to);
  }
  const CallGraph g(nodes, e);
  EXPECT_EQ(enumerate_chains(g, 5000).size(), 4096u);
  try {
    enumerate_chains(g, 4095);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::stage);
    EXPECT_NE(std::string(err.what()).find("narrow"), std::string::npos);
  }
}

TEST(Chains, MatchOracleOnRandomGraphs) {
  Rng rng(404);
  for (int round = 0; round < 300; ++round) {
    const auto rg = testing_support::random_graph(rng, 14, 0.2);
    const CallGraph g(rg.nodes, rg.edges);
    const auto got = enumerate_chains(g);
    ASSERT_EQ(got, oracle::chains(rg.nodes, rg.edges)) << "round " << round;
    for (const auto& ch : got) {
      // Consecutive components are joined by an edge.
      for (std::size_t k = 0; k + 1 < ch.size(); ++k) {
        const auto a = g.component_of(g.index_of(ch[k]));
        const auto b = g.component_of(g.index_of(ch[k + 1]));
        if (a == b) continue;
        bool joined = false;
        for (auto s : g.component_successors(a)) joined = joined || s == b;
        ASSERT_TRUE(joined);
      }
    }
  }
}

TEST(Pick, DeepestWins) {
  const auto aomap = annotate({{"A", {}}, {"B", {"return_GPS"}}, {"C", {"return_GPS"}}});
  const auto r = pick_and_remove({{"A", "B", "C"}}, aomap, {"return_GPS"}, {});
  EXPECT_EQ(r.marked, (std::map<std::string, Ids>{{"C", {"return_GPS"}}}));
}

TEST(Pick, SinglePerformer) {
  const auto aomap = annotate({{"A", {"start_GPS"}}, {"B", {}}});
  const auto r = pick_and_remove({{"A", "B"}}, aomap, {"start_GPS"}, {});
  EXPECT_EQ(r.marked, (std::map<std::string, Ids>{{"A", {"start_GPS"}}}));
}

TEST(Pick, PerChainThenUnion) {
  const auto aomap = annotate({{"A", {}}, {"B", {"start_GPS"}}, {"D", {"start_GPS"}}});
  const auto r = pick_and_remove({{"A", "B"}, {"A", "D"}}, aomap, {"start_GPS"}, {});
  EXPECT_EQ(r.marked, (std::map<std::string, Ids>{{"B", {"start_GPS"}}, {"D", {"start_GPS"}}}));
  EXPECT_EQ(r.marks.size(), 2u);
}

TEST(Pick, IrrelevantOpsIgnored) {
  const auto aomap = annotate({{"A", {"start_GPS", "scan_WIFI"}}});
  const auto r = pick_and_remove({{"A"}}, aomap, {"start_GPS"}, {});
  EXPECT_EQ(r.marked, (std::map<std::string, Ids>{{"A", {"start_GPS"}}}));
}

TEST(Pick, AppSideFallsBack) {
  const auto aomap = annotate({{"A", {"return_GPS"}}, {"B", {"return_GPS"}}});
  const std::map<std::string, Side> sides{{"A", Side::service}, {"B", Side::app}};
  const auto r = pick_and_remove({{"A", "B"}}, aomap, {"return_GPS"}, sides);
  EXPECT_EQ(r.marked, (std::map<std::string, Ids>{{"A", {"return_GPS"}}}));
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("app-side"), std::string::npos);
}

TEST(Pick, OnlyAppSideWarnsCoverage) {
  const auto aomap = annotate({{"A", {}}, {"B", {"return_GPS"}}});
  const std::map<std::string, Side> sides{{"A", Side::service}, {"B", Side::app}};
  const auto r = pick_and_remove({{"A", "B"}}, aomap, {"return_GPS"}, sides);
  EXPECT_TRUE(r.marked.empty());
  bool coverage = false;
  for (const auto& w : r.warnings) coverage = coverage || w.find("no service-side method") != std::string::npos;
  EXPECT_TRUE(coverage);
}

// Random chains over a random graph with random annotations and sides.
struct PickCase {
  std::vector<CallChain> chains;
  MethodAoMap aomap;
  std::map<std::string, Side> sides;
  Ids relevant;
};

PickCase random_pick_case(Rng& rng) {
  static const std::vector<std::string> ops{"start_GPS", "return_GPS", "scan_WIFI", "return_WIFI"};
  const auto rg = testing_support::random_graph(rng, 16, 0.2);
  PickCase pc;
  pc.chains = oracle::chains(rg.nodes, rg.edges);
  std::map<std::string, Ids> ann;
  for (const auto& n : rg.nodes) {
    auto& s = ann[n];
    for (const auto& op : ops) {
      if (rng.chance(0.3)) s.insert(op);
    }
    pc.sides[n] = rng.chance(0.2) ? Side::app : Side::service;
  }
  pc.aomap = annotate(ann);
  for (const auto& op : ops) {
    if (rng.chance(0.7)) pc.relevant.insert(op);
  }
  return pc;
}

TEST(Pick, UniquenessCoverageNecessity) {
  Rng rng(77);
  for (int round = 0; round < 300; ++round) {
    const auto pc = random_pick_case(rng);
    const auto r = pick_and_remove(pc.chains, pc.aomap, pc.relevant, pc.sides);
    const auto performs = [&](const std::string& m, const std::string& op) { return pc.aomap.ops_of(m).count(op) > 0; };
    const auto hostable = [&](const std::string& m) { return pc.sides.at(m) == Side::service; };
    std::map<std::pair<std::size_t, std::string>, int> per_chain;
    for (const auto& mk : r.marks) ++per_chain[{mk.chain, mk.op}];
    // Which (method, op) pairs some chain needs.
    std::set<std::pair<std::string, std::string>> needed;
    for (std::size_t ci = 0; ci < pc.chains.size(); ++ci) {
      for (const auto& op : pc.relevant) {
        const auto want = oracle::deepest_performer(pc.chains[ci], op, performs, hostable);
        const auto n = per_chain.count({ci, op}) ? per_chain.at({ci, op}) : 0;
        ASSERT_EQ(n, want ? 1 : 0) << "round " << round;
        if (!want) continue;
        const auto& m = pc.chains[ci][*want];
        needed.emplace(m, op);
        // Coverage: the deepest service-side performer holds the hook.
        ASSERT_TRUE(r.marked.count(m) && r.marked.at(m).count(op)) << "round " << round;
      }
    }
    // Necessity: every (entry, op) is the deepest performer on some chain,
    // so dropping it unguards that chain.
    for (const auto& [m, mops] : r.marked) {
      ASSERT_TRUE(hostable(m));
      for (const auto& op : mops) ASSERT_TRUE(needed.count({m, op})) << m << " " << op;
    }
    EXPECT_EQ(pick_and_remove(pc.chains, pc.aomap, pc.relevant, pc.sides).marked, r.marked);
  }
}

TEST(Plan, JsonRoundTrip) {
  HookPlan p;
  p.uppt_fingerprint = "00ff";
  p.corpus_fingerprint = "abcd";
  p.entries.push_back({"A.f/0", {"return_GPS"}, {"gps"}, {"obfuscate"}, std::string("loc")});
  p.entries.push_back({"B.g/1", {"start_GPS", "scan_WIFI"}, {"gps", "wifi"}, {"disable"}, std::nullopt});
  p.warnings = {"w1"};
  EXPECT_EQ(parse_plan(to_json(p)), p);
  EXPECT_EQ(plan_fingerprint(parse_plan(to_json(p))), plan_fingerprint(p));
}

TEST(Plan, BadDocumentsRejected) {
  EXPECT_THROW(parse_plan(nlohmann::json::array()), Error);
  EXPECT_THROW(parse_plan({{"entries", nlohmann::json::array()}}), Error);
  const nlohmann::json entry{{"method_id", "A.f/0"}, {"guarded_ops", {"x_Y"}}, {"resources", {"gps"}},
                             {"controls", {"disable"}}};
  EXPECT_NO_THROW(parse_plan({{"uppt_fingerprint", "f"}, {"entries", {entry}}}));
  EXPECT_THROW(parse_plan({{"uppt_fingerprint", "f"}, {"entries", {entry, entry}}}), Error);
  auto bad = entry;
  bad["resources"] = {"nfc"};
  EXPECT_THROW(parse_plan({{"uppt_fingerprint", "f"}, {"entries", {bad}}}), Error);
  bad = entry;
  bad["extra"] = 1;
  EXPECT_THROW(parse_plan({{"uppt_fingerprint", "f"}, {"entries", {bad}}}), Error);
}

}  // namespace
}  // namespace hooksmith
