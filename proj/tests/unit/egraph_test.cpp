#include "flowsat/egraph.hpp"
#include "flowsat/error.hpp"
#include "flowsat/pattern.hpp"
#include "flowsat/rules.hpp"
#include "flowsat/saturate.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace flowsat;

namespace {

Id add(EGraph &g, const char *text) { return g.add_term(parse_term(text)); }

bool same(const EGraph &g, Id a, Id b) { return g.find(a) == g.find(b); }

std::vector<Rewrite> only(const char *names) { return rules_by_name(names).rules; }

} // namespace

TEST_SUITE("egraph") {
  TEST_CASE("hashcons") {
    EGraph g;
    CHECK(add(g, "a") == add(g, "a"));
    CHECK(add(g, "(chain a b)") == add(g, "(chain a b)"));
    CHECK(add(g, "(chain a b)") != add(g, "(chain b a)"));
    CHECK(add(g, "(map f a)") != add(g, "(map g a)"));
    CHECK(g.class_count() == 6);
    CHECK(g.node_count() == 6);
  }

  TEST_CASE("lookup does not insert") {
    EGraph g;
    add(g, "(persist a)");
    auto v = g.version();
    CHECK(g.lookup_term(parse_term("(persist a)")).has_value());
    CHECK_FALSE(g.lookup_term(parse_term("(persist b)")).has_value());
    CHECK_FALSE(g.lookup_term(parse_term("(map nobody a)")).has_value());
    CHECK(g.version() == v);
  }

  TEST_CASE("union basics") {
    EGraph g;
    Id a = add(g, "a"), b = add(g, "b");
    CHECK(g.merge(a, a) == g.find(a));
    CHECK_FALSE(g.dirty());
    g.merge(a, b);
    CHECK(g.dirty());
    CHECK(same(g, a, b));
    CHECK(g.find(g.find(a)) == g.find(a));
    g.rebuild();
    CHECK_FALSE(g.dirty());
    CHECK(g.class_count() == 1);
  }

  TEST_CASE("congruence after rebuild") {
    EGraph g;
    Id fa = add(g, "(persist a)"), fb = add(g, "(persist b)");
    g.merge(add(g, "a"), add(g, "b"));
    g.rebuild();
    CHECK(same(g, fa, fb));
    CHECK(g.eclass(g.find(fa)).nodes.size() == 1);
  }

  TEST_CASE("congruence needing two repair rounds") {
    EGraph g;
    Id ffa = add(g, "(persist (old a))"), ffb = add(g, "(persist (old b))");
    Id fa = add(g, "(old a)"), fb = add(g, "(old b)");
    g.merge(add(g, "a"), add(g, "b"));
    g.rebuild();
    CHECK(same(g, fa, fb));
    CHECK(same(g, ffa, ffb));
    CHECK(g.class_count() == 3);
    CHECK(g.node_count() == 4);
  }

  TEST_CASE("rebuild on a clean graph is a no-op") {
    EGraph g;
    add(g, "(cross (persist a) b)");
    g.rebuild();
    auto dump = g.dump();
    auto v = g.version();
    g.rebuild();
    CHECK(g.dump() == dump);
    CHECK(g.version() == v);
  }

  TEST_CASE("dump format") {
    EGraph g;
    add(g, "(map f a)");
    CHECK(g.dump() == "(class 0 (node source a))\n(class 1 (node map f 0))\n");
  }

  TEST_CASE("matches brute-force congruence closure") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 40; ++round) {
      EGraph g;
      std::vector<oracle::FlatNode> nodes;
      std::vector<Id> ids;
      const Op ops[] = {Op::persist, Op::old, Op::chain, Op::cross};
      for (int i = 0; i < 3; ++i) {
        nodes.push_back({Op::source, std::string(1, char('a' + i)), {}});
        ids.push_back(g.add_term(Term::source(nodes.back().symbol)));
      }
      while (nodes.size() < 30) {
        Op op = ops[rng() % 4];
        std::vector<std::size_t> kids;
        for (int k = 0; k < arity(op); ++k) kids.push_back(rng() % nodes.size());
        ENode n;
        n.op = op;
        n.arity = static_cast<std::uint8_t>(kids.size());
        for (std::size_t k = 0; k < kids.size(); ++k) n.children[k] = ids[kids[k]];
        if (g.lookup(n)) continue;
        nodes.push_back({op, "", kids});
        ids.push_back(g.add(n));
      }
      std::vector<std::pair<std::size_t, std::size_t>> unions;
      for (int k = 0; k < 4; ++k) {
        auto x = rng() % nodes.size(), y = rng() % nodes.size();
        unions.emplace_back(x, y);
        g.merge(ids[x], ids[y]);
      }
      g.rebuild();
      auto labels = oracle::congruence_closure(nodes, unions);
      for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < nodes.size(); ++j)
          CHECK((labels[i] == labels[j]) == same(g, ids[i], ids[j]));
    }
  }
}

TEST_SUITE("pattern") {
  TEST_CASE("bare variable matches every class") {
    EGraph g;
    add(g, "(chain (persist a) b)");
    g.rebuild();
    VarTable vars;
    auto p = Pattern::parse("?a", vars);
    CHECK(ematch(g, p, vars).size() == g.class_count());
  }

  TEST_CASE("single match with binding") {
    EGraph g;
    Id a = add(g, "a");
    Id root = add(g, "(persist a)");
    add(g, "(old b)");
    g.rebuild();
    VarTable vars;
    auto p = Pattern::parse("(persist ?a)", vars);
    auto ms = ematch(g, p, vars);
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].eclass == g.find(root));
    CHECK(ms[0].subst.classes[vars.class_index("?a")] == g.find(a));
  }

  TEST_CASE("repeated variable needs equal classes") {
    EGraph g;
    Id x = add(g, "x"), y = add(g, "y");
    add(g, "(chain x y)");
    g.rebuild();
    VarTable vars;
    auto p = Pattern::parse("(chain ?a ?a)", vars);
    CHECK(ematch(g, p, vars).empty());
    g.merge(x, y);
    g.rebuild();
    CHECK(ematch(g, p, vars).size() == 1);
  }

  TEST_CASE("symbol variables and constants") {
    EGraph g;
    add(g, "(map f (persist a))");
    add(g, "(map g (persist b))");
    g.rebuild();
    VarTable vars;
    auto any = Pattern::parse("(map ?f (persist ?x))", vars);
    CHECK(ematch(g, any, vars).size() == 2);
    VarTable fixed;
    auto f_only = Pattern::parse("(map f ?x)", fixed);
    CHECK(ematch(g, f_only, fixed).size() == 1);
    VarTable src;
    auto leaf = Pattern::parse("(persist a)", src);
    CHECK(ematch(g, leaf, src).size() == 1);
  }

  TEST_CASE("instantiate and print") {
    EGraph g;
    Id a = add(g, "a");
    VarTable vars;
    auto lhs = Pattern::parse("(persist ?a)", vars);
    auto rhs = Pattern::parse("(chain (old ?a) ?a)", vars, false);
    CHECK(rhs.print(vars) == "(chain (old ?a) ?a)");
    CHECK_THROWS_AS(Pattern::parse("(chain ?a ?zz)", vars, false), Error);
    Subst s{{a}, {}};
    Id made = instantiate(g, rhs, s);
    CHECK(made == g.lookup_term(parse_term("(chain (old a) a)")).value());
    (void)lhs;
  }
}

TEST_SUITE("saturate") {
  TEST_CASE("R1 collapses delta of persist in one iteration") {
    EGraph g;
    Id root = add(g, "(delta (persist a))");
    Id a = add(g, "a");
    auto rules = only("R1-fwd");
    auto report = saturate(g, rules);
    CHECK(same(g, root, a));
    CHECK(report.stop == StopReason::saturated);
    CHECK(report.applications_of("R1-fwd") == 1);
    CHECK(report.iterations == 2);
    CHECK(report.nodes_per_iteration.front() == 3);
  }

  TEST_CASE("empty rule set leaves the graph unchanged") {
    EGraph g;
    add(g, "(cross (persist a) b)");
    g.rebuild();
    auto before = g.dump();
    auto report = saturate(g, {});
    CHECK(report.stop == StopReason::saturated);
    CHECK(report.iterations == 1);
    CHECK(g.dump() == before);
  }

  TEST_CASE("associativity yields every bracketing") {
    std::vector<Term> leaves{Term::source("a"), Term::source("b"), Term::source("c"), Term::source("d")};
    auto shapes = oracle::bracketings(leaves, 0, 4);
    CHECK(shapes.size() == 5);
    EGraph g;
    Id root = g.add_term(parse_term("(chain (chain (chain a b) c) d)"));
    auto rules = only("R5");
    auto report = saturate(g, rules);
    CHECK(report.stop == StopReason::saturated);
    for (const auto &t : shapes) {
      auto id = g.lookup_term(t);
      REQUIRE(id.has_value());
      CHECK(same(g, *id, root));
    }
    VarTable vars;
    auto p = Pattern::parse("(chain ?x ?y)", vars);
    CHECK(ematch_class(g, p, vars, g.find(root)).size() == 3);
  }

  TEST_CASE("limits stop the loop") {
    auto rules = only("core");
    {
      EGraph g;
      g.add_term(parse_term("(delta (cross (persist a) (persist b)))"));
      Limits l;
      l.max_iters = 2;
      auto r = saturate(g, rules, l);
      CHECK(r.stop == StopReason::iteration_limit);
      CHECK(r.iterations == 2);
    }
    {
      EGraph g;
      g.add_term(parse_term("(delta (cross (persist a) (persist b)))"));
      Limits l;
      l.max_nodes = 100;
      auto r = saturate(g, rules, l);
      CHECK(r.stop == StopReason::node_limit);
      CHECK_FALSE(g.dirty());
    }
    {
      EGraph g;
      g.add_term(parse_term("(delta (cross (persist a) (persist b)))"));
      Limits l;
      l.max_time = std::chrono::milliseconds(1);
      l.max_nodes = 10'000'000;
      l.max_iters = 1000;
      auto r = saturate(g, rules, l);
      CHECK(r.stop == StopReason::time_limit);
    }
  }

  TEST_CASE("report counts grow monotonically") {
    EGraph g;
    g.add_term(parse_term("(delta (cross (persist a) (persist b)))"));
    auto rules = only("core");
    Limits l;
    l.max_nodes = 5000;
    auto r = saturate(g, rules, l);
    for (std::size_t i = 1; i < r.nodes_per_iteration.size(); ++i)
      CHECK(r.nodes_per_iteration[i] >= r.nodes_per_iteration[i - 1]);
    auto lines = r.to_lines();
    CHECK(lines.find("iterations=") == 0);
    CHECK(lines.find("stop=node-limit") != std::string::npos);
    CHECK(lines.find("applied.R8=") != std::string::npos);
  }

  TEST_CASE("equivalences only grow") {
    auto rules = only("core");
    Term start = parse_term("(delta (cross (persist a) (persist b)))");
    std::vector<Term> probes{parse_term("(persist a)"), parse_term("(chain (old a) a)"),
                             parse_term("(prev (persist a))"), parse_term("(old a)"),
                             parse_term("(cross (persist a) (persist b))"), start};
    std::set<std::pair<int, int>> proved;
    for (std::size_t iters = 1; iters <= 6; ++iters) {
      EGraph g;
      g.add_term(start);
      for (const auto &p : probes) g.add_term(p);
      Limits l;
      l.max_iters = iters;
      l.max_nodes = 20000;
      saturate(g, rules, l);
      std::set<std::pair<int, int>> now;
      for (int i = 0; i < int(probes.size()); ++i)
        for (int j = 0; j < int(probes.size()); ++j)
          if (same(g, *g.lookup_term(probes[i]), *g.lookup_term(probes[j]))) now.insert({i, j});
      for (const auto &pair : proved) CHECK(now.count(pair));
      proved = now;
    }
  }

  TEST_CASE("conditions see canonical ids and are re-evaluated") {
    EGraph g;
    Id x = add(g, "x");
    Id root = add(g, "(chain (prev x) b)");
    auto r8 = std::vector<Rewrite>{incrementalize_rule()};
    auto first = saturate(g, r8);
    CHECK(first.applications_of("R8") == 0);
    CHECK_FALSE(g.lookup_term(parse_term("(persist b)")).has_value());

    g.merge(x, root);
    g.rebuild();
    auto second = saturate(g, r8);
    CHECK(second.applications_of("R8") == 1);
    auto pb = g.lookup_term(parse_term("(persist b)"));
    REQUIRE(pb.has_value());
    CHECK(same(g, *pb, root));
  }

  TEST_CASE("a condition forced false never fires") {
    auto r8 = incrementalize_rule();
    r8.condition = [](const EGraph &, const Match &) { return false; };
    EGraph g;
    g.add_term(parse_term("(delta (cross (persist a) (persist b)))"));
    auto rules = only("core");
    for (auto &r : rules)
      if (r.name == "R8") r = r8;
    Limits l;
    l.max_nodes = 5000;
    CHECK(saturate(g, rules, l).applications_of("R8") == 0);
  }

  TEST_CASE("rate groups allow one change per class per iteration") {
    EGraph g;
    g.add_term(parse_term("(chain (chain (chain a b) c) d)"));
    auto rules = only("R5");
    for (auto &r : rules) r.rate_group = "assoc";
    Limits l;
    l.max_iters = 1;
    auto r = saturate(g, rules, l);
    CHECK(r.applications_of("R5-fwd") + r.applications_of("R5-rev") <= 2);
  }

  TEST_CASE("apply hook sees each effective application") {
    EGraph g;
    g.add_term(parse_term("(chain (chain (chain a b) c) d)"));
    auto rules = only("R5");
    std::size_t seen = 0;
    auto r = saturate(g, rules, {}, [&](const Rewrite &, const Match &) { ++seen; });
    CHECK(seen == r.applications_of("R5-fwd") + r.applications_of("R5-rev"));
  }

  TEST_CASE("stream rules leave zipper halves alone") {
    EGraph g;
    Id z = add(g, "(zipper in (delta (persist out)))");
    auto rules = only("core");
    Limits l;
    l.max_iters = 3;
    saturate(g, rules, l);
    CHECK_FALSE(g.lookup_term(parse_term("(zipper in out)")).has_value());
    CHECK(g.eclass(g.find(z)).nodes.size() == 1);
  }
}

TEST_SUITE("rules") {
  TEST_CASE("rule set lookup") {
    CHECK(rules_by_name("core").rules.size() == 15);
    CHECK(rules_by_name("join").rules.size() == 6);
    CHECK(rules_by_name("unary").rules.size() == 8);
    CHECK(rules_by_name("core,core").rules.size() == 15);
    CHECK(rules_by_name("R1").rules.size() == 2);
    CHECK(rules_by_name("R8").rules.size() == 1);
    CHECK(rules_by_name("none").rules.empty());
    CHECK(rules_by_name("").rules.empty());
    CHECK_THROWS_AS(rules_by_name("bogus"), Error);
    auto all = rules_by_name("all");
    std::set<std::string> names;
    for (const auto &r : all.rules) CHECK(names.insert(r.name).second);
    CHECK(all.find("R3j-fwd") != nullptr);
    CHECK(all.find("shift-map-rev") != nullptr);
  }

  TEST_CASE("persist unfolds to chain and prev forms") {
    EGraph g;
    Id root = add(g, "(persist a)");
    auto rules = only("core");
    Limits l;
    l.max_iters = 3;
    saturate(g, rules, l);
    for (auto text : {"(chain (old a) a)", "(chain (prev (persist a)) a)"}) {
      auto id = g.lookup_term(parse_term(text));
      REQUIRE(id.has_value());
      CHECK(same(g, *id, root));
    }
  }

  TEST_CASE("two-way example reaches the incremental form") {
    EGraph g;
    Id root = add(g, "(delta (cross (persist a) (persist b)))");
    auto rules = only("core");
    auto report = saturate(g, rules);
    CHECK(report.applications_of("R8") >= 1);
    auto id = g.lookup_term(parse_term("(chain (cross (old a) b) (chain (cross a (old b)) (cross a b)))"));
    REQUIRE(id.has_value());
    CHECK(same(g, *id, root));
  }

  TEST_CASE("R8 fires only once the cycle exists") {
    EGraph g;
    Id x = add(g, "(cross a b)");
    Id root = add(g, "(chain (prev (cross a b)) c)");
    auto r8 = std::vector<Rewrite>{incrementalize_rule()};
    CHECK(saturate(g, r8).applications_of("R8") == 0);
    g.merge(root, x);
    g.rebuild();
    auto r = saturate(g, r8);
    CHECK(r.applications_of("R8") == 1);
    CHECK(same(g, *g.lookup_term(parse_term("(persist c)")), x));
  }

  TEST_CASE("join rules relate the expected forms") {
    auto rules = only("join");
    EGraph g;
    Id left = add(g, "(join (chain x y) z)");
    Id right = add(g, "(join x (chain y z))");
    Id shifted = add(g, "(join (prev a) (prev b))");
    saturate(g, rules);
    CHECK(same(g, left, *g.lookup_term(parse_term("(chain (join x z) (join y z))"))));
    CHECK(same(g, right, *g.lookup_term(parse_term("(chain (join x y) (join x z))"))));
    CHECK(same(g, shifted, *g.lookup_term(parse_term("(prev (join a b))"))));
  }

  TEST_CASE("unary rules relate the expected forms") {
    auto rules = only("unary");
    EGraph g;
    Id m = add(g, "(map f (chain a b))");
    Id p = add(g, "(filter p (prev a))");
    saturate(g, rules);
    CHECK(same(g, m, *g.lookup_term(parse_term("(chain (map f a) (map f b))"))));
    CHECK(same(g, p, *g.lookup_term(parse_term("(prev (filter p a))"))));
  }
}
