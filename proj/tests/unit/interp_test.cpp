#include "flowsat/error.hpp"
#include "flowsat/interp.hpp"

#include "../support/generators.hpp"
#include "../support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace flowsat;

namespace {

Value I(std::int64_t n) { return Value::integer(n); }
Value A(const char *s) { return Value::atom(s); }
Value T(std::vector<Value> xs) { return Value::tuple(std::move(xs)); }

Multiset ms(const std::vector<Value> &xs) { return to_multiset(xs); }

std::vector<std::vector<Value>> run1(const char *term, const char *trace) {
  return run_term(parse_term(term), parse_trace(trace), UdfRegistry::standard());
}

const std::vector<std::string> abc{"a", "b", "c"};

} // namespace

TEST_SUITE("value") {
  TEST_CASE("ordering and printing") {
    CHECK(I(3) < A("x"));
    CHECK(A("x") < T({I(0)}));
    CHECK(T({I(1), I(2)}) < T({I(1), I(3)}));
    CHECK(print_value(T({I(1), A("u"), T({I(2)})})) == "(tuple 1 u (tuple 2))");
    CHECK(parse_value("(tuple 1 u (tuple -2))") == T({I(1), A("u"), T({I(-2)})}));
    CHECK(parse_value("-7") == I(-7));
    CHECK_THROWS_AS(parse_value("(pair 1 2)"), ParseError);
  }

  TEST_CASE("fingerprints are stable") {
    CHECK(value_fingerprint(I(1)) == value_fingerprint(parse_value("1")));
    CHECK(value_fingerprint(I(1)) != value_fingerprint(I(2)));
  }
}

TEST_SUITE("interp") {
  TEST_CASE("persist keeps history") {
    auto out = run1("(persist a)", "(tick (a 1)) (tick (a 2))");
    CHECK(out[0] == std::vector<Value>{I(1)});
    CHECK(ms(out[1]) == ms({I(1), I(2)}));
  }

  TEST_CASE("delta of persist yields each tick's input") {
    auto out = run1("(delta (persist a))", "(tick (a 1)) (tick (a 2))");
    CHECK(out[0] == std::vector<Value>{I(1)});
    CHECK(out[1] == std::vector<Value>{I(2)});
  }

  TEST_CASE("prev is empty at the first tick") {
    auto out = run1("(prev a)", "(tick (a 7)) (tick (a 8))");
    CHECK(out[0].empty());
    CHECK(out[1] == std::vector<Value>{I(7)});
  }

  TEST_CASE("old excludes the current tick") {
    auto out = run1("(old a)", "(tick (a 1)) (tick (a 2)) (tick (a 3))");
    CHECK(out[0].empty());
    CHECK(out[1] == std::vector<Value>{I(1)});
    CHECK(ms(out[2]) == ms({I(1), I(2)}));
  }

  TEST_CASE("cross of histories") {
    auto out = run1("(cross (persist a) (persist b))", "(tick (a u1) (b m1)) (tick (a u2) (b m2))");
    std::vector<Value> expected;
    for (auto u : {"u1", "u2"})
      for (auto m : {"m1", "m2"}) expected.push_back(T({A(u), A(m)}));
    CHECK(ms(out[1]) == ms(expected));
    CHECK(out[0] == std::vector<Value>{T({A("u1"), A("m1")})});
  }

  TEST_CASE("chain keeps first input first") {
    auto out = run1("(chain a b)", "(tick (a 3 1) (b 2))");
    CHECK(out[0] == std::vector<Value>{I(3), I(1), I(2)});
  }

  TEST_CASE("delta is multiset difference saturating at zero") {
    auto out = run1("(delta a)", "(tick (a 1 1 2)) (tick (a 1 3)) (tick (a 1 1 1))");
    CHECK(ms(out[0]) == ms({I(1), I(1), I(2)}));
    CHECK(ms(out[1]) == ms({I(3)}));
    CHECK(ms(out[2]) == ms({I(1), I(1)}));
  }

  TEST_CASE("join matches keys and flattens") {
    auto out = run1("(join a b)", "(tick (a (tuple 1 x) (tuple 2 y)) (b (tuple 1 z) (tuple 1 w) (tuple 3 v)))");
    CHECK(ms(out[0]) == ms({T({I(1), A("x"), A("z")}), T({I(1), A("x"), A("w")})}));
    auto wide = run1("(join a b)", "(tick (a (tuple 1 x y)) (b (tuple 1 z)))");
    CHECK(wide[0] == std::vector<Value>{T({I(1), T({A("x"), A("y")}), A("z")})});
  }

  TEST_CASE("evaluation errors") {
    CHECK_THROWS_AS(run1("(join a b)", "(tick (a 1) (b (tuple 1 2)))"), EvalError);
    CHECK_THROWS_AS(run1("(map nope a)", "(tick (a 1))"), EvalError);
    CHECK_THROWS_AS(run_term(parse_fragment("(persist in)"), parse_trace("(tick (a 1))"), UdfRegistry::standard()),
                    EvalError);
  }

  TEST_CASE("map and filter preserve order") {
    auto udfs = UdfRegistry::standard();
    auto trace = parse_trace("(tick (a 1 2 3 4 5 6))");
    auto mapped = run_term(parse_term("(map f a)"), trace, udfs)[0];
    REQUIRE(mapped.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(mapped[i] == (*udfs.find_map("f"))(I(static_cast<std::int64_t>(i + 1))));
    auto kept = run_term(parse_term("(filter p a)"), trace, udfs)[0];
    std::vector<Value> expected;
    for (int i = 1; i <= 6; ++i)
      if ((*udfs.find_filter("p"))(I(i))) expected.push_back(I(i));
    CHECK(kept == expected);
  }

  TEST_CASE("with_school tags and school filters select") {
    auto out = run1("(filter berkeley (map with_school a))", "(tick (a 1 2 3 4))");
    CHECK(out[0] == std::vector<Value>{T({I(2), A("berkeley")}), T({I(4), A("berkeley")})});
    auto other = run1("(filter stanford (map with_school a))", "(tick (a 1 2 3 4))");
    CHECK(other[0] == std::vector<Value>{T({I(1), A("stanford")}), T({I(3), A("stanford")})});
  }

  TEST_CASE("shared defs feed every consumer") {
    auto p = parse_program("(def m (persist a)) (sink s (chain m m)) (sink t (delta m))");
    auto out = run(p, parse_trace("(tick (a 1)) (tick (a 2))"), UdfRegistry::standard());
    CHECK(ms(out.ticks[1]["s"]) == ms({I(1), I(2), I(1), I(2)}));
    CHECK(out.ticks[1]["t"] == std::vector<Value>{I(2)});
  }

  TEST_CASE("agrees with the reference evaluator on random terms") {
    std::mt19937_64 rng(21);
    auto udfs = UdfRegistry::standard();
    gen::TermShape shape;
    for (int i = 0; i < 400; ++i) {
      auto t = gen::random_term(rng, 4, shape);
      auto trace = random_trace(abc, 6, i, 3);
      CHECK(oracle::same_multisets(run_term(t, trace, udfs), oracle::evaluate(t, trace, udfs)));
    }
    shape.join = true;
    for (int i = 0; i < 200; ++i) {
      auto t = gen::random_term(rng, 4, shape, true);
      auto trace = random_trace(abc, 6, i, 3, ValueShape::keyed);
      CHECK(oracle::same_multisets(run_term(t, trace, udfs), oracle::evaluate(t, trace, udfs)));
    }
  }

  TEST_CASE("stateless operators depend only on the current tick") {
    std::mt19937_64 rng(22);
    auto udfs = UdfRegistry::standard();
    gen::TermShape shape;
    shape.stateful = false;
    for (int i = 0; i < 100; ++i) {
      auto t = gen::random_term(rng, 4, shape);
      auto trace = random_trace(abc, 5, i, 3);
      auto shuffled = trace;
      std::swap(shuffled.ticks[0], shuffled.ticks[1]);
      std::swap(shuffled.ticks[3], shuffled.ticks[4]);
      CHECK(ms(run_term(t, trace, udfs)[2]) == ms(run_term(t, shuffled, udfs)[2]));
    }
  }

  TEST_CASE("operator laws hold per tick") {
    std::mt19937_64 rng(23);
    auto udfs = UdfRegistry::standard();
    gen::TermShape shape;
    for (int i = 0; i < 100; ++i) {
      auto e = gen::random_term(rng, 3, shape);
      auto f = gen::random_term(rng, 3, shape);
      auto trace = random_trace(abc, 8, i, 3);
      auto run_t = [&](const Term &t) { return run_term(t, trace, udfs); };
      auto persist = run_t(Term::unary(Op::persist, e));
      auto old = run_t(Term::unary(Op::old, e));
      auto now = run_t(e);
      for (std::size_t k = 0; k < trace.size(); ++k) {
        auto merged = old[k];
        merged.insert(merged.end(), now[k].begin(), now[k].end());
        CHECK(ms(persist[k]) == ms(merged));
      }
      CHECK(equivalent_terms(Term::unary(Op::old, e), Term::unary(Op::prev, Term::unary(Op::persist, e)), trace, udfs));
      CHECK(equivalent_terms(Term::unary(Op::delta, Term::unary(Op::persist, e)), e, trace, udfs));
      CHECK(equivalent_terms(Term::binary(Op::cross, Term::unary(Op::prev, e), Term::unary(Op::prev, f)),
                             Term::unary(Op::prev, Term::binary(Op::cross, e, f)), trace, udfs));
      auto chained = run_t(Term::binary(Op::chain, e, f));
      auto second = run_t(f);
      for (std::size_t k = 0; k < trace.size(); ++k) {
        auto expected = now[k];
        expected.insert(expected.end(), second[k].begin(), second[k].end());
        CHECK(chained[k] == expected);
      }
    }
  }
}

TEST_SUITE("equivalence") {
  TEST_CASE("examples") {
    auto udfs = UdfRegistry::standard();
    auto p = parse_program("(sink out (cross (persist a) b))");
    auto trace = random_trace(abc, 8, 1, 3);
    CHECK(equivalent(p, p, trace, udfs).equivalent);

    for (std::uint64_t seed = 0; seed < 20; ++seed)
      CHECK(equivalent_terms(parse_term("(delta (persist a))"), parse_term("a"), random_trace(abc, 8, seed, 3), udfs));

    auto two_ticks = parse_trace("(tick (a 1)) (tick (a 2)) (tick (a 3))");
    auto r = equivalent_terms(parse_term("(persist a)"), parse_term("a"), two_ticks, udfs);
    REQUIRE_FALSE(r.equivalent);
    CHECK(r.divergence->tick == 2);
    CHECK(r.divergence->sink == "out");
    CHECK(r.divergence->describe().find("tick 2") != std::string::npos);
  }

  TEST_CASE("ordered mode sees reordering") {
    auto udfs = UdfRegistry::standard();
    auto trace = parse_trace("(tick (a 1) (b 2))");
    CHECK(equivalent_terms(parse_term("(chain a b)"), parse_term("(chain b a)"), trace, udfs));
    CHECK_FALSE(equivalent_terms(parse_term("(chain a b)"), parse_term("(chain b a)"), trace, udfs,
                                 CompareMode::ordered));
  }

  TEST_CASE("sink mismatch is an error") {
    auto udfs = UdfRegistry::standard();
    auto trace = parse_trace("(tick (a 1))");
    CHECK_THROWS_AS(equivalent(parse_program("(sink x a)"), parse_program("(sink y a)"), trace, udfs), Error);
  }
}

TEST_SUITE("trace") {
  TEST_CASE("random traces are deterministic and bounded") {
    auto a = random_trace(abc, 3, 42, 4);
    auto b = random_trace(abc, 3, 42, 4);
    CHECK(print_trace(a) == print_trace(b));
    CHECK(a.size() == 3);
    bool differs = false;
    for (std::uint64_t s = 0; s < 10; ++s) differs = differs || print_trace(random_trace(abc, 3, s, 4)) != print_trace(a);
    CHECK(differs);
    for (const auto &tick : a.ticks)
      for (const auto &[name, batch] : tick) {
        CHECK(batch.size() <= 4);
        for (const auto &v : batch) CHECK((v.is_integer() && v.as_integer() >= 0 && v.as_integer() <= 4));
      }
  }

  TEST_CASE("batch sizes cover the whole range") {
    std::set<std::size_t> sizes;
    for (std::uint64_t s = 0; s < 50; ++s)
      for (const auto &tick : random_trace(abc, 4, s, 3).ticks)
        for (const auto &name : abc) {
          auto it = tick.find(name);
          sizes.insert(it == tick.end() ? 0 : it->second.size());
        }
    CHECK(sizes == std::set<std::size_t>{0, 1, 2, 3});
  }

  TEST_CASE("batch_max zero gives empty batches") {
    for (const auto &tick : random_trace(abc, 5, 3, 0).ticks)
      for (const auto &[name, batch] : tick) CHECK(batch.empty());
  }

  TEST_CASE("keyed traces collide on keys") {
    std::vector<std::string> ab{"a", "b"};
    int shared = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      std::set<Value> ka, kb;
      for (const auto &tick : random_trace(ab, 8, s, 3, ValueShape::keyed).ticks) {
        for (const auto &[name, batch] : tick)
          for (const auto &v : batch) {
            REQUIRE(v.is_tuple());
            CHECK(v.as_tuple().size() == 2);
            (name == "a" ? ka : kb).insert(v.as_tuple()[0]);
          }
      }
      for (const auto &k : ka) shared += kb.count(k) ? 1 : 0;
    }
    CHECK(shared > 0);
  }

  TEST_CASE("trace files round trip") {
    auto text = "(tick (a 1 2) (b (tuple 1 x)))\n(tick)\n(tick (a 3))\n";
    auto t = parse_trace(text);
    CHECK(t.size() == 3);
    CHECK(parse_trace(print_trace(t)).ticks == t.ticks);
    CHECK_THROWS_AS(parse_trace("(tock (a 1))"), ParseError);
  }

  TEST_CASE("output dump is sorted") {
    auto out = run(parse_program("(sink s (chain a b))"), parse_trace("(tick (a 3 1) (b 2))"), UdfRegistry::standard());
    CHECK(print_output(out) == "(tick (s 1 2 3))\n");
  }
}
