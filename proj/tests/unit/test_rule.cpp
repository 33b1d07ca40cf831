// Copyright (c) protopart contributors.
// SPDX-License-Identifier: MIT
#include <doctest.h>

#include "protopart/rule.hpp"

using namespace protopart;

TEST_SUITE("rule") {
    TEST_CASE("precedence and associativity") {
        auto e = parse_rule("conf(a) | intg(b) & !conf(c) -> intg(d) -> conf(e)");
        CHECK(to_string(e) == "(conf(a) | (intg(b) & !conf(c))) -> (intg(d) -> conf(e))");
        CHECK(parse_rule(to_string(e)) == e);
    }

    TEST_CASE("equivalence binds loosest") {
        auto e = parse_rule("conf(a) -> intg(b) <-> conf(c)");
        CHECK(e.op() == RuleExpr::Op::equivalence);
    }

    TEST_CASE("bound and local atoms") {
        auto e = parse_rule("intg(enc.Key) & conf(Key)");
        auto atoms = free_atoms(e);
        REQUIRE(atoms.size() == 2);
        CHECK(atoms[0] == conf_atom("", "Key"));
        CHECK(atoms[1] == intg_atom("enc", "Key"));
        auto bound = bind_atoms(e, "ks");
        CHECK(to_string(bound) == "intg(enc.Key) & conf(ks.Key)");
    }

    TEST_CASE("conjunctions flatten") {
        auto a = RuleExpr::atom(conf_atom("x", "p"));
        auto b = RuleExpr::atom(intg_atom("x", "p"));
        auto nested = RuleExpr::all_of({a, RuleExpr::all_of({b, a})});
        CHECK(nested.args().size() == 3);
    }

    TEST_CASE("evaluation") {
        Assignment asg{{conf_atom("x", "p"), true}, {intg_atom("x", "p"), false}};
        CHECK(eval_rule(parse_rule("conf(x.p) -> intg(x.p)"), asg) == false);
        CHECK(eval_rule(parse_rule("intg(x.p) -> conf(x.p)"), asg) == true);
        CHECK(eval_rule(parse_rule("conf(x.p) <-> !intg(x.p)"), asg) == true);
        CHECK(eval_rule(parse_rule("true & !false"), asg) == true);
        CHECK_THROWS_AS(eval_rule(parse_rule("conf(y.q)"), asg), RuleError);
    }

    TEST_CASE("atom ordering puts conf before intg and compares instances first") {
        CHECK(conf_atom("a", "z") < intg_atom("a", "z"));
        CHECK(intg_atom("a", "z") < conf_atom("a.b", "a"));
        CHECK(intg_atom("enc", "Ctr") < conf_atom("enc", "Key"));
    }

    TEST_CASE("malformed rules are rejected") {
        for (auto bad : {"", "conf(", "conf()", "secret(a)", "conf(a) &", "conf(a) intg(b)", "(conf(a)"}) {
            CAPTURE(bad);
            CHECK_THROWS_AS(parse_rule(bad), RuleError);
        }
    }

    TEST_CASE("identifiers") {
        CHECK(is_valid_identifier("Calculate sec"));
        CHECK(is_valid_identifier("branch_g"));
        CHECK_FALSE(is_valid_identifier(""));
        CHECK_FALSE(is_valid_identifier("a.b"));
        CHECK_FALSE(is_valid_identifier(" lead"));
        CHECK_FALSE(is_valid_identifier("x<y"));
    }
}
