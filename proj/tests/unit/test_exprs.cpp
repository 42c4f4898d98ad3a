#include <doctest.h>

#include <cmath>
#include <string>

#include "oracles.hpp"
#include "stefan/exprs.hpp"

using stefan::exprs::parse;
using stefan::exprs::ParseError;

TEST_SUITE("exprs") {

TEST_CASE("evaluates the documented examples") {
    CHECK(parse("2*x + t").eval(1.0, 0.5) == doctest::Approx(2.5));
    CHECK(parse("exp(-t)*cos(pi*x)").eval(0.0, 0.0) == doctest::Approx(1.0));
    CHECK(parse("x^2").eval(3.0, 0.0) == 9.0);
    CHECK_FALSE(std::isfinite(parse("1/ (x - x)").eval(1.0, 0.0)));
    const double pi = std::acos(-1.0);
    CHECK(parse("(1 - pi^2) * exp(-t) * cos(pi*x)").eval(0.0, 0.0) ==
          doctest::Approx(1.0 - pi * pi).epsilon(1e-15));
}

TEST_CASE("syntax errors carry the byte offset") {
    try {
        parse("2*+x");
        FAIL("expected a syntax error");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::Syntax);
        CHECK(e.offset() == 2);
    }
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("(x"), ParseError);
    CHECK_THROWS_AS(parse("x)"), ParseError);
    CHECK_THROWS_AS(parse("sin x"), ParseError);
}

TEST_CASE("unknown identifiers are reported at their offset") {
    try {
        parse("1 + foo(x)");
        FAIL("expected an error");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ParseError::Kind::UnknownIdentifier);
        CHECK(e.offset() == 4);
    }
    CHECK_THROWS_AS(parse("y"), ParseError);
}

TEST_CASE("precedence and associativity") {
    CHECK(parse("-2^2").eval(0, 0) == -4.0);
    CHECK(parse("2^3^2").eval(0, 0) == 512.0);
    CHECK(parse("2^-1").eval(0, 0) == 0.5);
    CHECK(parse("5-3-1").eval(0, 0) == 1.0);
    CHECK(parse("8/4/2").eval(0, 0) == 1.0);
    CHECK(parse("--x").eval(3, 0) == 3.0);
    CHECK(parse("2*-x").eval(3, 0) == -6.0);
    CHECK(parse("1.5e2 + .5").eval(0, 0) == 150.5);

    oracle::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const std::string a = std::to_string(rng.uniform(-5, 5));
        const std::string b = std::to_string(rng.uniform(-5, 5));
        const std::string c = std::to_string(rng.uniform(-5, 5));
        CHECK(parse(a + "+" + b + "*" + c).eval(0, 0) == parse(a + "+(" + b + "*" + c + ")").eval(0, 0));
        CHECK(parse(a + "-" + b + "/" + c).eval(0, 0) == parse(a + "-(" + b + "/" + c + ")").eval(0, 0));
    }
}

namespace {

std::string random_expr(oracle::Rng& rng, int depth) {
    if (depth == 0 || rng.integer(0, 3) == 0) {
        switch (rng.integer(0, 3)) {
            case 0: return "x";
            case 1: return "t";
            case 2: return "pi";
            default: return std::to_string(rng.integer(0, 9)) + "." + std::to_string(rng.integer(0, 99));
        }
    }
    const char* funcs[] = {"sin", "cos", "exp", "sqrt", "abs"};
    const char* ops[] = {"+", "-", "*", "/", "^"};
    switch (rng.integer(0, 3)) {
        case 0: return "-" + random_expr(rng, depth - 1);
        case 1: return std::string(funcs[rng.integer(0, 4)]) + "(" + random_expr(rng, depth - 1) + ")";
        case 2: return "(" + random_expr(rng, depth - 1) + ")";
        default:
            return random_expr(rng, depth - 1) + ops[rng.integer(0, 4)] + random_expr(rng, depth - 1);
    }
}

}  // namespace

TEST_CASE("print then parse is a fixpoint") {
    oracle::Rng rng(5);
    for (int i = 0; i < 300; ++i) {
        const auto e = parse(random_expr(rng, 5));
        const auto again = parse(e.print());
        CHECK(again == e);
        CHECK(again.print() == e.print());
        const double a = e.eval(0.3, 0.7), b = again.eval(0.3, 0.7);
        CHECK(((std::isnan(a) && std::isnan(b)) || a == b));
    }
}

TEST_CASE("arbitrary bytes either parse or raise ParseError") {
    oracle::Rng rng(99);
    const std::string alphabet = "xtpi0123456789.+-*/^()eE sincoqrtabx\t\n#@";
    for (int i = 0; i < 3000; ++i) {
        std::string s;
        const int len = rng.integer(0, 24);
        for (int k = 0; k < len; ++k)
            s.push_back(rng.integer(0, 3) == 0 ? static_cast<char>(rng.integer(0, 255))
                                                : alphabet[rng.integer(0, static_cast<int>(alphabet.size()) - 1)]);
        try {
            (void)parse(s).eval(0.5, 0.5);
        } catch (const ParseError&) {
        }
    }
    CHECK_THROWS_AS(parse(std::string(100000, '(')), ParseError);
    CHECK_THROWS_AS(parse(std::string(100000, '-') + "x"), ParseError);
}

TEST_CASE("dual numbers give exact partial derivatives") {
    const auto e = parse("sin(x)*exp(t*x) + sqrt(x)^3 - abs(t - x)/x");
    const double x = 0.7, t = 0.4;
    const double dx = std::cos(x) * std::exp(t * x) + t * std::sin(x) * std::exp(t * x) +
                      1.5 * std::sqrt(x) - (1.0 / x - (x - t) / (x * x));
    CHECK(e.eval_dx(x, t).d == doctest::Approx(dx).epsilon(1e-13));
    const double dt = x * std::sin(x) * std::exp(t * x) + 1.0 / x;
    CHECK(e.eval_dt(x, t).d == doctest::Approx(dt).epsilon(1e-13));
    CHECK(e.eval_dx(x, t).v == doctest::Approx(e.eval(x, t)).epsilon(1e-15));
    CHECK(parse("x^t").eval_dx(2.0, 3.0).d == doctest::Approx(12.0));
    CHECK(parse("x^t").eval_dt(2.0, 3.0).d == doctest::Approx(8.0 * std::log(2.0)));
}

TEST_CASE("constant detection") {
    CHECK(parse("2*pi + 1").is_constant());
    CHECK_FALSE(parse("2*x").is_constant());
}

}
