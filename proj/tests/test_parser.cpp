#include <random>

#include "doctest.h"
#include "ssmi/parser.hpp"
#include "support/fixtures.hpp"
#include "support/random_model.hpp"

using namespace ssmi;

TEST_CASE("pricing fixture parses completely") {
    Model m = ssmi_test::load_fixture_model("pricing.ssmi");
    REQUIRE(m.dimension.has_value());
    CHECK(m.dimension->name == "Region");
    CHECK(m.dimension->instances == std::vector<std::string>{"South", "East", "North"});
    CHECK(m.variables.size() == 16);

    const Variable* dist = m.find("Distribution");
    REQUIRE(dist);
    CHECK(dist->kind == VariableKind::Parameter);
    CHECK(dist->repeating);
    CHECK(dist->literals == std::vector<double>{0.48, 0.23, 0.29});

    const Variable* fixed = m.find("Fixed_Cost");
    REQUIRE(fixed);
    CHECK(fixed->literals == std::vector<double>{2500000});

    const Variable* dem_a = m.find("DemParA");
    REQUIRE(dem_a);
    CHECK(dem_a->literals == std::vector<double>{376000});

    const Variable* profit = m.find("Profit");
    REQUIRE(profit);
    CHECK(profit->kind == VariableKind::Output);
    CHECK(profit->repeating);
}

TEST_CASE("expression precedence: ^ above unary minus above * above +") {
    Model m = parse_model("input A = 1\ninput B = 2\ninput C = 3\n"
                          "calc X = A * B ^ -C\n");
    const Expr& e = *m.find("X")->formula;
    Expr want = Expr::bin('*', Expr::ref("A"),
                          Expr::bin('^', Expr::ref("B"), Expr::neg(Expr::ref("C"))));
    CHECK(e == want);

    Model m2 = parse_model("input A = 1\ncalc Y = -A ^ 2\n");
    Expr want2 = Expr::neg(Expr::bin('^', Expr::ref("A"), Expr::num(2)));
    CHECK(*m2.find("Y")->formula == want2);

    Model m3 = parse_model("input A = 1\ninput B = 1\ninput C = 1\ncalc Z = A - B - C\n");
    Expr want3 = Expr::bin('-', Expr::bin('-', Expr::ref("A"), Expr::ref("B")), Expr::ref("C"));
    CHECK(*m3.find("Z")->formula == want3);

    Model m4 = parse_model("input A = 2\ncalc W = A ^ 2 ^ 3\n");
    Expr want4 = Expr::bin('^', Expr::ref("A"), Expr::bin('^', Expr::num(2), Expr::num(3)));
    CHECK(*m4.find("W")->formula == want4);
}

TEST_CASE("percent, currency and digit separators") {
    Model m = parse_model("dimension D = [P, Q]\n"
                          "param Share over D = [48%, 23%]\n"
                          "param Budget = $2,500,000\n"
                          "param Fee = $1,234.56\n"
                          "param Big = 376_000\n");
    CHECK(m.find("Share")->literals == std::vector<double>{0.48, 0.23});
    CHECK(m.find("Budget")->literals == std::vector<double>{2500000});
    CHECK(m.find("Fee")->literals == std::vector<double>{1234.56});
    CHECK(m.find("Big")->literals == std::vector<double>{376000});
}

TEST_CASE("quoted labels and forward references") {
    Model m = parse_model("calc \"Total Demand\" = Unit_Count * 2\n"
                          "input \"Unit Count\" = 5\n");
    CHECK(m.find("Total_Demand"));
    CHECK(m.find("Unit_Count"));
}

TEST_CASE("parse errors carry a span inside the offending token") {
    auto span_of = [](const std::string& src) {
        try {
            parse_model(src);
        } catch (const ParseError& e) {
            return e.span();
        }
        FAIL("expected ParseError");
        return SourceSpan{};
    };

    SUBCASE("undeclared variable") {
        SourceSpan s = span_of("calc X = Ghost * 2\n");
        CHECK(s.line == 1);
        CHECK(s.column == 10);
        CHECK(s.length == 5);
    }
    SUBCASE("duplicate name after mangling") {
        SourceSpan s = span_of("input \"Total Cost\" = 1\ninput Total_Cost = 2\n");
        CHECK(s.line == 2);
        CHECK(s.column == 7);
    }
    SUBCASE("unknown dimension") {
        SourceSpan s = span_of("input X over Region = 1\n");
        CHECK(s.line == 1);
        CHECK(s.column == 14);
    }
    SUBCASE("bad syntax") {
        SourceSpan s = span_of("calc X = * 2\n");
        CHECK(s.line == 1);
        CHECK(s.column == 10);
    }
}

TEST_CASE("literal list length must match dimension cardinality") {
    CHECK_THROWS_AS(parse_model("dimension D = [A, B, C]\nparam P over D = [1, 2]\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_model("param P = [1, 2]\n"), ParseError);
}

TEST_CASE("multiple dimensions are rejected") {
    CHECK_THROWS_AS(parse_model("dimension A = [X]\ndimension B = [Y]\n"), ParseError);
}

TEST_CASE("duplicate dimension instances are rejected") {
    CHECK_THROWS_AS(parse_model("dimension D = [X, X]\n"), ParseError);
}

TEST_CASE("aggregate argument must be a bare variable name") {
    CHECK_THROWS_AS(parse_model("dimension D = [A]\nparam P over D = [1]\ncalc X = SUM(P * 2)\n"),
                    ParseError);
}

TEST_CASE("comments and CRLF endings are accepted") {
    Model m = parse_model("# header\r\ninput X = 1  # trailing\r\n\r\ncalc Y = X + 1\r\n");
    CHECK(m.variables.size() == 2);
}

TEST_CASE("emit then parse is the identity on the pricing fixture") {
    Model m = ssmi_test::load_fixture_model("pricing.ssmi");
    Model again = parse_model(emit_model(m));
    CHECK(again == m);
}

TEST_CASE("quoted labels survive emission") {
    Model m = parse_model("input \"Total Demand\" = 3\n");
    std::string text = emit_model(m);
    CHECK(text.find("\"Total Demand\"") != std::string::npos);
    CHECK(parse_model(text) == m);
}

TEST_CASE("property: parse after emit is the identity on random models") {
    std::mt19937_64 rng(23);
    for (int iter = 0; iter < 200; ++iter) {
        Model m = ssmi_test::random_model(rng);
        std::string text = emit_model(m);
        CAPTURE(text);
        Model again = parse_model(text);
        CHECK(again == m);
    }
}

TEST_CASE("property: shape checking is stable across emit and reparse") {
    std::mt19937_64 rng(59);
    for (int iter = 0; iter < 100; ++iter) {
        Model m = ssmi_test::random_model(rng);
        Model again = parse_model(emit_model(m));
        auto a = check_shapes(m);
        auto b = check_shapes(again);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].variable == b[i].variable);
            CHECK(a[i].operand == b[i].operand);
        }
    }
}
