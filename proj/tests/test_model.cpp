#include <random>

#include "doctest.h"
#include "ssmi/model.hpp"
#include "support/fixtures.hpp"
#include "support/random_model.hpp"

using namespace ssmi;

TEST_CASE("mangle replaces disallowed characters with underscores") {
    CHECK(mangle("Total Demand") == "Total_Demand");
    CHECK(mangle("Price") == "Price");
    CHECK(mangle("Cost ($/unit)") == "Cost____unit_");
    CHECK(mangle("7 Dwarfs") == "_7_Dwarfs");
    CHECK_THROWS_AS(mangle("   "), EmptyLabelError);
    CHECK_THROWS_AS(mangle(""), EmptyLabelError);
}

TEST_CASE("mangle is idempotent") {
    std::mt19937_64 rng(7);
    const std::string alphabet = "abZ9 _($/%).-";
    for (int i = 0; i < 500; ++i) {
        std::string label;
        std::size_t len = 1 + rng() % 20;
        for (std::size_t j = 0; j < len; ++j) label.push_back(alphabet[rng() % alphabet.size()]);
        if (label.find_first_not_of(' ') == std::string::npos) continue;
        std::string once = mangle(label);
        CHECK(mangle(once) == once);
    }
}

namespace {

Model tiny_model() {
    Model m;
    m.dimension = Dimension{"Region", {"South", "East", "North"}};
    Variable price{"Price", "Price", VariableKind::Input, false, std::nullopt, {375}};
    Variable dist{"Distribution", "Distribution", VariableKind::Parameter, true,
                  std::nullopt, {0.48, 0.23, 0.29}};
    Variable total{"Total Demand", "Total_Demand", VariableKind::Calculated, false,
                   Expr::bin('*', Expr::ref("Price"), Expr::num(2)), {}};
    Variable regional{"Regional Demand", "Regional_Demand", VariableKind::Calculated, true,
                      Expr::bin('*', Expr::ref("Total_Demand"), Expr::ref("Distribution")), {}};
    m.variables = {price, dist, total, regional};
    return m;
}

}  // namespace

TEST_CASE("check_shapes accepts the pricing model") {
    Model m = ssmi_test::load_fixture_model("pricing.ssmi");
    CHECK(check_shapes(m).empty());
}

TEST_CASE("check_shapes flags a scalar referencing a repeating variable directly") {
    Model m = tiny_model();
    Variable bad{"Bad", "Bad", VariableKind::Calculated, false,
                 Expr::ref("Regional_Demand"), {}};
    m.variables.push_back(bad);
    auto violations = check_shapes(m);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].variable == "Bad");
    CHECK(violations[0].operand == "Regional_Demand");
}

TEST_CASE("check_shapes allows scalar SUM over a repeating variable") {
    Model m = tiny_model();
    Variable ok{"Grand Total", "Grand_Total", VariableKind::Calculated, false,
                Expr::sum("Regional_Demand"), {}};
    m.variables.push_back(ok);
    CHECK(check_shapes(m).empty());
}

TEST_CASE("check_shapes flags SUM over a scalar") {
    Model m = tiny_model();
    Variable bad{"Odd", "Odd", VariableKind::Calculated, false, Expr::sum("Price"), {}};
    m.variables.push_back(bad);
    auto violations = check_shapes(m);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].operand == "Price");
}

TEST_CASE("toposort orders the pricing fixture dependencies") {
    Model m = ssmi_test::load_fixture_model("pricing.ssmi");
    auto order = toposort(m);
    auto at = [&](const std::string& n) {
        return std::find(order.begin(), order.end(), n) - order.begin();
    };
    CHECK(order.size() == m.variables.size());
    CHECK(at("Total_Demand") < at("Regional_Demand"));
    CHECK(at("Regional_Demand") < at("Revenue"));
    CHECK(at("Revenue") < at("Profit"));
    CHECK(at("Profit") < at("Total_Profit"));
    // Inputs and parameters come first
    for (std::size_t i = 0; i < 7; ++i) {
        const Variable* v = m.find(order[i]);
        CHECK(is_given(v->kind));
    }
}

TEST_CASE("toposort of a single variable") {
    Model m;
    m.variables.push_back({"Only", "Only", VariableKind::Parameter, false, std::nullopt, {1}});
    CHECK(toposort(m) == std::vector<std::string>{"Only"});
}

TEST_CASE("toposort reports the smallest cycle") {
    Model m;
    m.variables.push_back({"A", "A", VariableKind::Calculated, false, Expr::ref("B"), {}});
    m.variables.push_back({"B", "B", VariableKind::Calculated, false, Expr::ref("A"), {}});
    try {
        toposort(m);
        FAIL("expected CycleError");
    } catch (const CycleError& e) {
        CHECK(e.cycle() == std::vector<std::string>{"A", "B"});
    }
}

TEST_CASE("toposort is a permutation respecting every edge") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 100; ++iter) {
        Model m = ssmi_test::random_model(rng);
        auto order = toposort(m);
        REQUIRE(order.size() == m.variables.size());
        std::map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
        for (const auto& v : m.variables) {
            CHECK(pos.contains(v.canonical_name));
            if (!v.formula) continue;
            for (const auto& dep : referenced_vars(*v.formula))
                CHECK(pos[dep] < pos[v.canonical_name]);
        }
    }
}

TEST_CASE("referenced_vars keeps first-appearance order") {
    Expr e = Expr::bin('+', Expr::bin('*', Expr::ref("B"), Expr::ref("A")),
                       Expr::bin('*', Expr::ref("A"), Expr::sum("R")));
    CHECK(referenced_vars(e) == std::vector<std::string>{"B", "A", "R"});
    CHECK(referenced_vars_outside_agg(e) == std::vector<std::string>{"B", "A"});
}
