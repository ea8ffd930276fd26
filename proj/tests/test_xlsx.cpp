#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "ssmi/parser.hpp"
#include "ssmi/workbook_gen.hpp"
#include "ssmi/xlsx.hpp"
#include "support/fixtures.hpp"

using namespace ssmi;

namespace {

// entries are stored uncompressed, so part XML is directly searchable
std::string package_bytes(const Workbook& wb) {
    std::filesystem::path path =
        std::filesystem::temp_directory_path() / "ssmi_test_package.xlsx";
    write_xlsx(wb, path);
    std::string bytes = ssmi_test::read_file(path.string());
    std::filesystem::remove(path);
    return bytes;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("xlsx package carries the expected structure") {
    Model m = ssmi_test::load_fixture_model("pricing.ssmi");
    std::string bytes = package_bytes(generate(m));

    CHECK(bytes.substr(0, 2) == "PK");
    CHECK(contains(bytes, "[Content_Types].xml"));
    CHECK(contains(bytes, "xl/workbook.xml"));
    CHECK(contains(bytes, "xl/styles.xml"));
    CHECK(contains(bytes, "xl/worksheets/sheet4.xml"));

    // defined names for all 16 variables plus the one entry cell
    for (const char* name :
         {"Price", "Profit", "DemParA", "DemParB", "Fixed_Cost", "Manufacturing_Cost",
          "Distribution", "Delivery_Cost", "Total_Demand", "Regional_Demand", "Total_Cost",
          "Regional_Fixed_Cost", "Variable_Cost", "Unit_Cost", "Revenue", "Total_Profit"}) {
        CAPTURE(name);
        CHECK(contains(bytes, "<definedName name=\"" + std::string(name) + "\">"));
    }
    CHECK(contains(bytes, "<definedName name=\"Price__entry\">Interface!$B$3</definedName>"));
    CHECK(contains(bytes, "<definedName name=\"Total_Demand\">Model!$B$6</definedName>"));
    CHECK(contains(bytes,
                   "<definedName name=\"Regional_Demand\">'Model Region'!$B$7:$D$7"));

    // formulas are stored without the leading '='
    CHECK(contains(bytes, "<c r=\"B7\" s=\"1\"><f>B5*B6</f>"));
    CHECK_FALSE(contains(bytes, "<f>=B5*B6</f>"));

    // the bold-italic style exists and definition rows use it
    CHECK(contains(bytes, "<font><b/><i/>"));
    CHECK(contains(bytes, "<c r=\"B6\" s=\"1\"><f>B3*B4^-B5</f>"));

    // cached values let the file display before recalculation
    CHECK(contains(bytes, "<v>13061.724102223026</v>"));
    CHECK(contains(bytes, "<calcPr fullCalcOnLoad=\"1\"/>"));

    // inline strings only, no shared-strings part
    CHECK(contains(bytes, "t=\"inlineStr\""));
    CHECK_FALSE(contains(bytes, "sharedStrings"));
}

TEST_CASE("minimal model exports a three-sheet package") {
    Model m = parse_model("param Only = 7\n");
    std::string bytes = package_bytes(generate(m));
    CHECK(contains(bytes, "xl/worksheets/sheet3.xml"));
    CHECK_FALSE(contains(bytes, "xl/worksheets/sheet4.xml"));
    CHECK(contains(bytes, "<definedName name=\"Only\">Parameters!$B$3</definedName>"));
}

TEST_CASE("xlsx export is deterministic") {
    Model m = ssmi_test::load_fixture_model("items.ssmi");
    Workbook wb = generate(m);
    CHECK(package_bytes(wb) == package_bytes(wb));
}
