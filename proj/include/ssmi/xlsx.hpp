#pragma once

#include <filesystem>

#include "ssmi/workbook.hpp"

namespace ssmi {

class IoError : public Error {
public:
    using Error::Error;
};

// Minimal SpreadsheetML package: inline strings, one bold-italic style,
// definedNames in workbook.xml, formulas stored without the leading '='.
// Cached values come from recompute() when the workbook is computable;
// fullCalcOnLoad asks the application to recalculate either way.
void write_xlsx(const Workbook& wb, const std::filesystem::path& path);

}  // namespace ssmi
