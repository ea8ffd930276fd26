#pragma once

#include <map>
#include <string>

#include "ssmi/workbook.hpp"

namespace ssmi {

struct SheetCell {
    std::string sheet;
    CellPos pos;

    auto operator<=>(const SheetCell&) const = default;
};

class RecomputeError : public Error {
public:
    enum class Kind { CellCycle, NameIntersectionMiss, UnresolvedName, BadFormula };

    RecomputeError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// Evaluates every cell. Name semantics follow the workbook convention: a
// single-cell name is absolute; a 1xN name resolves to the cell sharing the
// referencing cell's column (implicit intersection). `entries` overrides the
// "<name>__entry" (or bare-name) cells before evaluation.
std::map<SheetCell, double> recompute(const Workbook& wb,
                                      const std::map<std::string, double>& entries = {});

}  // namespace ssmi
