#pragma once

#include "ssmi/model.hpp"
#include "ssmi/workbook.hpp"

namespace ssmi {

class LayoutOverflowError : public Error {
public:
    using Error::Error;
};

// Lays out a validated model as a 3-tier workbook:
//   Interface  - input entry cells (<Name>__entry) and output display cells,
//   Parameters - one row per Input/Parameter, carrying the canonical names,
//   Model      - definition blocks for scalar calculated variables,
//   Model <Dim>- definition blocks for repeating ones, one column per instance.
// Deterministic: the same model produces byte-identical JSON.
Workbook generate(const Model& m);

// Block placement order: first-use depth-first topological order over the
// declarations (keeps each block after the blocks it reads from).
std::vector<std::string> layout_order(const Model& m);

}  // namespace ssmi
