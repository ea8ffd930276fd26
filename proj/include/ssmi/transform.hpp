#pragma once

#include <string>
#include <vector>

#include "ssmi/model.hpp"

namespace ssmi {

struct ComplexityFinding {
    std::string variable;
    std::vector<std::string> ops;  // operator/function tokens, encounter order
    int distinct_ops = 0;
    Severity severity = Severity::Warn;
};

// One finding per formula mixing more than one operator/function kind.
// Chained uses of a single operator (a+b+c) are fine; unary minus and SUM
// each count as their own kind.
std::vector<ComplexityFinding> complexity_check(const Model& m, bool strict = false);

class NameCollisionError : public Error {
public:
    using Error::Error;
};

// Rewrites every mixed formula into single-operator steps. Extracted
// subexpressions become Calculated variables "<Parent label> term <k>"
// (k in left-to-right depth-first order) inserted right before their parent.
Model decompose(const Model& m);

}  // namespace ssmi
