#pragma once

#include <map>
#include <string>
#include <vector>

#include "ssmi/model.hpp"

namespace ssmi {

// Full-precision results; scalars hold one value, repeating variables one per
// dimension instance. Rounding is a display concern only.
struct Valuation {
    std::map<std::string, std::vector<double>> values;

    double scalar(const std::string& canonical) const;
    const std::vector<double>& vector(const std::string& canonical) const;
};

class EvalError : public Error {
public:
    enum class Kind { MissingInput, Domain, BadInput };

    EvalError(Kind kind, std::string variable, const std::string& message)
        : Error(message), kind_(kind), variable_(std::move(variable)) {}
    Kind kind() const { return kind_; }
    const std::string& variable() const { return variable_; }

private:
    Kind kind_;
    std::string variable_;
};

// Computes every variable in dependency order with IEEE doubles. Scalars
// broadcast across the dimension; SUM reduces a repeating vector; ^ is real
// exponentiation (0^0 = 1, the mathematical convention). Inputs not present
// in `inputs` fall back to their declared defaults.
Valuation evaluate(const Model& m, const std::map<std::string, double>& inputs = {});

}  // namespace ssmi
