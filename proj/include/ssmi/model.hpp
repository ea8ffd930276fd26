#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ssmi {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Severity { Warn, Error };

enum class VariableKind { Input, Parameter, Calculated, Output };

// Input/Parameter carry literals; Calculated/Output carry a formula.
inline bool is_given(VariableKind k) {
    return k == VariableKind::Input || k == VariableKind::Parameter;
}
inline bool is_calculated(VariableKind k) {
    return k == VariableKind::Calculated || k == VariableKind::Output;
}

struct Dimension {
    std::string name;
    std::vector<std::string> instances;  // unique, length >= 1
    bool operator==(const Dimension&) const = default;
};

enum class AggFn { Sum };

// Formula AST. Value semantics; children carry the recursion.
struct Expr {
    enum class Kind { Number, VarRef, Neg, BinOp, Agg };

    Kind kind = Kind::Number;
    double number = 0.0;      // Number
    std::string name;         // VarRef: canonical name; Agg: argument variable
    char op = 0;              // BinOp: one of + - * / ^
    AggFn fn = AggFn::Sum;    // Agg
    std::vector<Expr> children;  // Neg: 1; BinOp: 2

    static Expr num(double v);
    static Expr ref(std::string canonical);
    static Expr neg(Expr e);
    static Expr bin(char op, Expr lhs, Expr rhs);
    static Expr sum(std::string canonical);

    bool operator==(const Expr&) const = default;
};

struct Variable {
    std::string display_label;
    std::string canonical_name;  // mangle(display_label), unique per Model
    VariableKind kind = VariableKind::Input;
    bool repeating = false;
    std::optional<Expr> formula;   // Calculated/Output only
    std::vector<double> literals;  // Input default / Parameter values

    bool operator==(const Variable&) const = default;
};

struct Model {
    std::optional<Dimension> dimension;
    std::vector<Variable> variables;  // declaration order

    const Variable* find(std::string_view canonical) const;
    int index_of(std::string_view canonical) const;  // -1 if absent
    std::size_t cardinality() const;                 // 1 when no dimension

    bool operator==(const Model&) const = default;
};

class EmptyLabelError : public Error {
public:
    EmptyLabelError() : Error("label is empty after trimming") {}
};

// Replaces every character outside [A-Za-z0-9_] with '_'; prefixes '_' if the
// result starts with a digit. Idempotent.
std::string mangle(std::string_view label);

struct ShapeViolation {
    std::string variable;  // variable whose formula breaks the shape rule
    std::string operand;   // offending operand (canonical name)
    std::string message;
};

// Empty iff every formula respects broadcast/aggregate shape rules.
std::vector<ShapeViolation> check_shapes(const Model& m);

class CycleError : public Error {
public:
    explicit CycleError(std::vector<std::string> cycle);
    const std::vector<std::string>& cycle() const { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

// Dependency order: every variable after everything it references.
// Inputs/Parameters first, ties broken by declaration order.
std::vector<std::string> toposort(const Model& m);

// Canonical names referenced by e, first-appearance order, aggregates included.
std::vector<std::string> referenced_vars(const Expr& e);

// VarRefs outside aggregate calls only (these get reference rows in a block).
std::vector<std::string> referenced_vars_outside_agg(const Expr& e);

}  // namespace ssmi
