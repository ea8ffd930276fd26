#include "ssmi/evaluator.hpp"

#include <cmath>
#include <fmt/format.h>

namespace ssmi {

double Valuation::scalar(const std::string& canonical) const {
    return values.at(canonical).at(0);
}

const std::vector<double>& Valuation::vector(const std::string& canonical) const {
    return values.at(canonical);
}

namespace {

class Engine {
public:
    Engine(const Model& m, const std::map<std::string, double>& inputs)
        : model_(m), inputs_(inputs), n_(m.cardinality()) {}

    Valuation run() {
        Valuation val;
        for (const auto& name : toposort(model_)) {
            const Variable& v = *model_.find(name);
            std::vector<double> out;
            if (is_given(v.kind)) {
                out = given_values(v);
            } else {
                std::size_t count = v.repeating ? n_ : 1;
                out.resize(count);
                for (std::size_t i = 0; i < count; ++i)
                    out[i] = eval(*v.formula, v.repeating ? static_cast<long>(i) : -1, val);
            }
            for (double x : out) {
                if (!std::isfinite(x))
                    throw EvalError(EvalError::Kind::Domain, v.canonical_name,
                                    fmt::format("non-finite result while computing '{}'",
                                                v.canonical_name));
            }
            val.values.emplace(v.canonical_name, std::move(out));
        }
        return val;
    }

private:
    std::vector<double> given_values(const Variable& v) const {
        auto it = inputs_.find(v.canonical_name);
        if (it != inputs_.end()) {
            if (v.kind != VariableKind::Input)
                throw EvalError(EvalError::Kind::BadInput, v.canonical_name,
                                fmt::format("'{}' is not an input variable", v.canonical_name));
            return std::vector<double>(v.repeating ? n_ : 1, it->second);
        }
        if (v.literals.empty())
            throw EvalError(EvalError::Kind::MissingInput, v.canonical_name,
                            fmt::format("no value and no default for input '{}'",
                                        v.canonical_name));
        return v.literals;
    }

    // instance < 0 evaluates in scalar context
    double eval(const Expr& e, long instance, const Valuation& val) const {
        switch (e.kind) {
        case Expr::Kind::Number:
            return e.number;
        case Expr::Kind::VarRef: {
            const auto& vec = val.values.at(e.name);
            if (vec.size() == 1) return vec[0];  // scalar broadcasts
            return vec.at(static_cast<std::size_t>(instance));
        }
        case Expr::Kind::Agg: {
            const auto& vec = val.values.at(e.name);
            double s = 0;
            for (double x : vec) s += x;
            return s;
        }
        case Expr::Kind::Neg:
            return -eval(e.children[0], instance, val);
        case Expr::Kind::BinOp: {
            double a = eval(e.children[0], instance, val);
            double b = eval(e.children[1], instance, val);
            switch (e.op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
            case '^': return std::pow(a, b);
            }
            break;
        }
        }
        throw Error("malformed expression node");
    }

    const Model& model_;
    const std::map<std::string, double>& inputs_;
    std::size_t n_;
};

}  // namespace

Valuation evaluate(const Model& m, const std::map<std::string, double>& inputs) {
    for (const auto& [name, value] : inputs) {
        const Variable* v = m.find(name);
        if (!v)
            throw EvalError(EvalError::Kind::BadInput, name,
                            fmt::format("unknown variable '{}'", name));
        if (v->kind != VariableKind::Input)
            throw EvalError(EvalError::Kind::BadInput, name,
                            fmt::format("'{}' is not an input variable", name));
        (void)value;
    }
    return Engine(m, inputs).run();
}

}  // namespace ssmi
