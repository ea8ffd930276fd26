#include "ssmi/transform.hpp"

#include <fmt/format.h>
#include <set>

namespace ssmi {

namespace {

void collect_ops(const Expr& e, std::vector<std::string>& ops, std::set<std::string>& seen) {
    switch (e.kind) {
    case Expr::Kind::BinOp: {
        std::string tok(1, e.op);
        if (seen.insert(tok).second) ops.push_back(tok);
        for (const auto& c : e.children) collect_ops(c, ops, seen);
        break;
    }
    case Expr::Kind::Neg:
        if (seen.insert("neg").second) ops.push_back("neg");
        collect_ops(e.children[0], ops, seen);
        break;
    case Expr::Kind::Agg:
        if (seen.insert("SUM").second) ops.push_back("SUM");
        break;
    default:
        break;
    }
}

bool is_leaf(const Expr& e) {
    return e.kind == Expr::Kind::Number || e.kind == Expr::Kind::VarRef;
}

// single operator application, single aggregate call, or a bare leaf
bool is_simple(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Number:
    case Expr::Kind::VarRef:
    case Expr::Kind::Agg:
        return true;
    case Expr::Kind::Neg:
        return is_leaf(e.children[0]);
    case Expr::Kind::BinOp:
        return is_leaf(e.children[0]) && is_leaf(e.children[1]);
    }
    return false;
}

}  // namespace

std::vector<ComplexityFinding> complexity_check(const Model& m, bool strict) {
    std::vector<ComplexityFinding> out;
    for (const auto& v : m.variables) {
        if (!v.formula) continue;
        ComplexityFinding f;
        std::set<std::string> seen;
        collect_ops(*v.formula, f.ops, seen);
        if (f.ops.size() < 2) continue;
        f.variable = v.canonical_name;
        f.distinct_ops = static_cast<int>(f.ops.size());
        f.severity = strict ? Severity::Error : Severity::Warn;
        out.push_back(std::move(f));
    }
    return out;
}

namespace {

class Decomposer {
public:
    explicit Decomposer(const Model& in) : in_(in) {
        for (const auto& v : in.variables) names_.insert(v.canonical_name);
    }

    Model run() {
        Model out;
        out.dimension = in_.dimension;
        for (const auto& v : in_.variables) {
            if (!v.formula || is_simple(*v.formula)) {
                out.variables.push_back(v);
                continue;
            }
            parent_ = &v;
            k_ = 0;
            extracted_.clear();
            Expr top = flatten_operands(*v.formula);
            for (auto& e : extracted_) out.variables.push_back(std::move(e));
            Variable rewritten = v;
            rewritten.formula = std::move(top);
            out.variables.push_back(std::move(rewritten));
        }
        return out;
    }

private:
    // keeps e's top operator, replacing non-leaf operands with new variables
    Expr flatten_operands(const Expr& e) {
        Expr out = e;
        for (auto& child : out.children) {
            if (!is_leaf(child)) child = extract(child);
        }
        return out;
    }

    Expr extract(const Expr& e) {
        Expr simple = flatten_operands(e);
        ++k_;
        Variable nv;
        nv.display_label = fmt::format("{} term {}", parent_->display_label, k_);
        nv.canonical_name = mangle(nv.display_label);
        if (names_.contains(nv.canonical_name))
            throw NameCollisionError(fmt::format(
                "generated name '{}' collides with an existing variable", nv.canonical_name));
        names_.insert(nv.canonical_name);
        nv.kind = VariableKind::Calculated;
        nv.repeating = expr_repeating(simple);
        nv.formula = std::move(simple);
        extracted_.push_back(std::move(nv));
        return Expr::ref(extracted_.back().canonical_name);
    }

    bool expr_repeating(const Expr& e) const {
        switch (e.kind) {
        case Expr::Kind::Number:
            return false;
        case Expr::Kind::VarRef: {
            if (const Variable* v = in_.find(e.name)) return v->repeating;
            for (const auto& x : extracted_)
                if (x.canonical_name == e.name) return x.repeating;
            return false;
        }
        case Expr::Kind::Agg:
            return false;  // aggregation reduces to a scalar
        default:
            for (const auto& c : e.children)
                if (expr_repeating(c)) return true;
            return false;
        }
    }

    const Model& in_;
    const Variable* parent_ = nullptr;
    int k_ = 0;
    std::vector<Variable> extracted_;
    std::set<std::string> names_;
};

}  // namespace

Model decompose(const Model& m) {
    return Decomposer(m).run();
}

}  // namespace ssmi
