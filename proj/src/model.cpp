#include "ssmi/model.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace ssmi {

Expr Expr::num(double v) {
    Expr e;
    e.kind = Kind::Number;
    e.number = v;
    return e;
}

Expr Expr::ref(std::string canonical) {
    Expr e;
    e.kind = Kind::VarRef;
    e.name = std::move(canonical);
    return e;
}

Expr Expr::neg(Expr inner) {
    Expr e;
    e.kind = Kind::Neg;
    e.children.push_back(std::move(inner));
    return e;
}

Expr Expr::bin(char op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = Kind::BinOp;
    e.op = op;
    e.children.push_back(std::move(lhs));
    e.children.push_back(std::move(rhs));
    return e;
}

Expr Expr::sum(std::string canonical) {
    Expr e;
    e.kind = Kind::Agg;
    e.fn = AggFn::Sum;
    e.name = std::move(canonical);
    return e;
}

const Variable* Model::find(std::string_view canonical) const {
    for (const auto& v : variables)
        if (v.canonical_name == canonical) return &v;
    return nullptr;
}

int Model::index_of(std::string_view canonical) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
        if (variables[i].canonical_name == canonical) return static_cast<int>(i);
    return -1;
}

std::size_t Model::cardinality() const {
    return dimension ? dimension->instances.size() : 1;
}

namespace {

bool ident_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
           (c >= '0' && c <= '9') || c == '_';
}

bool all_whitespace(std::string_view s) {
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c); });
}

void collect_refs(const Expr& e, bool outside_agg_only,
                  std::vector<std::string>& out, std::set<std::string>& seen) {
    switch (e.kind) {
    case Expr::Kind::VarRef:
        if (seen.insert(e.name).second) out.push_back(e.name);
        break;
    case Expr::Kind::Agg:
        if (!outside_agg_only && seen.insert(e.name).second) out.push_back(e.name);
        break;
    default:
        for (const auto& c : e.children) collect_refs(c, outside_agg_only, out, seen);
        break;
    }
}

}  // namespace

std::string mangle(std::string_view label) {
    if (label.empty() || all_whitespace(label)) throw EmptyLabelError();
    std::string out;
    out.reserve(label.size() + 1);
    for (char c : label) out.push_back(ident_char(c) ? c : '_');
    if (out[0] >= '0' && out[0] <= '9') out.insert(out.begin(), '_');
    return out;
}

std::vector<std::string> referenced_vars(const Expr& e) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    collect_refs(e, false, out, seen);
    return out;
}

std::vector<std::string> referenced_vars_outside_agg(const Expr& e) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    collect_refs(e, true, out, seen);
    return out;
}

namespace {

void shape_walk(const Model& m, const Variable& v, const Expr& e,
                std::vector<ShapeViolation>& out) {
    switch (e.kind) {
    case Expr::Kind::VarRef: {
        const Variable* ref = m.find(e.name);
        if (!ref) break;  // unresolved refs are the parser's problem
        if (!v.repeating && ref->repeating) {
            out.push_back({v.canonical_name, e.name,
                           "scalar variable '" + v.canonical_name +
                               "' references repeating '" + e.name +
                               "' outside an aggregate"});
        }
        break;
    }
    case Expr::Kind::Agg: {
        const Variable* ref = m.find(e.name);
        if (ref && !ref->repeating) {
            out.push_back({v.canonical_name, e.name,
                           "aggregate over non-repeating '" + e.name + "'"});
        }
        break;
    }
    default:
        for (const auto& c : e.children) shape_walk(m, v, c, out);
        break;
    }
}

}  // namespace

std::vector<ShapeViolation> check_shapes(const Model& m) {
    std::vector<ShapeViolation> out;
    for (const auto& v : m.variables) {
        if (v.formula) shape_walk(m, v, *v.formula, out);
    }
    return out;
}

CycleError::CycleError(std::vector<std::string> cycle)
    : Error([&cycle] {
          std::ostringstream os;
          os << "dependency cycle:";
          for (const auto& n : cycle) os << " " << n;
          return os.str();
      }()),
      cycle_(std::move(cycle)) {}

std::vector<std::string> toposort(const Model& m) {
    const std::size_t n = m.variables.size();
    std::vector<std::vector<int>> dependents(n);  // u -> vars referencing u
    std::vector<int> pending(n, 0);               // unmet dependency count

    std::map<std::string, int> index;
    for (std::size_t i = 0; i < n; ++i) index[m.variables[i].canonical_name] = static_cast<int>(i);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = m.variables[i];
        if (!v.formula) continue;
        for (const auto& dep : referenced_vars(*v.formula)) {
            auto it = index.find(dep);
            if (it == index.end()) continue;
            dependents[it->second].push_back(static_cast<int>(i));
            ++pending[i];
        }
    }

    // key: Inputs/Parameters before Calculated, then declaration order
    auto key = [&](int i) {
        return std::pair<int, int>(is_given(m.variables[i].kind) ? 0 : 1, i);
    };
    std::priority_queue<std::pair<std::pair<int, int>, int>,
                        std::vector<std::pair<std::pair<int, int>, int>>,
                        std::greater<>>
        ready;
    for (std::size_t i = 0; i < n; ++i)
        if (pending[i] == 0) ready.push({key(static_cast<int>(i)), static_cast<int>(i)});

    std::vector<std::string> order;
    order.reserve(n);
    while (!ready.empty()) {
        int i = ready.top().second;
        ready.pop();
        order.push_back(m.variables[i].canonical_name);
        for (int d : dependents[i])
            if (--pending[d] == 0) ready.push({key(d), d});
    }

    if (order.size() != n) {
        // walk the unresolved remainder to produce one witness cycle
        std::vector<int> state(n, 0);  // 0 unseen, 1 on path, 2 done
        std::vector<int> path;
        std::vector<std::string> witness;
        auto dfs = [&](auto&& self, int i) -> bool {
            state[i] = 1;
            path.push_back(i);
            if (m.variables[i].formula) {
                for (const auto& dep : referenced_vars(*m.variables[i].formula)) {
                    auto it = index.find(dep);
                    if (it == index.end()) continue;
                    int j = it->second;
                    if (pending[j] == 0 && state[j] == 0) continue;  // resolved part
                    if (state[j] == 1) {
                        auto at = std::find(path.begin(), path.end(), j);
                        for (; at != path.end(); ++at)
                            witness.push_back(m.variables[*at].canonical_name);
                        return true;
                    }
                    if (state[j] == 0 && self(self, j)) return true;
                }
            }
            state[i] = 2;
            path.pop_back();
            return false;
        };
        for (std::size_t i = 0; i < n; ++i) {
            if (pending[i] > 0 && state[i] == 0 && dfs(dfs, static_cast<int>(i))) break;
        }
        throw CycleError(std::move(witness));
    }
    return order;
}

}  // namespace ssmi
