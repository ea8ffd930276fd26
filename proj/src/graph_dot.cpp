#include "ssmi/graph_dot.hpp"

#include <sstream>

namespace ssmi {

namespace {

const char* shape_of(VariableKind k) {
    switch (k) {
    case VariableKind::Input: return "box";
    case VariableKind::Parameter: return "triangle";
    case VariableKind::Calculated: return "circle";
    case VariableKind::Output: return "oval";
    }
    return "circle";
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

void emit_node(std::ostream& os, const Variable& v, const char* indent) {
    os << indent << "\"" << dot_escape(v.canonical_name) << "\" [shape=" << shape_of(v.kind)
       << ", label=\"" << dot_escape(v.display_label) << "\"];\n";
}

}  // namespace

std::string to_dot(const Model& m) {
    std::ostringstream os;
    os << "digraph model {\n";
    os << "  rankdir=LR;\n";

    bool any_repeating = false;
    for (const auto& v : m.variables) any_repeating |= v.repeating;
    if (any_repeating) {
        os << "  subgraph cluster_" << mangle(m.dimension->name) << " {\n";
        os << "    style=dashed;\n";
        os << "    label=\"" << dot_escape(m.dimension->name) << "\";\n";
        for (const auto& v : m.variables)
            if (v.repeating) emit_node(os, v, "    ");
        os << "  }\n";
    }
    for (const auto& v : m.variables)
        if (!v.repeating) emit_node(os, v, "  ");

    for (const auto& v : m.variables) {
        if (!v.formula) continue;
        for (const auto& dep : referenced_vars(*v.formula))
            os << "  \"" << dot_escape(dep) << "\" -> \"" << dot_escape(v.canonical_name)
               << "\";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace ssmi
