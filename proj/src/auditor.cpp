#include "ssmi/auditor.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ssmi/evaluator.hpp"
#include "ssmi/parser.hpp"
#include "ssmi/recompute.hpp"

namespace ssmi {

std::string_view check_id_name(CheckId id) {
    switch (id) {
    case CheckId::A1: return "A1";
    case CheckId::A2: return "A2";
    case CheckId::A3: return "A3";
    case CheckId::A4: return "A4";
    case CheckId::A5: return "A5";
    case CheckId::A6: return "A6";
    case CheckId::A7: return "A7";
    case CheckId::A8: return "A8";
    case CheckId::A9: return "A9";
    }
    return "";
}

std::string Finding::cell() const {
    return a1(pos);
}

int AuditReport::errors() const {
    int n = 0;
    for (const auto& f : findings) n += f.severity == Severity::Error;
    return n;
}

int AuditReport::warnings() const {
    int n = 0;
    for (const auto& f : findings) n += f.severity == Severity::Warn;
    return n;
}

namespace {

enum class RowClass { Reference, Definition, LiteralOnly };

struct Block {
    std::set<int> ref_rows;
    int def_row = 0;
};

struct SheetAnalysis {
    const Sheet* sheet = nullptr;
    std::vector<Block> blocks;
    std::map<int, int> block_of_row;  // row -> index into blocks
    std::vector<std::vector<int>> runs;  // consecutive content rows
    std::map<int, int> run_of_row;
};

bool is_bare_name(const WExpr& e) { return e.kind == WExpr::Kind::Name; }
bool is_bare_cell(const WExpr& e) { return e.kind == WExpr::Kind::Cell; }

// a cell that merely forwards a value: a reference-row cell or "=B3"
bool is_passthrough(const CellContent& c) {
    return c.type == CellContent::Type::Formula && c.ast &&
           (is_bare_name(*c.ast) || is_bare_cell(*c.ast));
}

void walk_cells(const WExpr& e, const auto& fn) {
    if (e.kind == WExpr::Kind::Cell) fn(e.cell);
    for (const auto& c : e.children) walk_cells(c, fn);
}

void walk_names(const WExpr& e, const auto& fn) {
    if (e.kind == WExpr::Kind::Name) fn(e.name);
    for (const auto& c : e.children) walk_names(c, fn);
}

void collect_op_kinds(const WExpr& e, std::vector<std::string>& ops,
                      std::set<std::string>& seen) {
    switch (e.kind) {
    case WExpr::Kind::BinOp: {
        std::string tok(1, e.op);
        if (seen.insert(tok).second) ops.push_back(tok);
        break;
    }
    case WExpr::Kind::Neg:
        if (seen.insert("neg").second) ops.push_back("neg");
        break;
    case WExpr::Kind::SumName:
        if (seen.insert("SUM").second) ops.push_back("SUM");
        break;
    default:
        break;
    }
    for (const auto& c : e.children) collect_op_kinds(c, ops, seen);
}

class Auditor {
public:
    Auditor(const Workbook& wb, const Model* model, AuditOptions opt)
        : wb_(wb), model_(model), opt_(opt) {}

    AuditReport run() {
        for (const auto& sheet : wb_.sheets) {
            if (!is_model_kind(sheet.kind)) continue;
            SheetAnalysis sa = analyze(sheet);
            check_structure(sa);        // A1 (+ unparsable formulas)
            check_formulas(sa);         // A2, A3, A4, A5, A6
            check_tier_separation(sa);  // A8
            if (sheet.kind == SheetKind::ModelRepeating) check_copy_consistency(sa);  // A7
        }
        if (model_) check_recompute_equivalence();  // A9

        std::stable_sort(report_.findings.begin(), report_.findings.end(),
                         [](const Finding& a, const Finding& b) {
                             return std::tie(a.sheet, a.pos.row, a.pos.col, a.check) <
                                    std::tie(b.sheet, b.pos.row, b.pos.col, b.check);
                         });
        for (const auto& f : report_.findings) ++report_.summary[f.check];
        report_.pass = report_.errors() == 0;
        return std::move(report_);
    }

private:
    void add(CheckId check, Severity sev, const std::string& sheet, CellPos pos,
             std::string message) {
        report_.findings.push_back({check, sev, sheet, pos, std::move(message)});
    }

    RowClass classify_row(const Sheet& sheet, int row) const {
        bool any_formula = false;
        bool all_names = true;
        for (const auto& [pos, c] : sheet.cells) {
            if (pos.row != row) continue;
            if (c.type == CellContent::Type::Formula) {
                any_formula = true;
                if (!c.ast || !is_bare_name(*c.ast)) all_names = false;
            }
        }
        if (!any_formula) return RowClass::LiteralOnly;
        return all_names ? RowClass::Reference : RowClass::Definition;
    }

    SheetAnalysis analyze(const Sheet& sheet) const {
        SheetAnalysis sa;
        sa.sheet = &sheet;

        std::set<int> content_rows;
        for (const auto& [pos, c] : sheet.cells)
            if (c.type != CellContent::Type::Label) content_rows.insert(pos.row);

        int prev = -10;
        for (int row : content_rows) {
            if (row != prev + 1) sa.runs.emplace_back();
            sa.runs.back().push_back(row);
            sa.run_of_row[row] = static_cast<int>(sa.runs.size()) - 1;
            prev = row;
        }

        // a well-formed block is k>=0 reference rows then one definition row
        for (const auto& run : sa.runs) {
            Block b;
            bool broken = false;
            bool closed = false;
            for (int row : run) {
                RowClass rc = classify_row(sheet, row);
                if (rc == RowClass::LiteralOnly) continue;  // A8's problem
                if (closed) {
                    broken = true;
                    break;
                }
                if (rc == RowClass::Reference) {
                    b.ref_rows.insert(row);
                } else {
                    b.def_row = row;
                    closed = true;
                }
            }
            if (!broken && closed) {
                sa.blocks.push_back(b);
                int id = static_cast<int>(sa.blocks.size()) - 1;
                for (int r : b.ref_rows) sa.block_of_row[r] = id;
                sa.block_of_row[b.def_row] = id;
            }
        }
        return sa;
    }

    void check_structure(const SheetAnalysis& sa) {
        const Sheet& sheet = *sa.sheet;
        for (const auto& [pos, c] : sheet.cells) {
            if (c.type == CellContent::Type::Formula && !c.ast)
                add(CheckId::A1, Severity::Error, sheet.name, pos,
                    fmt::format("unparsable formula: {}", c.text));
        }
        for (const auto& run : sa.runs) {
            bool closed = false;
            bool reported_tail = false;
            int last_formula_row = 0;
            for (int row : run) {
                RowClass rc = classify_row(sheet, row);
                if (rc == RowClass::LiteralOnly) continue;
                last_formula_row = row;
                if (closed && !reported_tail) {
                    add(CheckId::A1, Severity::Error, sheet.name, first_formula_cell(sheet, row),
                        "formula rows continue after a definition row; blocks must be "
                        "reference rows, one definition row, then a blank row");
                    reported_tail = true;
                }
                if (rc == RowClass::Definition && !closed) closed = true;
            }
            if (!closed && last_formula_row != 0)
                add(CheckId::A1, Severity::Error, sheet.name,
                    first_formula_cell(sheet, last_formula_row),
                    "reference rows without a definition row");
        }
    }

    CellPos first_formula_cell(const Sheet& sheet, int row) const {
        for (const auto& [pos, c] : sheet.cells)
            if (pos.row == row && c.type == CellContent::Type::Formula) return pos;
        return {1, row};
    }

    const Block* block_at(const SheetAnalysis& sa, int row) const {
        auto it = sa.block_of_row.find(row);
        return it == sa.block_of_row.end() ? nullptr : &sa.blocks[it->second];
    }

    void check_formulas(const SheetAnalysis& sa) {
        const Sheet& sheet = *sa.sheet;
        for (const auto& [pos, c] : sheet.cells) {
            if (c.type != CellContent::Type::Formula || !c.ast) continue;
            const Block* block = block_at(sa, pos.row);
            bool is_definition = block && block->def_row == pos.row;

            // A6: no absolute or mixed references anywhere on model sheets
            walk_cells(*c.ast, [&](const CellRef& r) {
                if (r.col_abs || r.row_abs)
                    add(CheckId::A6, Severity::Error, sheet.name, pos,
                        fmt::format("absolute or mixed reference {}{}{}{}",
                                    r.col_abs ? "$" : "", col_letters(r.col),
                                    r.row_abs ? "$" : "", r.row));
            });

            if (is_definition) {
                // A2: definition formulas may not use bare names
                walk_names(*c.ast, [&](const std::string& n) {
                    add(CheckId::A2, Severity::Error, sheet.name, pos,
                        fmt::format("definition formula references name '{}'; names belong "
                                    "in reference rows",
                                    n));
                });
                // A5: one operator kind per formula
                std::vector<std::string> ops;
                std::set<std::string> seen;
                collect_op_kinds(*c.ast, ops, seen);
                if (ops.size() > 1 && pos.col == first_formula_cell(sheet, pos.row).col) {
                    std::string joined;
                    for (const auto& o : ops) joined += (joined.empty() ? "" : ", ") + o;
                    add(CheckId::A5, opt_.strict ? Severity::Error : Severity::Warn,
                        sheet.name, pos,
                        fmt::format("definition formula mixes operator kinds {{{}}}", joined));
                }
            }

            // A3 locality + A4 far/transitive references
            walk_cells(*c.ast, [&](const CellRef& r) {
                CellPos target{r.col, r.row};
                if (block) {
                    if (block->ref_rows.contains(target.row) || target.row == block->def_row) {
                        bool same_col = target.col == pos.col;
                        bool to_ref_row = block->ref_rows.contains(target.row);
                        if (is_definition && (!same_col || !to_ref_row))
                            add(CheckId::A3, Severity::Error, sheet.name, pos,
                                fmt::format("definition formula must use same-column "
                                            "references to its own reference rows; {} is not",
                                            a1(target)));
                        return;
                    }
                } else {
                    // malformed surroundings: stay lenient inside the own run
                    auto it = sa.run_of_row.find(pos.row);
                    if (it != sa.run_of_row.end()) {
                        const auto& rows = sa.runs[it->second];
                        if (std::find(rows.begin(), rows.end(), target.row) != rows.end())
                            return;
                    }
                }
                report_a4(sheet, pos, target);
            });
        }
    }

    void report_a4(const Sheet& sheet, CellPos at, CellPos target) {
        const CellContent* t = sheet.cell(target);
        if (t && is_passthrough(*t)) {
            add(CheckId::A4, Severity::Error, sheet.name, at,
                fmt::format("transitive reference: {} points at {}, where a value is "
                            "used, not where it is defined",
                            a1(at), a1(target)));
        } else {
            add(CheckId::A4, Severity::Error, sheet.name, at,
                fmt::format("far reference: {} reaches outside its definition block to {}",
                            a1(at), a1(target)));
        }
    }

    void check_tier_separation(const SheetAnalysis& sa) {
        for (const auto& [pos, c] : sa.sheet->cells) {
            if (c.type == CellContent::Type::Literal)
                add(CheckId::A8, Severity::Error, sa.sheet->name, pos,
                    fmt::format("literal value {} on a model sheet; inputs belong to the "
                                "Parameters tier",
                                format_number(c.value)));
        }
    }

    // Per-row R1C1 normal forms across data columns; partial copies show up
    // as empty cells on otherwise-formula rows.
    void check_copy_consistency(const SheetAnalysis& sa) {
        const Sheet& sheet = *sa.sheet;

        int width = 0;
        for (const auto& n : wb_.names)
            if (n.sheet == sheet.name) width = std::max(width, n.width);
        std::set<int> formula_rows;
        for (const auto& [pos, c] : sheet.cells) {
            if (c.type == CellContent::Type::Formula && pos.col >= 2) {
                formula_rows.insert(pos.row);
                width = std::max(width, pos.col - 1);
            }
        }
        if (width <= 1) return;

        for (int row : formula_rows) {
            std::vector<std::pair<int, std::string>> forms;
            for (int col = 2; col <= width + 1; ++col) {
                const CellContent* c = sheet.cell({col, row});
                std::string form;
                if (!c) {
                    form = "(empty)";
                } else {
                    switch (c->type) {
                    case CellContent::Type::Formula:
                        form = c->ast ? normalize_r1c1(*c->ast, {col, row})
                                      : "unparsable:" + c->text;
                        break;
                    case CellContent::Type::Literal:
                        form = "value(" + format_number(c->value) + ")";
                        break;
                    case CellContent::Type::Label:
                        form = "label(" + c->text + ")";
                        break;
                    }
                }
                forms.emplace_back(col, std::move(form));
            }

            std::map<std::string, int> freq;
            for (const auto& [col, form] : forms) ++freq[form];
            if (freq.size() <= 1) continue;

            // dominant form: highest frequency, ties to the leftmost column
            std::string dominant;
            int best = -1;
            for (const auto& [col, form] : forms) {
                int f = freq[form];
                if (f > best) {
                    best = f;
                    dominant = form;
                }
            }

            std::string deviants;
            CellPos first_deviant{0, row};
            for (const auto& [col, form] : forms) {
                if (form == dominant) continue;
                if (first_deviant.col == 0) first_deviant.col = col;
                deviants += (deviants.empty() ? "" : ", ") + col_letters(col);
            }
            add(CheckId::A7, Severity::Error, sheet.name, first_deviant,
                fmt::format("row {} is not a consistent copy: column(s) {} deviate from "
                            "the dominant formula shape {}",
                            row, deviants, dominant));
        }
    }

    void check_recompute_equivalence() {
        std::string fallback_sheet = wb_.sheets.empty() ? "" : wb_.sheets.front().name;
        for (const auto& s : wb_.sheets)
            if (is_model_kind(s.kind)) {
                fallback_sheet = s.name;
                break;
            }

        Valuation expected;
        std::map<SheetCell, double> actual;
        try {
            expected = evaluate(*model_);
            actual = recompute(wb_);
        } catch (const Error& e) {
            add(CheckId::A9, Severity::Error, fallback_sheet, {1, 1},
                fmt::format("recompute equivalence could not be checked: {}", e.what()));
            return;
        }

        for (const auto& v : model_->variables) {
            if (!is_calculated(v.kind)) continue;
            const DefinedName* n = wb_.find_name(v.canonical_name);
            if (!n) {
                add(CheckId::A9, Severity::Error, fallback_sheet, {1, 1},
                    fmt::format("no defined name for variable '{}'", v.canonical_name));
                continue;
            }
            const auto& vals = expected.vector(v.canonical_name);
            if (static_cast<int>(vals.size()) != n->width) {
                add(CheckId::A9, Severity::Error, n->sheet, n->first,
                    fmt::format("name '{}' spans {} cell(s) but the model value has {}",
                                v.canonical_name, n->width, vals.size()));
                continue;
            }
            for (int c = 0; c < n->width; ++c) {
                CellPos pos{n->first.col + c, n->first.row};
                auto it = actual.find({n->sheet, pos});
                if (it == actual.end()) {
                    add(CheckId::A9, Severity::Error, n->sheet, pos,
                        fmt::format("definition cell of '{}' has no computed value",
                                    v.canonical_name));
                    continue;
                }
                double a = vals[c], b = it->second;
                double tol = 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
                if (std::fabs(a - b) > tol)
                    add(CheckId::A9, Severity::Error, n->sheet, pos,
                        fmt::format("workbook value {} for '{}' disagrees with the model "
                                    "value {}",
                                    format_number(b), v.canonical_name, format_number(a)));
            }
        }
    }

    const Workbook& wb_;
    const Model* model_;
    AuditOptions opt_;
    AuditReport report_;
};

void render_r1c1(const WExpr& e, CellPos at, std::string& out);

int nprec(const WExpr& e) {
    switch (e.kind) {
    case WExpr::Kind::BinOp:
        switch (e.op) {
        case '+': case '-': return 1;
        case '*': case '/': return 2;
        case '^': return 4;
        }
        return 0;
    case WExpr::Kind::Neg: return 3;
    default: return 100;
    }
}

void render_r1c1(const WExpr& e, CellPos at, std::string& out) {
    switch (e.kind) {
    case WExpr::Kind::Number:
        out += format_number(e.number);
        break;
    case WExpr::Kind::Cell: {
        const CellRef& r = e.cell;
        out += r.row_abs ? fmt::format("R{}", r.row) : fmt::format("R[{}]", r.row - at.row);
        out += r.col_abs ? fmt::format("C{}", r.col) : fmt::format("C[{}]", r.col - at.col);
        break;
    }
    case WExpr::Kind::Name:
        out += e.name;
        break;
    case WExpr::Kind::SumName:
        out += "SUM(" + e.name + ")";
        break;
    case WExpr::Kind::Neg: {
        out += "-";
        const WExpr& c = e.children[0];
        if (nprec(c) < 100) {
            out += "(";
            render_r1c1(c, at, out);
            out += ")";
        } else {
            render_r1c1(c, at, out);
        }
        break;
    }
    case WExpr::Kind::BinOp: {
        int p = nprec(e);
        const WExpr& l = e.children[0];
        const WExpr& r = e.children[1];
        bool lp = nprec(l) < p || (nprec(l) == p && e.op == '^');
        bool rp = (nprec(r) < p || (nprec(r) == p && e.op != '^')) &&
                  !(e.op == '^' && r.kind == WExpr::Kind::Neg);
        if (lp) out += "(";
        render_r1c1(l, at, out);
        if (lp) out += ")";
        out.push_back(e.op);
        if (rp) out += "(";
        render_r1c1(r, at, out);
        if (rp) out += ")";
        break;
    }
    }
}

}  // namespace

std::string normalize_r1c1(const WExpr& e, CellPos at) {
    std::string out;
    render_r1c1(e, at, out);
    return out;
}

AuditReport audit(const Workbook& wb, const Model* model, AuditOptions opt) {
    return Auditor(wb, model, opt).run();
}

std::string report_text(const AuditReport& report) {
    std::ostringstream os;
    for (const auto& f : report.findings) {
        os << (f.severity == Severity::Error ? "ERROR " : "WARN  ") << check_id_name(f.check)
           << " '" << f.sheet << "'!" << f.cell() << ": " << f.message << "\n";
    }
    os << "checks:";
    if (report.summary.empty()) {
        os << " none triggered";
    } else {
        for (const auto& [check, count] : report.summary)
            os << " " << check_id_name(check) << "=" << count;
    }
    os << "\n";
    os << "verdict: " << (report.pass ? "pass" : "fail") << " (" << report.errors()
       << " error(s), " << report.warnings() << " warning(s))\n";
    return os.str();
}

std::string report_json(const AuditReport& report) {
    nlohmann::json root;
    root["findings"] = nlohmann::json::array();
    for (const auto& f : report.findings) {
        nlohmann::json jf;
        jf["check"] = std::string(check_id_name(f.check));
        jf["severity"] = f.severity == Severity::Error ? "error" : "warn";
        jf["sheet"] = f.sheet;
        jf["cell"] = f.cell();
        jf["message"] = f.message;
        root["findings"].push_back(std::move(jf));
    }
    root["verdict"] = report.pass ? "pass" : "fail";
    return root.dump(2) + "\n";
}

}  // namespace ssmi
