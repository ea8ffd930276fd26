#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssmi/model.hpp"
#include "ssmi/workbook.hpp"

namespace ssmi {

enum class CheckId { A1, A2, A3, A4, A5, A6, A7, A8, A9 };

std::string_view check_id_name(CheckId id);

struct Finding {
    CheckId check = CheckId::A1;
    Severity severity = Severity::Error;
    std::string sheet;
    CellPos pos;
    std::string message;

    std::string cell() const;  // "B14"
};

struct AuditReport {
    std::vector<Finding> findings;          // ordered (sheet, row, column, check)
    std::map<CheckId, int> summary;         // counts per check
    bool pass = true;                       // no Error-severity findings

    int errors() const;
    int warnings() const;
};

struct AuditOptions {
    bool strict = false;  // upgrades A5 complexity findings to Error
};

// Conformance checks A1..A9 (A9 only when a model is supplied):
//   A1 block structure, A2 name placement, A3 locality, A4 far/transitive
//   references, A5 formula complexity, A6 absolute/mixed references,
//   A7 copy consistency (R1C1 normal forms per row), A8 tier separation,
//   A9 recompute/evaluate equivalence at 1e-9 relative.
AuditReport audit(const Workbook& wb, const Model* model = nullptr, AuditOptions opt = {});

// Copy-equivalence normal form: relative refs as R[dr]C[dc] offsets from
// `at`, absolute parts as plain R<n>/C<n>, names verbatim.
std::string normalize_r1c1(const WExpr& e, CellPos at);

std::string report_text(const AuditReport& report);
std::string report_json(const AuditReport& report);

}  // namespace ssmi
