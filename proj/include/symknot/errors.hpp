#pragma once

#include <stdexcept>
#include <string>

namespace symknot {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define SYMKNOT_ERROR(name, tag)                                                    \
    struct name : error {                                                           \
        name() : error(tag) {}                                                      \
        explicit name(const std::string& what) : error(std::string(tag) + ": " + what) {} \
    }

SYMKNOT_ERROR(not_divisible, "NotDivisible");
SYMKNOT_ERROR(singular_matrix, "Singular");
SYMKNOT_ERROR(parse_error, "ParseError");
SYMKNOT_ERROR(validation_error, "ValidationError");
SYMKNOT_ERROR(non_bipartite_faces, "NonBipartiteFaces");
SYMKNOT_ERROR(state_space_too_large, "StateSpaceTooLarge");
SYMKNOT_ERROR(invalid_branch, "InvalidBranch");
SYMKNOT_ERROR(invalid_model, "InvalidModel");
SYMKNOT_ERROR(invalid_diagram, "InvalidDiagram");
SYMKNOT_ERROR(invalid_designation, "InvalidDesignation");
SYMKNOT_ERROR(bad_index, "BadIndex");
SYMKNOT_ERROR(site_mismatch, "SiteMismatch");
SYMKNOT_ERROR(unsupported_signs, "UnsupportedSigns");
SYMKNOT_ERROR(not_unimodular, "NotUnimodular");
SYMKNOT_ERROR(non_integral, "NonIntegral");
SYMKNOT_ERROR(not_laurent, "NotLaurent");

#undef SYMKNOT_ERROR

} // namespace symknot
