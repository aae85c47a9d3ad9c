#pragma once

#include <string>
#include <string_view>

#include "verity/sql/ast.hpp"

namespace verity::sql {

/// Parses one statement (optionally `;`-terminated) of the supported subset:
/// SELECT over comma-joined base and derived tables, INSERT ... VALUES /
/// INSERT ... SELECT, UPDATE with scalar-subquery SET clauses, and DELETE.
///
/// Identifiers are folded to lower case; string literals keep their case.
/// Throws SyntaxError (with position and expected tokens) on malformed input
/// and UnsupportedFeature for IN, ANY, EXISTS, GROUP BY, HAVING, joins written
/// with JOIN syntax and similar constructs outside the subset.
Query parse(std::string_view sql);

/// Parses a standalone SELECT. Used for synthesized queries.
SelectQuery parse_select(std::string_view sql);

/// Canonical SQL text for an AST. `parse(render(q)) == q` for every AST the
/// parser produces.
std::string render(const Query& query);
std::string render(const SelectQuery& query);
std::string render(const Expr& expr);
std::string render(const Predicate& predicate);

}  // namespace verity::sql
