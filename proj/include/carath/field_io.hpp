#pragma once

#include <map>
#include <string>
#include <string_view>

#include "carath/field.hpp"

namespace carath {

/// Named evaluators for `(callback name R C N)` nodes.
using CallbackRegistry = std::map<std::string, CallbackFn, std::less<>>;

/// Canonical s-expression text; `parse_field(print_field(f))` is structurally
/// equal to f (numbers are written with 17 significant digits). Grammar in
/// docs/descriptor_format.md.
std::string print_field(const FieldDescriptor& f);
std::string print_expr(const ExprNode& e);

/// Throws ParseError with a 1-based line and column.
FieldDescriptor parse_field(std::string_view text, const CallbackRegistry* callbacks = nullptr);
ExprPtr parse_expr(std::string_view text, const CallbackRegistry* callbacks = nullptr);

/// Accepts either a full `(field ...)` form or a bare expression; a bare
/// expression becomes an LC field with p = 1 and the state dimension it reads
/// (1 when it reads none).
FieldDescriptor parse_field_or_expr(std::string_view text, const CallbackRegistry* callbacks = nullptr);

}  // namespace carath
