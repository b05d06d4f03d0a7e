#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace algebrokit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by parse_expr; `position` is the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg), position(position) {}
  std::size_t position;
};

// Raised on genuine singularities: division by zero, log of a nonpositive
// number, sqrt of a negative number, zero to a negative power.
class EvalError : public Error {
 public:
  using Error::Error;
};

namespace detail {
struct ExprNode;
}

// A scalar coefficient function over named chart coordinates.  Usually the
// result of parsing an expression string; charts derived by the toolkit
// (cotangent/conormal structure functions) carry closure-backed fields whose
// partials are taken by the same finite-difference path.
class ScalarField {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  ScalarField() = default;

  double eval(std::span<const double> point) const;
  double operator()(std::span<const double> point) const { return eval(point); }

  const std::vector<std::string>& variables() const { return vars_; }
  std::size_t arity() const { return vars_.size(); }

  // Original text for parsed fields, synthesized label otherwise.
  const std::string& source() const { return source_; }
  bool is_parsed() const { return ast_ != nullptr; }

  // Printable form of the ast; re-parsing it evaluates identically.
  // Only available for parsed fields.
  std::string pretty() const;

  friend ScalarField parse_expr(std::string_view, std::vector<std::string>);
  friend ScalarField constant_field(double, std::vector<std::string>);
  friend ScalarField coordinate_field(std::size_t, std::vector<std::string>);
  friend ScalarField derived_field(std::string, std::vector<std::string>, Fn);
  friend ScalarField remap_variables(const ScalarField&, std::vector<std::string>,
                                     const std::vector<std::size_t>&);
  friend ScalarField restrict_tail(const ScalarField&, std::size_t);
  friend ScalarField operator+(const ScalarField&, const ScalarField&);
  friend ScalarField operator-(const ScalarField&, const ScalarField&);
  friend ScalarField operator*(const ScalarField&, const ScalarField&);
  friend ScalarField operator*(double, const ScalarField&);

 private:
  std::vector<std::string> vars_;
  std::shared_ptr<const detail::ExprNode> ast_;  // null for closure-backed fields
  Fn fn_;                                        // set iff ast_ is null
  std::string source_;
};

// Parses `source` over the given coordinate names.  Grammar (docs/grammar.ebnf):
// + - * / with usual precedence and left associativity, unary minus, power
// with a literal integer exponent binding tighter than unary minus, and the
// functions sin cos exp log sqrt tanh.
ScalarField parse_expr(std::string_view source, std::vector<std::string> variables);

ScalarField constant_field(double value, std::vector<std::string> variables);
ScalarField coordinate_field(std::size_t index, std::vector<std::string> variables);
ScalarField derived_field(std::string label, std::vector<std::string> variables,
                          ScalarField::Fn fn);

// Reinterprets `f` over a larger variable set: old variable i becomes
// new variable index_map[i].
ScalarField remap_variables(const ScalarField& f, std::vector<std::string> new_variables,
                            const std::vector<std::size_t>& index_map);

// Substitutes 0 for all variables past the first `keep` and drops them.
ScalarField restrict_tail(const ScalarField& f, std::size_t keep);

inline constexpr double kDefaultFdStep = 1e-4;

// Fourth-order central difference
//   (f(x-2h) - 8 f(x-h) + 8 f(x+h) - f(x+2h)) / (12 h)
// in coordinate `index`.
double partial(const ScalarField& f, std::size_t index, std::span<const double> point,
               double step = kDefaultFdStep);

}  // namespace algebrokit
