#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "qexp/error.hpp"
#include "qexp/sd/word.hpp"

namespace qexp::sd {

// Result of parsing "tr(U1 U2') tr(U2 U1')": the freely reduced query plus the
// number of traces that reduced to tr(1), each of which contributes a factor N.
struct ParsedExpression {
  ExpectationQuery query;
  int trivial_traces = 0;
};

class SyntaxError : public ValidationError {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : ValidationError(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  ParsedExpression parse() {
    ParsedExpression out;
    skip_space();
    if (at_end()) fail("expected 'tr(' but found end of input");
    while (!at_end()) {
      TraceWord w = parse_trace();
      out.query.traces.push_back(std::move(w));
      skip_space();
    }
    out.trivial_traces = reduce_query(out.query);
    return out;
  }

 private:
  TraceWord parse_trace() {
    const std::size_t start = pos_;
    if (text_.substr(pos_, 3) != "tr(") fail("expected 'tr('");
    pos_ += 3;
    TraceWord w;
    while (true) {
      skip_space();
      if (at_end()) fail("unterminated trace: expected ')' but found end of input");
      if (text_[pos_] == ')') {
        if (w.empty()) throw SyntaxError("empty trace 'tr()' at position " + std::to_string(start), start);
        ++pos_;
        return w;
      }
      w.push_back(parse_letter());
    }
  }

  Letter parse_letter() {
    if (text_[pos_] != 'U') fail("expected a letter 'U<n>'");
    ++pos_;
    const std::size_t digits = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) fail(at_end() ? "expected generator index but found end of input" : "expected generator index");
    if (pos_ - digits > 6) fail("generator index too large");
    const int g = std::stoi(std::string(text_.substr(digits, pos_ - digits)));
    if (g < 1) fail("generator index must be >= 1");
    bool inverted = false;
    if (!at_end() && text_[pos_] == '\'') {
      inverted = true;
      ++pos_;
    }
    return {g, inverted};
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }

  [[noreturn]] void fail(const std::string& what) const {
    const std::string where = at_end() ? "end of input" : "position " + std::to_string(pos_);
    throw SyntaxError("syntax error at " + where + ": " + what, pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Grammar: expr := trace+ ; trace := "tr(" letter+ ")" ; letter := "U" integer ["'"].
inline ParsedExpression parse_trace_expr(std::string_view text) { return detail::ExprParser(text).parse(); }

}  // namespace qexp::sd
